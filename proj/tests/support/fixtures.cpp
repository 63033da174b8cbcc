#include "fixtures.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "gas/error.hpp"

namespace gas::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::uint64_t counter = 0;
  dir_ = fs::temp_directory_path() / ("gaswsd-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(dir_, ec);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

SenseRecord rec(std::string id, std::string lemma, Pos pos, std::string gloss,
                std::vector<SenseId> hypers = {}, std::vector<SenseId> hypos = {}) {
  SenseRecord r;
  r.sense_id = std::move(id);
  r.lemma = std::move(lemma);
  r.pos = pos;
  std::istringstream iss(gloss);
  std::string tok;
  while (iss >> tok) r.gloss.push_back(tok);
  r.hypernyms = std::move(hypers);
  r.hyponyms = std::move(hypos);
  return r;
}

}  // namespace

SenseInventory tiny_inventory() {
  SenseInventory inv;
  inv.add(rec("bank%n:1", "bank", Pos::Noun, "sloping land beside water", {"slope%n:1"}, {"riverbank%n:1"}));
  inv.add(rec("bank%n:2", "bank", Pos::Noun, "financial institution that lends money", {"institution%n:1"}));
  inv.add(rec("slope%n:1", "slope", Pos::Noun, "ground that forms an incline", {"land%n:1"}));
  inv.add(rec("land%n:1", "land", Pos::Noun, "solid part of the surface"));
  inv.add(rec("institution%n:1", "institution", Pos::Noun, "organization founded for a purpose", {},
              {"riverbank%n:1"}));
  inv.add(rec("riverbank%n:1", "riverbank", Pos::Noun, "bank of a river"));
  inv.add(rec("run%v:1", "run", Pos::Verb, "move fast on foot", {"move%v:1"}));
  inv.add(rec("run%v:2", "run", Pos::Verb, "operate or manage a business"));
  inv.add(rec("move%v:1", "move", Pos::Verb, "change position"));
  inv.add(rec("bright%a:1", "bright", Pos::Adj, "emitting much light"));
  inv.validate_edges();
  return inv;
}

SenseInventory random_dag_inventory(Rng& rng, std::size_t nodes, double edge_prob) {
  std::vector<SenseRecord> recs(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    recs[i] = rec("s" + std::to_string(i) + "%n:1", "w" + std::to_string(i), Pos::Noun,
                  "gloss" + std::to_string(i));
  }
  auto sample_targets = [&](std::size_t from) {
    std::vector<SenseId> out;
    for (std::size_t j = from + 1; j < nodes; ++j)
      if (rng.uniform() < edge_prob) out.push_back(recs[j].sense_id);
    rng.shuffle(out);  // edge order is data, not index order
    return out;
  };
  for (std::size_t i = 0; i < nodes; ++i) {
    recs[i].hypernyms = sample_targets(i);
    recs[i].hyponyms = sample_targets(i);
  }
  SenseInventory inv;
  for (auto& r : recs) inv.add(std::move(r));
  inv.validate_edges();
  return inv;
}

EmbeddingTable make_embeddings(const std::vector<std::string>& words, std::size_t dim,
                               std::uint64_t seed) {
  Rng rng(seed);
  Tensor vecs = Tensor::zeros({words.size(), dim});
  for (auto& x : vecs.data) x = rng.uniform(-0.5, 0.5);
  return EmbeddingTable::make(dim, words, std::move(vecs));
}

std::vector<std::string> collect_vocab(const std::vector<LabeledInstance>& corpus,
                                       const SenseInventory& inv) {
  std::set<std::string> seen;
  for (const auto& inst : corpus)
    for (const auto& t : inst.tokens) seen.insert(t);
  for (const auto& id : inv.ordered_ids())
    for (const auto& t : inv.record(id).gloss) seen.insert(t);
  return {seen.begin(), seen.end()};
}

LabeledInstance make_instance(std::string id, std::vector<std::string> tokens, std::size_t target,
                              std::string lemma, Pos pos, std::string gold, const SenseInventory& inv) {
  LabeledInstance inst;
  inst.instance_id = std::move(id);
  inst.tokens = std::move(tokens);
  inst.target_index = target;
  inst.target_lemma = std::move(lemma);
  inst.target_pos = pos;
  if (!gold.empty()) inst.gold_sense = gold;
  inst.monosemous = inv.senses_of(inst.target_lemma, pos).size() == 1;
  return inst;
}

}  // namespace gas::testing
