#include "gas/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gas/error.hpp"
#include "gas/rng.hpp"

namespace gas {

namespace {

// The unk vector is pinned to this seed, independent of the run seed, so
// out-of-vocabulary lookups agree across runs and checkpoints.
constexpr std::uint64_t kUnkSeed = 0x00db5eedULL;

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim, std::vector<std::string> vocab, Tensor vectors, Tensor unk)
    : dim_(dim), vocab_(std::move(vocab)), vectors_(std::move(vectors)), unk_(std::move(unk)) {
  for (std::size_t i = 0; i < vocab_.size(); ++i) index_[vocab_[i]] = i;
}

EmbeddingTable EmbeddingTable::make(std::size_t dim, std::vector<std::string> vocab, Tensor vectors) {
  Rng rng(kUnkSeed);
  Tensor unk = Tensor::zeros({dim});
  for (auto& x : unk.data) x = rng.uniform(-0.1, 0.1);
  return EmbeddingTable(dim, std::move(vocab), std::move(vectors), std::move(unk));
}

const double* EmbeddingTable::lookup(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return unk_.data.data();
  return vectors_.data.data() + it->second * dim_;
}

Tensor EmbeddingTable::lookup_tensor(const std::string& word) const {
  const double* p = lookup(word);
  return Tensor{{dim_}, std::vector<double>(p, p + dim_)};
}

std::vector<LabeledInstance> load_corpus(const std::string& path, const SenseInventory& inv) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file '" + path + "'");
  std::vector<LabeledInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line);
    if (fields.size() != 6)
      throw ParseError(path, lineno,
                       "expected 6 tab-separated columns, got " + std::to_string(fields.size()));
    LabeledInstance inst;
    inst.instance_id = fields[0];
    std::size_t idx = 0;
    auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), idx);
    if (ec != std::errc{} || p != fields[1].data() + fields[1].size())
      throw ParseError(path, lineno, "bad target index '" + fields[1] + "'");
    inst.target_index = idx;
    inst.target_lemma = lowercase(fields[3]);
    auto pos = fields[4].size() == 1 ? pos_from_code(fields[4][0]) : std::nullopt;
    if (!pos) throw ParseError(path, lineno, "bad pos code '" + fields[4] + "'");
    inst.target_pos = *pos;
    std::istringstream toks(fields[5]);
    std::string tok;
    while (toks >> tok) inst.tokens.push_back(lowercase(tok));
    if (inst.tokens.empty()) throw ParseError(path, lineno, "empty token list");
    if (inst.target_index >= inst.tokens.size())
      throw ParseError(path, lineno,
                       "target index " + std::to_string(inst.target_index) + " out of range for " +
                           std::to_string(inst.tokens.size()) + " tokens");
    const auto& candidates = inv.senses_of(inst.target_lemma, inst.target_pos);
    if (candidates.empty())
      throw ValidationError("instance '" + inst.instance_id + "': no inventory senses for " +
                            inst.target_lemma + "/" + pos_name(inst.target_pos));
    if (fields[2] != "-") {
      inst.gold_sense = fields[2];
      if (std::find(candidates.begin(), candidates.end(), *inst.gold_sense) == candidates.end())
        throw ValidationError("instance '" + inst.instance_id + "': gold sense '" + *inst.gold_sense +
                              "' is not a candidate for " + inst.target_lemma + "/" +
                              pos_name(inst.target_pos));
    }
    inst.monosemous = candidates.size() == 1;
    out.push_back(std::move(inst));
  }
  return out;
}

void write_corpus(const std::vector<LabeledInstance>& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write corpus file '" + path + "'");
  for (const auto& inst : corpus) {
    out << inst.instance_id << '\t' << inst.target_index << '\t'
        << (inst.gold_sense ? *inst.gold_sense : "-") << '\t' << inst.target_lemma << '\t'
        << pos_code(inst.target_pos) << '\t';
    for (std::size_t i = 0; i < inst.tokens.size(); ++i) out << (i ? " " : "") << inst.tokens[i];
    out << '\n';
  }
}

EmbeddingTable load_embeddings(const std::string& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open embeddings file '" + path + "'");
  std::vector<std::string> vocab;
  std::vector<double> values;
  std::size_t dim = expected_dim.value_or(0);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string word;
    iss >> word;
    std::vector<double> vec;
    double v;
    while (iss >> v) vec.push_back(v);
    if (vec.empty()) throw ParseError(path, lineno, "no values for word '" + word + "'");
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim)
      throw ParseError(path, lineno,
                       "dimension " + std::to_string(vec.size()) + " does not match expected " +
                           std::to_string(dim));
    vocab.push_back(lowercase(word));
    values.insert(values.end(), vec.begin(), vec.end());
  }
  if (vocab.empty()) throw ParseError("embeddings file '" + path + "' is empty");
  Tensor vectors{{vocab.size(), dim}, std::move(values)};
  return EmbeddingTable::make(dim, std::move(vocab), std::move(vectors));
}

std::pair<std::vector<std::string>, std::vector<std::string>> context_halves(const LabeledInstance& inst) {
  std::vector<std::string> left(inst.tokens.begin(), inst.tokens.begin() + inst.target_index);
  std::vector<std::string> right(inst.tokens.begin() + inst.target_index + 1, inst.tokens.end());
  return {std::move(left), std::move(right)};
}

}  // namespace gas
