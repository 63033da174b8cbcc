#include "gas/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "gas/error.hpp"

namespace gas {

namespace {

constexpr const char* kMagic = "gaswsd-checkpoint";
constexpr int kVersion = 1;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw CheckpointError(std::string("bad number '") + s + "' in " + what);
  return v;
}

void write_tensor_line(std::ofstream& out, const Tensor& t) {
  for (std::size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << fmt_double(t.data[i]);
  out << '\n';
}

struct Reader {
  std::ifstream in;
  std::string path;
  std::size_t lineno = 0;

  explicit Reader(const std::string& p) : in(p), path(p) {
    if (!in) throw CheckpointError("cannot open checkpoint '" + p + "'");
  }

  std::string next() {
    std::string line;
    if (!std::getline(in, line))
      throw CheckpointError(path + ": truncated at line " + std::to_string(lineno + 1));
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }
};

}  // namespace

void save_checkpoint(const std::string& path, ModelParams& params) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  const ModelConfig& c = params.config;
  out << kMagic << ' ' << kVersion << '\n';
  out << "config hidden " << c.hidden << '\n';
  out << "config passes " << c.passes << '\n';
  out << "config update " << update_rule_name(c.update) << '\n';
  out << "config depth " << c.expansion_depth << '\n';
  out << "config extended " << (c.extended ? 1 : 0) << '\n';
  out << "config dropout " << fmt_double(c.dropout_rate) << '\n';
  out << "config max_gloss " << c.max_gloss_tokens << '\n';
  out << "config max_expansion " << c.max_expansion << '\n';
  out << "config seed " << c.seed << '\n';
  out << "embedding_dim " << params.embeddings.dim() << '\n';
  out << "vocab " << params.embeddings.vocab_size() << '\n';
  for (const auto& w : params.embeddings.vocab()) out << w << '\n';
  params.for_each_group([&](const std::string& name, Tensor& t, bool) {
    out << "param " << name;
    out << ' ' << t.rank();
    for (std::size_t d : t.shape) out << ' ' << d;
    out << '\n';
    write_tensor_line(out, t);
  });
  out << "end\n";
  if (!out) throw CheckpointError("write error on checkpoint '" + path + "'");
}

ModelParams load_checkpoint(const std::string& path) {
  Reader r(path);

  {
    std::istringstream head(r.next());
    std::string magic;
    int version = -1;
    head >> magic >> version;
    if (magic != kMagic) throw CheckpointError(path + ": not a checkpoint file");
    if (version != kVersion)
      throw CheckpointError(path + ": unsupported checkpoint version " + std::to_string(version));
  }

  ModelConfig cfg;
  std::size_t emb_dim = 0, vocab_size = 0;
  std::string line;
  // config block, then embedding_dim and vocab
  for (;;) {
    line = r.next();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "config") {
      std::string field, value;
      ls >> field >> value;
      if (field == "hidden") cfg.hidden = std::stoull(value);
      else if (field == "passes") cfg.passes = std::stoull(value);
      else if (field == "update") {
        auto u = update_rule_from_name(value);
        if (!u) throw CheckpointError(path + ": unknown update rule '" + value + "'");
        cfg.update = *u;
      } else if (field == "depth") cfg.expansion_depth = std::stoull(value);
      else if (field == "extended") cfg.extended = value == "1";
      else if (field == "dropout") cfg.dropout_rate = parse_double(value, "config dropout");
      else if (field == "max_gloss") cfg.max_gloss_tokens = std::stoull(value);
      else if (field == "max_expansion") cfg.max_expansion = std::stoull(value);
      else if (field == "seed") cfg.seed = std::stoull(value);
      else throw CheckpointError(path + ": unknown config field '" + field + "'");
    } else if (key == "embedding_dim") {
      ls >> emb_dim;
    } else if (key == "vocab") {
      ls >> vocab_size;
      break;
    } else {
      throw CheckpointError(path + ": unexpected line '" + line + "'");
    }
  }
  if (emb_dim == 0) throw CheckpointError(path + ": missing embedding_dim");

  std::vector<std::string> vocab;
  vocab.reserve(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) vocab.push_back(r.next());

  // parameter records into a name-keyed staging map
  std::map<std::string, Tensor> staged;
  for (;;) {
    line = r.next();
    if (line == "end") break;
    std::istringstream ls(line);
    std::string key, name;
    std::size_t rank = 0;
    ls >> key >> name >> rank;
    if (key != "param" || ls.fail())
      throw CheckpointError(path + ":" + std::to_string(r.lineno) + ": expected a param record");
    std::vector<std::size_t> shape(rank);
    std::size_t total = 1;
    for (auto& d : shape) {
      ls >> d;
      total *= d;
    }
    if (ls.fail()) throw CheckpointError(path + ":" + std::to_string(r.lineno) + ": bad shape");
    Tensor t = Tensor::zeros(shape);
    std::istringstream ds(r.next());
    std::string num;
    for (std::size_t i = 0; i < total; ++i) {
      if (!(ds >> num))
        throw CheckpointError(path + ":" + std::to_string(r.lineno) + ": not enough values for " + name);
      t.data[i] = parse_double(num, name.c_str());
    }
    if (ds >> num)
      throw CheckpointError(path + ":" + std::to_string(r.lineno) + ": extra values for " + name);
    if (!staged.emplace(name, std::move(t)).second)
      throw CheckpointError(path + ": duplicate param '" + name + "'");
  }

  // rebuild the embedding table from staged vectors
  auto vec_it = staged.find("embedding/vectors");
  if (vec_it == staged.end()) throw CheckpointError(path + ": missing embedding/vectors");
  if (vec_it->second.shape != std::vector<std::size_t>{vocab.size(), emb_dim})
    throw CheckpointError(path + ": embedding/vectors shape mismatch");
  ModelParams params = ModelParams::init(cfg, EmbeddingTable::make(emb_dim, vocab, vec_it->second));

  // experts exist only as staged names; materialize them before assignment
  for (const auto& [name, t] : staged) {
    if (name.rfind("wordexpert/", 0) != 0 || name.size() < 3) continue;
    if (name.compare(name.size() - 2, 2, "/W") != 0) continue;
    std::string stem = name.substr(11, name.size() - 13);  // <lemma>/<pos>
    auto slash = stem.rfind('/');
    if (slash == std::string::npos || slash + 2 != stem.size())
      throw CheckpointError(path + ": malformed expert name '" + name + "'");
    auto pos = pos_from_code(stem[slash + 1]);
    if (!pos) throw CheckpointError(path + ": bad pos in expert name '" + name + "'");
    params.ensure_expert(stem.substr(0, slash), *pos, t.rows());
  }

  std::size_t assigned = 0;
  params.for_each_group([&](const std::string& name, Tensor& t, bool) {
    auto it = staged.find(name);
    if (it == staged.end()) throw CheckpointError(path + ": missing param '" + name + "'");
    if (it->second.shape != t.shape)
      throw CheckpointError(path + ": shape mismatch for '" + name + "': file " +
                            shape_str(it->second) + ", model " + shape_str(t));
    t = it->second;
    ++assigned;
  });
  if (assigned != staged.size()) {
    for (auto& [name, t] : staged) {
      bool found = false;
      params.for_each_group([&](const std::string& n, Tensor&, bool) { found = found || n == name; });
      if (!found) throw CheckpointError(path + ": unknown param '" + name + "'");
    }
  }
  return params;
}

}  // namespace gas
