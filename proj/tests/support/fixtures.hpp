#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gas/corpus.hpp"
#include "gas/lexicon.hpp"
#include "gas/rng.hpp"

namespace gas::testing {

// Unique scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  std::filesystem::path dir_;
};

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Small hand-built noun/verb inventory with a two-level hypernym chain and
// a shared descendant reachable from both sides.
SenseInventory tiny_inventory();

// Random DAG over `nodes` noun senses; both relation lists point only at
// higher-numbered senses, so either side terminates. Glosses are one token.
SenseInventory random_dag_inventory(Rng& rng, std::size_t nodes, double edge_prob);

// Deterministic random embeddings for the given vocabulary.
EmbeddingTable make_embeddings(const std::vector<std::string>& words, std::size_t dim,
                               std::uint64_t seed);

// All distinct tokens appearing in corpus sentences and inventory glosses.
std::vector<std::string> collect_vocab(const std::vector<LabeledInstance>& corpus,
                                       const SenseInventory& inv);

LabeledInstance make_instance(std::string id, std::vector<std::string> tokens, std::size_t target,
                              std::string lemma, Pos pos, std::string gold, const SenseInventory& inv);

}  // namespace gas::testing
