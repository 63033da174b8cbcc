#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gas/lexicon.hpp"
#include "gas/tensor.hpp"

namespace gas {

struct LabeledInstance {
  std::string instance_id;
  std::vector<std::string> tokens;  // lowercased
  std::size_t target_index = 0;
  std::string target_lemma;
  Pos target_pos = Pos::Noun;
  std::optional<SenseId> gold_sense;
  bool monosemous = false;
};

// Frozen word vectors. Lookup is total: unknown words map to a shared unk
// vector generated from a fixed seed, identical across runs.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dim, std::vector<std::string> vocab, Tensor vectors, Tensor unk);

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const Tensor& vectors() const { return vectors_; }  // [V x D]
  const Tensor& unk() const { return unk_; }

  // Pointer into the table (or unk); always valid, length dim().
  const double* lookup(const std::string& word) const;
  Tensor lookup_tensor(const std::string& word) const;

  static EmbeddingTable make(std::size_t dim, std::vector<std::string> vocab, Tensor vectors);

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  Tensor vectors_;
  Tensor unk_;
};

// Corpus TSV: instance_id \t target_index \t gold_sense_or_dash \t
// target_lemma \t target_pos \t tokens (single-space separated).
// Lines starting with '#' are comments.
std::vector<LabeledInstance> load_corpus(const std::string& path, const SenseInventory& inv);
void write_corpus(const std::vector<LabeledInstance>& corpus, const std::string& path);

// Embeddings file: `word v1 v2 ... vD` per line. D comes from the first
// line unless expected_dim pins it.
EmbeddingTable load_embeddings(const std::string& path, std::optional<std::size_t> expected_dim = {});

// (x_1 .. x_{t-1}) and (x_{t+1} .. x_T); either half may be empty.
std::pair<std::vector<std::string>, std::vector<std::string>> context_halves(const LabeledInstance& inst);

}  // namespace gas
