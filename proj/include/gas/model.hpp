#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gas/corpus.hpp"
#include "gas/lexicon.hpp"
#include "gas/lstm.hpp"
#include "gas/tape.hpp"
#include "gas/tensor.hpp"

namespace gas {

enum class UpdateRule { Linear, Concatenation };

const char* update_rule_name(UpdateRule r);
std::optional<UpdateRule> update_rule_from_name(const std::string& s);

struct ModelConfig {
  std::size_t hidden = 256;
  std::size_t passes = 3;
  UpdateRule update = UpdateRule::Concatenation;
  std::size_t expansion_depth = 4;
  bool extended = true;  // false: original gloss only, relation fusion bypassed
  double dropout_rate = 0.5;
  std::size_t max_gloss_tokens = 32;
  std::size_t max_expansion = 0;  // per-side cap on expanded glosses, 0 = unlimited
  std::uint64_t seed = 0;

  void validate() const;
};

struct WordKey {
  std::string lemma;
  Pos pos = Pos::Noun;
  bool operator<(const WordKey& o) const {
    return lemma != o.lemma ? lemma < o.lemma : static_cast<int>(pos) < static_cast<int>(o.pos);
  }
  bool operator==(const WordKey& o) const { return lemma == o.lemma && pos == o.pos; }
};

// Per-word classifier: a row per candidate sense, plus the mixing logit.
struct WordExpert {
  Tensor w;    // [|s| x 2n]
  Tensor b;    // [|s|]
  Tensor rho;  // scalar; lambda = sigmoid(rho)
};

struct ModelParams {
  ModelConfig config;
  LstmCellParams ctx_fwd, ctx_bwd;      // context encoder, input D
  LstmCellParams gloss_fwd, gloss_bwd;  // gloss encoder, shared across glosses, input D
  LstmCellParams fus_fwd, fus_bwd;      // relation fusion over gloss vectors, input 2n (extended only)
  Tensor mem_h;                         // [2n x 2n], linear rule
  Tensor mem_w;                         // [2n x 6n], concatenation rule
  Tensor mem_b;                         // [2n], concatenation rule
  std::map<WordKey, WordExpert> experts;
  EmbeddingTable embeddings;

  static ModelParams init(const ModelConfig& config, EmbeddingTable embeddings);

  WordExpert& ensure_expert(const std::string& lemma, Pos pos, std::size_t sense_count);
  const WordExpert* find_expert(const std::string& lemma, Pos pos) const;

  // Canonical group enumeration: encoders, memory weights, then experts in
  // sorted key order, then frozen embeddings. Checkpoints, Adam state and
  // grad-check all key off these names.
  void for_each_group(const std::function<void(const std::string&, Tensor&, bool trainable)>& fn);

  ModelParams clone() const;
};

// One memory pass as recorded for inspection. `memory` is the updated
// vector after the pass; the final pass keeps the memory it was scored
// against (no update is computed after it).
struct MemoryStateVal {
  std::size_t pass = 0;  // 1-based
  Tensor logits;         // e^k
  Tensor attention;      // alpha^k
  Tensor summary;        // u^k
  Tensor memory;         // m^k
};

struct PredictionDistribution {
  std::vector<SenseId> sense_ids;
  Tensor probs;
  Tensor score_c;
  Tensor score_g;
  double lambda = 0.0;
  std::vector<MemoryStateVal> trace;

  std::size_t argmax() const;  // lowest index wins ties
  const SenseId& predicted() const { return sense_ids[argmax()]; }
};

// Pre-sampled inverted-dropout masks for one instance (training only).
struct DropoutPlan {
  Tensor context_mask;
  std::vector<Tensor> gloss_masks;  // one per candidate sense, candidate order
};

// Tape-level forward pass. Registers parameter leaves on first use and
// remembers them for gradient extraction.
class ModelGraph {
 public:
  ModelGraph(Tape& tape, const ModelParams& params, const SenseInventory& inv);

  Var encode_context(const LabeledInstance& inst);
  Var encode_gloss(const std::vector<std::string>& tokens);
  // Final per-sense vector: relation fusion over the expanded gloss list
  // when the model is extended, the plain gloss encoding otherwise.
  Var sense_vector(const SenseId& id);

  struct ScoreOut {
    std::vector<SenseId> senses;
    std::vector<Var> logits_per_pass;     // e^1 .. e^T
    std::vector<Var> attention_per_pass;  // alpha^1 .. alpha^T
    std::vector<Var> summary_per_pass;    // u^1 .. u^T
    std::vector<Var> memory_per_pass;     // m^1 .. m^{T-1}
    Var context;                          // c (post-dropout)
    Var score_c;
    Var score_g;
    Var lambda;
    Var mixed;  // lambda*score_c + (1-lambda)*score_g
    bool has_expert = false;
  };

  // Full scoring graph. When the target has no classifier entry:
  // require_expert && polysemous -> UnseenTargetError; otherwise the
  // classifier branch runs with zero scores and lambda = 1/2, which leaves
  // monosemous outputs and attention traces well defined.
  ScoreOut score(const LabeledInstance& inst, const DropoutPlan* dropout = nullptr,
                 bool require_expert = true);

  const std::vector<std::pair<std::string, Var>>& touched_leaves() const { return touched_; }

 private:
  Tape& tape_;
  const ModelParams& params_;
  const SenseInventory& inv_;
  Tape::CellVars ctx_fwd_, ctx_bwd_, gloss_fwd_, gloss_bwd_, fus_fwd_, fus_bwd_;
  Var mem_h_{}, mem_w_{}, mem_b_{};
  std::vector<std::pair<std::string, Var>> touched_;

  std::vector<Var> embed(const std::vector<std::string>& tokens);
  Var update_memory(Var m_prev, Var u, Var c);
};

// Inference-path scoring (no dropout). Throws UnseenTargetError for a
// polysemous target without a classifier entry.
PredictionDistribution score(const ModelParams& params, const SenseInventory& inv,
                             const LabeledInstance& inst);

// Like score() but never throws for missing classifier entries; used for
// attention-trace export where only the memory pipeline is needed.
PredictionDistribution attention_trace(const ModelParams& params, const SenseInventory& inv,
                                       const LabeledInstance& inst);

// Cross-entropy of the gold sense under the mixed distribution.
double instance_loss(const ModelParams& params, const SenseInventory& inv, const LabeledInstance& inst);

}  // namespace gas
