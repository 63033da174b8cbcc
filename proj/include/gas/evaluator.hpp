#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gas/corpus.hpp"
#include "gas/model.hpp"
#include "gas/trainer.hpp"

namespace gas {

struct PosCounts {
  std::size_t total = 0;
  std::size_t correct = 0;
};

struct EvalReport {
  std::size_t attempted = 0;
  std::size_t correct = 0;
  std::size_t total_gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<Pos, PosCounts> per_pos;
  std::size_t backoff_count = 0;
  std::size_t gold_absent = 0;  // gold sense not in the inventory's candidate list
};

// Most-frequent-sense table from training golds: per (lemma, pos), the
// sense with the highest count, ties broken by inventory rank. Invariant
// under reordering of the corpus.
using MfsPredictor = std::map<WordKey, SenseId>;
MfsPredictor mfs_baseline(const std::vector<LabeledInstance>& train_corpus, const SenseInventory& inv);

// MFS answer when the table covers the target, inventory rank-1 otherwise.
SenseId backoff_predict(const LabeledInstance& inst, const SenseInventory& inv,
                        const MfsPredictor* mfs);

// Full-corpus scoring. Every gold-labeled instance is answered: model
// prediction when the target has a classifier entry, backoff otherwise
// (tallied in backoff_count), so attempted = total_gold and P = R = F1.
// An instance without a gold sense is a contract violation.
EvalReport evaluate(const ModelParams& params, const SenseInventory& inv,
                    const std::vector<LabeledInstance>& corpus, const MfsPredictor* mfs = nullptr,
                    std::size_t workers = 1);

// Accuracy of a fixed per-target predictor over a gold-labeled corpus.
EvalReport evaluate_predictor(const std::function<SenseId(const LabeledInstance&)>& predict,
                              const SenseInventory& inv, const std::vector<LabeledInstance>& corpus);

struct AttentionTrace {
  std::string instance_id;
  std::vector<SenseId> sense_ids;
  std::vector<Tensor> attention;  // one length-|s| row per pass
  SenseId chosen;
  std::optional<SenseId> gold;
};

AttentionTrace trace_instance(const ModelParams& params, const SenseInventory& inv,
                              const LabeledInstance& inst);

// Tab-separated trace file: a '#' gloss header per (instance, sense), then
// one `instance_id  pass  sense_id  alpha` row per attention entry.
// `preamble` lines are written first, each as a '#' comment.
void export_traces(const ModelParams& params, const SenseInventory& inv,
                   const std::vector<LabeledInstance>& corpus, const std::string& path,
                   const std::vector<std::string>& preamble = {});

struct SweepRow {
  std::size_t passes = 0;
  double test_f1 = 0.0;
  std::size_t best_epoch = 0;
};

// Trains one model per pass count (identical seed and data) and scores it
// on the test corpus.
std::vector<SweepRow> sweep_passes(const ModelConfig& base, const SenseInventory& inv,
                                   const std::vector<LabeledInstance>& train_set,
                                   const std::vector<LabeledInstance>& dev_set,
                                   const std::vector<LabeledInstance>& test_set,
                                   const EmbeddingTable& embeddings, const TrainConfig& tcfg,
                                   std::size_t min_passes, std::size_t max_passes,
                                   std::ostream* log = nullptr);

// Human-readable key/value block plus the one-line machine summary.
std::string format_report(const EvalReport& r);
std::string format_summary_line(const EvalReport& r);

}  // namespace gas
