#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "gas/corpus.hpp"
#include "gas/model.hpp"

namespace gas {

struct TrainConfig {
  double lr = 0.001;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  bool shuffle = true;
  std::size_t workers = 1;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double dev_accuracy = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
  std::size_t trained_instances = 0;    // polysemous gold-labeled instances per epoch
  std::size_t skipped_monosemous = 0;
};

// Mean cross-entropy and accuracy over gold-labeled dev instances.
// Monosemous targets and targets without a classifier entry are excluded
// from the loss; accuracy covers every gold-labeled instance, answering
// unseen targets with the inventory rank-1 sense. Reduction is ordered by
// instance index, so the result is identical for any worker count.
std::pair<double, double> validation_metrics(const ModelParams& params, const SenseInventory& inv,
                                             const std::vector<LabeledInstance>& dev,
                                             std::size_t workers = 1);

// Full training run: initializes parameters from (config, embeddings),
// creates classifier entries for every polysemous training target, then
// runs mini-batch Adam with per-epoch seeded shuffling and early stopping
// on validation loss. Returns the best-epoch parameter snapshot.
// `log` (when given) receives one line per epoch:
//   epoch E train_loss X dev_loss Y dev_acc Z seconds S
std::pair<ModelParams, TrainReport> train(const ModelConfig& model_config,
                                          const SenseInventory& inv,
                                          const std::vector<LabeledInstance>& train_set,
                                          const std::vector<LabeledInstance>& dev_set,
                                          EmbeddingTable embeddings, const TrainConfig& cfg,
                                          std::ostream* log = nullptr);

}  // namespace gas
