#include "gas/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "gas/error.hpp"
#include "gas/nn.hpp"
#include "gas/parallel.hpp"
#include "gas/rng.hpp"
#include "gas/tape.hpp"

namespace gas {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (patience > max_epochs) throw ValidationError("patience must not exceed max_epochs");
  if (max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
  if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
}

namespace {

// Per-instance gradient contribution, keyed by group name.
struct InstanceGrads {
  double loss = 0.0;
  std::map<std::string, Tensor> grads;
};

InstanceGrads instance_gradients(const ModelParams& params, const SenseInventory& inv,
                                 const LabeledInstance& inst, std::uint64_t mask_seed) {
  Tape tape;
  ModelGraph graph(tape, params, inv);

  const auto& senses = inv.senses_of(inst.target_lemma, inst.target_pos);
  DropoutPlan plan;
  const DropoutPlan* plan_ptr = nullptr;
  if (params.config.dropout_rate > 0.0) {
    Rng rng(mask_seed);
    plan.context_mask = dropout_mask(2 * params.config.hidden, params.config.dropout_rate, rng, true);
    for (std::size_t i = 0; i < senses.size(); ++i)
      plan.gloss_masks.push_back(
          dropout_mask(2 * params.config.hidden, params.config.dropout_rate, rng, true));
    plan_ptr = &plan;
  }

  auto s = graph.score(inst, plan_ptr);
  auto it = std::find(s.senses.begin(), s.senses.end(), *inst.gold_sense);
  if (it == s.senses.end())
    throw ValidationError("instance '" + inst.instance_id + "': gold sense not a candidate");
  Var loss = tape.cross_entropy_logits(s.mixed, static_cast<std::size_t>(it - s.senses.begin()));

  InstanceGrads out;
  out.loss = tape.value(loss)[0];
  if (!std::isfinite(out.loss))
    throw NumericError("non-finite loss on instance '" + inst.instance_id + "'");
  tape.backward(loss);
  for (const auto& [name, var] : graph.touched_leaves()) {
    const Tensor& g = tape.grad(var);
    if (g.size() == 0) continue;  // leaf never reached the loss
    if (!g.all_finite())
      throw NumericError("non-finite gradient for '" + name + "' on instance '" + inst.instance_id +
                         "'");
    out.grads[name] = g;
  }
  return out;
}

struct DevOutcome {
  double loss = 0.0;
  bool in_loss = false;
  bool correct = false;
  bool counted = false;
};

DevOutcome dev_instance(const ModelParams& params, const SenseInventory& inv,
                        const LabeledInstance& inst) {
  DevOutcome out;
  if (!inst.gold_sense) return out;
  out.counted = true;
  const auto& senses = inv.senses_of(inst.target_lemma, inst.target_pos);
  if (inst.monosemous) {
    out.correct = senses[0] == *inst.gold_sense;
    return out;
  }
  if (!params.find_expert(inst.target_lemma, inst.target_pos)) {
    out.correct = senses[0] == *inst.gold_sense;  // rank-1 fallback
    return out;
  }
  PredictionDistribution dist = score(params, inv, inst);
  out.correct = dist.predicted() == *inst.gold_sense;
  auto it = std::find(dist.sense_ids.begin(), dist.sense_ids.end(), *inst.gold_sense);
  out.loss = -std::log(std::max(dist.probs[it - dist.sense_ids.begin()], 1e-12));
  out.in_loss = true;
  return out;
}

}  // namespace

std::pair<double, double> validation_metrics(const ModelParams& params, const SenseInventory& inv,
                                             const std::vector<LabeledInstance>& dev,
                                             std::size_t workers) {
  std::function<DevOutcome(std::size_t)> fn = [&](std::size_t i) {
    return dev_instance(params, inv, dev[i]);
  };
  std::vector<DevOutcome> outs = parallel_map_ordered<DevOutcome>(dev.size(), workers, fn);
  double loss_sum = 0.0;
  std::size_t loss_n = 0, correct = 0, counted = 0;
  for (const DevOutcome& o : outs) {
    if (!o.counted) continue;
    ++counted;
    correct += o.correct;
    if (o.in_loss) {
      loss_sum += o.loss;
      ++loss_n;
    }
  }
  double loss = loss_n ? loss_sum / static_cast<double>(loss_n) : 0.0;
  double acc = counted ? static_cast<double>(correct) / static_cast<double>(counted) : 0.0;
  return {loss, acc};
}

std::pair<ModelParams, TrainReport> train(const ModelConfig& model_config, const SenseInventory& inv,
                                          const std::vector<LabeledInstance>& train_set,
                                          const std::vector<LabeledInstance>& dev_set,
                                          EmbeddingTable embeddings, const TrainConfig& cfg,
                                          std::ostream* log) {
  cfg.validate();
  if (train_set.empty()) throw ValidationError("training corpus is empty");
  if (dev_set.empty()) throw ValidationError("dev corpus is empty");

  ModelConfig mc = model_config;
  ModelParams params = ModelParams::init(mc, std::move(embeddings));

  TrainReport report;
  std::vector<std::size_t> trainable;
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    const LabeledInstance& inst = train_set[i];
    if (!inst.gold_sense) continue;
    if (inst.monosemous) {
      ++report.skipped_monosemous;
      continue;
    }
    const auto& senses = inv.senses_of(inst.target_lemma, inst.target_pos);
    params.ensure_expert(inst.target_lemma, inst.target_pos, senses.size());
    trainable.push_back(i);
  }
  if (trainable.empty())
    throw ValidationError("no trainable instances: every gold-labeled target is monosemous");
  report.trained_instances = trainable.size();

  // Optimizer state over every trainable group; embeddings stay out.
  std::vector<ParamGroup> groups;
  std::map<std::string, std::size_t> group_index;
  params.for_each_group([&](const std::string& name, Tensor& t, bool is_trainable) {
    if (!is_trainable) return;
    group_index[name] = groups.size();
    groups.push_back(ParamGroup{name, &t, true, {}, {}});
  });
  AdamConfig adam;
  adam.lr = cfg.lr;

  ModelParams best = params.clone();
  double best_loss = std::numeric_limits<double>::infinity();
  std::uint64_t step = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> order = trainable;
    if (cfg.shuffle) {
      Rng rng(Rng::derive(cfg.seed, "shuffle/epoch" + std::to_string(epoch)));
      rng.shuffle(order);
    }

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::size_t b = end - start;
      std::function<InstanceGrads(std::size_t)> fn = [&](std::size_t k) {
        const LabeledInstance& inst = train_set[order[start + k]];
        std::uint64_t mask_seed =
            Rng::derive(cfg.seed, "dropout/e" + std::to_string(epoch) + "/" + inst.instance_id);
        return instance_gradients(params, inv, inst, mask_seed);
      };
      std::vector<InstanceGrads> per_instance =
          parallel_map_ordered<InstanceGrads>(b, cfg.workers, fn);

      std::vector<Tensor> grads(groups.size());
      for (std::size_t gi = 0; gi < groups.size(); ++gi) grads[gi] = Tensor::zeros(groups[gi].tensor->shape);
      const double scale = 1.0 / static_cast<double>(b);
      for (const InstanceGrads& ig : per_instance) {
        epoch_loss += ig.loss;
        for (const auto& [name, g] : ig.grads) {
          Tensor& acc = grads[group_index.at(name)];
          for (std::size_t j = 0; j < g.size(); ++j) acc.data[j] += scale * g.data[j];
        }
      }
      adam_step(groups, grads, adam, ++step);
      for (const ParamGroup& pg : groups)
        if (!pg.tensor->all_finite())
          throw NumericError("non-finite parameter in group '" + pg.name + "' after update " +
                             std::to_string(step));
    }

    auto [dev_loss, dev_acc] = validation_metrics(params, inv, dev_set, cfg.workers);
    const auto t1 = std::chrono::steady_clock::now();

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(order.size());
    stats.dev_loss = dev_loss;
    stats.dev_accuracy = dev_acc;
    stats.seconds = std::chrono::duration<double>(t1 - t0).count();
    report.epochs.push_back(stats);
    if (log)
      (*log) << "epoch " << epoch << " train_loss " << stats.train_loss << " dev_loss " << dev_loss
             << " dev_acc " << dev_acc << " seconds " << stats.seconds << "\n";

    if (dev_loss < best_loss) {
      best_loss = dev_loss;
      report.best_epoch = epoch;
      best = params.clone();
    }
    if (epoch - report.best_epoch >= cfg.patience) {
      report.stopped_early = true;
      break;
    }
  }
  return {std::move(best), std::move(report)};
}

}  // namespace gas
