#include "gas/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gas/error.hpp"
#include "gas/parallel.hpp"

namespace gas {

MfsPredictor mfs_baseline(const std::vector<LabeledInstance>& train_corpus,
                          const SenseInventory& inv) {
  std::map<WordKey, std::map<SenseId, std::size_t>> counts;
  for (const auto& inst : train_corpus) {
    if (!inst.gold_sense) continue;
    counts[WordKey{inst.target_lemma, inst.target_pos}][*inst.gold_sense] += 1;
  }
  MfsPredictor out;
  for (const auto& [key, by_sense] : counts) {
    const auto& ranked = inv.senses_of(key.lemma, key.pos);
    // walk in inventory order so count ties resolve to the earlier rank
    SenseId best;
    std::size_t best_count = 0;
    for (const SenseId& id : ranked) {
      auto it = by_sense.find(id);
      if (it == by_sense.end()) continue;
      if (it->second > best_count) {
        best = id;
        best_count = it->second;
      }
    }
    if (best_count > 0) out[key] = best;
  }
  return out;
}

SenseId backoff_predict(const LabeledInstance& inst, const SenseInventory& inv,
                        const MfsPredictor* mfs) {
  const auto& senses = inv.senses_of(inst.target_lemma, inst.target_pos);
  if (senses.empty())
    throw ValidationError("instance '" + inst.instance_id + "': no candidate senses for '" +
                          inst.target_lemma + "/" + pos_code(inst.target_pos) + "'");
  if (mfs) {
    auto it = mfs->find(WordKey{inst.target_lemma, inst.target_pos});
    if (it != mfs->end()) return it->second;
  }
  return senses[0];
}

namespace {

struct InstanceResult {
  bool correct = false;
  bool backoff = false;
  bool gold_absent = false;
  Pos pos = Pos::Noun;
};

EvalReport reduce_results(const std::vector<InstanceResult>& results) {
  EvalReport r;
  for (const auto& it : results) {
    ++r.total_gold;
    ++r.attempted;
    r.correct += it.correct;
    r.backoff_count += it.backoff;
    r.gold_absent += it.gold_absent;
    auto& pc = r.per_pos[it.pos];
    ++pc.total;
    pc.correct += it.correct;
  }
  if (r.attempted) r.precision = static_cast<double>(r.correct) / static_cast<double>(r.attempted);
  if (r.total_gold) r.recall = static_cast<double>(r.correct) / static_cast<double>(r.total_gold);
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

void require_gold(const LabeledInstance& inst) {
  if (!inst.gold_sense)
    throw ValidationError("instance '" + inst.instance_id + "' has no gold sense; evaluation needs labels");
}

}  // namespace

EvalReport evaluate(const ModelParams& params, const SenseInventory& inv,
                    const std::vector<LabeledInstance>& corpus, const MfsPredictor* mfs,
                    std::size_t workers) {
  for (const auto& inst : corpus) require_gold(inst);
  std::function<InstanceResult(std::size_t)> fn = [&](std::size_t i) {
    const LabeledInstance& inst = corpus[i];
    InstanceResult res;
    res.pos = inst.target_pos;
    const auto& senses = inv.senses_of(inst.target_lemma, inst.target_pos);
    res.gold_absent = std::find(senses.begin(), senses.end(), *inst.gold_sense) == senses.end();
    SenseId answer;
    if (inst.monosemous) {
      answer = senses[0];
    } else if (params.find_expert(inst.target_lemma, inst.target_pos)) {
      answer = score(params, inv, inst).predicted();
    } else {
      answer = backoff_predict(inst, inv, mfs);
      res.backoff = true;
    }
    res.correct = !res.gold_absent && answer == *inst.gold_sense;
    return res;
  };
  return reduce_results(parallel_map_ordered<InstanceResult>(corpus.size(), workers, fn));
}

EvalReport evaluate_predictor(const std::function<SenseId(const LabeledInstance&)>& predict,
                              const SenseInventory& inv, const std::vector<LabeledInstance>& corpus) {
  std::vector<InstanceResult> results;
  results.reserve(corpus.size());
  for (const auto& inst : corpus) {
    require_gold(inst);
    InstanceResult res;
    res.pos = inst.target_pos;
    const auto& senses = inv.senses_of(inst.target_lemma, inst.target_pos);
    res.gold_absent = std::find(senses.begin(), senses.end(), *inst.gold_sense) == senses.end();
    res.correct = !res.gold_absent && predict(inst) == *inst.gold_sense;
    results.push_back(res);
  }
  return reduce_results(results);
}

AttentionTrace trace_instance(const ModelParams& params, const SenseInventory& inv,
                              const LabeledInstance& inst) {
  PredictionDistribution dist = attention_trace(params, inv, inst);
  AttentionTrace out;
  out.instance_id = inst.instance_id;
  out.sense_ids = dist.sense_ids;
  for (const auto& st : dist.trace) out.attention.push_back(st.attention);
  out.chosen = dist.predicted();
  out.gold = inst.gold_sense;
  return out;
}

void export_traces(const ModelParams& params, const SenseInventory& inv,
                   const std::vector<LabeledInstance>& corpus, const std::string& path,
                   const std::vector<std::string>& preamble) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write trace file '" + path + "'");
  char buf[40];
  for (const auto& line : preamble) out << "# " << line << '\n';
  for (const auto& inst : corpus) {
    AttentionTrace tr = trace_instance(params, inv, inst);
    for (const auto& id : tr.sense_ids) {
      const SenseRecord& rec = inv.record(id);
      out << "# " << tr.instance_id << ' ' << id << ':';
      for (const auto& tok : rec.gloss) out << ' ' << tok;
      out << '\n';
    }
    for (std::size_t pass = 0; pass < tr.attention.size(); ++pass) {
      for (std::size_t i = 0; i < tr.sense_ids.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", tr.attention[pass][i]);
        out << tr.instance_id << '\t' << (pass + 1) << '\t' << tr.sense_ids[i] << '\t' << buf << '\n';
      }
    }
  }
  if (!out) throw ValidationError("write error on trace file '" + path + "'");
}

std::vector<SweepRow> sweep_passes(const ModelConfig& base, const SenseInventory& inv,
                                   const std::vector<LabeledInstance>& train_set,
                                   const std::vector<LabeledInstance>& dev_set,
                                   const std::vector<LabeledInstance>& test_set,
                                   const EmbeddingTable& embeddings, const TrainConfig& tcfg,
                                   std::size_t min_passes, std::size_t max_passes,
                                   std::ostream* log) {
  if (min_passes < 1 || min_passes > max_passes)
    throw ValidationError("pass sweep needs 1 <= min <= max");
  MfsPredictor mfs = mfs_baseline(train_set, inv);
  std::vector<SweepRow> rows;
  for (std::size_t t = min_passes; t <= max_passes; ++t) {
    ModelConfig cfg = base;
    cfg.passes = t;
    auto [params, report] = train(cfg, inv, train_set, dev_set, embeddings, tcfg, nullptr);
    EvalReport ev = evaluate(params, inv, test_set, &mfs, tcfg.workers);
    SweepRow row;
    row.passes = t;
    row.test_f1 = ev.f1;
    row.best_epoch = report.best_epoch;
    rows.push_back(row);
    if (log) (*log) << "passes " << t << " f1 " << ev.f1 << " best_epoch " << report.best_epoch << "\n";
  }
  return rows;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream out;
  out << "attempted " << r.attempted << '\n';
  out << "correct " << r.correct << '\n';
  out << "total_gold " << r.total_gold << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", r.precision);
  out << "precision " << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", r.recall);
  out << "recall " << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", r.f1);
  out << "f1 " << buf << '\n';
  out << "backoff_count " << r.backoff_count << '\n';
  if (r.gold_absent) out << "gold_absent " << r.gold_absent << '\n';
  for (const auto& [pos, pc] : r.per_pos) {
    double acc = pc.total ? static_cast<double>(pc.correct) / static_cast<double>(pc.total) : 0.0;
    std::snprintf(buf, sizeof buf, "%.6f", acc);
    out << "pos_" << pos_name(pos) << ' ' << pc.correct << '/' << pc.total << ' ' << buf << '\n';
  }
  return out.str();
}

std::string format_summary_line(const EvalReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "RESULT f1=%.6f correct=%zu total=%zu backoff=%zu", r.f1, r.correct,
                r.total_gold, r.backoff_count);
  return buf;
}

}  // namespace gas
