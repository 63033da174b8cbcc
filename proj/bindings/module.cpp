#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "gas/checkpoint.hpp"
#include "gas/corpus.hpp"
#include "gas/error.hpp"
#include "gas/evaluator.hpp"
#include "gas/lexicon.hpp"
#include "gas/model.hpp"

namespace py = pybind11;
using namespace gas;

namespace {

Pos pos_from_str(const std::string& s) {
  auto pos = s.size() == 1 ? pos_from_code(s[0]) : std::nullopt;
  if (!pos) throw ValidationError("bad pos code '" + s + "', expected one of n/v/a/r");
  return *pos;
}

std::string pos_str(Pos p) { return std::string(1, pos_code(p)); }

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Same checks load_corpus applies per line, for instances built in Python.
LabeledInstance make_instance(std::vector<std::string> tokens, std::size_t target_index,
                              const std::string& lemma, const std::string& pos,
                              const SenseInventory& inv, const std::optional<SenseId>& gold,
                              std::string instance_id) {
  LabeledInstance inst;
  inst.instance_id = std::move(instance_id);
  for (std::string& t : tokens) t = lowercase(std::move(t));
  inst.tokens = std::move(tokens);
  if (inst.tokens.empty()) throw ValidationError("empty token list");
  if (target_index >= inst.tokens.size())
    throw ValidationError("target index " + std::to_string(target_index) + " out of range for " +
                          std::to_string(inst.tokens.size()) + " tokens");
  inst.target_index = target_index;
  inst.target_lemma = lowercase(lemma);
  inst.target_pos = pos_from_str(pos);
  const auto& candidates = inv.senses_of(inst.target_lemma, inst.target_pos);
  if (candidates.empty())
    throw ValidationError("no inventory senses for " + inst.target_lemma + "/" +
                          pos_name(inst.target_pos));
  if (gold) {
    if (std::find(candidates.begin(), candidates.end(), *gold) == candidates.end())
      throw ValidationError("gold sense '" + *gold + "' is not a candidate for " +
                            inst.target_lemma + "/" + pos_name(inst.target_pos));
    inst.gold_sense = *gold;
  }
  inst.monosemous = candidates.size() == 1;
  return inst;
}

// Monosemous targets answer directly; everything else goes through the
// memory pipeline, which stays defined even without a classifier entry.
std::pair<SenseId, double> predict_one(const ModelParams& params, const SenseInventory& inv,
                                       const LabeledInstance& inst) {
  if (inst.monosemous) return {inv.senses_of(inst.target_lemma, inst.target_pos)[0], 1.0};
  PredictionDistribution dist = attention_trace(params, inv, inst);
  const std::size_t k = dist.argmax();
  return {dist.sense_ids[k], dist.probs[k]};
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["attempted"] = r.attempted;
  d["correct"] = r.correct;
  d["total_gold"] = r.total_gold;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["backoff"] = r.backoff_count;
  d["gold_absent"] = r.gold_absent;
  py::dict per_pos;
  for (const auto& [pos, counts] : r.per_pos)
    per_pos[py::str(pos_name(pos))] = py::make_tuple(counts.correct, counts.total);
  d["per_pos"] = per_pos;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gloss-augmented word sense disambiguation: checkpoint scoring and corpus tools";
  m.attr("__version__") = "0.1.0";

  py::class_<SenseRecord>(m, "SenseRecord")
      .def_readonly("sense_id", &SenseRecord::sense_id)
      .def_readonly("lemma", &SenseRecord::lemma)
      .def_property_readonly("pos", [](const SenseRecord& r) { return pos_str(r.pos); })
      .def_readonly("gloss", &SenseRecord::gloss)
      .def_readonly("hypernyms", &SenseRecord::hypernyms)
      .def_readonly("hyponyms", &SenseRecord::hyponyms)
      .def("__repr__",
           [](const SenseRecord& r) { return "<SenseRecord '" + r.sense_id + "'>"; });

  py::class_<SenseInventory>(m, "SenseInventory")
      .def("__len__", &SenseInventory::size)
      .def("__contains__",
           [](const SenseInventory& inv, const SenseId& id) { return inv.contains(id); })
      .def("record", &SenseInventory::record, py::arg("sense_id"),
           py::return_value_policy::copy)
      .def(
          "senses_of",
          [](const SenseInventory& inv, const std::string& lemma, const std::string& pos) {
            return inv.senses_of(lemma, pos_from_str(pos));
          },
          py::arg("lemma"), py::arg("pos"), "Candidate sense ids in inventory rank order.")
      .def_property_readonly("sense_ids", &SenseInventory::ordered_ids);

  py::class_<LabeledInstance>(m, "LabeledInstance")
      .def(py::init(&make_instance), py::arg("tokens"), py::arg("target_index"), py::arg("lemma"),
           py::arg("pos"), py::arg("inventory"), py::arg("gold") = std::nullopt,
           py::arg("instance_id") = std::string("adhoc"),
           "Build a validated instance for a sentence without going through a corpus file.")
      .def_readonly("instance_id", &LabeledInstance::instance_id)
      .def_readonly("tokens", &LabeledInstance::tokens)
      .def_readonly("target_index", &LabeledInstance::target_index)
      .def_readonly("target_lemma", &LabeledInstance::target_lemma)
      .def_property_readonly("target_pos",
                             [](const LabeledInstance& i) { return pos_str(i.target_pos); })
      .def_readonly("gold_sense", &LabeledInstance::gold_sense)
      .def_readonly("monosemous", &LabeledInstance::monosemous)
      .def("__repr__",
           [](const LabeledInstance& i) { return "<LabeledInstance '" + i.instance_id + "'>"; });

  py::class_<ModelParams>(m, "Model")
      .def_property_readonly("config",
                             [](const ModelParams& p) {
                               const ModelConfig& c = p.config;
                               py::dict d;
                               d["hidden"] = c.hidden;
                               d["passes"] = c.passes;
                               d["update"] = update_rule_name(c.update);
                               d["depth"] = c.expansion_depth;
                               d["extended"] = c.extended;
                               d["dropout"] = c.dropout_rate;
                               d["max_gloss"] = c.max_gloss_tokens;
                               d["max_expansion"] = c.max_expansion;
                               d["seed"] = c.seed;
                               return d;
                             })
      .def(
          "disambiguate",
          [](const ModelParams& p, const SenseInventory& inv, const LabeledInstance& inst) {
            return predict_one(p, inv, inst);
          },
          py::arg("inventory"), py::arg("instance"),
          "Predicted (sense_id, probability) for one instance.")
      .def(
          "trace",
          [](const ModelParams& p, const SenseInventory& inv, const LabeledInstance& inst) {
            AttentionTrace tr = trace_instance(p, inv, inst);
            std::vector<std::vector<double>> attention;
            for (const Tensor& row : tr.attention) attention.push_back(row.data);
            py::dict d;
            d["sense_ids"] = tr.sense_ids;
            d["attention"] = attention;  // one row per pass
            d["chosen"] = tr.chosen;
            d["gold"] = tr.gold;
            return d;
          },
          py::arg("inventory"), py::arg("instance"),
          "Per-pass attention over the candidate glosses.");

  m.def("load_inventory", &load_inventory, py::arg("path"));
  m.def(
      "load_corpus",
      [](const std::string& path, const SenseInventory& inv) { return load_corpus(path, inv); },
      py::arg("path"), py::arg("inventory"));
  m.def(
      "load_checkpoint", [](const std::string& path) { return load_checkpoint(path); },
      py::arg("path"));
  m.def(
      "evaluate",
      [](const ModelParams& params, const SenseInventory& inv,
         const std::vector<LabeledInstance>& corpus, std::size_t workers) {
        return report_dict(evaluate(params, inv, corpus, nullptr, workers));
      },
      py::arg("model"), py::arg("inventory"), py::arg("corpus"), py::arg("workers") = 1,
      "Score a gold-labeled corpus; unseen targets fall back to the rank-1 sense.");
}
