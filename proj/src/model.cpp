#include "gas/model.hpp"

#include <algorithm>
#include <cmath>

#include "gas/error.hpp"
#include "gas/nn.hpp"
#include "gas/rng.hpp"

namespace gas {

const char* update_rule_name(UpdateRule r) {
  return r == UpdateRule::Linear ? "linear" : "concat";
}

std::optional<UpdateRule> update_rule_from_name(const std::string& s) {
  if (s == "linear") return UpdateRule::Linear;
  if (s == "concat" || s == "concatenation") return UpdateRule::Concatenation;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (hidden == 0) throw ValidationError("hidden size must be positive");
  if (passes == 0) throw ValidationError("memory passes must be positive");
  if (max_gloss_tokens == 0) throw ValidationError("max_gloss_tokens must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw ValidationError("dropout rate must lie in [0, 1)");
}

ModelParams ModelParams::init(const ModelConfig& config, EmbeddingTable embeddings) {
  config.validate();
  if (embeddings.dim() == 0) throw ValidationError("embedding table has dimension 0");

  ModelParams p;
  p.config = config;
  p.embeddings = std::move(embeddings);

  const std::size_t n = config.hidden;
  const std::size_t d = p.embeddings.dim();

  auto cell = [&](const char* label, std::size_t input_dim) {
    Rng rng(Rng::derive(config.seed, std::string("init/") + label));
    return LstmCellParams::init(input_dim, n, rng);
  };
  p.ctx_fwd = cell("context/fwd", d);
  p.ctx_bwd = cell("context/bwd", d);
  p.gloss_fwd = cell("gloss/fwd", d);
  p.gloss_bwd = cell("gloss/bwd", d);
  if (config.extended) {
    p.fus_fwd = cell("fusion/fwd", 2 * n);
    p.fus_bwd = cell("fusion/bwd", 2 * n);
  }

  if (config.update == UpdateRule::Linear) {
    Rng rng(Rng::derive(config.seed, "init/memory"));
    p.mem_h = init_uniform({2 * n, 2 * n}, rng);
  } else {
    Rng rng(Rng::derive(config.seed, "init/memory"));
    p.mem_w = init_uniform({2 * n, 6 * n}, rng);
    p.mem_b = init_uniform({2 * n}, rng);
  }
  return p;
}

WordExpert& ModelParams::ensure_expert(const std::string& lemma, Pos pos, std::size_t sense_count) {
  if (sense_count == 0) throw ValidationError("word expert for '" + lemma + "' needs at least one sense");
  WordKey key{lemma, pos};
  auto it = experts.find(key);
  if (it != experts.end()) {
    if (it->second.w.rows() != sense_count)
      throw DimensionError("word expert for '" + lemma + "/" + pos_code(pos) +
                           "' has " + std::to_string(it->second.w.rows()) +
                           " senses, inventory says " + std::to_string(sense_count));
    return it->second;
  }
  Rng rng(Rng::derive(config.seed, "wordexpert/" + lemma + "/" + pos_code(pos)));
  WordExpert e;
  e.w = init_uniform({sense_count, 2 * config.hidden}, rng);
  e.b = init_uniform({sense_count}, rng);
  e.rho = Tensor::scalar(0.0);
  return experts.emplace(std::move(key), std::move(e)).first->second;
}

const WordExpert* ModelParams::find_expert(const std::string& lemma, Pos pos) const {
  auto it = experts.find(WordKey{lemma, pos});
  return it == experts.end() ? nullptr : &it->second;
}

void ModelParams::for_each_group(const std::function<void(const std::string&, Tensor&, bool)>& fn) {
  auto cell = [&](const char* prefix, LstmCellParams& c) {
    fn(std::string(prefix) + "/W", c.w_input, true);
    fn(std::string(prefix) + "/U", c.w_recurrent, true);
    fn(std::string(prefix) + "/b", c.bias, true);
  };
  cell("context/fwd", ctx_fwd);
  cell("context/bwd", ctx_bwd);
  cell("gloss/fwd", gloss_fwd);
  cell("gloss/bwd", gloss_bwd);
  if (config.extended) {
    cell("fusion/fwd", fus_fwd);
    cell("fusion/bwd", fus_bwd);
  }
  if (config.update == UpdateRule::Linear) {
    fn("memory/H", mem_h, true);
  } else {
    fn("memory/W", mem_w, true);
    fn("memory/b", mem_b, true);
  }
  for (auto& [key, e] : experts) {
    const std::string stem = key.lemma + "/" + pos_code(key.pos);
    fn("wordexpert/" + stem + "/W", e.w, true);
    fn("wordexpert/" + stem + "/b", e.b, true);
    fn("lambda/" + stem, e.rho, true);
  }
  fn("embedding/vectors", const_cast<Tensor&>(embeddings.vectors()), false);
  fn("embedding/unk", const_cast<Tensor&>(embeddings.unk()), false);
}

ModelParams ModelParams::clone() const { return *this; }

std::size_t PredictionDistribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.data.size(); ++i)
    if (probs.data[i] > probs.data[best]) best = i;
  return best;
}

ModelGraph::ModelGraph(Tape& tape, const ModelParams& params, const SenseInventory& inv)
    : tape_(tape), params_(params), inv_(inv) {
  auto cell = [&](const char* prefix, const LstmCellParams& c) {
    Tape::CellVars v = tape_.cell_leaves(c);
    touched_.emplace_back(std::string(prefix) + "/W", v.w_input);
    touched_.emplace_back(std::string(prefix) + "/U", v.w_recurrent);
    touched_.emplace_back(std::string(prefix) + "/b", v.bias);
    return v;
  };
  ctx_fwd_ = cell("context/fwd", params.ctx_fwd);
  ctx_bwd_ = cell("context/bwd", params.ctx_bwd);
  gloss_fwd_ = cell("gloss/fwd", params.gloss_fwd);
  gloss_bwd_ = cell("gloss/bwd", params.gloss_bwd);
  if (params.config.extended) {
    fus_fwd_ = cell("fusion/fwd", params.fus_fwd);
    fus_bwd_ = cell("fusion/bwd", params.fus_bwd);
  }
  if (params.config.update == UpdateRule::Linear) {
    mem_h_ = tape_.leaf(&params.mem_h);
    touched_.emplace_back("memory/H", mem_h_);
  } else {
    mem_w_ = tape_.leaf(&params.mem_w);
    mem_b_ = tape_.leaf(&params.mem_b);
    touched_.emplace_back("memory/W", mem_w_);
    touched_.emplace_back("memory/b", mem_b_);
  }
}

std::vector<Var> ModelGraph::embed(const std::vector<std::string>& tokens) {
  std::vector<Var> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(tape_.input(params_.embeddings.lookup_tensor(t)));
  return out;
}

Var ModelGraph::encode_context(const LabeledInstance& inst) {
  auto [left, right] = context_halves(inst);
  std::vector<Var> fwd_in = embed(left);
  std::reverse(right.begin(), right.end());  // backward half consumes x_T first
  std::vector<Var> bwd_in = embed(right);
  Var fwd = tape_.run_lstm(ctx_fwd_, fwd_in);
  Var bwd = tape_.run_lstm(ctx_bwd_, bwd_in);
  return tape_.concat({fwd, bwd});
}

Var ModelGraph::encode_gloss(const std::vector<std::string>& tokens) {
  std::vector<std::string> capped = tokens;
  if (capped.size() > params_.config.max_gloss_tokens) capped.resize(params_.config.max_gloss_tokens);
  std::vector<Var> fwd_in = embed(capped);
  std::vector<Var> bwd_in(fwd_in.rbegin(), fwd_in.rend());
  Var fwd = tape_.run_lstm(gloss_fwd_, fwd_in);
  Var bwd = tape_.run_lstm(gloss_bwd_, bwd_in);
  return tape_.concat({fwd, bwd});
}

Var ModelGraph::sense_vector(const SenseId& id) {
  if (!params_.config.extended) return encode_gloss(inv_.record(id).gloss);

  ExpandedGlossList ex =
      expand_gloss(inv_, id, params_.config.expansion_depth, params_.config.max_expansion);
  Var g0 = encode_gloss(ex.original.second);

  // Both runs read farthest-first and end on the original gloss.
  std::vector<Var> fwd_seq, bwd_seq;
  for (auto it = ex.hypernym_glosses.rbegin(); it != ex.hypernym_glosses.rend(); ++it)
    fwd_seq.push_back(encode_gloss(it->second));
  fwd_seq.push_back(g0);
  for (auto it = ex.hyponym_glosses.rbegin(); it != ex.hyponym_glosses.rend(); ++it)
    bwd_seq.push_back(encode_gloss(it->second));
  bwd_seq.push_back(g0);

  Var fwd = tape_.run_lstm(fus_fwd_, fwd_seq);
  Var bwd = tape_.run_lstm(fus_bwd_, bwd_seq);
  return tape_.concat({fwd, bwd});
}

Var ModelGraph::update_memory(Var m_prev, Var u, Var c) {
  if (params_.config.update == UpdateRule::Linear) {
    return tape_.add(tape_.matvec(mem_h_, m_prev), u);
  }
  Var cat = tape_.concat({m_prev, u, c});
  return tape_.relu(tape_.affine(mem_w_, cat, mem_b_));
}

ModelGraph::ScoreOut ModelGraph::score(const LabeledInstance& inst, const DropoutPlan* dropout,
                                       bool require_expert) {
  const auto& senses = inv_.senses_of(inst.target_lemma, inst.target_pos);
  if (senses.empty())
    throw ValidationError("instance '" + inst.instance_id + "': no senses for '" +
                          inst.target_lemma + "/" + pos_code(inst.target_pos) + "'");
  if (dropout && dropout->gloss_masks.size() != senses.size())
    throw DimensionError("dropout plan has " + std::to_string(dropout->gloss_masks.size()) +
                         " gloss masks for " + std::to_string(senses.size()) + " senses");

  ScoreOut out;
  out.senses = senses;

  Var c = encode_context(inst);
  if (dropout) c = tape_.mask(c, dropout->context_mask);
  out.context = c;

  std::vector<Var> gs;
  gs.reserve(senses.size());
  for (std::size_t i = 0; i < senses.size(); ++i) {
    Var g = sense_vector(senses[i]);
    if (dropout) g = tape_.mask(g, dropout->gloss_masks[i]);
    gs.push_back(g);
  }

  Var m = c;
  for (std::size_t k = 1; k <= params_.config.passes; ++k) {
    Var e = tape_.stack_dots(gs, m);
    Var alpha = tape_.softmax(e);
    Var u = tape_.weighted_sum(gs, alpha);
    out.logits_per_pass.push_back(e);
    out.attention_per_pass.push_back(alpha);
    out.summary_per_pass.push_back(u);
    if (k < params_.config.passes) {
      m = update_memory(m, u, c);
      out.memory_per_pass.push_back(m);
    }
  }
  out.score_g = out.logits_per_pass.back();

  const WordExpert* expert = params_.find_expert(inst.target_lemma, inst.target_pos);
  if (expert && expert->w.rows() != senses.size())
    throw DimensionError("word expert for '" + inst.target_lemma + "/" + pos_code(inst.target_pos) +
                         "' covers " + std::to_string(expert->w.rows()) + " senses, inventory has " +
                         std::to_string(senses.size()));
  if (!expert && require_expert && senses.size() > 1)
    throw UnseenTargetError(inst.target_lemma, std::string(1, pos_code(inst.target_pos)));

  if (expert) {
    const std::string stem = inst.target_lemma + "/" + std::string(1, pos_code(inst.target_pos));
    Var w = tape_.leaf(&expert->w);
    Var b = tape_.leaf(&expert->b);
    Var rho = tape_.leaf(&expert->rho);
    touched_.emplace_back("wordexpert/" + stem + "/W", w);
    touched_.emplace_back("wordexpert/" + stem + "/b", b);
    touched_.emplace_back("lambda/" + stem, rho);
    out.score_c = tape_.affine(w, c, b);
    out.lambda = tape_.sigmoid(rho);
    out.has_expert = true;
  } else {
    out.score_c = tape_.zeros(senses.size());
    out.lambda = tape_.input(Tensor::scalar(0.5));
    out.has_expert = false;
  }
  out.mixed = tape_.mix(out.score_c, out.score_g, out.lambda);
  return out;
}

namespace {

PredictionDistribution score_impl(const ModelParams& params, const SenseInventory& inv,
                                  const LabeledInstance& inst, bool require_expert) {
  Tape tape;
  ModelGraph graph(tape, params, inv);
  ModelGraph::ScoreOut s = graph.score(inst, nullptr, require_expert);

  PredictionDistribution dist;
  dist.sense_ids = s.senses;
  dist.probs = tape.value(tape.softmax(s.mixed));
  dist.score_c = tape.value(s.score_c);
  dist.score_g = tape.value(s.score_g);
  dist.lambda = tape.value(s.lambda).data[0];

  const std::size_t passes = params.config.passes;
  for (std::size_t k = 1; k <= passes; ++k) {
    MemoryStateVal st;
    st.pass = k;
    st.logits = tape.value(s.logits_per_pass[k - 1]);
    st.attention = tape.value(s.attention_per_pass[k - 1]);
    st.summary = tape.value(s.summary_per_pass[k - 1]);
    if (k < passes)
      st.memory = tape.value(s.memory_per_pass[k - 1]);
    else
      st.memory = passes > 1 ? tape.value(s.memory_per_pass[passes - 2]) : tape.value(s.context);
    dist.trace.push_back(std::move(st));
  }
  return dist;
}

}  // namespace

PredictionDistribution score(const ModelParams& params, const SenseInventory& inv,
                             const LabeledInstance& inst) {
  return score_impl(params, inv, inst, true);
}

PredictionDistribution attention_trace(const ModelParams& params, const SenseInventory& inv,
                                       const LabeledInstance& inst) {
  return score_impl(params, inv, inst, false);
}

double instance_loss(const ModelParams& params, const SenseInventory& inv,
                     const LabeledInstance& inst) {
  if (!inst.gold_sense)
    throw ValidationError("instance '" + inst.instance_id + "' has no gold sense");
  Tape tape;
  ModelGraph graph(tape, params, inv);
  ModelGraph::ScoreOut s = graph.score(inst, nullptr, true);
  auto it = std::find(s.senses.begin(), s.senses.end(), *inst.gold_sense);
  if (it == s.senses.end())
    throw ValidationError("instance '" + inst.instance_id + "': gold sense not a candidate");
  Var loss = tape.cross_entropy_logits(s.mixed, static_cast<std::size_t>(it - s.senses.begin()));
  return tape.value(loss).data[0];
}

}  // namespace gas
