#include "gas/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gas/checkpoint.hpp"
#include "gas/corpus.hpp"
#include "gas/error.hpp"
#include "gas/evaluator.hpp"
#include "gas/gradcheck.hpp"
#include "gas/ingest.hpp"
#include "gas/model.hpp"
#include "gas/parallel.hpp"
#include "gas/rng.hpp"
#include "gas/tape.hpp"
#include "gas/trainer.hpp"

namespace gas {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// One line mirroring the checkpoint's config block; written to stdout and
// into every output artifact so a run's effective settings travel with it.
std::string config_echo(const ModelConfig& c) {
  std::ostringstream os;
  os << "hidden " << c.hidden << " passes " << c.passes << " update " << update_rule_name(c.update)
     << " depth " << c.expansion_depth << " extended " << (c.extended ? 1 : 0) << " dropout "
     << fmt("%.17g", c.dropout_rate) << " max_gloss " << c.max_gloss_tokens << " max_expansion "
     << c.max_expansion << " seed " << c.seed;
  return os.str();
}

// Architecture flags shared by train and sweep-passes. Defaults are the
// stock configuration; to_config re-validates after flag overrides.
struct ModelFlags {
  std::size_t hidden = 256;
  std::size_t passes = 3;
  std::string update = "concat";
  std::size_t depth = 4;
  std::string extended = "true";
  double dropout = 0.5;
  std::size_t max_gloss = 32;
  std::size_t max_expansion = 0;

  void attach(CLI::App* cmd, bool with_passes) {
    cmd->add_option("--hidden", hidden, "LSTM hidden units per direction");
    if (with_passes) cmd->add_option("--passes", passes, "memory passes");
    cmd->add_option("--update", update, "memory update rule")
        ->check(CLI::IsMember({"linear", "concat"}));
    cmd->add_option("--depth", depth, "relation expansion depth");
    cmd->add_option("--extended", extended, "expand glosses over hypernym/hyponym relations")
        ->check(CLI::IsMember({"true", "false"}));
    cmd->add_option("--dropout", dropout, "dropout rate on context and gloss vectors");
    cmd->add_option("--max-gloss", max_gloss, "gloss token cap");
    cmd->add_option("--max-expansion", max_expansion,
                    "per-side cap on expanded glosses, 0 = unlimited");
  }

  ModelConfig to_config(std::uint64_t seed) const {
    ModelConfig c;
    c.hidden = hidden;
    c.passes = passes;
    c.update = *update_rule_from_name(update);
    c.expansion_depth = depth;
    c.extended = extended == "true";
    c.dropout_rate = dropout;
    c.max_gloss_tokens = max_gloss;
    c.max_expansion = max_expansion;
    c.seed = seed;
    c.validate();
    return c;
  }
};

struct TrainFlags {
  double lr = 0.001;
  std::size_t epochs = 100;
  std::size_t patience = 10;
  std::size_t batch = 32;
  std::string shuffle = "true";

  void attach(CLI::App* cmd) {
    cmd->add_option("--lr", lr, "Adam learning rate");
    cmd->add_option("--epochs", epochs, "maximum training epochs");
    cmd->add_option("--patience", patience, "early-stopping patience in epochs");
    cmd->add_option("--batch", batch, "mini-batch size");
    cmd->add_option("--shuffle", shuffle, "reshuffle instances each epoch")
        ->check(CLI::IsMember({"true", "false"}));
  }

  TrainConfig to_config(std::uint64_t seed, std::size_t workers) const {
    TrainConfig c;
    c.lr = lr;
    c.max_epochs = epochs;
    c.patience = patience;
    c.batch_size = batch;
    c.seed = seed;
    c.shuffle = shuffle == "true";
    c.workers = workers;
    c.validate();
    return c;
  }
};

int cmd_ingest(const std::string& wordnet_dir, const std::string& out) {
  SenseInventory inv = ingest_wordnet(wordnet_dir);
  write_inventory(inv, out);
  std::cout << "ingested " << inv.size() << " senses -> " << out << '\n';
  return 0;
}

int cmd_train(const std::string& inventory, const std::string& train_path,
              const std::string& dev_path, const std::string& embeddings_path,
              const std::string& out, const ModelFlags& mf, const TrainFlags& tf,
              std::uint64_t seed, std::size_t workers) {
  SenseInventory inv = load_inventory(inventory);
  std::vector<LabeledInstance> train_set = load_corpus(train_path, inv);
  std::vector<LabeledInstance> dev_set = load_corpus(dev_path, inv);
  EmbeddingTable emb = load_embeddings(embeddings_path);
  ModelConfig mc = mf.to_config(seed);
  TrainConfig tc = tf.to_config(seed, workers);
  std::cout << "config " << config_echo(mc) << '\n';
  auto [params, report] = train(mc, inv, train_set, dev_set, std::move(emb), tc, &std::cout);
  save_checkpoint(out, params);
  const EpochStats& best = report.epochs[report.best_epoch - 1];
  std::cout << "best_epoch " << report.best_epoch << " dev_loss " << fmt("%.17g", best.dev_loss)
            << " dev_acc " << fmt("%.17g", best.dev_accuracy) << '\n';
  std::cout << "checkpoint " << out << '\n';
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& test_path, const std::string& inventory,
             const std::string& mfs_train, std::size_t workers) {
  SenseInventory inv = load_inventory(inventory);
  ModelParams params = load_checkpoint(ckpt);
  std::vector<LabeledInstance> test_set = load_corpus(test_path, inv);
  std::cout << "config " << config_echo(params.config) << '\n';
  MfsPredictor mfs;
  const MfsPredictor* mfs_ptr = nullptr;
  if (!mfs_train.empty()) {
    std::vector<LabeledInstance> mfs_set = load_corpus(mfs_train, inv);
    mfs = mfs_baseline(mfs_set, inv);
    mfs_ptr = &mfs;
    EvalReport base = evaluate_predictor(
        [&](const LabeledInstance& inst) { return backoff_predict(inst, inv, mfs_ptr); }, inv,
        test_set);
    std::cout << "mfs_baseline_f1 " << fmt("%.6f", base.f1) << '\n';
  }
  EvalReport report = evaluate(params, inv, test_set, mfs_ptr, workers);
  std::cout << format_report(report) << format_summary_line(report) << '\n';
  return 0;
}

int cmd_disambiguate(const std::string& ckpt, const std::string& input,
                     const std::string& inventory, const std::string& out, std::size_t workers) {
  SenseInventory inv = load_inventory(inventory);
  ModelParams params = load_checkpoint(ckpt);
  std::vector<LabeledInstance> corpus = load_corpus(input, inv);
  std::vector<std::string> rows = parallel_map_ordered<std::string>(
      corpus.size(), workers, [&](std::size_t i) {
        const LabeledInstance& inst = corpus[i];
        SenseId chosen;
        double prob = 1.0;
        if (inst.monosemous) {
          chosen = inv.senses_of(inst.target_lemma, inst.target_pos)[0];
        } else {
          PredictionDistribution dist = attention_trace(params, inv, inst);
          std::size_t k = dist.argmax();
          chosen = dist.sense_ids[k];
          prob = dist.probs[k];
        }
        return inst.instance_id + '\t' + chosen + '\t' + fmt("%.17g", prob);
      });
  std::ofstream of(out);
  if (!of) throw ValidationError("cannot write predictions file '" + out + "'");
  of << "# config " << config_echo(params.config) << '\n';
  for (const std::string& row : rows) of << row << '\n';
  if (!of) throw ValidationError("write error on predictions file '" + out + "'");
  std::cout << "disambiguated " << corpus.size() << " instances -> " << out << '\n';
  return 0;
}

int cmd_trace(const std::string& ckpt, const std::string& input, const std::string& inventory,
              const std::string& out) {
  SenseInventory inv = load_inventory(inventory);
  ModelParams params = load_checkpoint(ckpt);
  std::vector<LabeledInstance> corpus = load_corpus(input, inv);
  export_traces(params, inv, corpus, out, {"config " + config_echo(params.config)});
  std::cout << "traced " << corpus.size() << " instances -> " << out << '\n';
  return 0;
}

int cmd_sweep(const std::string& inventory, const std::string& train_path,
              const std::string& dev_path, const std::string& test_path,
              const std::string& embeddings_path, const std::string& out, std::size_t min_passes,
              std::size_t max_passes, const ModelFlags& mf, const TrainFlags& tf,
              std::uint64_t seed, std::size_t workers) {
  SenseInventory inv = load_inventory(inventory);
  std::vector<LabeledInstance> train_set = load_corpus(train_path, inv);
  std::vector<LabeledInstance> dev_set = load_corpus(dev_path, inv);
  std::vector<LabeledInstance> test_set = load_corpus(test_path, inv);
  EmbeddingTable emb = load_embeddings(embeddings_path);
  ModelConfig base = mf.to_config(seed);
  TrainConfig tc = tf.to_config(seed, workers);
  std::cout << "config " << config_echo(base) << '\n';
  std::vector<SweepRow> rows = sweep_passes(base, inv, train_set, dev_set, test_set, emb, tc,
                                            min_passes, max_passes, &std::cout);
  std::ostringstream table;
  table << "passes\ttest_f1\tbest_epoch\n";
  for (const SweepRow& row : rows)
    table << row.passes << '\t' << fmt("%.6f", row.test_f1) << '\t' << row.best_epoch << '\n';
  std::cout << table.str();
  if (!out.empty()) {
    std::ofstream of(out);
    if (!of) throw ValidationError("cannot write sweep file '" + out + "'");
    of << "# config " << config_echo(base) << '\n' << table.str();
    if (!of) throw ValidationError("write error on sweep file '" + out + "'");
  }
  return 0;
}

// Hand-held fixture for the finite-difference audit: one three-way
// ambiguous target with a hypernym and a hyponym per sense, small enough
// that central differences over every parameter stay cheap.
struct GradCheckFixture {
  SenseInventory inv;
  LabeledInstance inst;
  EmbeddingTable emb;
};

GradCheckFixture gradcheck_fixture(std::uint64_t seed) {
  GradCheckFixture f;
  auto add = [&](const char* id, const char* lemma, std::vector<std::string> gloss,
                 std::vector<SenseId> hyper = {}, std::vector<SenseId> hypo = {}) {
    SenseRecord rec;
    rec.sense_id = id;
    rec.lemma = lemma;
    rec.pos = Pos::Noun;
    rec.gloss = std::move(gloss);
    rec.hypernyms = std::move(hyper);
    rec.hyponyms = std::move(hypo);
    f.inv.add(std::move(rec));
  };
  add("tool%n:1", "tool", {"an", "implement"});
  add("mission%n:1", "mission", {"a", "dispatched", "task"});
  add("inquiry%n:1", "inquiry", {"a", "formal", "question"});
  add("stylet%n:1", "stylet", {"a", "thin", "pointer"});
  add("flyby%n:1", "flyby", {"a", "passing", "flight"});
  add("audit%n:1", "audit", {"a", "close", "check"});
  add("probe%n:1", "probe", {"a", "slender", "tool"}, {"tool%n:1"}, {"stylet%n:1"});
  add("probe%n:2", "probe", {"an", "exploratory", "mission"}, {"mission%n:1"}, {"flyby%n:1"});
  add("probe%n:3", "probe", {"a", "careful", "inquiry"}, {"inquiry%n:1"}, {"audit%n:1"});
  f.inv.validate_edges();

  f.inst.instance_id = "gc.1";
  f.inst.tokens = {"they", "sent", "the", "probe", "into", "orbit"};
  f.inst.target_index = 3;
  f.inst.target_lemma = "probe";
  f.inst.target_pos = Pos::Noun;
  f.inst.gold_sense = "probe%n:2";

  std::vector<std::string> vocab;
  auto collect = [&](const std::vector<std::string>& words) {
    for (const auto& w : words)
      if (std::find(vocab.begin(), vocab.end(), w) == vocab.end()) vocab.push_back(w);
  };
  for (const SenseId& id : f.inv.ordered_ids()) collect(f.inv.record(id).gloss);
  collect(f.inst.tokens);
  const std::size_t dim = 6;
  Rng rng(Rng::derive(seed, "gradcheck/embeddings"));
  Tensor vectors = Tensor::zeros({vocab.size(), dim});
  for (double& v : vectors.data) v = rng.uniform(-0.5, 0.5);
  f.emb = EmbeddingTable::make(dim, std::move(vocab), std::move(vectors));
  return f;
}

int cmd_grad_check(std::size_t hidden, std::size_t passes, const std::string& update,
                   std::uint64_t seed) {
  const double tol = 1e-4;
  GradCheckFixture f = gradcheck_fixture(seed);
  std::vector<std::string> rules;
  if (update == "both")
    rules = {"linear", "concat"};
  else
    rules = {update};

  double overall = 0.0;
  for (const std::string& rule : rules) {
    ModelConfig mc;
    mc.hidden = hidden;
    mc.passes = passes;
    mc.update = *update_rule_from_name(rule);
    mc.expansion_depth = 1;
    mc.extended = true;
    mc.dropout_rate = 0.0;
    mc.seed = seed;
    mc.validate();
    ModelParams params = ModelParams::init(mc, f.emb);
    params.ensure_expert("probe", Pos::Noun, 3);

    Tape tape;
    ModelGraph graph(tape, params, f.inv);
    auto score_out = graph.score(f.inst);
    std::size_t gold = 0;
    while (score_out.senses[gold] != *f.inst.gold_sense) ++gold;
    tape.backward(tape.cross_entropy_logits(score_out.mixed, gold));
    std::map<std::string, Tensor> grads;
    for (const auto& [name, var] : graph.touched_leaves()) grads[name] = tape.grad(var);

    std::map<std::string, Tensor*> trainable;
    params.for_each_group([&](const std::string& name, Tensor& t, bool is_trainable) {
      if (is_trainable) trainable[name] = &t;
    });
    std::vector<GradCheckGroup> groups;
    std::vector<Tensor> analytic;
    for (auto& [name, g] : grads) {
      if (g.data.empty()) continue;  // registered but unused, e.g. memory weights at one pass
      auto it = trainable.find(name);
      if (it == trainable.end())
        throw ValidationError("gradient for unknown parameter group '" + name + "'");
      groups.push_back({name, it->second});
      analytic.push_back(g);
    }

    auto loss = [&]() { return instance_loss(params, f.inv, f.inst); };
    GradCheckResult res = grad_check(loss, groups, analytic);
    for (const GradCheckResult::Row& row : res.rows)
      std::cout << "update " << rule << " group " << row.name << " max_rel_err "
                << fmt("%.3e", row.max_rel_error) << '\n';
    std::cout << "update " << rule << " max_rel_err " << fmt("%.3e", res.max_rel_error) << " tol "
              << fmt("%g", tol) << ' ' << (res.pass(tol) ? "pass" : "FAIL") << '\n';
    if (res.max_rel_error > overall) overall = res.max_rel_error;
  }
  bool ok = overall <= tol;
  std::cout << "grad-check max_rel_err " << fmt("%.3e", overall) << ' ' << (ok ? "pass" : "FAIL")
            << '\n';
  return ok ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"gloss-augmented word sense disambiguation"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string inventory, train_path, dev_path, test_path, embeddings_path, ckpt, input, out;
  std::string wordnet_dir, mfs_train;
  ModelFlags model_flags;
  TrainFlags train_flags;
  std::size_t min_passes = 1, max_passes = 5;
  std::size_t gc_hidden = 8, gc_passes = 2;
  std::string gc_update = "both";

  auto add_common = [&](CLI::App* cmd) { cmd->add_option("--seed", seed, "master RNG seed"); };

  CLI::App* ingest = app.add_subcommand("ingest", "convert a WordNet database dump to inventory TSV");
  ingest->add_option("--wordnet", wordnet_dir, "WordNet database directory")->required();
  ingest->add_option("--out", out, "inventory TSV to write")->required();
  add_common(ingest);

  CLI::App* train = app.add_subcommand("train", "train a model and save its best checkpoint");
  train->add_option("--inventory", inventory, "sense inventory TSV")->required();
  train->add_option("--train", train_path, "training corpus TSV")->required();
  train->add_option("--dev", dev_path, "validation corpus TSV")->required();
  train->add_option("--embeddings", embeddings_path, "word embeddings file")->required();
  train->add_option("--out", ckpt, "checkpoint to write")->required();
  model_flags.attach(train, true);
  train_flags.attach(train);
  train->add_option("--workers", workers, "evaluation worker threads");
  add_common(train);

  CLI::App* eval = app.add_subcommand("eval", "score a checkpoint on a gold corpus");
  eval->add_option("--ckpt", ckpt, "model checkpoint")->required();
  eval->add_option("--test", test_path, "gold test corpus TSV")->required();
  eval->add_option("--inventory", inventory, "sense inventory TSV")->required();
  eval->add_option("--mfs-train", mfs_train, "training corpus for the frequency baseline/backoff");
  eval->add_option("--workers", workers, "worker threads");
  add_common(eval);

  CLI::App* dis = app.add_subcommand("disambiguate", "predict a sense per instance");
  dis->add_option("--ckpt", ckpt, "model checkpoint")->required();
  dis->add_option("--input", input, "corpus TSV; gold column may be '-'")->required();
  dis->add_option("--inventory", inventory, "sense inventory TSV")->required();
  dis->add_option("--out", out, "predictions file to write")->required();
  dis->add_option("--workers", workers, "worker threads");
  add_common(dis);

  CLI::App* trace = app.add_subcommand("trace", "export per-pass attention weights");
  trace->add_option("--ckpt", ckpt, "model checkpoint")->required();
  trace->add_option("--input", input, "corpus TSV; gold column may be '-'")->required();
  trace->add_option("--inventory", inventory, "sense inventory TSV")->required();
  trace->add_option("--out", out, "trace file to write")->required();
  add_common(trace);

  CLI::App* sweep = app.add_subcommand("sweep-passes", "train once per pass count and tabulate F1");
  sweep->add_option("--min", min_passes, "smallest pass count");
  sweep->add_option("--max", max_passes, "largest pass count");
  sweep->add_option("--inventory", inventory, "sense inventory TSV")->required();
  sweep->add_option("--train", train_path, "training corpus TSV")->required();
  sweep->add_option("--dev", dev_path, "validation corpus TSV")->required();
  sweep->add_option("--test", test_path, "gold test corpus TSV")->required();
  sweep->add_option("--embeddings", embeddings_path, "word embeddings file")->required();
  sweep->add_option("--out", out, "optional table file to write");
  model_flags.attach(sweep, false);
  train_flags.attach(sweep);
  sweep->add_option("--workers", workers, "worker threads");
  add_common(sweep);

  CLI::App* gc = app.add_subcommand("grad-check", "audit gradients against finite differences");
  gc->add_option("--hidden", gc_hidden, "LSTM hidden units per direction");
  gc->add_option("--passes", gc_passes, "memory passes");
  gc->add_option("--update", gc_update, "memory update rule, or both")
      ->check(CLI::IsMember({"linear", "concat", "both"}));
  add_common(gc);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(ingest)) return cmd_ingest(wordnet_dir, out);
    if (app.got_subcommand(train))
      return cmd_train(inventory, train_path, dev_path, embeddings_path, ckpt, model_flags,
                       train_flags, seed, workers);
    if (app.got_subcommand(eval)) return cmd_eval(ckpt, test_path, inventory, mfs_train, workers);
    if (app.got_subcommand(dis)) return cmd_disambiguate(ckpt, input, inventory, out, workers);
    if (app.got_subcommand(trace)) return cmd_trace(ckpt, input, inventory, out);
    if (app.got_subcommand(sweep))
      return cmd_sweep(inventory, train_path, dev_path, test_path, embeddings_path, out, min_passes,
                       max_passes, model_flags, train_flags, seed, workers);
    if (app.got_subcommand(gc)) return cmd_grad_check(gc_hidden, gc_passes, gc_update, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace gas
