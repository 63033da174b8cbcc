// Acceptance gate. Each invocation checks one numbered criterion, prints a
// single PASS/FAIL line and exits 0/1. CLI-driven criteria find the binary
// through the GASWSD_BIN environment variable.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fixtures.hpp"
#include "gas/checkpoint.hpp"
#include "gas/corpus.hpp"
#include "gas/evaluator.hpp"
#include "gas/lexicon.hpp"
#include "gas/model.hpp"
#include "gas/rng.hpp"
#include "gas/trainer.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace gas;
using namespace gas::testing;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
  void note(const std::string& text) {
    if (ok) detail = text;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string cli_binary() {
  const char* bin = std::getenv("GASWSD_BIN");
  return bin ? bin : "";
}

int run_binary(const std::string& args, const std::string& out_path) {
  const std::string cmd = cli_binary() + " " + args + " > " + out_path + " 2>&1";
  int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string synth_flags(const TempDir& tmp) {
  return " --inventory " + tmp.path("inventory.tsv") + " --train " + tmp.path("train.tsv") +
         " --dev " + tmp.path("dev.tsv") + " --embeddings " + tmp.path("embeddings.txt");
}

// 1. The finite-difference audit on the stock micro model, through the CLI.
void criterion1(Check& c) {
  c.require(!cli_binary().empty(), "GASWSD_BIN is not set");
  if (!c.ok) return;
  TempDir tmp;
  const auto start = Clock::now();
  int rc = run_binary("grad-check --hidden 8 --passes 2 --update both", tmp.path("out.txt"));
  const double secs = seconds_since(start);
  const std::string out = read_file(tmp.path("out.txt"));
  c.require(rc == 0, "grad-check exited with " + std::to_string(rc));
  c.require(contains(out, "update linear max_rel_err "), "missing linear-rule summary");
  c.require(contains(out, "update concat max_rel_err "), "missing concat-rule summary");
  c.require(!contains(out, "FAIL"), "a parameter group exceeded the tolerance");
  c.require(secs < 60.0, "took " + fmt("%.1f", secs) + " s, bound is 60 s");
  c.note("both update rules within 1e-4 of central differences (" + fmt("%.1f", secs) + " s)");
}

// 2. Attention rows are strictly positive distributions on randomized
// inventories, configurations and instances.
void criterion2(Check& c) {
  const auto start = Clock::now();
  Rng rng(Rng::derive(2026, "acceptance/attention"));
  std::vector<std::string> vocab;
  for (int i = 0; i < 12; ++i) vocab.push_back("w" + std::to_string(i));
  auto random_gloss = [&]() {
    std::vector<std::string> g;
    const std::size_t len = 1 + rng.next_u64() % 4;
    for (std::size_t i = 0; i < len; ++i) g.push_back(vocab[rng.next_u64() % vocab.size()]);
    return g;
  };

  for (std::size_t case_i = 0; case_i < 1000 && c.ok; ++case_i) {
    ModelConfig mc;
    mc.hidden = 2 + rng.next_u64() % 5;
    mc.passes = 1 + rng.next_u64() % 4;
    mc.update = rng.uniform() < 0.5 ? UpdateRule::Linear : UpdateRule::Concatenation;
    mc.expansion_depth = rng.next_u64() % 3;
    mc.extended = rng.uniform() < 0.5;
    mc.dropout_rate = 0.0;
    mc.seed = rng.next_u64();
    const std::size_t senses = 2 + rng.next_u64() % 4;
    const std::size_t dim = 2 + rng.next_u64() % 4;

    SenseInventory inv;
    std::vector<SenseId> helpers;
    for (std::size_t h = 0; h < senses; ++h) {
      SenseRecord rec;
      rec.sense_id = "h" + std::to_string(h) + "%n:1";
      rec.lemma = "h" + std::to_string(h);
      rec.pos = Pos::Noun;
      rec.gloss = random_gloss();
      helpers.push_back(rec.sense_id);
      inv.add(std::move(rec));
    }
    for (std::size_t s = 0; s < senses; ++s) {
      SenseRecord rec;
      rec.sense_id = "tgt%n:" + std::to_string(s + 1);
      rec.lemma = "tgt";
      rec.pos = Pos::Noun;
      rec.gloss = random_gloss();
      if (rng.uniform() < 0.7) rec.hypernyms.push_back(helpers[rng.next_u64() % helpers.size()]);
      if (rng.uniform() < 0.5) rec.hyponyms.push_back(helpers[rng.next_u64() % helpers.size()]);
      inv.add(std::move(rec));
    }
    inv.validate_edges();

    ModelParams params = ModelParams::init(mc, make_embeddings(vocab, dim, rng.next_u64()));
    if (rng.uniform() < 0.5) params.ensure_expert("tgt", Pos::Noun, senses);

    LabeledInstance inst;
    inst.instance_id = "a" + std::to_string(case_i);
    const std::size_t len = 1 + rng.next_u64() % 7;
    for (std::size_t i = 0; i < len; ++i) inst.tokens.push_back(vocab[rng.next_u64() % vocab.size()]);
    inst.target_index = rng.next_u64() % len;
    inst.target_lemma = "tgt";
    inst.target_pos = Pos::Noun;

    PredictionDistribution dist = attention_trace(params, inv, inst);
    c.require(dist.trace.size() == mc.passes, "trace pass count mismatch at case " + inst.instance_id);
    for (const MemoryStateVal& st : dist.trace) {
      double sum = 0.0;
      bool positive = true;
      for (double a : st.attention.data) {
        sum += a;
        positive = positive && a > 0.0;
      }
      c.require(positive, "nonpositive attention weight at case " + inst.instance_id);
      c.require(std::abs(sum - 1.0) <= 1e-9,
                "attention sum off by " + fmt("%.3e", std::abs(sum - 1.0)) + " at case " +
                    inst.instance_id);
    }
  }
  const double secs = seconds_since(start);
  c.require(secs < 30.0, "took " + fmt("%.1f", secs) + " s, bound is 30 s");
  c.note("1000 randomized cases, every pass a strict distribution (" + fmt("%.1f", secs) + " s)");
}

// 3. Gloss expansion agrees with the independent level-order oracle.
void criterion3(Check& c) {
  const auto start = Clock::now();
  Rng rng(Rng::derive(2026, "acceptance/bfs"));
  for (int trial = 0; trial < 100 && c.ok; ++trial) {
    const std::size_t nodes = 2 + rng.next_u64() % 49;
    const double edge_prob = rng.uniform(0.02, 0.25);
    SenseInventory inv = random_dag_inventory(rng, nodes, edge_prob);
    const std::size_t depth = rng.next_u64() % 6;
    const SenseId start_id = "s" + std::to_string(rng.next_u64() % nodes) + "%n:1";

    auto [hyper_ref, hypo_ref] = reference_expansion(inv, start_id, depth, 0);
    ExpandedGlossList got = expand_gloss(inv, start_id, depth, 0);
    auto ids = [](const std::vector<std::pair<SenseId, std::vector<std::string>>>& side) {
      std::vector<SenseId> out;
      for (const auto& [id, gloss] : side) out.push_back(id);
      return out;
    };
    const std::string where = " (trial " + std::to_string(trial) + ", " + std::to_string(nodes) +
                              " nodes, depth " + std::to_string(depth) + ")";
    c.require(got.original.first == start_id, "original id mismatch" + where);
    c.require(ids(got.hypernym_glosses) == hyper_ref, "hypernym order mismatch" + where);
    c.require(ids(got.hyponym_glosses) == hypo_ref, "hyponym order mismatch" + where);
  }
  const double secs = seconds_since(start);
  c.require(secs < 10.0, "took " + fmt("%.1f", secs) + " s, bound is 10 s");
  c.note("100 randomized taxonomies matched exactly (" + fmt("%.1f", secs) + " s)");
}

// 4. The scaled-down stock model separates the signature-token corpus and
// clears the frequency baseline by a wide margin.
void criterion4(Check& c) {
  const auto start = Clock::now();
  SynthData data = make_separable_corpus(41);
  ModelConfig mc;
  mc.hidden = 32;
  mc.seed = 41;
  TrainConfig tc;
  tc.seed = 41;
  auto [params, report] = train(mc, data.inv, data.train, data.dev, data.embeddings, tc, nullptr);

  EvalReport on_train = evaluate(params, data.inv, data.train, nullptr, 1);
  MfsPredictor mfs = mfs_baseline(data.train, data.inv);
  EvalReport base = evaluate_predictor(
      [&](const LabeledInstance& inst) { return backoff_predict(inst, data.inv, &mfs); }, data.inv,
      data.test);
  EvalReport model = evaluate(params, data.inv, data.test, &mfs, 1);
  const double secs = seconds_since(start);

  c.require(on_train.f1 >= 0.99, "train accuracy " + fmt("%.4f", on_train.f1) + " < 0.99 (" +
                                     std::to_string(report.epochs.size()) + " epochs)");
  c.require(model.f1 - base.f1 >= 0.10, "test F1 " + fmt("%.4f", model.f1) + " vs baseline " +
                                            fmt("%.4f", base.f1) + ", margin < 10 points");
  c.require(secs < 300.0, "took " + fmt("%.1f", secs) + " s, bound is 300 s");
  c.note("train acc " + fmt("%.4f", on_train.f1) + ", test F1 " + fmt("%.4f", model.f1) +
         " vs MFS " + fmt("%.4f", base.f1) + " (" + fmt("%.1f", secs) + " s)");
}

// 5. With discriminating tokens only reachable through relation edges, the
// extended model beats the gloss-only model under identical seeds.
void criterion5(Check& c) {
  const auto start = Clock::now();
  SynthData data = make_relation_only_corpus(43);
  MfsPredictor mfs = mfs_baseline(data.train, data.inv);
  auto run = [&](bool extended) {
    ModelConfig mc;
    mc.hidden = 32;
    mc.extended = extended;
    mc.seed = 43;
    TrainConfig tc;
    tc.seed = 43;
    auto [params, report] = train(mc, data.inv, data.train, data.dev, data.embeddings, tc, nullptr);
    return evaluate(params, data.inv, data.test, &mfs, 1).f1;
  };
  const double f1_ext = run(true);
  const double f1_plain = run(false);
  const double secs = seconds_since(start);
  c.require(f1_ext - f1_plain >= 0.05, "extended " + fmt("%.4f", f1_ext) + " vs plain " +
                                           fmt("%.4f", f1_plain) + ", margin < 5 points");
  c.require(secs < 300.0, "took " + fmt("%.1f", secs) + " s, bound is 300 s");
  c.note("extended " + fmt("%.4f", f1_ext) + " vs plain " + fmt("%.4f", f1_plain) + " (" +
         fmt("%.1f", secs) + " s)");
}

// 6. Trace export yields one valid distribution per (pass, instance) at five
// passes, and training tilts late-pass attention toward the gold gloss.
void criterion6(Check& c) {
  {
    SynthData tri = make_three_sense_fixture(17);
    ModelConfig mc;
    mc.hidden = 8;
    mc.passes = 5;
    mc.seed = 17;
    ModelParams params = ModelParams::init(mc, tri.embeddings);
    TempDir tmp;
    const std::string path = tmp.path("traces.tsv");
    export_traces(params, tri.inv, {tri.dev[0]}, path);

    std::istringstream in(read_file(path));
    std::map<int, std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream fields(line);
      std::string id, sense;
      int pass = 0;
      double alpha = 0.0;
      fields >> id >> pass >> sense >> alpha;
      c.require(bool(fields), "unparseable trace row: " + line);
      rows[pass].push_back(alpha);
    }
    c.require(rows.size() == 5, "expected 5 passes, saw " + std::to_string(rows.size()));
    for (const auto& [pass, alphas] : rows) {
      c.require(alphas.size() == 3,
                "pass " + std::to_string(pass) + " has " + std::to_string(alphas.size()) + " senses");
      double sum = 0.0;
      for (double a : alphas) {
        c.require(a > 0.0, "nonpositive attention at pass " + std::to_string(pass));
        sum += a;
      }
      c.require(std::abs(sum - 1.0) <= 1e-9, "pass " + std::to_string(pass) + " sums to " +
                                                 fmt("%.12f", sum));
    }
    if (!c.ok) return;
  }

  const std::size_t runs = 10;
  std::size_t tilted = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const std::uint64_t seed = 100 + r;
    SynthData tri = make_three_sense_fixture(seed);
    ModelConfig mc;
    mc.hidden = 8;
    mc.seed = seed;
    TrainConfig tc;
    tc.lr = 0.005;
    tc.max_epochs = 20;
    tc.patience = 10;
    tc.batch_size = 16;
    tc.seed = seed;
    auto [params, report] = train(mc, tri.inv, tri.train, tri.dev, tri.embeddings, tc, nullptr);

    double delta = 0.0;
    for (const LabeledInstance& inst : tri.dev) {
      AttentionTrace tr = trace_instance(params, tri.inv, inst);
      std::size_t gold = 0;
      while (tr.sense_ids[gold] != *inst.gold_sense) ++gold;
      delta += tr.attention.back()[gold] - tr.attention.front()[gold];
    }
    if (delta >= 0.0) ++tilted;
  }
  c.require(tilted * 10 >= runs * 8, "gold attention grew in only " + std::to_string(tilted) + "/" +
                                         std::to_string(runs) + " runs");
  c.note("5x3 trace matrix valid; gold attention grew by the final pass in " +
         std::to_string(tilted) + "/" + std::to_string(runs) + " runs");
}

// 7. Training is bit-stable across identical CLI runs, and a checkpoint
// round-trip reproduces the recorded validation loss exactly.
void criterion7(Check& c) {
  c.require(!cli_binary().empty(), "GASWSD_BIN is not set");
  if (!c.ok) return;
  TempDir tmp;
  write_synth(make_three_sense_fixture(21), tmp.path(""));
  const std::string flags = "train" + synth_flags(tmp) +
                            " --hidden 8 --epochs 6 --patience 4 --lr 0.005 --batch 16 --seed 21"
                            " --out ";
  int rc1 = run_binary(flags + tmp.path("a.ckpt"), tmp.path("log1.txt"));
  int rc2 = run_binary(flags + tmp.path("b.ckpt"), tmp.path("log2.txt"));
  c.require(rc1 == 0 && rc2 == 0,
            "train exited with " + std::to_string(rc1) + "/" + std::to_string(rc2));
  if (!c.ok) return;

  const std::string ck1 = read_file(tmp.path("a.ckpt"));
  c.require(!ck1.empty(), "empty checkpoint");
  c.require(ck1 == read_file(tmp.path("b.ckpt")), "checkpoints differ between identical runs");

  const std::string log = read_file(tmp.path("log1.txt"));
  const auto pos = log.find("best_epoch ");
  c.require(pos != std::string::npos, "missing best_epoch line");
  if (!c.ok) return;
  const auto loss_pos = log.find(" dev_loss ", pos);
  c.require(loss_pos != std::string::npos, "missing dev_loss on best_epoch line");
  if (!c.ok) return;
  const double recorded = std::strtod(log.c_str() + loss_pos + 10, nullptr);

  ModelParams loaded = load_checkpoint(tmp.path("a.ckpt"));
  SenseInventory inv = load_inventory(tmp.path("inventory.tsv"));
  std::vector<LabeledInstance> dev = load_corpus(tmp.path("dev.tsv"), inv);
  auto [dev_loss, dev_acc] = validation_metrics(loaded, inv, dev, 1);
  c.require(dev_loss == recorded, "reloaded dev loss " + fmt("%.17g", dev_loss) +
                                      " != recorded " + fmt("%.17g", recorded));
  c.note("identical checkpoints byte for byte; reloaded dev loss " + fmt("%.17g", dev_loss) +
         " matches to 0 ulp");
}

// 8. Monosemous probability is exactly 1, and a saturated mixing weight
// makes the output bit-independent of every gloss-side parameter.
void criterion8(Check& c) {
  SenseInventory inv = tiny_inventory();
  LabeledInstance mono = make_instance("mono.1", {"near", "the", "riverbank", "today"}, 2,
                                       "riverbank", Pos::Noun, "riverbank%n:1", inv);
  LabeledInstance poly = make_instance("poly.1", {"by", "the", "bank", "door"}, 2, "bank",
                                       Pos::Noun, "bank%n:1", inv);
  std::vector<LabeledInstance> corpus{mono, poly};
  EmbeddingTable emb = make_embeddings(collect_vocab(corpus, inv), 8, 77);

  ModelConfig mc;
  mc.hidden = 6;
  mc.seed = 77;
  ModelParams params = ModelParams::init(mc, emb);
  WordExpert& expert = params.ensure_expert("bank", Pos::Noun, 2);

  PredictionDistribution mono_dist = score(params, inv, mono);
  c.require(mono_dist.probs.size() == 1, "monosemous distribution has more than one entry");
  c.require(mono_dist.probs[0] == 1.0, "monosemous probability is " + fmt("%.17g", mono_dist.probs[0]));

  expert.rho[0] = 50.0;  // sigmoid saturates to exactly 1.0
  PredictionDistribution before = score(params, inv, poly);
  c.require(before.lambda == 1.0, "lambda did not saturate: " + fmt("%.17g", before.lambda));

  ModelParams mutated = params.clone();
  auto bump = [](LstmCellParams& cell) {
    for (double& v : cell.w_input.data) v += 0.25;
    for (double& v : cell.w_recurrent.data) v += 0.25;
    for (double& v : cell.bias.data) v += 0.25;
  };
  bump(mutated.gloss_fwd);
  bump(mutated.gloss_bwd);
  bump(mutated.fus_fwd);
  bump(mutated.fus_bwd);
  for (double& v : mutated.mem_h.data) v += 0.25;
  for (double& v : mutated.mem_w.data) v += 0.25;
  for (double& v : mutated.mem_b.data) v += 0.25;

  PredictionDistribution after = score(mutated, inv, poly);
  c.require(after.probs.data == before.probs.data,
            "probabilities moved under gloss-side perturbation");
  c.note("monosemous prob exactly 1; saturated mixing is bit-independent of gloss parameters");
}

// 9. The frequency baseline reproduces the hand-counted oracle exactly.
void criterion9(Check& c) {
  SynthData hc = make_handcount_fixture();
  MfsPredictor mfs = mfs_baseline(hc.train, hc.inv);
  EvalReport r = evaluate_predictor(
      [&](const LabeledInstance& inst) { return backoff_predict(inst, hc.inv, &mfs); }, hc.inv,
      hc.test);
  c.require(r.attempted == 20, "attempted " + std::to_string(r.attempted) + " of 20");
  c.require(r.correct == 9, "correct " + std::to_string(r.correct) + ", hand count says 9");
  c.require(r.f1 == 0.45, "F1 " + fmt("%.17g", r.f1) + " != exact 0.45");
  c.note("9/20 correct, F1 exactly 0.45");
}

// 10. The pass sweep emits a well-formed five-row table through the CLI.
void criterion10(Check& c) {
  c.require(!cli_binary().empty(), "GASWSD_BIN is not set");
  if (!c.ok) return;
  TempDir tmp;
  write_synth(make_three_sense_fixture(31), tmp.path(""));
  int rc = run_binary("sweep-passes --min 1 --max 5" + synth_flags(tmp) + " --test " +
                          tmp.path("test.tsv") +
                          " --hidden 6 --epochs 3 --patience 2 --batch 16 --seed 31",
                      tmp.path("out.txt"));
  c.require(rc == 0, "sweep-passes exited with " + std::to_string(rc));
  if (!c.ok) return;

  std::istringstream in(read_file(tmp.path("out.txt")));
  std::string line;
  bool seen_header = false;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line == "passes\ttest_f1\tbest_epoch") {
      seen_header = true;
      continue;
    }
    if (!seen_header) continue;
    std::istringstream fields(line);
    std::size_t passes = 0, best_epoch = 0;
    double f1 = -1.0;
    fields >> passes >> f1 >> best_epoch;
    c.require(bool(fields), "unparseable table row: " + line);
    ++rows;
    c.require(passes == rows, "row " + std::to_string(rows) + " reports passes " +
                                  std::to_string(passes));
    c.require(f1 >= 0.0 && f1 <= 1.0, "row " + std::to_string(rows) + " F1 out of range");
    c.require(best_epoch >= 1, "row " + std::to_string(rows) + " best epoch missing");
  }
  c.require(seen_header, "table header missing");
  c.require(rows == 5, "table has " + std::to_string(rows) + " rows, expected 5");
  c.note("five table rows, one per pass count");
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  for (int i = 1; i < argc; ++i)
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) criterion = std::atoi(argv[++i]);
  if (criterion < 1 || criterion > 10) {
    std::cerr << "usage: gas_acceptance --criterion N   (N in 1..10)\n";
    return 2;
  }

  Check c;
  switch (criterion) {
    case 1: criterion1(c); break;
    case 2: criterion2(c); break;
    case 3: criterion3(c); break;
    case 4: criterion4(c); break;
    case 5: criterion5(c); break;
    case 6: criterion6(c); break;
    case 7: criterion7(c); break;
    case 8: criterion8(c); break;
    case 9: criterion9(c); break;
    case 10: criterion10(c); break;
  }
  std::cout << "criterion " << criterion << (c.ok ? " PASS " : " FAIL ") << c.detail << '\n';
  return c.ok ? 0 : 1;
}
