#include "doctest.h"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gas/cli.hpp"
#include "gas/lexicon.hpp"
#include "synth.hpp"

using namespace gas;
using namespace gas::testing;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

// Runs the CLI in-process with both streams captured.
CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
  CliResult r;
  r.code = run_cli(args);
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("usage problems exit 1 and help exits 0") {
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"no-such-command"}).code == 1);
  CHECK(run({"train"}).code == 1);             // missing required flags
  CHECK(run({"train", "--bogus"}).code == 1);  // unknown flag
  CHECK(run({"grad-check", "--update", "weird"}).code == 1);

  CliResult help = run({"train", "--help"});
  CHECK(help.code == 0);
  CHECK(contains(help.out, "--inventory"));
}

TEST_CASE("data problems exit 2 and name the culprit") {
  TempDir tmp;
  CliResult missing = run({"eval", "--ckpt", tmp.path("nope.ckpt"), "--test", tmp.path("nope.tsv"),
                           "--inventory", tmp.path("nope.inv")});
  CHECK(missing.code == 2);
  CHECK(contains(missing.err, "error:"));
  CHECK(contains(missing.err, "nope.inv"));

  write_synth(make_three_sense_fixture(3), tmp.path(""));
  write_file(tmp.path("bad.tsv"), "only\tthree\tcolumns\n");
  CliResult bad = run({"train", "--inventory", tmp.path("inventory.tsv"), "--train",
                       tmp.path("bad.tsv"), "--dev", tmp.path("dev.tsv"), "--embeddings",
                       tmp.path("embeddings.txt"), "--out", tmp.path("m.ckpt")});
  CHECK(bad.code == 2);
  CHECK(contains(bad.err, "bad.tsv:1:"));
}

TEST_CASE("train, eval, disambiguate and trace round-trip through files") {
  TempDir tmp;
  SynthData tri = make_three_sense_fixture(7);
  write_synth(tri, tmp.path(""));
  const std::string ckpt = tmp.path("model.ckpt");

  CliResult tr = run({"train", "--inventory", tmp.path("inventory.tsv"), "--train",
                      tmp.path("train.tsv"), "--dev", tmp.path("dev.tsv"), "--embeddings",
                      tmp.path("embeddings.txt"), "--out", ckpt, "--hidden", "8", "--epochs", "8",
                      "--lr", "0.005", "--batch", "16", "--patience", "4", "--seed", "7"});
  CAPTURE(tr.err);
  REQUIRE(tr.code == 0);
  CHECK(contains(tr.out, "config hidden 8 passes 3 update concat depth 4 extended 1"));
  CHECK(contains(tr.out, "epoch 1 train_loss "));
  CHECK(contains(tr.out, "checkpoint " + ckpt));

  CliResult ev = run({"eval", "--ckpt", ckpt, "--test", tmp.path("test.tsv"), "--inventory",
                      tmp.path("inventory.tsv"), "--mfs-train", tmp.path("train.tsv")});
  REQUIRE(ev.code == 0);
  CHECK(contains(ev.out, "config hidden 8"));
  CHECK(contains(ev.out, "mfs_baseline_f1 "));
  CHECK(contains(ev.out, "RESULT f1="));

  const std::string preds = tmp.path("preds.tsv");
  CliResult dis = run({"disambiguate", "--ckpt", ckpt, "--input", tmp.path("test.tsv"),
                       "--inventory", tmp.path("inventory.tsv"), "--out", preds});
  REQUIRE(dis.code == 0);
  std::ifstream in(preds);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(contains(line, "# config hidden 8"));
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    auto tab1 = line.find('\t');
    REQUIRE(tab1 != std::string::npos);
    auto tab2 = line.find('\t', tab1 + 1);
    REQUIRE(tab2 != std::string::npos);
    CHECK(line.compare(tab1 + 1, 9, "spring%n:") == 0);
    double prob = std::stod(line.substr(tab2 + 1));
    CHECK(prob > 0.0);
    CHECK(prob <= 1.0);
  }
  CHECK(rows == tri.test.size());

  const std::string traces = tmp.path("traces.tsv");
  CliResult trc = run({"trace", "--ckpt", ckpt, "--input", tmp.path("test.tsv"), "--inventory",
                       tmp.path("inventory.tsv"), "--out", traces});
  REQUIRE(trc.code == 0);
  std::string body = read_file(traces);
  CHECK(body.rfind("# config hidden 8", 0) == 0);
  CHECK(contains(body, "\t1\tspring%n:1\t"));
  CHECK(contains(body, "\t3\tspring%n:3\t"));
}

TEST_CASE("grad-check subcommand audits a micro model") {
  CliResult r = run({"grad-check", "--hidden", "4", "--passes", "2", "--update", "linear"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "update linear group context/fwd/W max_rel_err "));
  CHECK(contains(r.out, "update linear group memory/H max_rel_err "));
  CHECK(contains(r.out, "grad-check max_rel_err "));
  CHECK(contains(r.out, " pass\n"));
  CHECK_FALSE(contains(r.out, "FAIL"));
}

TEST_CASE("sweep-passes prints one table row per pass count") {
  TempDir tmp;
  write_synth(make_three_sense_fixture(9), tmp.path(""));
  const std::string table = tmp.path("sweep.tsv");
  CliResult r = run({"sweep-passes", "--min", "1", "--max", "2", "--inventory",
                     tmp.path("inventory.tsv"), "--train", tmp.path("train.tsv"), "--dev",
                     tmp.path("dev.tsv"), "--test", tmp.path("test.tsv"), "--embeddings",
                     tmp.path("embeddings.txt"), "--out", table, "--hidden", "6", "--epochs", "3",
                     "--patience", "2", "--batch", "16", "--seed", "9"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "passes 1 f1 "));
  CHECK(contains(r.out, "passes\ttest_f1\tbest_epoch\n1\t"));
  CHECK(contains(r.out, "\n2\t"));
  std::string body = read_file(table);
  CHECK(body.rfind("# config hidden 6", 0) == 0);
  CHECK(contains(body, "passes\ttest_f1\tbest_epoch\n1\t"));
}

TEST_CASE("ingest subcommand converts a database dump") {
  TempDir tmp;
  write_file(tmp.path("index.noun"), "rock n 1 0 1 1 00000042\n");
  write_file(tmp.path("data.noun"), "00000042 03 n 01 rock 0 000 | a hard mineral mass\n");
  const std::string out = tmp.path("inv.tsv");
  CliResult r = run({"ingest", "--wordnet", tmp.path(""), "--out", out});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "ingested 1 senses -> " + out));
  SenseInventory inv = load_inventory(out);
  CHECK(inv.record("rock%n:00000042").gloss ==
        std::vector<std::string>{"a", "hard", "mineral", "mass"});

  TempDir empty;
  CHECK(run({"ingest", "--wordnet", empty.path(""), "--out", out}).code == 2);
}
