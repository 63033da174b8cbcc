#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gas/corpus.hpp"
#include "gas/lexicon.hpp"

namespace gas::testing {

struct SynthData {
  SenseInventory inv;
  std::vector<LabeledInstance> train;
  std::vector<LabeledInstance> dev;
  std::vector<LabeledInstance> test;
  EmbeddingTable embeddings;
};

// Learnable corpus: 8 lemmas with 2-3 senses; every sense has a signature
// token planted both in its gloss and in the contexts of its instances, so
// context and gloss content correlate by construction. Sense draws are
// uniform, keeping the most-frequent-sense baseline near chance.
// 300 train / 60 dev / 60 test.
SynthData make_separable_corpus(std::uint64_t seed, std::size_t embedding_dim = 16);

// Transfer corpus: the two senses of every lemma share an identical,
// uninformative original gloss; each sense's signature token appears only
// in the gloss of its (monosemous) hypernym. Eight anchor lemmas carry
// plenty of training data; two rare lemmas get only a few shots and make
// up the whole test set. Discriminating on the test split requires the
// expanded glosses.
SynthData make_relation_only_corpus(std::uint64_t seed, std::size_t embedding_dim = 16);

// One three-sense lemma with signature-token structure, small enough to
// train in seconds. `dev` doubles as the trace probe set.
SynthData make_three_sense_fixture(std::uint64_t seed, std::size_t embedding_dim = 12);

// Hand-checkable corpus for the most-frequent-sense baseline:
//   lemma "arm": train counts s1=3, s2=1 -> MFS s1; test 6 of 10 gold s1
//   lemma "bat": train counts s1=2, s2=2 -> tie, rank-1 s1; test 3 of 10 gold s1
// so the baseline scores exactly 9/20 = 0.45 on the 20 test instances.
SynthData make_handcount_fixture();

// Writes inventory.tsv, train.tsv, dev.tsv, test.tsv, embeddings.txt.
void write_synth(const SynthData& data, const std::string& dir);

}  // namespace gas::testing
