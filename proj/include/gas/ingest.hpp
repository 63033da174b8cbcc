#pragma once

#include <string>

#include "gas/lexicon.hpp"

namespace gas {

// Best-effort conversion of a WordNet database directory (index.noun,
// data.noun and friends) into a sense inventory. Senses come out grouped
// per lemma in the index file's listed order, so inventory rank follows
// the source's sense ranking. Hypernym (@) and hyponym (~) pointers are
// kept and rewritten to name the target synset's head word; everything
// else is dropped. Edges whose target was not ingested are pruned.
SenseInventory ingest_wordnet(const std::string& dir);

}  // namespace gas
