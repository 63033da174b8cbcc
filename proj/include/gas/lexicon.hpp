#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gas {

enum class Pos { Noun, Verb, Adj, Adv };

// Single-letter file codes: n, v, a, r.
char pos_code(Pos p);
std::optional<Pos> pos_from_code(char c);
const char* pos_name(Pos p);

using SenseId = std::string;

struct SenseRecord {
  SenseId sense_id;
  std::string lemma;
  Pos pos = Pos::Noun;
  std::vector<std::string> gloss;  // whitespace-tokenized, non-empty
  std::vector<SenseId> hypernyms;
  std::vector<SenseId> hyponyms;
};

// Candidate senses per (lemma, pos) in file order; rank 1 = first line seen.
class SenseInventory {
 public:
  void add(SenseRecord rec);  // throws ValidationError on duplicate id
  void validate_edges() const;

  bool contains(const SenseId& id) const { return records_.count(id) != 0; }
  const SenseRecord& record(const SenseId& id) const;
  const std::vector<SenseId>& senses_of(const std::string& lemma, Pos pos) const;
  std::size_t size() const { return records_.size(); }

  // Deterministic iteration in insertion (file) order.
  const std::vector<SenseId>& ordered_ids() const { return order_; }

 private:
  std::unordered_map<SenseId, SenseRecord> records_;
  std::vector<SenseId> order_;
  std::map<std::pair<std::string, Pos>, std::vector<SenseId>> index_;
  static const std::vector<SenseId> kEmpty;
};

// Depth-limited BFS expansion of one sense's gloss neighborhood.
// Position 1 on each side is a direct relation (the nearest sense).
struct ExpandedGlossList {
  std::vector<std::pair<SenseId, std::vector<std::string>>> hypernym_glosses;  // nearest-first
  std::pair<SenseId, std::vector<std::string>> original;
  std::vector<std::pair<SenseId, std::vector<std::string>>> hyponym_glosses;  // nearest-first
};

// Inventory TSV: sense_id \t lemma \t pos \t hypernyms \t hyponyms \t gloss.
// Edge lists are comma-separated or "-"; lines starting with '#' are comments.
SenseInventory load_inventory(const std::string& path);
void write_inventory(const SenseInventory& inv, const std::string& path);

// Level-by-level BFS over hypernym (resp. hyponym) edges to depth K,
// edge order within a level, first visit wins. Nouns and verbs only;
// adjectives and adverbs expand to nothing regardless of K. A sense
// reachable on both sides is kept on the hypernym side only, so no id
// repeats across the structure. `max_per_side` == 0 means unlimited.
ExpandedGlossList expand_gloss(const SenseInventory& inv, const SenseId& sense, std::size_t depth,
                               std::size_t max_per_side = 0);

}  // namespace gas
