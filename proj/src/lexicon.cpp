#include "gas/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "gas/error.hpp"

namespace gas {

const std::vector<SenseId> SenseInventory::kEmpty;

char pos_code(Pos p) {
  switch (p) {
    case Pos::Noun: return 'n';
    case Pos::Verb: return 'v';
    case Pos::Adj: return 'a';
    case Pos::Adv: return 'r';
  }
  return '?';
}

std::optional<Pos> pos_from_code(char c) {
  switch (c) {
    case 'n': return Pos::Noun;
    case 'v': return Pos::Verb;
    case 'a': return Pos::Adj;
    case 'r': return Pos::Adv;
    default: return std::nullopt;
  }
}

const char* pos_name(Pos p) {
  switch (p) {
    case Pos::Noun: return "noun";
    case Pos::Verb: return "verb";
    case Pos::Adj: return "adj";
    case Pos::Adv: return "adv";
  }
  return "?";
}

void SenseInventory::add(SenseRecord rec) {
  if (rec.sense_id.empty()) throw ValidationError("empty sense id");
  if (rec.sense_id.find_first_of("\t\n") != std::string::npos)
    throw ValidationError("sense id contains tab or newline: '" + rec.sense_id + "'");
  if (rec.gloss.empty()) throw ValidationError("sense '" + rec.sense_id + "' has an empty gloss");
  for (const auto* edges : {&rec.hypernyms, &rec.hyponyms}) {
    std::set<SenseId> seen;
    for (const SenseId& e : *edges) {
      if (e == rec.sense_id)
        throw ValidationError("sense '" + rec.sense_id + "' lists itself as a relation");
      if (!seen.insert(e).second)
        throw ValidationError("sense '" + rec.sense_id + "' lists duplicate relation '" + e + "'");
    }
  }
  if (records_.count(rec.sense_id)) throw ValidationError("duplicate sense id '" + rec.sense_id + "'");
  const SenseId id = rec.sense_id;
  index_[{rec.lemma, rec.pos}].push_back(id);
  order_.push_back(id);
  records_.emplace(id, std::move(rec));
}

void SenseInventory::validate_edges() const {
  for (const SenseId& id : order_) {
    const SenseRecord& rec = records_.at(id);
    for (const auto* edges : {&rec.hypernyms, &rec.hyponyms}) {
      for (const SenseId& e : *edges) {
        if (!records_.count(e))
          throw ValidationError("sense '" + id + "' references undefined sense '" + e + "'");
      }
    }
  }
}

const SenseRecord& SenseInventory::record(const SenseId& id) const {
  auto it = records_.find(id);
  if (it == records_.end()) throw ValidationError("unknown sense id '" + id + "'");
  return it->second;
}

const std::vector<SenseId>& SenseInventory::senses_of(const std::string& lemma, Pos pos) const {
  auto it = index_.find({lemma, pos});
  return it == index_.end() ? kEmpty : it->second;
}

namespace {

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) {
    std::transform(tok.begin(), tok.end(), tok.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.push_back(std::move(tok));
  }
  return out;
}

std::vector<SenseId> split_edges(const std::string& s) {
  if (s == "-") return {};
  std::vector<SenseId> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

SenseInventory load_inventory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open inventory file '" + path + "'");
  SenseInventory inv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line);
    if (fields.size() != 6)
      throw ParseError(path, lineno,
                       "expected 6 tab-separated columns, got " + std::to_string(fields.size()));
    auto pos = fields[2].size() == 1 ? pos_from_code(fields[2][0]) : std::nullopt;
    if (!pos) throw ParseError(path, lineno, "bad pos code '" + fields[2] + "' (expected n/v/a/r)");
    SenseRecord rec;
    rec.sense_id = fields[0];
    rec.lemma = fields[1];
    rec.pos = *pos;
    rec.hypernyms = split_edges(fields[3]);
    rec.hyponyms = split_edges(fields[4]);
    rec.gloss = split_tokens(fields[5]);
    if (rec.gloss.empty()) throw ParseError(path, lineno, "empty gloss");
    try {
      inv.add(std::move(rec));
    } catch (const ValidationError& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  inv.validate_edges();
  return inv;
}

void write_inventory(const SenseInventory& inv, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write inventory file '" + path + "'");
  auto join = [](const std::vector<std::string>& v, char sep) {
    if (v.empty()) return std::string("-");
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += sep;
      s += v[i];
    }
    return s;
  };
  for (const SenseId& id : inv.ordered_ids()) {
    const SenseRecord& r = inv.record(id);
    out << r.sense_id << '\t' << r.lemma << '\t' << pos_code(r.pos) << '\t' << join(r.hypernyms, ',')
        << '\t' << join(r.hyponyms, ',') << '\t';
    for (std::size_t i = 0; i < r.gloss.size(); ++i) out << (i ? " " : "") << r.gloss[i];
    out << '\n';
  }
}

ExpandedGlossList expand_gloss(const SenseInventory& inv, const SenseId& sense, std::size_t depth,
                               std::size_t max_per_side) {
  const SenseRecord& start = inv.record(sense);
  ExpandedGlossList out;
  out.original = {start.sense_id, start.gloss};
  const bool expandable = start.pos == Pos::Noun || start.pos == Pos::Verb;
  if (!expandable || depth == 0) return out;

  std::set<SenseId> visited{sense};
  auto bfs_side = [&](bool hypernym_side, auto& dest) {
    std::vector<SenseId> frontier{sense};
    for (std::size_t level = 1; level <= depth && !frontier.empty(); ++level) {
      std::vector<SenseId> next;
      for (const SenseId& cur : frontier) {
        const SenseRecord& rec = inv.record(cur);
        const auto& edges = hypernym_side ? rec.hypernyms : rec.hyponyms;
        for (const SenseId& e : edges) {
          if (max_per_side != 0 && dest.size() >= max_per_side) return;
          if (!visited.insert(e).second) continue;
          dest.push_back({e, inv.record(e).gloss});
          next.push_back(e);
        }
      }
      frontier = std::move(next);
    }
  };
  bfs_side(true, out.hypernym_glosses);
  bfs_side(false, out.hyponym_glosses);
  return out;
}

}  // namespace gas
