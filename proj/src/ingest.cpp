#include "gas/ingest.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "gas/error.hpp"

namespace gas {

namespace {

namespace fs = std::filesystem;

struct Synset {
  std::string offset;
  Pos pos = Pos::Noun;
  std::vector<std::string> words;                       // lowercased, markers stripped
  std::vector<std::pair<char, std::string>> edges;      // '@' or '~', target key
  std::vector<std::string> gloss;
};

// Satellite adjectives ('s') fold into 'a'.
std::optional<Pos> pos_from_db_code(char c) { return pos_from_code(c == 's' ? 'a' : c); }

std::string synset_key(Pos pos, const std::string& offset) {
  return std::string(1, pos_code(pos)) + offset;
}

std::string lowercased(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Word entries carry syntax markers like "(a)" or "(ip)" after the lemma.
std::string strip_marker(const std::string& w) {
  auto paren = w.find('(');
  return paren == std::string::npos ? w : w.substr(0, paren);
}

std::vector<std::string> tokenize_gloss(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream iss(text);
  std::string tok;
  while (iss >> tok) {
    std::size_t b = 0, e = tok.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(tok[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(tok[e - 1]))) --e;
    if (b < e) out.push_back(lowercased(tok.substr(b, e - b)));
  }
  return out;
}

bool skippable(const std::string& line) { return line.empty() || line[0] == ' '; }

unsigned long parse_count(const std::string& tok, int base, const std::string& file,
                          std::size_t lineno, const char* what) {
  try {
    std::size_t used = 0;
    unsigned long v = std::stoul(tok, &used, base);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, lineno, std::string("bad ") + what + " field '" + tok + "'");
  }
}

void load_data_file(const std::string& path, std::map<std::string, Synset>& synsets) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto bar = line.find('|');
    std::string head = bar == std::string::npos ? line : line.substr(0, bar);
    std::istringstream iss(head);

    Synset syn;
    std::string ss_type, w_cnt_tok;
    int lex_filenum = 0;
    if (!(iss >> syn.offset >> lex_filenum >> ss_type >> w_cnt_tok))
      throw ParseError(path, lineno, "truncated synset header");
    if (ss_type.size() != 1) throw ParseError(path, lineno, "bad synset type '" + ss_type + "'");
    auto pos = pos_from_db_code(ss_type[0]);
    if (!pos) throw ParseError(path, lineno, "bad synset type '" + ss_type + "'");
    syn.pos = *pos;

    const auto w_cnt = parse_count(w_cnt_tok, 16, path, lineno, "word count");
    for (unsigned long i = 0; i < w_cnt; ++i) {
      std::string word, lex_id;
      if (!(iss >> word >> lex_id)) throw ParseError(path, lineno, "truncated word list");
      syn.words.push_back(lowercased(strip_marker(word)));
    }
    if (syn.words.empty()) throw ParseError(path, lineno, "synset with no words");

    std::string p_cnt_tok;
    if (!(iss >> p_cnt_tok)) throw ParseError(path, lineno, "missing pointer count");
    const auto p_cnt = parse_count(p_cnt_tok, 10, path, lineno, "pointer count");
    for (unsigned long i = 0; i < p_cnt; ++i) {
      std::string sym, target_offset, target_pos, source_target;
      if (!(iss >> sym >> target_offset >> target_pos >> source_target))
        throw ParseError(path, lineno, "truncated pointer list");
      if (sym.empty() || target_pos.size() != 1) continue;
      auto tpos = pos_from_db_code(target_pos[0]);
      if (!tpos) continue;
      const char kind = sym[0];
      if (kind == '@' || kind == '~')  // "@", "@i", "~", "~i"
        syn.edges.emplace_back(kind, synset_key(*tpos, target_offset));
    }
    // Verb frames (and anything else before the gloss bar) are ignored.

    if (bar != std::string::npos) syn.gloss = tokenize_gloss(line.substr(bar + 1));
    if (syn.gloss.empty()) syn.gloss = {syn.words[0]};

    synsets.emplace(synset_key(syn.pos, syn.offset), std::move(syn));
  }
}

struct IndexEntry {
  std::string lemma;
  Pos pos = Pos::Noun;
  std::vector<std::string> offsets;  // rank order
};

std::vector<IndexEntry> load_index_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::vector<IndexEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream iss(line);
    IndexEntry ent;
    std::string pos_tok, cnt_tok, p_cnt_tok;
    if (!(iss >> ent.lemma >> pos_tok >> cnt_tok >> p_cnt_tok))
      throw ParseError(path, lineno, "truncated index entry");
    ent.lemma = lowercased(ent.lemma);
    if (pos_tok.size() != 1) throw ParseError(path, lineno, "bad pos field '" + pos_tok + "'");
    auto pos = pos_from_db_code(pos_tok[0]);
    if (!pos) throw ParseError(path, lineno, "bad pos field '" + pos_tok + "'");
    ent.pos = *pos;

    const auto synset_cnt = parse_count(cnt_tok, 10, path, lineno, "synset count");
    const auto p_cnt = parse_count(p_cnt_tok, 10, path, lineno, "pointer count");
    std::string skip;
    for (unsigned long i = 0; i < p_cnt; ++i)
      if (!(iss >> skip)) throw ParseError(path, lineno, "truncated pointer symbol list");
    std::string sense_cnt, tagsense_cnt;
    if (!(iss >> sense_cnt >> tagsense_cnt))
      throw ParseError(path, lineno, "truncated sense counts");
    for (unsigned long i = 0; i < synset_cnt; ++i) {
      std::string offset;
      if (!(iss >> offset)) throw ParseError(path, lineno, "truncated offset list");
      ent.offsets.push_back(offset);
    }
    entries.push_back(std::move(ent));
  }
  return entries;
}

}  // namespace

SenseInventory ingest_wordnet(const std::string& dir) {
  static const char* const kSections[] = {"noun", "verb", "adj", "adv"};

  std::map<std::string, Synset> synsets;
  std::vector<IndexEntry> entries;
  bool found_any = false;
  for (const char* name : kSections) {
    const std::string data_path = (fs::path(dir) / (std::string("data.") + name)).string();
    const std::string index_path = (fs::path(dir) / (std::string("index.") + name)).string();
    if (!fs::exists(data_path) || !fs::exists(index_path)) continue;
    found_any = true;
    load_data_file(data_path, synsets);
    auto part = load_index_file(index_path);
    entries.insert(entries.end(), part.begin(), part.end());
  }
  if (!found_any)
    throw ParseError("no index/data file pairs under '" + dir + "'");

  // First pass: materialize records; second pass: prune dangling edges.
  std::vector<SenseRecord> records;
  std::set<std::string> ids;
  for (const auto& ent : entries) {
    for (const auto& offset : ent.offsets) {
      auto it = synsets.find(synset_key(ent.pos, offset));
      if (it == synsets.end()) continue;
      const Synset& syn = it->second;
      SenseRecord rec;
      rec.sense_id = ent.lemma + '%' + pos_code(ent.pos) + ':' + offset;
      if (!ids.insert(rec.sense_id).second) continue;
      rec.lemma = ent.lemma;
      rec.pos = ent.pos;
      rec.gloss = syn.gloss;
      for (const auto& [kind, target_key] : syn.edges) {
        auto target = synsets.find(target_key);
        if (target == synsets.end()) continue;
        const Synset& t = target->second;
        SenseId tid = t.words[0] + '%' + pos_code(t.pos) + ':' + t.offset;
        (kind == '@' ? rec.hypernyms : rec.hyponyms).push_back(std::move(tid));
      }
      records.push_back(std::move(rec));
    }
  }

  SenseInventory inv;
  for (auto& rec : records) {
    auto keep = [&](std::vector<SenseId>& edge_list) {
      std::vector<SenseId> kept;
      for (auto& id : edge_list)
        if (ids.count(id)) kept.push_back(std::move(id));
      edge_list = std::move(kept);
    };
    keep(rec.hypernyms);
    keep(rec.hyponyms);
    inv.add(std::move(rec));
  }
  inv.validate_edges();
  return inv;
}

}  // namespace gas
