#include "semfunc/corpus.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "semfunc/errors.hpp"

namespace semfunc {

namespace {

std::string lowercase_ascii(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// Comment and blank lines carry no data in any of the formats here.
bool skippable(const std::string& line) {
  return line.empty() || line[0] == '#';
}

std::string chomp(std::string line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  return line;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open '" + path + "'");
  }
  return in;
}

}  // namespace

std::string noun_predicate(const std::string& lemma) { return lemma + "_n"; }
std::string verb_predicate(const std::string& lemma) { return lemma + "_v"; }

TripleLoadResult load_triples(std::istream& in) {
  TripleLoadResult result;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = chomp(raw);
    if (skippable(line)) {
      continue;
    }
    ++result.data_lines;
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 3) {
      result.malformed.push_back({line_no, line,
                                  "expected 3 tab-separated fields, got " +
                                      std::to_string(fields.size())});
      continue;
    }
    const std::string subject = lowercase_ascii(fields[0]);
    const std::string verb = lowercase_ascii(fields[1]);
    const std::string object = lowercase_ascii(fields[2]);
    if (verb.empty() || verb == "_") {
      result.malformed.push_back({line_no, line, "missing verb"});
      continue;
    }
    if (subject.empty() || object.empty()) {
      result.malformed.push_back({line_no, line, "empty argument field"});
      continue;
    }
    if (subject == "_" && object == "_") {
      result.malformed.push_back(
          {line_no, line, "both arguments missing; at least one is required"});
      continue;
    }
    TripleRecord record;
    if (subject != "_") {
      record.subject = subject;
    }
    record.verb = verb;
    if (object != "_") {
      record.object = object;
    }
    result.triples.push_back(std::move(record));
  }
  if (result.data_lines > 0) {
    const double rate = static_cast<double>(result.malformed.size()) /
                        static_cast<double>(result.data_lines);
    if (rate > 0.10) {
      std::ostringstream msg;
      msg << "corpus rejected: " << result.malformed.size() << " of "
          << result.data_lines << " data lines malformed ("
          << static_cast<int>(rate * 100.0) << "%), over the 10% limit";
      if (!result.malformed.empty()) {
        msg << "; first bad line " << result.malformed.front().line << ": "
            << result.malformed.front().reason;
      }
      throw InputError(msg.str());
    }
  }
  return result;
}

TripleLoadResult load_triples_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return load_triples(in);
}

void Vocabulary::add(const std::string& id, double count) {
  auto [it, inserted] = index_.emplace(id, ids_.size());
  if (inserted) {
    ids_.push_back(id);
    counts_.push_back(count);
  } else {
    counts_[it->second] += count;
  }
}

bool Vocabulary::contains(const std::string& id) const {
  return index_.count(id) != 0;
}

double Vocabulary::frequency(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw LookupError("no predicate '" + id + "' in vocabulary");
  }
  return counts_[it->second];
}

std::size_t Vocabulary::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw LookupError("no predicate '" + id + "' in vocabulary");
  }
  return it->second;
}

namespace {

void tagged_predicates(const TripleRecord& t,
                       std::vector<std::string>& out) {
  out.clear();
  if (t.subject) {
    out.push_back(noun_predicate(*t.subject));
  }
  out.push_back(verb_predicate(t.verb));
  if (t.object) {
    out.push_back(noun_predicate(*t.object));
  }
}

}  // namespace

VocabularyBuildResult build_vocabulary(const std::vector<TripleRecord>& triples,
                                       std::size_t min_count) {
  VocabularyBuildResult result;
  result.kept = triples;

  // Prune-and-drop to a fixpoint: dropping a triple lowers its other
  // predicates' counts, which can push them below min_count in turn.
  std::vector<std::string> preds;
  while (true) {
    std::unordered_map<std::string, double> counts;
    for (const TripleRecord& t : result.kept) {
      tagged_predicates(t, preds);
      for (const std::string& p : preds) {
        counts[p] += 1.0;
      }
    }
    std::set<std::string> low;
    for (const auto& [id, count] : counts) {
      if (count < static_cast<double>(min_count)) {
        low.insert(id);
      }
    }
    if (low.empty()) {
      break;
    }
    std::vector<TripleRecord> next;
    next.reserve(result.kept.size());
    for (const TripleRecord& t : result.kept) {
      tagged_predicates(t, preds);
      bool keep = true;
      for (const std::string& p : preds) {
        if (low.count(p)) {
          keep = false;
          break;
        }
      }
      if (keep) {
        next.push_back(t);
      } else {
        ++result.dropped;
      }
    }
    result.kept = std::move(next);
  }

  for (const TripleRecord& t : result.kept) {
    tagged_predicates(t, preds);
    for (const std::string& p : preds) {
      result.vocab.add(p);
    }
  }
  return result;
}

std::vector<SimilarityPair> load_similarity(std::istream& in) {
  std::vector<SimilarityPair> pairs;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = chomp(raw);
    if (skippable(line)) {
      continue;
    }
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw InputError("similarity line " + std::to_string(line_no) +
                       ": expected word1<TAB>word2<TAB>score");
    }
    double score = 0.0;
    const auto [end, ec] = std::from_chars(
        fields[2].data(), fields[2].data() + fields[2].size(), score);
    if (ec != std::errc() || end != fields[2].data() + fields[2].size() ||
        !std::isfinite(score)) {
      throw InputError("similarity line " + std::to_string(line_no) +
                       ": score '" + fields[2] + "' is not a finite number");
    }
    pairs.push_back(
        {lowercase_ascii(fields[0]), lowercase_ascii(fields[1]), score});
  }
  return pairs;
}

std::vector<SimilarityPair> load_similarity_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return load_similarity(in);
}

std::vector<RelpronEntry> load_relpron(std::istream& in) {
  std::vector<RelpronEntry> entries;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = chomp(raw);
    if (skippable(line)) {
      continue;
    }
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 6) {
      throw InputError(
          "relpron line " + std::to_string(line_no) +
          ": expected term<TAB>hypernym<TAB>verb<TAB>argument<TAB>role<TAB>split");
    }
    for (std::size_t i = 0; i < 4; ++i) {
      if (fields[i].empty()) {
        throw InputError("relpron line " + std::to_string(line_no) +
                         ": empty field");
      }
    }
    RelpronEntry entry;
    entry.term = lowercase_ascii(fields[0]);
    entry.hypernym = lowercase_ascii(fields[1]);
    entry.verb = lowercase_ascii(fields[2]);
    entry.argument = lowercase_ascii(fields[3]);
    if (fields[4] == "SBJ") {
      entry.role = ArgRole::Subject;
    } else if (fields[4] == "OBJ") {
      entry.role = ArgRole::Object;
    } else {
      throw InputError("relpron line " + std::to_string(line_no) + ": role '" +
                       fields[4] + "' must be SBJ or OBJ");
    }
    const std::string split = lowercase_ascii(fields[5]);
    if (split == "dev") {
      entry.split = RelpronSplit::Dev;
    } else if (split == "test") {
      entry.split = RelpronSplit::Test;
    } else {
      throw InputError("relpron line " + std::to_string(line_no) + ": split '" +
                       fields[5] + "' must be dev or test");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<RelpronEntry> load_relpron_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return load_relpron(in);
}

}  // namespace semfunc
