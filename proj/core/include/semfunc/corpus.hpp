#ifndef SEMFUNC_CORPUS_HPP
#define SEMFUNC_CORPUS_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "semfunc/model.hpp"

namespace semfunc {

// Corpus lines are subject<TAB>verb<TAB>object, lowercase lemmas, with "_"
// marking a missing argument and "#" starting a comment line. At least one
// argument must be present.
struct TripleRecord {
  std::optional<std::string> subject;
  std::string verb;
  std::optional<std::string> object;

  bool transitive() const { return subject.has_value() && object.has_value(); }
};

struct MalformedLine {
  std::size_t line = 0;  // 1-based
  std::string text;
  std::string reason;
};

struct TripleLoadResult {
  std::vector<TripleRecord> triples;
  std::vector<MalformedLine> malformed;
  std::size_t data_lines = 0;  // non-comment, non-blank lines seen
};

// Lenient loader: malformed lines are collected with line numbers rather
// than aborting, but more than 10% malformed is a hard InputError.
TripleLoadResult load_triples(std::istream& in);
TripleLoadResult load_triples_file(const std::string& path);

// Role-tagged predicate ids keep a noun and a verb of the same lemma
// distinct ("run" the noun vs "run" the verb).
std::string noun_predicate(const std::string& lemma);
std::string verb_predicate(const std::string& lemma);

// Predicate counts in first-occurrence order, so integer handles and any
// iteration over the vocabulary are stable.
class Vocabulary {
 public:
  void add(const std::string& id, double count = 1.0);
  bool contains(const std::string& id) const;
  double frequency(const std::string& id) const;       // LookupError if absent
  std::size_t index_of(const std::string& id) const;   // LookupError if absent
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }

 private:
  std::vector<std::string> ids_;
  std::vector<double> counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct VocabularyBuildResult {
  Vocabulary vocab;
  std::vector<TripleRecord> kept;  // triples whose predicates all survived
  std::size_t dropped = 0;         // triples removed by pruning
};

// Count role-tagged predicates, prune those below min_count, drop triples
// that mention pruned predicates, and repeat until stable, so the final
// counts are exactly the contributions of the kept triples and every
// count is >= min_count.
VocabularyBuildResult build_vocabulary(const std::vector<TripleRecord>& triples,
                                       std::size_t min_count = 1);

// word1<TAB>word2<TAB>score with finite real scores.
struct SimilarityPair {
  std::string word1;
  std::string word2;
  double gold = 0.0;
};

std::vector<SimilarityPair> load_similarity(std::istream& in);
std::vector<SimilarityPair> load_similarity_file(const std::string& path);

// term<TAB>hypernym<TAB>verb<TAB>argument<TAB>role<TAB>split with role in
// {SBJ, OBJ} and split in {dev, test}.
enum class RelpronSplit { Dev, Test };

struct RelpronEntry {
  std::string term;
  std::string hypernym;
  std::string verb;
  std::string argument;
  ArgRole role = ArgRole::Subject;
  RelpronSplit split = RelpronSplit::Dev;
};

std::vector<RelpronEntry> load_relpron(std::istream& in);
std::vector<RelpronEntry> load_relpron_file(const std::string& path);

}  // namespace semfunc

#endif
