#ifndef SEMFUNC_EVAL_HPP
#define SEMFUNC_EVAL_HPP

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "semfunc/corpus.hpp"
#include "semfunc/mean_field.hpp"
#include "semfunc/model.hpp"

namespace semfunc {

// Spearman rank correlation with average ranks for ties. Throws
// UndefinedCorrelationError when either list has zero rank variance,
// InputError on length mismatch or fewer than two items.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

// Precision-at-rank averaged over the gold items that appear in the
// ranking; items absent from the ranking contribute nothing and shrink
// the denominator to those present.
double average_precision(const std::vector<std::string>& ranking,
                         const std::unordered_set<std::string>& gold);

struct MapResult {
  double value = 0.0;
  std::size_t evaluated = 0;  // queries with at least one gold item ranked
  std::size_t excluded = 0;   // queries with none, reported not scored
};

MapResult mean_average_precision(
    const std::vector<std::vector<std::string>>& rankings,
    const std::vector<std::unordered_set<std::string>>& gold);

// Map a dataset word onto a vocabulary predicate: exact id first, then the
// noun tag, then the verb tag. Empty when none is known.
std::optional<std::string> resolve_predicate(const WorldModel& model,
                                             const std::string& word);

// Worker count for data-parallel scoring: SEMFUNC_THREADS caps it when
// set, hardware concurrency otherwise. Results never depend on it.
std::size_t worker_count(std::size_t items);

struct EvalItem {
  std::string id;
  double gold = 0.0;
  double predicted = 0.0;
};

struct EvalReport {
  std::string metric;
  double value = 0.0;
  double coverage = 0.0;  // scored fraction of the dataset
  std::vector<EvalItem> items;
};

// Spearman of model similarity against gold scores over the pairs whose
// words both resolve; out-of-vocabulary pairs count against coverage.
EvalReport evaluate_similarity(const WorldModel& model,
                               const std::vector<SimilarityPair>& pairs,
                               const MeanFieldSettings& settings = {});

// For each term in the split, rank every scorable property of the split
// by relpron_score and take the average precision of the term's own
// properties; the report's value is the mean over terms. Items carry one
// row per term: gold = its property count, predicted = its AP.
EvalReport evaluate_relpron(const WorldModel& model,
                            const std::vector<RelpronEntry>& entries,
                            RelpronSplit split,
                            const MeanFieldSettings& settings = {});

}  // namespace semfunc

#endif
