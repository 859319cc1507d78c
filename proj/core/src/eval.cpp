#include "semfunc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <thread>

#include "semfunc/errors.hpp"
#include "semfunc/inference.hpp"

namespace semfunc {

namespace {

// Average ranks for ties: items sharing a value share the mean of the
// rank positions they occupy.
std::vector<double> fractional_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[order[k]] = shared;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw InputError("rank correlation needs lists of equal length");
  }
  if (a.size() < 2) {
    throw InputError("rank correlation needs at least two items");
  }
  const std::vector<double> ra = fractional_ranks(a);
  const std::vector<double> rb = fractional_ranks(b);
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    mean_a += ra[i];
    mean_b += rb[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - mean_a;
    const double db = rb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    throw UndefinedCorrelationError(
        "rank variance is zero; correlation undefined");
  }
  return cov / std::sqrt(var_a * var_b);
}

double average_precision(const std::vector<std::string>& ranking,
                         const std::unordered_set<std::string>& gold) {
  std::size_t present = 0;
  for (const std::string& id : ranking) {
    present += gold.count(id);
  }
  if (present == 0) {
    throw InputError("no gold item appears in the ranking");
  }
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    if (gold.count(ranking[r])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(present);
}

MapResult mean_average_precision(
    const std::vector<std::vector<std::string>>& rankings,
    const std::vector<std::unordered_set<std::string>>& gold) {
  if (rankings.size() != gold.size()) {
    throw InputError("rankings and gold sets must align");
  }
  MapResult result;
  double total = 0.0;
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    std::size_t present = 0;
    for (const std::string& id : rankings[q]) {
      present += gold[q].count(id);
    }
    if (present == 0) {
      ++result.excluded;
      continue;
    }
    total += average_precision(rankings[q], gold[q]);
    ++result.evaluated;
  }
  if (result.evaluated == 0) {
    throw InputError("every query lacks gold items; MAP undefined");
  }
  result.value = total / static_cast<double>(result.evaluated);
  return result;
}

std::optional<std::string> resolve_predicate(const WorldModel& model,
                                             const std::string& word) {
  if (model.has_predicate(word)) {
    return word;
  }
  if (const std::string noun = noun_predicate(word);
      model.has_predicate(noun)) {
    return noun;
  }
  if (const std::string verb = verb_predicate(word);
      model.has_predicate(verb)) {
    return verb;
  }
  return std::nullopt;
}

std::size_t worker_count(std::size_t items) {
  if (items <= 1) {
    return 1;
  }
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SEMFUNC_THREADS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0) {
      cap = std::min<std::size_t>(cap, parsed);
    }
  }
  return std::min(cap, items);
}

namespace {

// Each index writes only its own output slot, so the result is identical
// for any worker count.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) {
          return;
        }
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace

EvalReport evaluate_similarity(const WorldModel& model,
                               const std::vector<SimilarityPair>& pairs,
                               const MeanFieldSettings& settings) {
  if (pairs.empty()) {
    throw InputError("similarity dataset is empty");
  }
  struct Scorable {
    std::size_t source;
    std::string pred1;
    std::string pred2;
  };
  std::vector<Scorable> scorable;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto p1 = resolve_predicate(model, pairs[i].word1);
    const auto p2 = resolve_predicate(model, pairs[i].word2);
    if (p1 && p2) {
      scorable.push_back({i, *p1, *p2});
    }
  }
  if (scorable.size() < 2) {
    throw InputError("fewer than two pairs resolve to vocabulary predicates; "
                     "correlation undefined");
  }

  std::vector<double> predicted(scorable.size(), 0.0);
  parallel_for(scorable.size(), [&](std::size_t i) {
    predicted[i] =
        similarity_score(model, scorable[i].pred1, scorable[i].pred2, settings);
  });

  EvalReport report;
  report.metric = "spearman";
  std::vector<double> gold;
  gold.reserve(scorable.size());
  for (std::size_t i = 0; i < scorable.size(); ++i) {
    const SimilarityPair& p = pairs[scorable[i].source];
    gold.push_back(p.gold);
    report.items.push_back({p.word1 + ":" + p.word2, p.gold, predicted[i]});
  }
  report.value = spearman(gold, predicted);
  report.coverage = static_cast<double>(scorable.size()) /
                    static_cast<double>(pairs.size());
  return report;
}

EvalReport evaluate_relpron(const WorldModel& model,
                            const std::vector<RelpronEntry>& entries,
                            RelpronSplit split,
                            const MeanFieldSettings& settings) {
  std::vector<RelpronEntry> in_split;
  for (const RelpronEntry& e : entries) {
    if (e.split == split) {
      in_split.push_back(e);
    }
  }
  if (in_split.empty()) {
    throw InputError("no properties in the requested split");
  }

  // A property is scorable when its three condition words resolve; its
  // term only matters for picking gold sets and query terms.
  struct Property {
    std::size_t source;
    std::string hypernym;
    std::string verb;
    std::string argument;
    ArgRole role;
  };
  std::vector<Property> usable;
  for (std::size_t i = 0; i < in_split.size(); ++i) {
    const RelpronEntry& e = in_split[i];
    const auto h = resolve_predicate(model, e.hypernym);
    const auto v = resolve_predicate(model, e.verb);
    const auto a = resolve_predicate(model, e.argument);
    if (h && v && a) {
      usable.push_back({i, *h, *v, *a, e.role});
    }
  }
  if (usable.empty()) {
    throw InputError("no property in the split resolves to vocabulary "
                     "predicates");
  }

  // Query terms in first-occurrence order.
  std::vector<std::string> terms;
  std::vector<std::string> term_preds;
  for (const RelpronEntry& e : in_split) {
    if (std::find(terms.begin(), terms.end(), e.term) != terms.end()) {
      continue;
    }
    if (const auto t = resolve_predicate(model, e.term)) {
      terms.push_back(e.term);
      term_preds.push_back(*t);
    }
  }
  if (terms.empty()) {
    throw InputError("no term in the split resolves to a vocabulary predicate");
  }

  // One mean-field optimization per property; every term is then a cheap
  // function evaluation at the conditioned state.
  std::vector<std::vector<double>> scores(
      usable.size(), std::vector<double>(terms.size(), 0.0));
  parallel_for(usable.size(), [&](std::size_t p) {
    const Property& prop = usable[p];
    const std::string term_node = prop.role == ArgRole::Subject ? "x" : "z";
    const std::string arg_node = prop.role == ArgRole::Subject ? "z" : "x";
    const GraphTopology topology = svo_topology();
    const MeanFieldState state = mean_field_optimize(
        model, topology,
        {{term_node, prop.hypernym, true},
         {"y", prop.verb, true},
         {arg_node, prop.argument, true}},
        settings);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      scores[p][t] = approximate_truth(
          state, term_node, model.predicate(term_preds[t]).function);
    }
  });

  std::vector<std::vector<std::string>> rankings;
  std::vector<std::unordered_set<std::string>> gold;
  EvalReport report;
  report.metric = "map";
  for (std::size_t t = 0; t < terms.size(); ++t) {
    std::vector<std::size_t> order(usable.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a][t] != scores[b][t]) {
        return scores[a][t] > scores[b][t];
      }
      return a < b;
    });
    std::vector<std::string> ranking;
    ranking.reserve(order.size());
    for (std::size_t p : order) {
      ranking.push_back(std::to_string(usable[p].source));
    }
    std::unordered_set<std::string> own;
    for (const Property& prop : usable) {
      if (in_split[prop.source].term == terms[t]) {
        own.insert(std::to_string(prop.source));
      }
    }
    rankings.push_back(std::move(ranking));
    gold.push_back(std::move(own));
  }

  const MapResult map = mean_average_precision(rankings, gold);
  report.value = map.value;
  report.coverage = static_cast<double>(usable.size()) /
                    static_cast<double>(in_split.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (gold[t].empty()) {
      continue;  // excluded query: nothing of its own to rank
    }
    report.items.push_back({terms[t], static_cast<double>(gold[t].size()),
                            average_precision(rankings[t], gold[t])});
  }
  return report;
}

}  // namespace semfunc
