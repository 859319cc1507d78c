#include "semfunc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "semfunc/errors.hpp"
#include "semfunc/numeric.hpp"

namespace semfunc::oracle {

double space_size(const SpaceConfig& space) {
  space.validate();
  const double n = static_cast<double>(space.dims);
  const double k = static_cast<double>(space.cardinality);
  double result = 1.0;
  for (std::size_t i = 1; i <= space.cardinality; ++i) {
    result = result * (n - k + static_cast<double>(i)) / static_cast<double>(i);
  }
  return result;
}

void check_budget(const SpaceConfig& space, std::size_t node_count,
                  double budget) {
  const double per_node = space_size(space);
  double total = 1.0;
  for (std::size_t n = 0; n < node_count; ++n) {
    total *= per_node;
    if (total > budget) {
      throw TractabilityError(
          "enumeration needs about " + std::to_string(per_node) + "^" +
          std::to_string(node_count) +
          " joint configurations, over the budget of " +
          std::to_string(budget));
    }
  }
}

std::vector<PixieVector> enumerate_space(const SpaceConfig& space,
                                         double budget) {
  check_budget(space, 1, budget);
  const std::size_t d = space.dims;
  const std::size_t c = space.cardinality;
  std::vector<PixieVector> out;
  out.reserve(static_cast<std::size_t>(space_size(space) + 0.5));
  std::vector<std::size_t> pick(c);
  for (std::size_t i = 0; i < c; ++i) {
    pick[i] = i;
  }
  while (true) {
    out.push_back(PixieVector::from_active(space, pick));
    // advance to the next combination in lexicographic order
    std::size_t i = c;
    while (i > 0 && pick[i - 1] == d - c + i - 1) {
      --i;
    }
    if (i == 0) {
      break;
    }
    ++pick[i - 1];
    for (std::size_t j = i; j < c; ++j) {
      pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

namespace {

// One binary truth variable: a predicate applied at a node. Conditions
// and queries naming the same (node, predicate) pair refer to the same
// variable, which is what makes self-conditioning exact.
struct VarKey {
  std::size_t node;
  std::string predicate;

  bool operator<(const VarKey& o) const {
    return node != o.node ? node < o.node : predicate < o.predicate;
  }
  bool operator==(const VarKey& o) const = default;
};

struct ConditionSet {
  std::map<VarKey, bool> polarity;
  bool contradiction = false;  // one variable required both true and false
};

ConditionSet dedup_conditions(const WorldModel& model,
                              const GraphTopology& topology,
                              const std::vector<TruthCondition>& conditions) {
  ConditionSet out;
  for (const TruthCondition& c : conditions) {
    const std::size_t node = topology.node_index(c.node);
    (void)model.predicate(c.predicate);  // existence check, throws LookupError
    auto [it, inserted] =
        out.polarity.emplace(VarKey{node, c.predicate}, c.polarity);
    if (!inserted && it->second != c.polarity) {
      out.contradiction = true;
    }
  }
  return out;
}

// Sum of the k largest positive entries; an upper bound on any selection
// of k entries from the matrix.
double positive_topk_sum(const Matrix& m, std::size_t k) {
  std::vector<double> positive;
  for (double v : m.data()) {
    if (v > 0.0) {
      positive.push_back(v);
    }
  }
  std::sort(positive.begin(), positive.end(), std::greater<>());
  double total = 0.0;
  for (std::size_t i = 0; i < positive.size() && i < k; ++i) {
    total += positive[i];
  }
  return total;
}

// Shared enumeration state: the node space, its active index sets, and a
// log-space energy shift so weights never overflow.
class Engine {
 public:
  Engine(const WorldModel& model, const GraphTopology& topology,
         const Options& options)
      : model_(model), topology_(topology), options_(options) {
    model.validate();
    check_budget(model.space, topology.nodes().size(), options.budget);
    space_ = enumerate_space(model.space, options.budget);
    reals_.reserve(space_.size());
    active_.reserve(space_.size());
    bias_energy_.reserve(space_.size());
    for (const PixieVector& p : space_) {
      reals_.push_back(p.to_real());
      std::vector<std::size_t> act;
      double bias = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.test(i)) {
          act.push_back(i);
          bias += model.node_bias[i];
        }
      }
      active_.push_back(std::move(act));
      bias_energy_.push_back(bias);
    }
    for (const GraphEdge& e : topology.edges()) {
      edge_src_.push_back(topology.node_index(e.source));
      edge_tgt_.push_back(topology.node_index(e.target));
      edge_matrix_.push_back(&model.link(e.label));
    }
    // valid upper bound on the total energy of any configuration
    const std::size_t c = model.space.cardinality;
    shift_ = 0.0;
    for (const Matrix* w : edge_matrix_) {
      shift_ += positive_topk_sum(*w, c * c);
    }
    double max_bias = 0.0;
    for (double b : bias_energy_) {
      max_bias = std::max(max_bias, b);
    }
    shift_ += max_bias * static_cast<double>(topology.nodes().size());
  }

  const std::vector<PixieVector>& space() const { return space_; }
  std::size_t node_count() const { return topology_.nodes().size(); }

  // exp(energy - shift); relative weights are exact, absolute scale is not
  double weight(const std::vector<std::size_t>& ix) const {
    double energy = 0.0;
    for (std::size_t e = 0; e < edge_matrix_.size(); ++e) {
      const Matrix& w = *edge_matrix_[e];
      const auto& rows = active_[ix[edge_src_[e]]];
      const auto& cols = active_[ix[edge_tgt_[e]]];
      for (std::size_t j : rows) {
        for (std::size_t k : cols) {
          energy += w(j, k);
        }
      }
    }
    for (std::size_t n = 0; n < ix.size(); ++n) {
      energy += bias_energy_[ix[n]];
    }
    return std::exp(energy - shift_);
  }

  // truth factor of one variable across the node space, polarity applied
  std::vector<double> factor_table(const std::string& predicate,
                                   bool polarity) const {
    const SemanticFunction& f = model_.predicate(predicate).function;
    std::vector<double> table(space_.size());
    for (std::size_t i = 0; i < space_.size(); ++i) {
      double t = truth_probability(f, reals_[i]);
      if (options_.hard_classifiers) {
        t = t >= 0.5 ? 1.0 : 0.0;
      }
      table[i] = polarity ? t : 1.0 - t;
    }
    return table;
  }

  const std::vector<std::size_t>& active(std::size_t space_index) const {
    return active_[space_index];
  }

  template <typename F>
  void for_each_config(F&& fn) const {
    std::vector<std::size_t> ix(node_count(), 0);
    const std::size_t base = space_.size();
    while (true) {
      fn(static_cast<const std::vector<std::size_t>&>(ix));
      std::size_t n = 0;
      while (n < ix.size() && ++ix[n] == base) {
        ix[n] = 0;
        ++n;
      }
      if (n == ix.size()) {
        break;
      }
    }
  }

 private:
  const WorldModel& model_;
  const GraphTopology& topology_;
  Options options_;
  std::vector<PixieVector> space_;
  std::vector<std::vector<double>> reals_;
  std::vector<std::vector<std::size_t>> active_;
  std::vector<double> bias_energy_;
  std::vector<std::size_t> edge_src_;
  std::vector<std::size_t> edge_tgt_;
  std::vector<const Matrix*> edge_matrix_;
  double shift_ = 0.0;
};

struct BoundFactor {
  std::size_t node;
  std::vector<double> table;
};

std::vector<BoundFactor> condition_tables(const Engine& engine,
                                          const ConditionSet& set) {
  std::vector<BoundFactor> tables;
  tables.reserve(set.polarity.size());
  for (const auto& [var, polarity] : set.polarity) {
    tables.push_back({var.node, engine.factor_table(var.predicate, polarity)});
  }
  return tables;
}

double condition_factor(const std::vector<BoundFactor>& tables,
                        const std::vector<std::size_t>& ix) {
  double f = 1.0;
  for (const BoundFactor& t : tables) {
    f *= t.table[ix[t.node]];
  }
  return f;
}

}  // namespace

ExactQueryResult conditional_truth(const WorldModel& model,
                                   const GraphTopology& topology,
                                   const std::vector<TruthCondition>& conditions,
                                   const TruthCondition& query,
                                   const Options& options) {
  Engine engine(model, topology, options);
  const ConditionSet set = dedup_conditions(model, topology, conditions);
  const VarKey query_var{topology.node_index(query.node), query.predicate};
  (void)model.predicate(query.predicate);

  const auto tables = condition_tables(engine, set);
  auto bound = set.polarity.find(query_var);
  const bool query_bound = bound != set.polarity.end();
  std::vector<double> query_table;
  if (!query_bound) {
    query_table = engine.factor_table(query.predicate, query.polarity);
  }

  double z = 0.0;
  double mass = 0.0;
  double mass_with_query = 0.0;
  std::size_t configurations = 0;
  engine.for_each_config([&](const std::vector<std::size_t>& ix) {
    ++configurations;
    const double w = engine.weight(ix);
    z += w;
    if (set.contradiction) {
      return;
    }
    const double cf = w * condition_factor(tables, ix);
    mass += cf;
    if (!query_bound) {
      mass_with_query += cf * query_table[ix[query_var.node]];
    }
  });

  if (z <= 0.0) {
    throw NumericError("prior mass underflowed to zero");
  }
  if (mass <= 0.0) {
    throw UndefinedConditionalError(
        "conditioning event has zero probability; the conditional is "
        "undefined (existential import)");
  }

  ExactQueryResult result;
  result.conditioning_mass = mass / z;
  result.configurations = configurations;
  if (query_bound) {
    result.probability = bound->second == query.polarity ? 1.0 : 0.0;
  } else {
    result.probability = mass_with_query / mass;
  }
  return result;
}

double event_probability(const WorldModel& model, const GraphTopology& topology,
                         const std::vector<TruthCondition>& event,
                         const Options& options) {
  Engine engine(model, topology, options);
  const ConditionSet set = dedup_conditions(model, topology, event);
  if (set.contradiction) {
    return 0.0;
  }
  const auto tables = condition_tables(engine, set);
  double z = 0.0;
  double mass = 0.0;
  engine.for_each_config([&](const std::vector<std::size_t>& ix) {
    const double w = engine.weight(ix);
    z += w;
    mass += w * condition_factor(tables, ix);
  });
  if (z <= 0.0) {
    throw NumericError("prior mass underflowed to zero");
  }
  return mass / z;
}

std::vector<std::vector<double>> posterior_marginals(
    const WorldModel& model, const GraphTopology& topology,
    const std::vector<TruthCondition>& conditions, const Options& options) {
  Engine engine(model, topology, options);
  const ConditionSet set = dedup_conditions(model, topology, conditions);
  if (set.contradiction) {
    throw UndefinedConditionalError(
        "conditioning event has zero probability; marginals are undefined");
  }
  const auto tables = condition_tables(engine, set);

  double mass = 0.0;
  std::vector<std::vector<double>> marginals(
      engine.node_count(), std::vector<double>(model.space.dims, 0.0));
  engine.for_each_config([&](const std::vector<std::size_t>& ix) {
    const double w = engine.weight(ix) * condition_factor(tables, ix);
    if (w == 0.0) {
      return;
    }
    mass += w;
    for (std::size_t n = 0; n < ix.size(); ++n) {
      for (std::size_t d : engine.active(ix[n])) {
        marginals[n][d] += w;
      }
    }
  });
  if (mass <= 0.0) {
    throw UndefinedConditionalError(
        "conditioning event has zero probability; marginals are undefined");
  }
  for (auto& row : marginals) {
    for (double& v : row) {
      v /= mass;
    }
  }
  return marginals;
}

std::size_t JointPosterior::component(std::size_t flat,
                                      std::size_t node) const {
  std::size_t v = flat;
  for (std::size_t n = 0; n < node; ++n) {
    v /= space.size();
  }
  return v % space.size();
}

JointPosterior joint_posterior(const WorldModel& model,
                               const GraphTopology& topology,
                               const std::vector<TruthCondition>& conditions,
                               const Options& options) {
  Engine engine(model, topology, options);
  const ConditionSet set = dedup_conditions(model, topology, conditions);
  if (set.contradiction) {
    throw UndefinedConditionalError(
        "conditioning event has zero probability; posterior is undefined");
  }
  const auto tables = condition_tables(engine, set);

  JointPosterior post;
  post.space = engine.space();
  post.node_count = engine.node_count();
  double z = 0.0;
  double mass = 0.0;
  engine.for_each_config([&](const std::vector<std::size_t>& ix) {
    const double w = engine.weight(ix);
    z += w;
    post.probs.push_back(w * condition_factor(tables, ix));
    mass += post.probs.back();
  });
  if (z <= 0.0) {
    throw NumericError("prior mass underflowed to zero");
  }
  if (mass <= 0.0) {
    throw UndefinedConditionalError(
        "conditioning event has zero probability; posterior is undefined");
  }
  for (double& p : post.probs) {
    p /= mass;
  }
  post.conditioning_mass = mass / z;
  return post;
}

namespace {

GraphTopology single_node_topology() {
  return GraphTopology({"x"}, {});
}

}  // namespace

QuantifierReport check_quantifier_equivalence(const WorldModel& model,
                                              const std::string& a,
                                              const std::string& b,
                                              const Options& options) {
  Options hard = options;
  hard.hard_classifiers = true;
  const GraphTopology topology = single_node_topology();
  const std::vector<PixieVector> space =
      enumerate_space(model.space, hard.budget);

  const SemanticFunction& fa = model.predicate(a).function;
  const SemanticFunction& fb = model.predicate(b).function;
  std::size_t count_a = 0;
  std::size_t count_ab = 0;
  bool a_subset_b = true;
  for (const PixieVector& p : space) {
    const std::vector<double> x = p.to_real();
    const bool in_a = hard_truth(fa, x);
    const bool in_b = hard_truth(fb, x);
    count_a += in_a;
    count_ab += in_a && in_b;
    if (in_a && !in_b) {
      a_subset_b = false;
    }
  }

  QuantifierReport report;
  report.existential_import_failure = count_a == 0;
  report.forall_holds = count_a > 0 && a_subset_b;
  report.exists_holds = count_ab > 0;

  if (count_a == 0) {
    // the probabilistic side hits the same failure: conditioning on t_a is
    // undefined, so neither statement can be asserted
    report.prob_statement_forall = false;
    report.prob_statement_exists = false;
  } else {
    const ExactQueryResult r = conditional_truth(
        model, topology, {{"x", a, true}}, {"x", b, true}, hard);
    report.prob_statement_forall = r.probability == 1.0;
    report.prob_statement_exists = r.probability > 0.0;
  }
  report.agree = report.forall_holds == report.prob_statement_forall &&
                 report.exists_holds == report.prob_statement_exists;
  return report;
}

bool check_barbara(const WorldModel& model, const std::string& a,
                   const std::string& b, const std::string& c,
                   const Options& options) {
  Options hard = options;
  hard.hard_classifiers = true;
  const GraphTopology topology = single_node_topology();

  auto universal = [&](const std::string& lhs, const std::string& rhs,
                       bool& defined) {
    try {
      const ExactQueryResult r = conditional_truth(
          model, topology, {{"x", lhs, true}}, {"x", rhs, true}, hard);
      defined = true;
      return r.probability == 1.0;
    } catch (const UndefinedConditionalError&) {
      defined = false;
      return false;
    }
  };

  bool defined_ab = false;
  bool defined_bc = false;
  const bool every_a_is_b = universal(a, b, defined_ab);
  const bool every_b_is_c = universal(b, c, defined_bc);
  if (!(defined_ab && every_a_is_b && defined_bc && every_b_is_c)) {
    return true;  // a premise fails, the syllogism is vacuously safe
  }
  bool defined_ac = false;
  const bool every_a_is_c = universal(a, c, defined_ac);
  return defined_ac && every_a_is_c;
}

PixieVector sample_pixie(const SpaceConfig& space, Rng& rng) {
  space.validate();
  std::vector<std::size_t> order(space.dims);
  for (std::size_t i = 0; i < space.dims; ++i) {
    order[i] = i;
  }
  std::vector<std::size_t> active(space.cardinality);
  for (std::size_t i = 0; i < space.cardinality; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.next_below(space.dims - i));
    std::swap(order[i], order[j]);
    active[i] = order[i];
  }
  return PixieVector::from_active(space, active);
}

std::vector<PixieVector> sample_assembly(const WorldModel& model,
                                         const GraphTopology& topology,
                                         Rng& rng, std::size_t max_tries) {
  model.validate();
  const std::size_t c = model.space.cardinality;
  double bound = 0.0;
  for (const GraphEdge& e : topology.edges()) {
    bound += positive_topk_sum(model.link(e.label), c * c);
  }
  double bias_bound = 0.0;
  std::vector<double> positive_bias;
  for (double b : model.node_bias) {
    if (b > 0.0) {
      positive_bias.push_back(b);
    }
  }
  std::sort(positive_bias.begin(), positive_bias.end(), std::greater<>());
  for (std::size_t i = 0; i < positive_bias.size() && i < c; ++i) {
    bias_bound += positive_bias[i];
  }
  bound += bias_bound * static_cast<double>(topology.nodes().size());

  for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
    std::vector<PixieVector> proposal;
    proposal.reserve(topology.nodes().size());
    for (std::size_t n = 0; n < topology.nodes().size(); ++n) {
      proposal.push_back(sample_pixie(model.space, rng));
    }
    const double log_w = log_assembly_weight(model, topology, proposal);
    // accept with probability exp(log_w - bound) <= 1
    if (std::log(rng.next_unit() + 1e-300) < log_w - bound) {
      return proposal;
    }
  }
  throw NumericError("rejection sampling exceeded max_tries; the link "
                     "weights concentrate too much mass for this sampler");
}

}  // namespace semfunc::oracle
