#ifndef SEMFUNC_ORACLE_HPP
#define SEMFUNC_ORACLE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "semfunc/model.hpp"
#include "semfunc/rng.hpp"

namespace semfunc::oracle {

// Ground-truth answers by brute enumeration of every joint assignment of
// pixies to nodes. Everything here is exponential in graph size on
// purpose; the budget guards against accidental blowups.

struct Options {
  double budget = 1e7;            // max joint configurations to enumerate
  bool hard_classifiers = false;  // threshold each t at 0.5 before use
};

// Number of pixies in one node's space, (dims choose cardinality).
double space_size(const SpaceConfig& space);

// Throws TractabilityError if space_size^node_count exceeds the budget.
void check_budget(const SpaceConfig& space, std::size_t node_count,
                  double budget);

// Every pixie in the space, active sets in lexicographic order.
std::vector<PixieVector> enumerate_space(const SpaceConfig& space,
                                         double budget = 1e7);

struct ExactQueryResult {
  double probability = 0.0;        // P(query | conditions)
  double conditioning_mass = 0.0;  // P(conditions) under the prior
  std::size_t configurations = 0;  // joint assignments enumerated
};

// P(query | conditions), exact. Conditions and query are truth events of
// predicates at nodes; repeated (node, predicate) pairs denote the same
// binary variable, so a query that restates a condition costs nothing and
// yields exactly 1 (or 0 when the polarities contradict). Throws
// UndefinedConditionalError when the conditioning event has zero mass.
ExactQueryResult conditional_truth(const WorldModel& model,
                                   const GraphTopology& topology,
                                   const std::vector<TruthCondition>& conditions,
                                   const TruthCondition& query,
                                   const Options& options = {});

// P(conjunction of the given truth events) under the prior.
double event_probability(const WorldModel& model,
                         const GraphTopology& topology,
                         const std::vector<TruthCondition>& event,
                         const Options& options = {});

// P(x_{node,i} = 1 | conditions) for every node and dimension. Each
// returned row sums to cardinality (up to rounding).
std::vector<std::vector<double>> posterior_marginals(
    const WorldModel& model, const GraphTopology& topology,
    const std::vector<TruthCondition>& conditions, const Options& options = {});

// The whole normalized posterior over joint assignments. Flat index packs
// per-node space indices with node 0 least significant.
struct JointPosterior {
  std::vector<PixieVector> space;  // one node's space; shared by all nodes
  std::size_t node_count = 0;
  std::vector<double> probs;       // size space.size()^node_count
  double conditioning_mass = 0.0;

  std::size_t component(std::size_t flat, std::size_t node) const;
};

JointPosterior joint_posterior(const WorldModel& model,
                               const GraphTopology& topology,
                               const std::vector<TruthCondition>& conditions,
                               const Options& options = {});

// Quantifier reading checked two ways on a single node with hard
// classifiers: set-theoretically over extensions, and as conditional
// probability thresholds ("every a is b" <=> P(t_b | t_a) = 1 with
// existential import; "some a is b" <=> P > 0).
struct QuantifierReport {
  bool forall_holds = false;
  bool exists_holds = false;
  bool prob_statement_forall = false;
  bool prob_statement_exists = false;
  bool existential_import_failure = false;  // extension of a is empty
  bool agree = false;
};

QuantifierReport check_quantifier_equivalence(const WorldModel& model,
                                              const std::string& a,
                                              const std::string& b,
                                              const Options& options = {});

// Syllogism check with hard classifiers: if every a is b and every b is c
// both hold as conditional probabilities, does every a is c? Returns true
// when the conclusion holds or a premise fails (vacuous truth).
bool check_barbara(const WorldModel& model, const std::string& a,
                   const std::string& b, const std::string& c,
                   const Options& options = {});

// Uniform draw from the space: a random cardinality-sized subset of dims.
PixieVector sample_pixie(const SpaceConfig& space, Rng& rng);

// Draw a joint assignment from the prior by rejection: propose each node
// uniformly, accept with probability assembly_weight / upper bound.
std::vector<PixieVector> sample_assembly(const WorldModel& model,
                                         const GraphTopology& topology,
                                         Rng& rng,
                                         std::size_t max_tries = 1000000);

}  // namespace semfunc::oracle

#endif
