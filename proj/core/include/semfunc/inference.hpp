#ifndef SEMFUNC_INFERENCE_HPP
#define SEMFUNC_INFERENCE_HPP

#include <string>
#include <vector>

#include "semfunc/mean_field.hpp"
#include "semfunc/model.hpp"

namespace semfunc {

// Query answering: approximate conditional truth probabilities computed by
// running the mean-field optimizer on small graphs.

struct QueryGraph {
  GraphTopology topology;
  std::vector<TruthCondition> conditions;  // positive polarity only
  std::string target_node;
  std::string target_predicate;
};

// P(t_b true | t_a true) on a single node: condition on a, optimize, and
// evaluate b at the converged activations.
double implication_score(const WorldModel& model, const std::string& a,
                         const std::string& b,
                         const MeanFieldSettings& settings = {});

// implication_score(a, b) * implication_score(b, a). Symmetric bit-exactly
// because multiplication commutes.
double similarity_score(const WorldModel& model, const std::string& a,
                        const std::string& b,
                        const MeanFieldSettings& settings = {});

// General form: optimize under the graph's conditions, return the target
// predicate's truth at the target node.
double graph_conditional_query(const WorldModel& model, const QueryGraph& query,
                               const MeanFieldSettings& settings = {});

// Subject-verb-object graph: verb node "y" links to subject node "x" via
// ARG1 and object node "z" via ARG2.
GraphTopology svo_topology();

// Score a term against a relative-clause property (hypernym, verb, other
// argument). The term sits at the subject or object node per `role`; the
// property's three predicates are the conditions; the score is the term's
// truth at its node.
double relpron_score(const WorldModel& model, const std::string& term,
                     const std::string& hypernym, const std::string& verb,
                     const std::string& argument, ArgRole role,
                     const MeanFieldSettings& settings = {});

struct ScoredTerm {
  std::string id;
  double score;
};

// Every candidate scored against one property, descending by score; ties
// broken by ascending id so rankings are reproducible. The conditioned
// state is shared across candidates, so this costs one optimization.
std::vector<ScoredTerm> rank_terms(const WorldModel& model,
                                   const std::vector<std::string>& candidates,
                                   const std::string& hypernym,
                                   const std::string& verb,
                                   const std::string& argument, ArgRole role,
                                   const MeanFieldSettings& settings = {});

}  // namespace semfunc

#endif
