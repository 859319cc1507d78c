#include "semfunc/inference.hpp"

#include <algorithm>

#include "semfunc/errors.hpp"

namespace semfunc {

namespace {

const GraphTopology& single_node() {
  static const GraphTopology topology({"x"}, {});
  return topology;
}

}  // namespace

GraphTopology svo_topology() {
  return GraphTopology({"x", "y", "z"},
                       {{"y", "x", "ARG1"}, {"y", "z", "ARG2"}});
}

double implication_score(const WorldModel& model, const std::string& a,
                         const std::string& b,
                         const MeanFieldSettings& settings) {
  const SemanticFunction& fb = model.predicate(b).function;
  const MeanFieldState state =
      mean_field_optimize(model, single_node(), {{"x", a, true}}, settings);
  return approximate_truth(state, "x", fb);
}

double similarity_score(const WorldModel& model, const std::string& a,
                        const std::string& b,
                        const MeanFieldSettings& settings) {
  return implication_score(model, a, b, settings) *
         implication_score(model, b, a, settings);
}

double graph_conditional_query(const WorldModel& model, const QueryGraph& query,
                               const MeanFieldSettings& settings) {
  const SemanticFunction& target =
      model.predicate(query.target_predicate).function;
  query.topology.node_index(query.target_node);  // throws if unknown
  const MeanFieldState state =
      mean_field_optimize(model, query.topology, query.conditions, settings);
  return approximate_truth(state, query.target_node, target);
}

namespace {

// Conditions shared by every candidate scored against one property; the
// term itself is not conditioned on, only evaluated.
QueryGraph property_graph(const std::string& hypernym, const std::string& verb,
                          const std::string& argument, ArgRole role) {
  QueryGraph graph;
  graph.topology = svo_topology();
  const std::string term_node = role == ArgRole::Subject ? "x" : "z";
  const std::string arg_node = role == ArgRole::Subject ? "z" : "x";
  graph.conditions = {{term_node, hypernym, true},
                      {"y", verb, true},
                      {arg_node, argument, true}};
  graph.target_node = term_node;
  return graph;
}

}  // namespace

double relpron_score(const WorldModel& model, const std::string& term,
                     const std::string& hypernym, const std::string& verb,
                     const std::string& argument, ArgRole role,
                     const MeanFieldSettings& settings) {
  QueryGraph graph = property_graph(hypernym, verb, argument, role);
  graph.target_predicate = term;
  return graph_conditional_query(model, graph, settings);
}

std::vector<ScoredTerm> rank_terms(const WorldModel& model,
                                   const std::vector<std::string>& candidates,
                                   const std::string& hypernym,
                                   const std::string& verb,
                                   const std::string& argument, ArgRole role,
                                   const MeanFieldSettings& settings) {
  const QueryGraph graph = property_graph(hypernym, verb, argument, role);
  const MeanFieldState state =
      mean_field_optimize(model, graph.topology, graph.conditions, settings);

  std::vector<ScoredTerm> ranked;
  ranked.reserve(candidates.size());
  for (const std::string& term : candidates) {
    const SemanticFunction& f = model.predicate(term).function;
    ranked.push_back({term, approximate_truth(state, graph.target_node, f)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ScoredTerm& a, const ScoredTerm& b) {
                     if (a.score != b.score) {
                       return a.score > b.score;
                     }
                     return a.id < b.id;
                   });
  return ranked;
}

}  // namespace semfunc
