#ifndef SEMFUNC_MEAN_FIELD_HPP
#define SEMFUNC_MEAN_FIELD_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "semfunc/model.hpp"
#include "semfunc/oracle.hpp"

namespace semfunc {

// Coordinate-ascent mean-field approximation of the posterior over pixies
// given truth conditions. Each node carries a relaxed activation vector
// q in [0,1]^D whose entries sum to the cardinality.

struct MeanFieldSettings {
  double tolerance = 1e-4;      // sweep-level max |delta q| to declare done
  std::size_t max_sweeps = 50;
  double epsilon = 1e-9;        // activations clamped to [eps, 1-eps]
};

struct MeanFieldState {
  std::vector<std::string> nodes;      // topology order
  std::vector<std::vector<double>> q;  // one activation vector per node
  std::size_t sweeps = 0;
  double max_delta = 0.0;  // largest coordinate change in the last sweep
  bool converged = false;
  std::size_t underflow_events = 0;

  const std::vector<double>& activations(const std::string& node) const;
};

// The pair of rescaled vectors a coordinate update evaluates truth at:
// plus forces entry i to 1 and scales the rest to sum cardinality-1;
// minus forces entry i to 0 and scales the rest to sum cardinality.
// Entries that would exceed 1 are clipped and the excess redistributed
// proportionally over the unclipped ones.
struct ClampedPair {
  std::vector<double> plus;
  std::vector<double> minus;
};

ClampedPair clamped_vectors(const std::vector<double>& q, std::size_t i,
                            const SpaceConfig& space);

// One coordinate update against a single condition, no links:
//   q_i = ( 1 + (D-C)/C * t(x_minus)/t(x_plus) )^-1
// computed in log space. When the evidence is exactly zero (constant
// function) this is exactly C/D, and the code returns exactly that.
double update_single(const std::vector<double>& q, std::size_t i,
                     const SemanticFunction& f, const SpaceConfig& space);

// The general update: same ratio term, times exp of the link energy
//   sum_outgoing W(i,:) . q_tgt + sum_incoming W(:,i) . q_src + node_bias_i
// (incoming links use the transpose). With zero link weights and zero
// node bias this reproduces update_single bit for bit.
double update_linked(const MeanFieldState& state, const std::string& node,
                     std::size_t i, const SemanticFunction& f,
                     const GraphTopology& topology, const WorldModel& model);

// Full optimization: initialize every activation at C/D, sweep nodes in
// topology order and dimensions in ascending order, renormalize each node
// to sum C after every sweep, stop when the largest coordinate change
// falls below tolerance. Conditions must have positive polarity; several
// conditions on one node multiply their truth ratios. Deterministic.
MeanFieldState mean_field_optimize(const WorldModel& model,
                                   const GraphTopology& topology,
                                   const std::vector<TruthCondition>& conditions,
                                   const MeanFieldSettings& settings = {});

// t_f evaluated at the node's relaxed activations.
double approximate_truth(const MeanFieldState& state, const std::string& node,
                         const SemanticFunction& f);

// D_KL(P || Q) where P is the exact posterior and Q the mean-field product
// distribution restricted to cardinality-valid vectors and renormalized.
// Nonnegative; zero iff Q matches P on its support.
double inclusive_kl(const oracle::JointPosterior& posterior,
                    const MeanFieldState& state, const SpaceConfig& space);

}  // namespace semfunc

#endif
