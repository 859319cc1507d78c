#include "semfunc/mean_field.hpp"

#include <algorithm>
#include <cmath>

#include "semfunc/errors.hpp"
#include "semfunc/numeric.hpp"

namespace semfunc {

const std::vector<double>& MeanFieldState::activations(
    const std::string& node) const {
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (nodes[n] == node) {
      return q[n];
    }
  }
  throw LookupError("no node '" + node + "' in mean-field state");
}

namespace {

constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

// Proportionally rescale entries (except `skip`) so they sum to `target`,
// clipping at [lo, hi] and redistributing the excess over the entries
// still free. Terminates: every pass either finishes or pins at least one
// entry at a bound.
void rescale_to_sum(std::vector<double>& v, std::size_t skip, double target,
                    double lo, double hi) {
  std::vector<bool> pinned(v.size(), false);
  if (skip != kNoSkip) {
    pinned[skip] = true;
  }
  const std::size_t n_free_start =
      v.size() - (skip == kNoSkip ? 0 : 1);
  if (target < lo * static_cast<double>(n_free_start) ||
      target > hi * static_cast<double>(n_free_start)) {
    throw ConfigurationError("rescale target " + std::to_string(target) +
                             " infeasible for " +
                             std::to_string(n_free_start) + " entries in [" +
                             std::to_string(lo) + ", " + std::to_string(hi) +
                             "]");
  }
  double remaining = target;
  for (std::size_t pass = 0; pass <= v.size(); ++pass) {
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (!pinned[j]) {
        free_sum += v[j];
        ++free_count;
      }
    }
    if (free_count == 0) {
      return;
    }
    if (free_sum <= 0.0) {
      // no mass to scale; spread what remains evenly
      const double each = remaining / static_cast<double>(free_count);
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (!pinned[j]) {
          v[j] = std::clamp(each, lo, hi);
        }
      }
      return;
    }
    const double r = remaining / free_sum;
    bool newly_pinned = false;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (pinned[j]) {
        continue;
      }
      const double scaled = v[j] * r;
      if (scaled > hi) {
        v[j] = hi;
        pinned[j] = true;
        remaining -= hi;
        newly_pinned = true;
      } else if (scaled < lo) {
        v[j] = lo;
        pinned[j] = true;
        remaining -= lo;
        newly_pinned = true;
      }
    }
    if (!newly_pinned) {
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (!pinned[j]) {
          v[j] *= r;
        }
      }
      return;
    }
  }
}

// Shared scalar update. evidence = sum of per-condition log-truth ratios
// plus the link energy; zero evidence sits exactly at the prior activation
// C/D (the fixed point of the update), so return that without a detour
// through exp/log, which would cost an ulp.
double update_from_evidence(double evidence, const SpaceConfig& space,
                            std::size_t* underflow_events) {
  if (!std::isfinite(evidence)) {
    if (underflow_events != nullptr) {
      ++(*underflow_events);
    }
    return evidence > 0.0 ? 1.0 : 0.0;
  }
  if (evidence == 0.0) {
    return space.uniform_activation();
  }
  const double c = static_cast<double>(space.cardinality);
  const double d = static_cast<double>(space.dims);
  return logistic(std::log(c / (d - c)) + evidence);
}

double truth_ratio_evidence(const std::vector<double>& q, std::size_t i,
                            const SemanticFunction& f,
                            const SpaceConfig& space) {
  const ClampedPair pair = clamped_vectors(q, i, space);
  return log_truth_probability(f, pair.plus) -
         log_truth_probability(f, pair.minus);
}

// Shared logit shift s with sum_j clamp(logistic(z_j + s), lo_q, hi_q) ==
// target. A common shift is the minimal-distortion projection of update
// log-odds onto the cardinality budget: it preserves every pairwise odds
// ratio, and the clamped sum is targeted directly so the stored activations
// keep the budget even when entries pin at the bounds. The sum is
// nondecreasing in s, so a bracket always holds; Newton steps are taken
// when they stay inside it.
double solve_logit_shift(const std::vector<double>& z, double target,
                         double lo_q, double hi_q, double warm) {
  double span = 50.0;
  for (double v : z) {
    span = std::max(span, std::fabs(v) + 50.0);
  }
  double lo = -span;
  double hi = span;
  double s = std::clamp(warm, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    double sum = 0.0;
    double slope = 0.0;
    for (double v : z) {
      const double p = logistic(v + s);
      if (p < lo_q) {
        sum += lo_q;
      } else if (p > hi_q) {
        sum += hi_q;
      } else {
        sum += p;
        slope += p * (1.0 - p);
      }
    }
    const double gap = sum - target;
    if (std::fabs(gap) <= 1e-12) {
      return s;
    }
    (gap < 0.0 ? lo : hi) = s;
    const double newton = s - gap / slope;
    s = (slope > 0.0 && newton > lo && newton < hi) ? newton
                                                    : 0.5 * (lo + hi);
  }
  return s;
}

}  // namespace

ClampedPair clamped_vectors(const std::vector<double>& q, std::size_t i,
                            const SpaceConfig& space) {
  space.validate();
  if (q.size() != space.dims) {
    throw InputError("activation vector length " + std::to_string(q.size()) +
                     " does not match dims " + std::to_string(space.dims));
  }
  if (i >= space.dims) {
    throw InputError("dimension index " + std::to_string(i) + " out of range");
  }
  const double c = static_cast<double>(space.cardinality);
  ClampedPair pair{q, q};
  pair.plus[i] = 1.0;
  rescale_to_sum(pair.plus, i, c - 1.0, 0.0, 1.0);
  pair.minus[i] = 0.0;
  rescale_to_sum(pair.minus, i, c, 0.0, 1.0);
  return pair;
}

double update_single(const std::vector<double>& q, std::size_t i,
                     const SemanticFunction& f, const SpaceConfig& space) {
  return update_from_evidence(truth_ratio_evidence(q, i, f, space), space,
                              nullptr);
}

namespace {

// Link energy at (node, i): rows of outgoing matrices against the target
// activations, columns of incoming matrices against the source
// activations, plus the shared per-dimension bias.
double link_energy(const MeanFieldState& state, std::size_t node_index,
                   std::size_t i, const GraphTopology& topology,
                   const WorldModel& model) {
  double energy = model.node_bias[i];
  for (const GraphEdge& e : topology.edges()) {
    const std::size_t src = topology.node_index(e.source);
    const std::size_t tgt = topology.node_index(e.target);
    if (src == node_index) {
      const Matrix& w = model.link(e.label);
      const std::vector<double>& y = state.q[tgt];
      for (std::size_t k = 0; k < model.space.dims; ++k) {
        energy += w(i, k) * y[k];
      }
    }
    if (tgt == node_index) {
      const Matrix& w = model.link(e.label);
      const std::vector<double>& y = state.q[src];
      for (std::size_t k = 0; k < model.space.dims; ++k) {
        energy += w(k, i) * y[k];
      }
    }
  }
  return energy;
}

}  // namespace

double update_linked(const MeanFieldState& state, const std::string& node,
                     std::size_t i, const SemanticFunction& f,
                     const GraphTopology& topology, const WorldModel& model) {
  const std::size_t node_index = topology.node_index(node);
  if (node_index >= state.q.size()) {
    throw InputError("state does not cover node '" + node + "'");
  }
  const double evidence =
      truth_ratio_evidence(state.q[node_index], i, f, model.space) +
      link_energy(state, node_index, i, topology, model);
  return update_from_evidence(evidence, model.space, nullptr);
}

MeanFieldState mean_field_optimize(const WorldModel& model,
                                   const GraphTopology& topology,
                                   const std::vector<TruthCondition>& conditions,
                                   const MeanFieldSettings& settings) {
  model.validate();
  if (topology.nodes().empty()) {
    throw InputError("topology has no nodes");
  }

  // conditions grouped per node; the update multiplies their ratios
  std::vector<std::vector<const SemanticFunction*>> node_conditions(
      topology.nodes().size());
  for (const TruthCondition& c : conditions) {
    if (!c.polarity) {
      throw InputError("mean-field conditioning requires positive polarity; "
                       "negative condition on '" + c.predicate + "'");
    }
    node_conditions[topology.node_index(c.node)].push_back(
        &model.predicate(c.predicate).function);
  }

  const double uniform = model.space.uniform_activation();
  MeanFieldState state;
  state.nodes = topology.nodes();
  state.q.assign(topology.nodes().size(),
                 std::vector<double>(model.space.dims, uniform));

  const double lo = settings.epsilon;
  const double hi = 1.0 - settings.epsilon;
  const double target = static_cast<double>(model.space.cardinality);
  const double dims_d = static_cast<double>(model.space.dims);
  const double prior_logit = std::log(target / (dims_d - target));
  const double z_cap = std::log(hi / lo);

  // z holds each coordinate's latest update log-odds; the node's activations
  // are always the logit-shift projection of z onto the cardinality budget,
  // so every clamped-vector construction sees a budget-true state. The shift
  // from the previous solve warm-starts the next one.
  std::vector<std::vector<double>> z(
      state.q.size(), std::vector<double>(model.space.dims, prior_logit));
  std::vector<double> shift(state.q.size(), 0.0);

  for (std::size_t sweep = 0; sweep < settings.max_sweeps; ++sweep) {
    const std::vector<std::vector<double>> at_sweep_start = state.q;
    bool mutated = false;
    for (std::size_t n = 0; n < state.q.size(); ++n) {
      std::vector<double>& q = state.q[n];
      for (std::size_t i = 0; i < model.space.dims; ++i) {
        double evidence = link_energy(state, n, i, topology, model);
        if (!node_conditions[n].empty()) {
          const ClampedPair pair = clamped_vectors(q, i, model.space);
          for (const SemanticFunction* f : node_conditions[n]) {
            evidence += log_truth_probability(*f, pair.plus) -
                        log_truth_probability(*f, pair.minus);
          }
        }
        const double raw = std::clamp(
            update_from_evidence(evidence, model.space,
                                 &state.underflow_events),
            lo, hi);
        if (raw == q[i]) {
          // the coordinate sits at its own fixed point; touching the node
          // would only re-project an unchanged state (and would move the
          // exact uniform fixed point by an ulp)
          continue;
        }
        mutated = true;
        z[n][i] = std::isfinite(evidence)
                      ? prior_logit + evidence
                      : (evidence > 0.0 ? z_cap : -z_cap);
        shift[n] = solve_logit_shift(z[n], target, lo, hi, shift[n]);
        for (std::size_t j = 0; j < model.space.dims; ++j) {
          q[j] = std::clamp(logistic(z[n][j] + shift[n]), lo, hi);
        }
      }
    }
    state.sweeps = sweep + 1;
    if (!mutated) {
      state.max_delta = 0.0;
      state.converged = true;
      break;
    }
    // convergence is judged on the projected state, sweep end against sweep
    // start; raw update deltas would keep paying the part of each update
    // that the projection hands back
    double max_delta = 0.0;
    for (std::size_t n = 0; n < state.q.size(); ++n) {
      for (std::size_t i = 0; i < model.space.dims; ++i) {
        max_delta = std::max(
            max_delta, std::fabs(state.q[n][i] - at_sweep_start[n][i]));
      }
    }
    state.max_delta = max_delta;
    if (max_delta < settings.tolerance) {
      state.converged = true;
      break;
    }
  }
  return state;
}

double approximate_truth(const MeanFieldState& state, const std::string& node,
                         const SemanticFunction& f) {
  return truth_probability(f, state.activations(node));
}

namespace {

// P(sum of independent Bernoulli(q_i) == c), the normalizer of the
// mean-field product restricted to cardinality-valid vectors.
double cardinality_mass(const std::vector<double>& q, std::size_t c) {
  std::vector<double> dp(c + 1, 0.0);
  dp[0] = 1.0;
  for (double qi : q) {
    for (std::size_t k = std::min(c, dp.size() - 1); k > 0; --k) {
      dp[k] = dp[k] * (1.0 - qi) + dp[k - 1] * qi;
    }
    dp[0] *= 1.0 - qi;
  }
  return dp[c];
}

}  // namespace

double inclusive_kl(const oracle::JointPosterior& posterior,
                    const MeanFieldState& state, const SpaceConfig& space) {
  if (posterior.node_count != state.q.size()) {
    throw InputError("posterior covers " +
                     std::to_string(posterior.node_count) +
                     " nodes, state covers " + std::to_string(state.q.size()));
  }
  // per node: log Q of each space vector, minus the restriction normalizer
  std::vector<std::vector<double>> log_q_table(state.q.size());
  for (std::size_t n = 0; n < state.q.size(); ++n) {
    const std::vector<double>& q = state.q[n];
    const double log_z =
        std::log(cardinality_mass(q, space.cardinality));
    log_q_table[n].reserve(posterior.space.size());
    for (const PixieVector& p : posterior.space) {
      double lq = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        lq += p.test(i) ? std::log(q[i]) : std::log1p(-q[i]);
      }
      log_q_table[n].push_back(lq - log_z);
    }
  }

  double kl = 0.0;
  for (std::size_t flat = 0; flat < posterior.probs.size(); ++flat) {
    const double p = posterior.probs[flat];
    if (p <= 0.0) {
      continue;
    }
    double log_q = 0.0;
    for (std::size_t n = 0; n < state.q.size(); ++n) {
      log_q += log_q_table[n][posterior.component(flat, n)];
    }
    kl += p * (std::log(p) - log_q);
  }
  if (kl < -1e-9) {
    throw NumericError("inclusive KL computed as " + std::to_string(kl) +
                       "; rounding alone cannot explain a negative value");
  }
  return std::max(kl, 0.0);
}

}  // namespace semfunc
