#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "semfunc/errors.hpp"
#include "semfunc/mean_field.hpp"
#include "semfunc/model.hpp"
#include "semfunc/numeric.hpp"
#include "semfunc/oracle.hpp"
#include "semfunc/rng.hpp"
#include "support/random_models.hpp"

using namespace semfunc;
using semfunc::testsupport::random_single_node_model;

namespace {

const GraphTopology kNode({"x"}, {});

WorldModel bare_model(std::size_t dims, std::size_t card) {
  WorldModel m;
  m.space = SpaceConfig{dims, card};
  m.node_bias.assign(dims, 0.0);
  Predicate flat;
  flat.function.weights.assign(dims, 0.0);
  flat.function.bias = 0.0;
  flat.frequency = 1.0;
  m.add_predicate("flat", flat);
  return m;
}

double sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

TEST_CASE("clamped vectors rescale the remaining mass proportionally") {
  const SpaceConfig space{4, 2};
  const std::vector<double> q{0.5, 0.5, 0.5, 0.5};
  const ClampedPair pair = clamped_vectors(q, 0, space);

  CHECK(pair.plus[0] == 1.0);
  for (std::size_t j = 1; j < 4; ++j) {
    CHECK(pair.plus[j] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  CHECK(pair.minus[0] == 0.0);
  for (std::size_t j = 1; j < 4; ++j) {
    CHECK(pair.minus[j] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  CHECK(sum(pair.plus) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sum(pair.minus) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("clamped vectors clip at one and redistribute the excess") {
  const SpaceConfig space{3, 2};
  const std::vector<double> q{0.99, 0.3, 0.5};
  // forcing bit 2 off leaves 0.99 and 0.3 to carry mass 2; both must pin
  const ClampedPair pair = clamped_vectors(q, 2, space);
  CHECK(pair.minus[2] == 0.0);
  CHECK(pair.minus[0] == 1.0);
  CHECK(pair.minus[1] == 1.0);
  CHECK(sum(pair.plus) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("clamped vectors reject malformed input") {
  const SpaceConfig space{4, 2};
  const std::vector<double> q{0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(clamped_vectors(q, 4, space), InputError);
  CHECK_THROWS_AS(clamped_vectors({0.5, 0.5}, 0, space), InputError);
}

TEST_CASE("a constant function leaves the activation at exactly C over D") {
  for (const auto& [dims, card] :
       std::vector<std::pair<std::size_t, std::size_t>>{
           {4, 2}, {3, 2}, {7, 3}, {10, 1}}) {
    const SpaceConfig space{dims, card};
    SemanticFunction flat;
    flat.weights.assign(dims, 0.0);
    flat.bias = 1.7;  // any constant; the ratio cancels exactly
    const std::vector<double> q(dims, 0.3);
    CHECK(update_single(q, 0, flat, space) == space.uniform_activation());
  }
}

TEST_CASE("the single update matches the closed-form ratio") {
  const SpaceConfig space{4, 2};
  SemanticFunction f;
  f.weights = {1.5, -0.5, 0.25, 0.0};
  f.bias = -0.3;
  const std::vector<double> q{0.5, 0.5, 0.5, 0.5};

  const ClampedPair pair = clamped_vectors(q, 0, space);
  const double t_plus = truth_probability(f, pair.plus);
  const double t_minus = truth_probability(f, pair.minus);
  const double ratio = (4.0 - 2.0) / 2.0 * (t_minus / t_plus);
  const double expected = 1.0 / (1.0 + ratio);
  CHECK(update_single(q, 0, f, space) ==
        doctest::Approx(expected).epsilon(1e-12));
  // higher evidence for the bit raises the activation above uniform
  CHECK(update_single(q, 0, f, space) > space.uniform_activation());
  CHECK(update_single(q, 1, f, space) < space.uniform_activation());
}

TEST_CASE("linked update with zero links reproduces the single update") {
  Rng rng(31);
  const SpaceConfig space{6, 2};
  WorldModel m = bare_model(6, 2);
  m.links["L"] = Matrix(6, 6);  // all zero
  const GraphTopology g({"x", "y"}, {{"x", "y", "L"}});

  for (int trial = 0; trial < 50; ++trial) {
    SemanticFunction f = testsupport::random_function(rng, 6, 2.0);
    MeanFieldState state;
    state.nodes = {"x", "y"};
    state.q.assign(2, std::vector<double>(6, 0.0));
    for (auto& row : state.q) {
      for (double& v : row) {
        v = rng.next_in(0.05, 0.95);
      }
    }
    const std::size_t i = static_cast<std::size_t>(rng.next_below(6));
    // bit-for-bit: both paths go through the same evidence accumulator
    CHECK(update_linked(state, "x", i, f, g, m) ==
          update_single(state.q[0], i, f, space));
  }
}

TEST_CASE("link energy shifts the linked update by the coupling strength") {
  WorldModel m = bare_model(2, 1);
  Matrix w(2, 2);
  w(0, 0) = 2.0;
  w(0, 1) = -1.0;
  m.links["L"] = std::move(w);
  const GraphTopology g({"s", "t"}, {{"s", "t", "L"}});

  MeanFieldState state;
  state.nodes = {"s", "t"};
  state.q = {{0.5, 0.5}, {0.8, 0.2}};

  const SemanticFunction& flat = m.predicate("flat").function;
  // evidence for bit 0 of s: truth ratio is zero (flat), link row gives
  // 2.0 * 0.8 + (-1.0) * 0.2 = 1.4
  const double expected = logistic(std::log(1.0 / (2.0 - 1.0)) + 1.4);
  CHECK(update_linked(state, "s", 0, flat, g, m) ==
        doctest::Approx(expected).epsilon(1e-12));

  // incoming edge reads the column instead
  const double incoming = logistic(std::log(1.0) + 2.0 * 0.5);
  CHECK(update_linked(state, "t", 0, flat, g, m) ==
        doctest::Approx(incoming).epsilon(1e-12));
}

TEST_CASE("optimization without evidence stays at exactly C over D") {
  for (const auto& [dims, card] :
       std::vector<std::pair<std::size_t, std::size_t>>{{4, 2}, {3, 2}, {5, 3}}) {
    const WorldModel m = bare_model(dims, card);
    const MeanFieldState state = mean_field_optimize(m, kNode, {});
    CHECK(state.converged);
    const double uniform = m.space.uniform_activation();
    for (const double v : state.activations("x")) {
      CHECK(v == uniform);
    }
  }
}

TEST_CASE("conditioning on a constant predicate is still exact") {
  const WorldModel m = bare_model(3, 2);
  const MeanFieldState state =
      mean_field_optimize(m, kNode, {{"x", "flat", true}});
  for (const double v : state.activations("x")) {
    CHECK(v == m.space.uniform_activation());
  }
}

TEST_CASE("activations sum to the cardinality after optimization") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const WorldModel m = random_single_node_model(rng, 8, 3, 2);
    const MeanFieldState state =
        mean_field_optimize(m, kNode, {{"x", "a", true}});
    CHECK(sum(state.activations("x")) == doctest::Approx(3.0).epsilon(1e-9));
    for (const double v : state.activations("x")) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("negative polarity conditions are rejected") {
  const WorldModel m = bare_model(4, 2);
  CHECK_THROWS_AS(mean_field_optimize(m, kNode, {{"x", "flat", false}}),
                  InputError);
}

TEST_CASE("conditions must reference declared nodes and predicates") {
  const WorldModel m = bare_model(4, 2);
  CHECK_THROWS_AS(mean_field_optimize(m, kNode, {{"y", "flat", true}}),
                  LookupError);
  CHECK_THROWS_AS(mean_field_optimize(m, kNode, {{"x", "nope", true}}),
                  LookupError);
}

TEST_CASE("approximate truth tracks the exact posterior on easy models") {
  Rng rng(23);
  int close = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    const WorldModel m = random_single_node_model(rng, 8, 2, 2);
    const MeanFieldState state =
        mean_field_optimize(m, kNode, {{"x", "a", true}});
    const auto exact = oracle::posterior_marginals(m, kNode, {{"x", "a", true}});
    double max_abs = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      max_abs = std::max(max_abs,
                         std::fabs(state.activations("x")[i] - exact[0][i]));
    }
    close += max_abs <= 0.05;
  }
  CHECK(close >= trials * 9 / 10);
}

TEST_CASE("inclusive KL is zero for the uniform posterior") {
  const WorldModel m = bare_model(4, 2);
  const auto posterior = oracle::joint_posterior(m, kNode, {});
  const MeanFieldState state = mean_field_optimize(m, kNode, {});
  CHECK(inclusive_kl(posterior, state, m.space) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("inclusive KL is nonnegative and improves with optimization") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const WorldModel m = random_single_node_model(rng, 7, 2, 2);
    const auto posterior =
        oracle::joint_posterior(m, kNode, {{"x", "a", true}});
    const MeanFieldState converged =
        mean_field_optimize(m, kNode, {{"x", "a", true}});

    MeanFieldState uniform;
    uniform.nodes = {"x"};
    uniform.q.assign(1, std::vector<double>(7, m.space.uniform_activation()));

    const double kl_converged = inclusive_kl(posterior, converged, m.space);
    const double kl_uniform = inclusive_kl(posterior, uniform, m.space);
    CHECK(kl_converged >= 0.0);
    CHECK(kl_converged <= kl_uniform + 1e-12);
  }
}

TEST_CASE("KL dimension mismatch is rejected") {
  const WorldModel m = bare_model(4, 2);
  const auto posterior = oracle::joint_posterior(m, kNode, {});
  MeanFieldState two_nodes;
  two_nodes.nodes = {"x", "y"};
  two_nodes.q.assign(2, std::vector<double>(4, 0.5));
  CHECK_THROWS_AS(inclusive_kl(posterior, two_nodes, m.space), InputError);
}

TEST_CASE("state lookup by node name") {
  MeanFieldState state;
  state.nodes = {"x"};
  state.q = {{0.5, 0.5}};
  CHECK(state.activations("x")[0] == 0.5);
  CHECK_THROWS_AS(state.activations("y"), LookupError);
}
