#ifndef SEMFUNC_TESTS_SUPPORT_RANDOM_MODELS_HPP
#define SEMFUNC_TESTS_SUPPORT_RANDOM_MODELS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "semfunc/matrix.hpp"
#include "semfunc/model.hpp"
#include "semfunc/rng.hpp"

namespace semfunc::testsupport {

inline SemanticFunction random_function(Rng& rng, std::size_t dims,
                                        double weight_scale) {
  SemanticFunction f;
  f.weights.resize(dims);
  for (double& w : f.weights) {
    w = rng.next_in(-weight_scale, weight_scale);
  }
  f.bias = rng.next_in(-1.0, 1.0);
  return f;
}

// Single latent node, no links. Vocabulary ids are "a", "b", "c", ...
// With biased_prior false the prior over the space is exactly uniform.
inline WorldModel random_single_node_model(Rng& rng, std::size_t dims,
                                           std::size_t card, std::size_t vocab,
                                           double weight_scale = 3.0,
                                           bool biased_prior = false) {
  WorldModel m;
  m.space = SpaceConfig{dims, card};
  m.node_bias.assign(dims, 0.0);
  if (biased_prior) {
    for (double& b : m.node_bias) {
      b = rng.next_in(-0.5, 0.5);
    }
  }
  for (std::size_t v = 0; v < vocab; ++v) {
    Predicate p;
    p.function = random_function(rng, dims, weight_scale);
    p.frequency = rng.next_in(0.5, 5.0);
    m.add_predicate(std::string(1, static_cast<char>('a' + v)), std::move(p));
  }
  return m;
}

inline GraphTopology chain3() {
  return GraphTopology({"n0", "n1", "n2"},
                       {{"n0", "n1", "L1"}, {"n1", "n2", "L2"}});
}

// Three nodes in a line with two independent link matrices.
inline WorldModel random_chain_model(Rng& rng, std::size_t dims,
                                     std::size_t card, std::size_t vocab,
                                     double link_scale = 1.0) {
  WorldModel m =
      random_single_node_model(rng, dims, card, vocab, 2.0, true);
  for (const char* label : {"L1", "L2"}) {
    Matrix w(dims, dims);
    for (double& v : w.data()) {
      v = rng.next_in(-link_scale, link_scale);
    }
    m.links[label] = std::move(w);
  }
  return m;
}

}  // namespace semfunc::testsupport

#endif
