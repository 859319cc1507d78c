#ifndef SEMFUNC_MODEL_HPP
#define SEMFUNC_MODEL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "semfunc/matrix.hpp"

namespace semfunc {

// Dimensions of the sparse binary space: vectors of length dims with
// exactly cardinality entries set. 0 < cardinality < dims.
struct SpaceConfig {
  std::size_t dims = 0;
  std::size_t cardinality = 0;

  void validate() const;  // throws InputError on violation

  // Activation of the maximum-entropy vector, cardinality / dims.
  double uniform_activation() const {
    return static_cast<double>(cardinality) / static_cast<double>(dims);
  }

  bool operator==(const SpaceConfig&) const = default;
};

// Binary vector with exactly space.cardinality bits set. Construction
// validates, so a PixieVector in hand is always well-formed.
class PixieVector {
 public:
  PixieVector() = default;
  PixieVector(std::vector<std::uint8_t> bits, const SpaceConfig& space);

  static PixieVector from_active(const SpaceConfig& space,
                                 const std::vector<std::size_t>& active);

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::size_t size() const { return bits_.size(); }
  bool test(std::size_t i) const { return bits_[i] != 0; }

  // The same vector as reals, the form semantic functions consume.
  std::vector<double> to_real() const;

  bool operator==(const PixieVector&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// One-layer classifier over the space: t(x) = logistic(weights . x + bias).
// Applies equally to binary pixies and to relaxed vectors in [0,1]^D.
struct SemanticFunction {
  std::vector<double> weights;
  double bias = 0.0;
};

using LinkLabel = std::string;

struct LinkWeights {
  LinkLabel label;
  Matrix matrix;  // dims x dims
};

// Which argument position of a verb a term occupies.
enum class ArgRole { Subject, Object };

struct Predicate {
  SemanticFunction function;
  double frequency = 0.0;  // corpus count, > 0
};

// A graph of latent nodes connected by labelled directed edges. Node ids
// are strings; edges must reference declared nodes and may not self-loop.
struct GraphEdge {
  std::string source;
  std::string target;
  LinkLabel label;
};

class GraphTopology {
 public:
  GraphTopology() = default;
  GraphTopology(std::vector<std::string> nodes, std::vector<GraphEdge> edges);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::size_t node_index(const std::string& id) const;  // LookupError
  bool has_node(const std::string& id) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<GraphEdge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Assertion that a predicate holds (or, with polarity false, fails to
// hold) of the pixie at one node.
struct TruthCondition {
  std::string node;
  std::string predicate;
  bool polarity = true;
};

// The full parameter set: space geometry, per-dimension node bias shared
// across argument positions, link matrices by label, and a vocabulary of
// predicates in stable insertion order.
class WorldModel {
 public:
  SpaceConfig space;
  std::vector<double> node_bias;      // length space.dims
  std::map<LinkLabel, Matrix> links;  // each dims x dims

  void add_predicate(const std::string& id, Predicate entry);
  bool has_predicate(const std::string& id) const;
  const Predicate& predicate(const std::string& id) const;
  Predicate& predicate(const std::string& id);
  std::size_t predicate_index(const std::string& id) const;

  const std::vector<std::string>& ids() const { return ids_; }
  const Predicate& entry(std::size_t index) const { return entries_[index]; }
  Predicate& entry(std::size_t index) { return entries_[index]; }
  std::size_t vocab_size() const { return ids_.size(); }

  const Matrix& link(const LinkLabel& label) const;

  // Checks every structural invariant: valid space, finite parameters,
  // positive frequencies, matching dimensions, non-empty vocabulary.
  void validate() const;

 private:
  std::vector<std::string> ids_;
  std::vector<Predicate> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// t(x) = logistic(w . x + b). Throws InputError on dimension mismatch.
double truth_probability(const SemanticFunction& f,
                         const std::vector<double>& x);

// log t(x), computed as -softplus(-(w . x + b)) so it never underflows to
// -inf for finite arguments.
double log_truth_probability(const SemanticFunction& f,
                             const std::vector<double>& x);

// Thresholded classifier: true iff t(x) >= 0.5, i.e. w . x + b >= 0.
bool hard_truth(const SemanticFunction& f, const std::vector<double>& x);

// Unnormalized weight of a joint assignment of pixies to graph nodes:
//   exp( sum_edges x_src^T W^(label) x_tgt + sum_nodes node_bias . x )
// assignment[i] is the pixie at topology.nodes()[i].
double assembly_weight(const WorldModel& model, const GraphTopology& topology,
                       const std::vector<PixieVector>& assignment);

// log of the above; the oracle normalizes in log space.
double log_assembly_weight(const WorldModel& model,
                           const GraphTopology& topology,
                           const std::vector<PixieVector>& assignment);

// P(p | x) proportional to frequency(p) * t_p(x), over the whole
// vocabulary, in vocabulary order. Throws DegenerateDistributionError if
// every term is zero.
std::vector<double> predicate_distribution(const WorldModel& model,
                                           const std::vector<double>& pixie);

}  // namespace semfunc

#endif
