#include "semfunc/model.hpp"

#include <cmath>
#include <string>

#include "semfunc/errors.hpp"
#include "semfunc/numeric.hpp"

namespace semfunc {

void SpaceConfig::validate() const {
  if (dims == 0 || cardinality == 0 || cardinality >= dims) {
    throw InputError("space requires 0 < cardinality < dims, got dims=" +
                     std::to_string(dims) +
                     " cardinality=" + std::to_string(cardinality));
  }
}

PixieVector::PixieVector(std::vector<std::uint8_t> bits,
                         const SpaceConfig& space)
    : bits_(std::move(bits)) {
  space.validate();
  if (bits_.size() != space.dims) {
    throw InputError("pixie has " + std::to_string(bits_.size()) +
                     " entries, space has " + std::to_string(space.dims));
  }
  std::size_t ones = 0;
  for (std::uint8_t b : bits_) {
    if (b > 1) {
      throw InputError("pixie entries must be 0 or 1");
    }
    ones += b;
  }
  if (ones != space.cardinality) {
    throw InputError("pixie has " + std::to_string(ones) +
                     " active units, space requires " +
                     std::to_string(space.cardinality));
  }
}

PixieVector PixieVector::from_active(const SpaceConfig& space,
                                     const std::vector<std::size_t>& active) {
  std::vector<std::uint8_t> bits(space.dims, 0);
  for (std::size_t i : active) {
    if (i >= space.dims) {
      throw InputError("active index " + std::to_string(i) +
                       " out of range for dims=" + std::to_string(space.dims));
    }
    bits[i] = 1;
  }
  return PixieVector(std::move(bits), space);
}

std::vector<double> PixieVector::to_real() const {
  std::vector<double> x(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    x[i] = bits_[i];
  }
  return x;
}

GraphTopology::GraphTopology(std::vector<std::string> nodes,
                             std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i], i).second) {
      throw InputError("duplicate node id '" + nodes_[i] + "'");
    }
  }
  for (const GraphEdge& e : edges_) {
    if (!index_.count(e.source) || !index_.count(e.target)) {
      throw InputError("edge " + e.source + " -" + e.label + "-> " + e.target +
                       " references an undeclared node");
    }
    if (e.source == e.target) {
      throw InputError("self-loop on node '" + e.source + "'");
    }
  }
}

std::size_t GraphTopology::node_index(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw LookupError("no node '" + id + "' in topology");
  }
  return it->second;
}

bool GraphTopology::has_node(const std::string& id) const {
  return index_.count(id) != 0;
}

void WorldModel::add_predicate(const std::string& id, Predicate entry) {
  if (!index_.emplace(id, ids_.size()).second) {
    throw InputError("duplicate predicate '" + id + "'");
  }
  ids_.push_back(id);
  entries_.push_back(std::move(entry));
}

bool WorldModel::has_predicate(const std::string& id) const {
  return index_.count(id) != 0;
}

const Predicate& WorldModel::predicate(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw LookupError("no predicate '" + id + "' in vocabulary");
  }
  return entries_[it->second];
}

Predicate& WorldModel::predicate(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw LookupError("no predicate '" + id + "' in vocabulary");
  }
  return entries_[it->second];
}

std::size_t WorldModel::predicate_index(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw LookupError("no predicate '" + id + "' in vocabulary");
  }
  return it->second;
}

const Matrix& WorldModel::link(const LinkLabel& label) const {
  auto it = links.find(label);
  if (it == links.end()) {
    throw LookupError("no link label '" + label + "' in model");
  }
  return it->second;
}

namespace {

bool all_finite(const std::vector<double>& xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

}  // namespace

void WorldModel::validate() const {
  space.validate();
  if (node_bias.size() != space.dims || !all_finite(node_bias)) {
    throw InputError("node bias must be finite and of length dims");
  }
  for (const auto& [label, matrix] : links) {
    if (matrix.rows() != space.dims || matrix.cols() != space.dims ||
        !all_finite(matrix.data())) {
      throw InputError("link '" + label + "' must be a finite dims x dims matrix");
    }
  }
  if (ids_.empty()) {
    throw InputError("vocabulary is empty");
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const Predicate& p = entries_[i];
    if (p.function.weights.size() != space.dims ||
        !all_finite(p.function.weights) || !std::isfinite(p.function.bias)) {
      throw InputError("predicate '" + ids_[i] +
                       "' has malformed weights or bias");
    }
    if (!(p.frequency > 0.0) || !std::isfinite(p.frequency)) {
      throw InputError("predicate '" + ids_[i] +
                       "' requires a positive finite frequency");
    }
  }
}

double truth_probability(const SemanticFunction& f,
                         const std::vector<double>& x) {
  if (f.weights.size() != x.size()) {
    throw InputError("semantic function over " +
                     std::to_string(f.weights.size()) +
                     " dims applied to vector of length " +
                     std::to_string(x.size()));
  }
  return logistic(dot(f.weights, x) + f.bias);
}

double log_truth_probability(const SemanticFunction& f,
                             const std::vector<double>& x) {
  if (f.weights.size() != x.size()) {
    throw InputError("semantic function over " +
                     std::to_string(f.weights.size()) +
                     " dims applied to vector of length " +
                     std::to_string(x.size()));
  }
  return log_logistic(dot(f.weights, x) + f.bias);
}

bool hard_truth(const SemanticFunction& f, const std::vector<double>& x) {
  return truth_probability(f, x) >= 0.5;
}

double log_assembly_weight(const WorldModel& model,
                           const GraphTopology& topology,
                           const std::vector<PixieVector>& assignment) {
  if (assignment.size() != topology.nodes().size()) {
    throw InputError("assignment covers " + std::to_string(assignment.size()) +
                     " nodes, topology has " +
                     std::to_string(topology.nodes().size()));
  }
  double energy = 0.0;
  for (const GraphEdge& e : topology.edges()) {
    const Matrix& w = model.link(e.label);
    const PixieVector& x = assignment[topology.node_index(e.source)];
    const PixieVector& y = assignment[topology.node_index(e.target)];
    for (std::size_t j = 0; j < model.space.dims; ++j) {
      if (!x.test(j)) {
        continue;
      }
      for (std::size_t k = 0; k < model.space.dims; ++k) {
        if (y.test(k)) {
          energy += w(j, k);
        }
      }
    }
  }
  for (const PixieVector& x : assignment) {
    if (x.size() != model.space.dims) {
      throw InputError("assignment pixie does not match model dims");
    }
    for (std::size_t i = 0; i < model.space.dims; ++i) {
      if (x.test(i)) {
        energy += model.node_bias[i];
      }
    }
  }
  return energy;
}

double assembly_weight(const WorldModel& model, const GraphTopology& topology,
                       const std::vector<PixieVector>& assignment) {
  return std::exp(log_assembly_weight(model, topology, assignment));
}

std::vector<double> predicate_distribution(const WorldModel& model,
                                           const std::vector<double>& pixie) {
  std::vector<double> probs(model.vocab_size());
  double total = 0.0;
  for (std::size_t i = 0; i < model.vocab_size(); ++i) {
    const Predicate& p = model.entry(i);
    probs[i] = p.frequency * truth_probability(p.function, pixie);
    total += probs[i];
  }
  if (total <= 0.0) {
    throw DegenerateDistributionError(
        "every predicate has zero weighted truth at this pixie");
  }
  for (double& v : probs) {
    v /= total;
  }
  return probs;
}

}  // namespace semfunc
