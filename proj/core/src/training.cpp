#include "semfunc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "semfunc/errors.hpp"
#include "semfunc/numeric.hpp"

namespace semfunc {

namespace {

constexpr char kArg1[] = "ARG1";
constexpr char kArg2[] = "ARG2";

// Context feature separator; never appears in lemmas.
constexpr char kSep = '\x1f';

const std::shared_ptr<const GraphTopology>& svo_shape() {
  static const auto shape = std::make_shared<const GraphTopology>(
      std::vector<std::string>{"x", "y", "z"},
      std::vector<GraphEdge>{{"y", "x", kArg1}, {"y", "z", kArg2}});
  return shape;
}

const std::shared_ptr<const GraphTopology>& sv_shape() {
  static const auto shape = std::make_shared<const GraphTopology>(
      std::vector<std::string>{"x", "y"},
      std::vector<GraphEdge>{{"y", "x", kArg1}});
  return shape;
}

const std::shared_ptr<const GraphTopology>& vo_shape() {
  static const auto shape = std::make_shared<const GraphTopology>(
      std::vector<std::string>{"y", "z"},
      std::vector<GraphEdge>{{"y", "z", kArg2}});
  return shape;
}

bool triple_in_vocab(const TripleRecord& triple, const Vocabulary& vocab) {
  if (!vocab.contains(verb_predicate(triple.verb))) {
    return false;
  }
  if (triple.subject && !vocab.contains(noun_predicate(*triple.subject))) {
    return false;
  }
  if (triple.object && !vocab.contains(noun_predicate(*triple.object))) {
    return false;
  }
  return true;
}

}  // namespace

void TrainingConfig::validate() const {
  space.validate();
  const auto positive_finite = [](double v) {
    return std::isfinite(v) && v > 0.0;
  };
  if (!positive_finite(learning_rate)) {
    throw ConfigurationError("learning rate must be a positive finite number");
  }
  if (!std::isfinite(l2_penalty) || l2_penalty < 0.0) {
    throw ConfigurationError("l2 penalty must be a nonnegative finite number");
  }
  if (!std::isfinite(sampling_power) || sampling_power < 0.0) {
    throw ConfigurationError(
        "sampling power must be a nonnegative finite number");
  }
  if (minibatch == 0) {
    throw ConfigurationError("minibatch size must be at least 1");
  }
  if (min_count == 0) {
    throw ConfigurationError("min count must be at least 1");
  }
  if (!positive_finite(ppmi_gain)) {
    throw ConfigurationError("ppmi gain must be a positive finite number");
  }
  if (!std::isfinite(holdout_fraction) || holdout_fraction < 0.0 ||
      holdout_fraction >= 1.0) {
    throw ConfigurationError("holdout fraction must lie in [0, 1)");
  }
  if (!std::isfinite(divergence_tolerance) || divergence_tolerance < 0.0) {
    throw ConfigurationError(
        "divergence tolerance must be a nonnegative finite number");
  }
}

std::size_t CooccurrenceCounts::row_index(const std::string& id) const {
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    if (row_ids[i] == id) {
      return i;
    }
  }
  throw LookupError("no co-occurrence row for predicate '" + id + "'");
}

std::size_t context_column(const std::string& label,
                           const std::string& neighbor, std::size_t dims,
                           std::uint64_t seed) {
  std::string key;
  key.reserve(label.size() + 1 + neighbor.size());
  key += label;
  key += kSep;
  key += neighbor;
  return static_cast<std::size_t>(fnv1a64(key, seed) % dims);
}

CooccurrenceCounts project_counts(const std::vector<TripleRecord>& triples,
                                  const Vocabulary& vocab, std::size_t dims,
                                  std::uint64_t seed) {
  if (dims == 0) {
    throw ConfigurationError("projection needs at least one dimension");
  }
  CooccurrenceCounts counts;
  counts.dims = dims;
  counts.column_totals.assign(dims, 0.0);

  std::unordered_map<std::string, std::size_t> index;
  const auto row_of = [&](const std::string& id) {
    const auto it = index.find(id);
    if (it != index.end()) {
      return it->second;
    }
    const std::size_t r = counts.row_ids.size();
    index.emplace(id, r);
    counts.row_ids.push_back(id);
    counts.rows.emplace_back();
    return r;
  };
  const auto bump = [&](const std::string& id, const std::string& label,
                        const std::string& neighbor) {
    const std::size_t col = context_column(label, neighbor, dims, seed);
    counts.rows[row_of(id)][col] += 1.0;
    counts.column_totals[col] += 1.0;
    counts.total += 1.0;
  };

  for (const TripleRecord& triple : triples) {
    if (!triple_in_vocab(triple, vocab)) {
      continue;
    }
    const std::string verb = verb_predicate(triple.verb);
    if (triple.subject) {
      const std::string subj = noun_predicate(*triple.subject);
      bump(subj, kArg1, verb);
      bump(verb, kArg1, subj);
    }
    if (triple.object) {
      const std::string obj = noun_predicate(*triple.object);
      bump(obj, kArg2, verb);
      bump(verb, kArg2, obj);
    }
  }
  return counts;
}

std::vector<double> ppmi_row(const CooccurrenceCounts& counts,
                             std::size_t row) {
  if (row >= counts.rows.size()) {
    throw LookupError("co-occurrence row out of range");
  }
  std::vector<double> out(counts.dims, 0.0);
  double row_total = 0.0;
  for (const auto& [col, c] : counts.rows[row]) {
    row_total += c;
  }
  if (row_total == 0.0 || counts.total == 0.0) {
    return out;
  }
  for (const auto& [col, c] : counts.rows[row]) {
    const double pmi =
        std::log(counts.total * c / (row_total * counts.column_totals[col]));
    if (pmi > 0.0) {
      out[col] = pmi;
    }
  }
  return out;
}

WorldModel initialize_model(const std::vector<TripleRecord>& triples,
                            const Vocabulary& vocab,
                            const TrainingConfig& config) {
  config.validate();
  if (vocab.size() == 0) {
    throw InputError("cannot initialize a model from an empty vocabulary");
  }
  const std::size_t dims = config.space.dims;
  const CooccurrenceCounts counts =
      project_counts(triples, vocab, dims, config.seed);

  WorldModel model;
  model.space = config.space;
  model.node_bias.assign(dims, 0.0);
  model.links[kArg1] = Matrix(dims, dims);
  model.links[kArg2] = Matrix(dims, dims);

  std::unordered_map<std::string, std::size_t> row_index;
  for (std::size_t r = 0; r < counts.row_ids.size(); ++r) {
    row_index.emplace(counts.row_ids[r], r);
  }

  const double uniform = config.space.uniform_activation();
  for (const std::string& id : vocab.ids()) {
    Predicate entry;
    const auto it = row_index.find(id);
    if (it != row_index.end()) {
      entry.function.weights = ppmi_row(counts, it->second);
      for (double& w : entry.function.weights) {
        w *= config.ppmi_gain;
      }
    } else {
      entry.function.weights.assign(dims, 0.0);
    }
    // Bias set to the exact negation of the activation at the uniform
    // vector, so t(uniform) = logistic(0) = 1/2 exactly. Same summation
    // order as the dot product inside truth_probability.
    double at_uniform = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      at_uniform += entry.function.weights[j] * uniform;
    }
    entry.function.bias = -at_uniform;
    entry.frequency = vocab.frequency(id);
    model.add_predicate(id, std::move(entry));
  }
  model.validate();
  return model;
}

std::vector<Observation> observations_from_triples(
    const std::vector<TripleRecord>& triples, const Vocabulary& vocab) {
  std::vector<Observation> out;
  out.reserve(triples.size());
  for (const TripleRecord& triple : triples) {
    if (!triple_in_vocab(triple, vocab)) {
      continue;
    }
    const std::string verb = verb_predicate(triple.verb);
    Observation obs;
    if (triple.transitive()) {
      obs.topology = svo_shape();
      obs.node_predicates = {{"x", noun_predicate(*triple.subject)},
                             {"y", verb},
                             {"z", noun_predicate(*triple.object)}};
    } else if (triple.subject) {
      obs.topology = sv_shape();
      obs.node_predicates = {{"x", noun_predicate(*triple.subject)},
                             {"y", verb}};
    } else {
      obs.topology = vo_shape();
      obs.node_predicates = {{"y", verb},
                             {"z", noun_predicate(*triple.object)}};
    }
    out.push_back(std::move(obs));
  }
  return out;
}

std::vector<double> negative_sampling_distribution(const WorldModel& model,
                                                   double power) {
  if (model.vocab_size() == 0) {
    throw InputError("negative sampling needs a non-empty vocabulary");
  }
  std::vector<double> probs(model.vocab_size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < model.vocab_size(); ++i) {
    probs[i] = std::pow(model.entry(i).frequency, power);
    total += probs[i];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericError("negative sampling weights do not normalize");
  }
  for (double& p : probs) {
    p /= total;
  }
  return probs;
}

NegativeSampler::NegativeSampler(const WorldModel& model, double power) {
  const std::vector<double> probs =
      negative_sampling_distribution(model, power);
  cdf_.resize(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;  // guards the binary search against rounding
}

std::size_t NegativeSampler::draw(Rng& rng) const {
  const double u = rng.next_unit();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()),
                               cdf_.size() - 1);
}

ObservationWorkspace prepare_observation(const WorldModel& model,
                                         const Observation& observation,
                                         const NegativeSampler& sampler,
                                         std::size_t negative_samples,
                                         Rng& rng,
                                         const MeanFieldSettings& settings,
                                         const MeanFieldState* shared_free) {
  ObservationWorkspace ws;
  std::vector<TruthCondition> conditions;
  conditions.reserve(observation.node_predicates.size());
  for (const auto& [node, pred] : observation.node_predicates) {
    conditions.push_back({node, pred, true});
  }
  ws.positive =
      mean_field_optimize(model, *observation.topology, conditions, settings);
  if (shared_free != nullptr) {
    ws.free = *shared_free;
  } else {
    ws.free = mean_field_optimize(model, *observation.topology, {}, settings);
  }
  ws.negatives.resize(observation.node_predicates.size());
  for (auto& slot : ws.negatives) {
    slot.reserve(negative_samples);
    for (std::size_t k = 0; k < negative_samples; ++k) {
      slot.push_back(sampler.draw(rng));
    }
  }
  return ws;
}

double observation_value(const WorldModel& model,
                         const Observation& observation,
                         const ObservationWorkspace& workspace) {
  double value = 0.0;
  for (std::size_t n = 0; n < observation.node_predicates.size(); ++n) {
    const auto& [node, pred] = observation.node_predicates[n];
    const std::vector<double>& q = workspace.positive.activations(node);
    const SemanticFunction& f = model.predicate(pred).function;
    value += log_logistic(dot(f.weights, q) + f.bias);
    for (const std::size_t neg : workspace.negatives[n]) {
      const SemanticFunction& g = model.entry(neg).function;
      // log(1 - t) for the sampled distractor
      value += log_logistic(-(dot(g.weights, q) + g.bias));
    }
  }
  const GraphTopology& topology = *observation.topology;
  for (const GraphEdge& edge : topology.edges()) {
    const Matrix& w = model.link(edge.label);
    value += bilinear(workspace.positive.activations(edge.source), w,
                      workspace.positive.activations(edge.target));
    value -= bilinear(workspace.free.activations(edge.source), w,
                      workspace.free.activations(edge.target));
  }
  for (const std::string& node : topology.nodes()) {
    value += dot(model.node_bias, workspace.positive.activations(node));
    value -= dot(model.node_bias, workspace.free.activations(node));
  }
  return value;
}

ModelGradient ModelGradient::zeros_like(const WorldModel& model) {
  ModelGradient g;
  g.weights.assign(model.vocab_size(),
                   std::vector<double>(model.space.dims, 0.0));
  g.bias.assign(model.vocab_size(), 0.0);
  for (const auto& [label, matrix] : model.links) {
    g.links[label] = Matrix(matrix.rows(), matrix.cols());
  }
  g.node_bias.assign(model.space.dims, 0.0);
  return g;
}

void ModelGradient::scale(double factor) {
  for (auto& row : weights) {
    for (double& v : row) {
      v *= factor;
    }
  }
  for (double& v : bias) {
    v *= factor;
  }
  for (auto& [label, matrix] : links) {
    for (double& v : matrix.data()) {
      v *= factor;
    }
  }
  for (double& v : node_bias) {
    v *= factor;
  }
}

void observation_gradient(const WorldModel& model,
                          const Observation& observation,
                          const ObservationWorkspace& workspace,
                          ModelGradient& accumulator) {
  const std::size_t dims = model.space.dims;
  for (std::size_t n = 0; n < observation.node_predicates.size(); ++n) {
    const auto& [node, pred] = observation.node_predicates[n];
    const std::vector<double>& q = workspace.positive.activations(node);
    const std::size_t pi = model.predicate_index(pred);
    const SemanticFunction& f = model.entry(pi).function;
    // d log t / dz = 1 - t
    const double coef = 1.0 - logistic(dot(f.weights, q) + f.bias);
    accumulator.bias[pi] += coef;
    for (std::size_t j = 0; j < dims; ++j) {
      accumulator.weights[pi][j] += coef * q[j];
    }
    for (const std::size_t neg : workspace.negatives[n]) {
      const SemanticFunction& g = model.entry(neg).function;
      // d log(1 - t) / dz = -t
      const double t = logistic(dot(g.weights, q) + g.bias);
      accumulator.bias[neg] -= t;
      for (std::size_t j = 0; j < dims; ++j) {
        accumulator.weights[neg][j] -= t * q[j];
      }
    }
  }
  const GraphTopology& topology = *observation.topology;
  for (const GraphEdge& edge : topology.edges()) {
    Matrix& g = accumulator.links.at(edge.label);
    const std::vector<double>& ps = workspace.positive.activations(edge.source);
    const std::vector<double>& pt = workspace.positive.activations(edge.target);
    const std::vector<double>& fs = workspace.free.activations(edge.source);
    const std::vector<double>& ft = workspace.free.activations(edge.target);
    for (std::size_t j = 0; j < dims; ++j) {
      for (std::size_t k = 0; k < dims; ++k) {
        g(j, k) += ps[j] * pt[k] - fs[j] * ft[k];
      }
    }
  }
  for (const std::string& node : topology.nodes()) {
    const std::vector<double>& p = workspace.positive.activations(node);
    const std::vector<double>& f = workspace.free.activations(node);
    for (std::size_t j = 0; j < dims; ++j) {
      accumulator.node_bias[j] += p[j] - f[j];
    }
  }
}

namespace {

// Free states depend only on the topology and the current parameters, so
// within one minibatch (parameters frozen) each shape is optimized once.
class FreeStateCache {
 public:
  FreeStateCache(const WorldModel& model, const MeanFieldSettings& settings)
      : model_(model), settings_(settings) {}

  const MeanFieldState& get(
      const std::shared_ptr<const GraphTopology>& topology) {
    const GraphTopology* key = topology.get();
    const auto it = states_.find(key);
    if (it != states_.end()) {
      return it->second;
    }
    return states_
        .emplace(key, mean_field_optimize(model_, *topology, {}, settings_))
        .first->second;
  }

 private:
  const WorldModel& model_;
  const MeanFieldSettings& settings_;
  std::unordered_map<const GraphTopology*, MeanFieldState> states_;
};

void apply_gradient(WorldModel& model, const ModelGradient& grad,
                    double learning_rate, double l2_penalty) {
  const double shrink = 2.0 * l2_penalty;
  bool finite = true;
  const auto step = [&](double& param, double g) {
    param += learning_rate * (g - shrink * param);
    finite = finite && std::isfinite(param);
  };
  for (std::size_t p = 0; p < model.vocab_size(); ++p) {
    SemanticFunction& f = model.entry(p).function;
    step(f.bias, grad.bias[p]);
    for (std::size_t j = 0; j < f.weights.size(); ++j) {
      step(f.weights[j], grad.weights[p][j]);
    }
  }
  for (auto& [label, matrix] : model.links) {
    const Matrix& g = grad.links.at(label);
    for (std::size_t i = 0; i < matrix.data().size(); ++i) {
      step(matrix.data()[i], g.data()[i]);
    }
  }
  for (std::size_t j = 0; j < model.node_bias.size(); ++j) {
    step(model.node_bias[j], grad.node_bias[j]);
  }
  if (!finite) {
    throw NumericError(
        "parameters became non-finite during a gradient step; lower the "
        "learning rate");
  }
}

}  // namespace

TrainResult train(const std::vector<TripleRecord>& triples,
                  const TrainingConfig& config,
                  const MeanFieldSettings& settings, const ProgressSink& sink) {
  config.validate();
  VocabularyBuildResult built = build_vocabulary(triples, config.min_count);
  if (built.kept.empty()) {
    throw InputError("no triples survive vocabulary pruning");
  }

  TrainResult result;
  result.kept_triples = built.kept.size();
  result.dropped_triples = built.dropped;
  result.model = initialize_model(built.kept, built.vocab, config);

  const std::vector<Observation> observations =
      observations_from_triples(built.kept, built.vocab);
  result.observation_count = observations.size();

  Rng rng(config.seed);
  std::vector<std::size_t> order(observations.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::size_t holdout_n = static_cast<std::size_t>(
      config.holdout_fraction * static_cast<double>(observations.size()));
  if (holdout_n >= observations.size()) {
    holdout_n = observations.size() - 1;  // always keep something to train on
  }
  result.holdout_count = holdout_n;
  const std::vector<std::size_t> holdout(order.begin(),
                                         order.begin() + holdout_n);
  std::vector<std::size_t> training(order.begin() + holdout_n, order.end());

  const NegativeSampler sampler(result.model, config.sampling_power);

  // Same seed every evaluation, so holdout scores across epochs differ
  // only through the parameters.
  const auto holdout_objective = [&](const WorldModel& model) {
    if (holdout.empty()) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    Rng eval_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    FreeStateCache cache(model, settings);
    double sum = 0.0;
    for (const std::size_t idx : holdout) {
      const Observation& obs = observations[idx];
      const ObservationWorkspace ws =
          prepare_observation(model, obs, sampler, config.negative_samples,
                              eval_rng, settings, &cache.get(obs.topology));
      sum += observation_value(model, obs, ws);
    }
    return sum / static_cast<double>(holdout.size());
  };
  const double initial_holdout = holdout_objective(result.model);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    rng.shuffle(training);

    double epoch_sum = 0.0;
    std::size_t epoch_count = 0;
    for (std::size_t begin = 0; begin < training.size();
         begin += config.minibatch) {
      const std::size_t end =
          std::min(begin + config.minibatch, training.size());
      FreeStateCache cache(result.model, settings);
      ModelGradient grad = ModelGradient::zeros_like(result.model);
      for (std::size_t b = begin; b < end; ++b) {
        const Observation& obs = observations[training[b]];
        const ObservationWorkspace ws = prepare_observation(
            result.model, obs, sampler, config.negative_samples, rng, settings,
            &cache.get(obs.topology));
        epoch_sum += observation_value(result.model, obs, ws);
        observation_gradient(result.model, obs, ws, grad);
      }
      grad.scale(1.0 / static_cast<double>(end - begin));
      apply_gradient(result.model, grad, config.learning_rate,
                     config.l2_penalty);
      epoch_count += end - begin;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_objective = epoch_sum / static_cast<double>(epoch_count);
    stats.holdout_objective = holdout_objective(result.model);
    stats.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - started)
                        .count();
    if (!std::isfinite(stats.train_objective)) {
      throw NumericError("training objective became non-finite at epoch " +
                         std::to_string(epoch));
    }
    if (!holdout.empty() &&
        stats.holdout_objective < initial_holdout - config.divergence_tolerance) {
      std::ostringstream msg;
      msg << "holdout objective diverged at epoch " << epoch << ": "
          << stats.holdout_objective << " against initial " << initial_holdout
          << " (tolerance " << config.divergence_tolerance << ")";
      throw NumericError(msg.str());
    }
    result.epochs.push_back(stats);
    if (sink) {
      sink(stats);
    }
  }
  return result;
}

}  // namespace semfunc
