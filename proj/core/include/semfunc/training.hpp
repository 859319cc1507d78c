#ifndef SEMFUNC_TRAINING_HPP
#define SEMFUNC_TRAINING_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semfunc/corpus.hpp"
#include "semfunc/matrix.hpp"
#include "semfunc/mean_field.hpp"
#include "semfunc/model.hpp"
#include "semfunc/rng.hpp"

namespace semfunc {

struct TrainingConfig {
  SpaceConfig space{200, 20};
  double learning_rate = 0.01;
  std::size_t epochs = 5;
  std::size_t negative_samples = 5;
  double l2_penalty = 1e-4;
  double sampling_power = 0.75;   // negatives drawn prop. to freq^power
  std::uint64_t seed = 42;
  std::size_t minibatch = 64;
  std::size_t min_count = 1;      // vocabulary pruning threshold
  double ppmi_gain = 1.0;         // scale on association scores at init
  double holdout_fraction = 0.05;
  double divergence_tolerance = 1.0;  // allowed drop in holdout objective

  void validate() const;  // throws ConfigurationError
};

// Sparse predicate-by-dimension counts. Context features are hashed onto
// the dimensions, so the row for a predicate lives directly in the space
// the semantic functions read.
struct CooccurrenceCounts {
  std::size_t dims = 0;
  std::vector<std::string> row_ids;  // first-touch order
  std::vector<std::unordered_map<std::size_t, double>> rows;
  std::vector<double> column_totals;
  double total = 0.0;

  std::size_t row_index(const std::string& id) const;  // LookupError
};

// Bucket for one (link label, neighbor predicate) context feature.
std::size_t context_column(const std::string& label,
                           const std::string& neighbor, std::size_t dims,
                           std::uint64_t seed);

// Count (predicate, context) pairs over the triples: an argument's context
// is its link plus the verb, the verb's context is each link plus that
// argument. Triples mentioning out-of-vocabulary predicates are skipped.
CooccurrenceCounts project_counts(const std::vector<TripleRecord>& triples,
                                  const Vocabulary& vocab, std::size_t dims,
                                  std::uint64_t seed);

// Dense positive-PMI row: max(0, log(total * c_pj / (c_p * c_j))).
std::vector<double> ppmi_row(const CooccurrenceCounts& counts,
                             std::size_t row);

// Model at the start of training: weights are scaled PPMI rows, each bias
// is set so the function gives exactly 1/2 at the uniform activation
// vector, link matrices and node bias start at zero.
WorldModel initialize_model(const std::vector<TripleRecord>& triples,
                            const Vocabulary& vocab,
                            const TrainingConfig& config);

// One situation: a shared graph shape plus the observed predicate at each
// node. Topologies are shared per shape, so they can key caches.
struct Observation {
  std::shared_ptr<const GraphTopology> topology;
  std::vector<std::pair<std::string, std::string>> node_predicates;
};

// Full triples become x <-ARG1- y -ARG2-> z; intransitive ones keep only
// the edge whose argument is present. Triples with any out-of-vocabulary
// predicate are dropped.
std::vector<Observation> observations_from_triples(
    const std::vector<TripleRecord>& triples, const Vocabulary& vocab);

// P(c) proportional to frequency(c)^power, over vocabulary order.
std::vector<double> negative_sampling_distribution(const WorldModel& model,
                                                   double power);

class NegativeSampler {
 public:
  NegativeSampler(const WorldModel& model, double power);
  std::size_t draw(Rng& rng) const;  // vocabulary index

 private:
  std::vector<double> cdf_;
};

// Everything about one observation that is held fixed while parameters
// get their gradient step: the conditioned and unconditioned activations
// and the sampled negative predicates per node.
struct ObservationWorkspace {
  MeanFieldState positive;
  MeanFieldState free;
  std::vector<std::vector<std::size_t>> negatives;  // per node
};

// Runs the two optimizations and draws negatives. A precomputed free
// state for the same topology may be passed to avoid recomputing it; it
// depends only on the parameters, not the observation.
ObservationWorkspace prepare_observation(const WorldModel& model,
                                         const Observation& observation,
                                         const NegativeSampler& sampler,
                                         std::size_t negative_samples,
                                         Rng& rng,
                                         const MeanFieldSettings& settings,
                                         const MeanFieldState* shared_free =
                                             nullptr);

// log t_p(q+) per observed node, plus log(1 - t_c(q+)) per negative,
// plus the contrastive graph energy  E(q+) - E(q0). The workspace states
// are treated as constants, so this is differentiable in the parameters
// alone and the gradient below is checkable by finite differences.
double observation_value(const WorldModel& model,
                         const Observation& observation,
                         const ObservationWorkspace& workspace);

struct ModelGradient {
  std::vector<std::vector<double>> weights;  // per predicate
  std::vector<double> bias;                  // per predicate
  std::map<LinkLabel, Matrix> links;
  std::vector<double> node_bias;

  static ModelGradient zeros_like(const WorldModel& model);
  void scale(double factor);
};

// Adds d(observation_value)/d(parameters) into the accumulator.
void observation_gradient(const WorldModel& model,
                          const Observation& observation,
                          const ObservationWorkspace& workspace,
                          ModelGradient& accumulator);

struct EpochStats {
  std::size_t epoch = 0;           // 1-based
  double train_objective = 0.0;    // mean observation value this epoch
  double holdout_objective = 0.0;  // NaN when there is no holdout
  double seconds = 0.0;
};

using ProgressSink = std::function<void(const EpochStats&)>;

struct TrainResult {
  WorldModel model;
  std::vector<EpochStats> epochs;
  std::size_t observation_count = 0;
  std::size_t holdout_count = 0;
  std::size_t kept_triples = 0;
  std::size_t dropped_triples = 0;
};

// Stochastic ascent on the observation objective with an L2 penalty on
// all parameters, in minibatches, with a fixed-seed holdout evaluation
// after every epoch. A holdout objective falling more than
// divergence_tolerance below its starting value raises NumericError, as
// does any non-finite parameter. Fully deterministic for a given config.
TrainResult train(const std::vector<TripleRecord>& triples,
                  const TrainingConfig& config,
                  const MeanFieldSettings& settings = MeanFieldSettings{},
                  const ProgressSink& sink = nullptr);

}  // namespace semfunc

#endif
