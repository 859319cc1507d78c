// End-to-end acceptance checks. Each criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any fail. Tolerances and
// runtime budgets are pinned here on purpose: loosening them is a
// regression, not a fix.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "semfunc/corpus.hpp"
#include "semfunc/eval.hpp"
#include "semfunc/inference.hpp"
#include "semfunc/matrix.hpp"
#include "semfunc/mean_field.hpp"
#include "semfunc/model.hpp"
#include "semfunc/oracle.hpp"
#include "semfunc/rng.hpp"
#include "semfunc/training.hpp"

#include "support/gradient_check.hpp"
#include "support/random_models.hpp"
#include "support/synthetic_world.hpp"

#include "cli.hpp"

namespace {

using namespace semfunc;
using testsupport::chain3;
using testsupport::random_chain_model;
using testsupport::random_function;
using testsupport::random_single_node_model;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  char buffer[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buffer, sizeof buffer, pattern, args);
  va_end(args);
  return buffer;
}

GraphTopology single_node() { return GraphTopology({"n"}, {}); }

// Criterion 1: the exact engine obeys probability identities. On random
// single-node models, P(a and b) = P(a|b) P(b) and P(a|a) = 1, both to
// 1e-12 (they come out bit-exact in practice).
Outcome exact_oracle_identities() {
  const GraphTopology topology = single_node();
  Rng rng(101);
  double worst_chain = 0.0;
  double worst_self = 0.0;
  for (std::size_t trial = 0; trial < 50; ++trial) {
    const std::size_t dims = 4 + rng.next_below(7);
    const std::size_t card = 1 + rng.next_below(3);
    const WorldModel m = random_single_node_model(rng, dims, card, 2, 3.0,
                                                  trial % 2 == 1);
    const TruthCondition ta{"n", "a", true};
    const TruthCondition tb{"n", "b", true};

    const double p_ab = oracle::event_probability(m, topology, {ta, tb});
    const double p_b = oracle::event_probability(m, topology, {tb});
    const double p_a_given_b =
        oracle::conditional_truth(m, topology, {tb}, ta).probability;
    worst_chain = std::max(worst_chain, std::fabs(p_ab - p_a_given_b * p_b));

    const double self =
        oracle::conditional_truth(m, topology, {ta}, ta).probability;
    worst_self = std::max(worst_self, std::fabs(self - 1.0));
  }
  Outcome out;
  out.pass = worst_chain <= 1e-12 && worst_self <= 1e-12;
  out.detail = fmt("chain-rule err %.2e, self-conditioning err %.2e",
                   worst_chain, worst_self);
  return out;
}

// Criterion 2: with hard classifiers, "every"/"some" read set-theoretically
// and as conditional-probability thresholds agree on every random model,
// and the barbara syllogism never produces a counterexample.
Outcome quantifier_and_syllogism() {
  Rng rng(202);
  std::size_t agreed = 0;
  std::size_t barbara_ok = 0;
  const std::size_t trials = 1000;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t dims = 3 + rng.next_below(6);
    const std::size_t card = 1 + rng.next_below(std::min<std::size_t>(2, dims - 1));
    const WorldModel m = random_single_node_model(rng, dims, card, 3, 4.0);
    agreed += oracle::check_quantifier_equivalence(m, "a", "b").agree;
    barbara_ok += oracle::check_barbara(m, "a", "b", "c");
  }
  Outcome out;
  out.pass = agreed == trials && barbara_ok == trials;
  out.detail = fmt("%zu/%zu agree, %zu/%zu syllogisms hold", agreed, trials,
                   barbara_ok, trials);
  return out;
}

// Criterion 3: converged mean-field activations track the exact posterior
// marginals within 0.05 on at least 95 of 100 models, and converging never
// increases the inclusive KL relative to the uniform initialization.
Outcome mean_field_marginals() {
  const GraphTopology topology = single_node();
  Rng rng(303);
  std::size_t close = 0;
  std::size_t kl_ok = 0;
  const std::size_t trials = 100;
  double worst = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t dims = 2 + rng.next_below(11);
    const std::size_t card =
        1 + rng.next_below(std::min<std::size_t>(3, dims - 1));
    const WorldModel m = random_single_node_model(rng, dims, card, 2);
    const std::vector<TruthCondition> conditions{{"n", "a", true}};

    const MeanFieldState state = mean_field_optimize(m, topology, conditions);
    const std::vector<double> exact =
        oracle::posterior_marginals(m, topology, conditions)[0];
    double err = 0.0;
    for (std::size_t i = 0; i < dims; ++i) {
      err = std::max(err, std::fabs(state.q[0][i] - exact[i]));
    }
    worst = std::max(worst, err);
    close += err <= 0.05;

    const oracle::JointPosterior joint =
        oracle::joint_posterior(m, topology, conditions);
    MeanFieldState uniform;
    uniform.nodes = {"n"};
    uniform.q = {std::vector<double>(dims, m.space.uniform_activation())};
    kl_ok += inclusive_kl(joint, state, m.space) <=
             inclusive_kl(joint, uniform, m.space) + 1e-12;
  }
  Outcome out;
  out.pass = close >= 95 && kl_ok == trials;
  out.detail = fmt("%zu/%zu within 0.05 (worst %.3f), KL improved %zu/%zu",
                   close, trials, worst, kl_ok, trials);
  return out;
}

// Criterion 4: a constant semantic function leaves every activation at
// exactly C/D, and the linked update with all-zero link weights reproduces
// the single-condition update bit for bit.
Outcome uniform_fixed_point() {
  Outcome out;
  out.pass = true;
  std::size_t checked = 0;

  const std::pair<std::size_t, std::size_t> shapes[] = {
      {2, 1}, {3, 2}, {4, 2}, {5, 3}, {7, 3}, {10, 1}, {12, 6}};
  for (const auto& [dims, card] : shapes) {
    WorldModel m;
    m.space = SpaceConfig{dims, card};
    m.node_bias.assign(dims, 0.0);
    Predicate flat;
    flat.function.weights.assign(dims, 0.0);
    flat.function.bias = 0.7;
    flat.frequency = 1.0;
    m.add_predicate("flat", flat);

    const double uniform = m.space.uniform_activation();
    const std::vector<double> q(dims, uniform);
    for (std::size_t i = 0; i < dims; ++i) {
      if (update_single(q, i, flat.function, m.space) != uniform) {
        out.pass = false;
      }
    }

    for (const std::vector<TruthCondition>& conditions :
         {std::vector<TruthCondition>{},
          std::vector<TruthCondition>{{"n", "flat", true}}}) {
      const MeanFieldState state =
          mean_field_optimize(m, single_node(), conditions);
      if (!state.converged) {
        out.pass = false;
      }
      for (double v : state.q[0]) {
        if (v != uniform) {
          out.pass = false;
        }
      }
    }
    ++checked;
  }

  const std::size_t dims = 6;
  const SpaceConfig space{dims, 2};
  const GraphTopology pair({"x", "y"}, {{"x", "y", "L"}});
  WorldModel linked;
  linked.space = space;
  linked.node_bias.assign(dims, 0.0);
  linked.links["L"] = Matrix(dims, dims);
  Predicate stub;
  stub.function.weights.assign(dims, 0.0);
  stub.frequency = 1.0;
  linked.add_predicate("a", stub);

  Rng rng(404);
  std::size_t bitwise_equal = 0;
  for (std::size_t trial = 0; trial < 50; ++trial) {
    MeanFieldState state;
    state.nodes = {"x", "y"};
    state.q.assign(2, std::vector<double>(dims));
    for (std::vector<double>& node_q : state.q) {
      for (double& v : node_q) {
        v = rng.next_in(0.05, 0.95);
      }
    }
    const SemanticFunction f = random_function(rng, dims, 3.0);
    const std::size_t i = rng.next_below(dims);
    bitwise_equal += update_linked(state, "x", i, f, pair, linked) ==
                     update_single(state.q[0], i, f, space);
  }
  if (bitwise_equal != 50) {
    out.pass = false;
  }
  out.detail = fmt("%zu shapes exact, %zu/50 zero-link updates bit-equal",
                   checked, bitwise_equal);
  return out;
}

// Criterion 5: on three-node chains, the approximate conditional query is
// within 0.1 of the exact answer for at least 27 of 30 queries.
Outcome chain_query_accuracy() {
  Rng rng(505);
  const GraphTopology topology = chain3();
  std::size_t close = 0;
  const std::size_t trials = 30;
  double worst = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t dims = 3 + rng.next_below(4);
    const std::size_t card = 1 + rng.next_below(std::min<std::size_t>(2, dims - 1));
    const WorldModel m = random_chain_model(rng, dims, card, 3);

    QueryGraph query;
    query.topology = topology;
    query.conditions = {{"n0", "a", true}};
    query.target_node = "n2";
    query.target_predicate = "b";
    const double approx = graph_conditional_query(m, query);
    const double exact =
        oracle::conditional_truth(m, topology, query.conditions,
                                  {"n2", "b", true})
            .probability;
    const double err = std::fabs(approx - exact);
    worst = std::max(worst, err);
    close += err <= 0.1;
  }
  Outcome out;
  out.pass = close >= 27;
  out.detail = fmt("%zu/%zu within 0.1 (worst %.3f)", close, trials, worst);
  return out;
}

// Criterion 6: analytic gradients of the observation objective match
// central finite differences (h = 1e-5) to relative error 1e-4 over 20
// random configurations covering all three observation shapes.
Outcome gradient_finite_differences() {
  const auto svo = [](const char* s, const char* v, const char* o) {
    TripleRecord t;
    t.subject = s;
    t.verb = v;
    t.object = o;
    return t;
  };
  std::vector<TripleRecord> triples = {
      svo("dog", "chase", "cat"), svo("cat", "chase", "mouse"),
      svo("dog", "eat", "bone"),  svo("cat", "eat", "fish")};
  TripleRecord sv;
  sv.subject = "dog";
  sv.verb = "bark";
  triples.push_back(sv);
  TripleRecord vo;
  vo.verb = "chase";
  vo.object = "mouse";
  triples.push_back(vo);

  const VocabularyBuildResult built = build_vocabulary(triples);
  const std::vector<Observation> observations =
      observations_from_triples(built.kept, built.vocab);

  Rng rng(606);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 20; ++trial) {
    TrainingConfig config;
    config.space = SpaceConfig{6, 2};
    config.seed = 600 + trial;
    WorldModel model = initialize_model(built.kept, built.vocab, config);
    for (std::size_t p = 0; p < model.vocab_size(); ++p) {
      for (double& w : model.entry(p).function.weights) {
        w += rng.next_in(-0.5, 0.5);
      }
      model.entry(p).function.bias += rng.next_in(-0.5, 0.5);
    }
    for (auto& [label, matrix] : model.links) {
      for (double& v : matrix.data()) {
        v += rng.next_in(-0.3, 0.3);
      }
    }
    for (double& b : model.node_bias) {
      b += rng.next_in(-0.2, 0.2);
    }

    const Observation& obs = observations[trial % observations.size()];
    const NegativeSampler sampler(model, 0.75);
    Rng draws(7000 + trial);
    const ObservationWorkspace workspace =
        prepare_observation(model, obs, sampler, 2, draws, MeanFieldSettings{});
    worst = std::max(
        worst, testsupport::max_gradient_error(model, obs, workspace));
  }
  Outcome out;
  out.pass = worst <= 1e-4;
  out.detail = fmt("worst relative error %.2e over 20 configurations", worst);
  return out;
}

// Criterion 7: train on 50k triples sampled from the hand-built world and
// check that the learned model recovers its structure: hypernym direction,
// graded similarity (Spearman >= 0.8), gold term ranked first on >= 80% of
// properties, and MAP >= 0.9.
Outcome synthetic_world_learning() {
  using namespace testsupport;
  const std::vector<TripleRecord> triples = sample_world_triples(50000, 707);

  TrainingConfig config;
  config.space = SpaceConfig{50, 5};
  config.learning_rate = 0.05;
  config.epochs = 5;
  config.negative_samples = 5;
  config.l2_penalty = 1e-4;
  config.sampling_power = 0.75;
  config.seed = 7;
  config.minibatch = 64;
  config.min_count = 1;
  config.ppmi_gain = 1.0;
  config.holdout_fraction = 0.0;

  MeanFieldSettings settings;
  settings.tolerance = 1e-3;
  settings.max_sweeps = 15;

  const TrainResult result = train(triples, config, settings);
  const WorldModel& m = result.model;

  const double dog_animal = implication_score(m, "dog_n", "animal_n", settings);
  const double animal_dog = implication_score(m, "animal_n", "dog_n", settings);
  const double dog_tool = implication_score(m, "dog_n", "tool_n", settings);
  const bool direction_ok = dog_animal > animal_dog && dog_animal > dog_tool;

  const EvalReport similarity =
      evaluate_similarity(m, world_similarity_gold(), settings);

  std::vector<std::string> candidates;
  for (const std::string& term : world_terms()) {
    candidates.push_back(noun_predicate(term));
  }
  const std::vector<RelpronEntry> properties = world_properties();
  std::size_t gold_first = 0;
  for (const RelpronEntry& e : properties) {
    const std::vector<ScoredTerm> ranked =
        rank_terms(m, candidates, noun_predicate(e.hypernym),
                   verb_predicate(e.verb), noun_predicate(e.argument), e.role,
                   settings);
    gold_first += !ranked.empty() && ranked.front().id == noun_predicate(e.term);
  }

  const EvalReport relpron =
      evaluate_relpron(m, properties, RelpronSplit::Dev, settings);

  Outcome out;
  out.pass = direction_ok && similarity.value >= 0.8 &&
             gold_first * 5 >= properties.size() * 4 && relpron.value >= 0.9;
  out.detail = fmt(
      "impl d>a %.3f a>d %.3f d>t %.3f, spearman %.3f, gold-first %zu/%zu, "
      "MAP %.3f",
      dog_animal, animal_dog, dog_tool, similarity.value, gold_first,
      properties.size(), relpron.value);
  return out;
}

// Criterion 8: metric implementations reproduce hand-computed values.
Outcome metric_hand_cases() {
  bool ok = true;

  ok &= spearman({1, 2, 3, 4}, {1, 3, 2, 4}) == 0.8;
  ok &= spearman({1, 2, 3}, {10, 20, 30}) == 1.0;
  ok &= spearman({1, 2, 3}, {3, 2, 1}) == -1.0;

  const std::unordered_set<std::string> gold{"g"};
  ok &= average_precision({"x", "g"}, gold) == 0.5;
  ok &= average_precision({"a", "b", "c", "g"}, gold) == 0.25;
  ok &= average_precision({"g1", "g2", "x"}, {"g1", "g2"}) == 1.0;

  const MapResult single = mean_average_precision({{"x", "g"}}, {gold});
  ok &= single.value == 0.5 && single.evaluated == 1;
  const MapResult both =
      mean_average_precision({{"g", "a"}, {"a", "g"}}, {gold, gold});
  ok &= both.value == 0.75 && both.evaluated == 2;

  Outcome out;
  out.pass = ok;
  out.detail = "spearman {0.8, 1, -1}, AP {0.5, 0.25, 1}, MAP {0.5, 0.75}";
  return out;
}

struct CliCapture {
  int code = 0;
  std::string out;
};

CliCapture run_cli_capture(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  CliCapture result;
  result.code = run_cli(std::move(args), out, err);
  result.out = out.str();
  return result;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Criterion 9: repeating a CLI invocation with identical inputs and seed
// produces byte-identical reports and byte-identical serialized models.
Outcome byte_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "semfunc_acceptance";
  fs::create_directories(dir);

  const fs::path corpus = dir / "world.tsv";
  {
    std::ofstream out(corpus, std::ios::binary);
    for (const TripleRecord& t :
         testsupport::sample_world_triples(2000, 909)) {
      out << *t.subject << '\t' << t.verb << '\t' << *t.object << '\n';
    }
  }
  const fs::path gold = dir / "similarity.tsv";
  {
    std::ofstream out(gold, std::ios::binary);
    for (const SimilarityPair& p : testsupport::world_similarity_gold()) {
      out << p.word1 << '\t' << p.word2 << '\t' << p.gold << '\n';
    }
  }

  const fs::path model_path = dir / "model.json";
  const std::vector<std::string> train_args = {
      "train",     "--corpus",    corpus.string(),
      "--out",     model_path.string(),
      "--dims",    "24",          "--card",   "3",
      "--epochs",  "2",           "--neg",    "2",
      "--minibatch", "32",        "--holdout", "0",
      "--seed",    "7",           "--json"};

  const CliCapture train_one = run_cli_capture(train_args);
  const std::string model_one = slurp(model_path);
  const CliCapture train_two = run_cli_capture(train_args);
  const std::string model_two = slurp(model_path);

  const std::vector<std::string> sim_args = {
      "query-sim", "--model", model_path.string(),
      "--word1",   "dog",     "--word2",
      "cat",       "--json"};
  const CliCapture sim_one = run_cli_capture(sim_args);
  const CliCapture sim_two = run_cli_capture(sim_args);

  const std::vector<std::string> eval_args = {
      "eval-sim", "--model", model_path.string(), "--dataset", gold.string(),
      "--json"};
  const CliCapture eval_one = run_cli_capture(eval_args);
  const CliCapture eval_two = run_cli_capture(eval_args);

  const bool codes_ok = train_one.code == 0 && train_two.code == 0 &&
                        sim_one.code == 0 && sim_two.code == 0 &&
                        eval_one.code == 0 && eval_two.code == 0;
  const bool bytes_ok = train_one.out == train_two.out &&
                        !model_one.empty() && model_one == model_two &&
                        sim_one.out == sim_two.out &&
                        eval_one.out == eval_two.out;

  Outcome out;
  out.pass = codes_ok && bytes_ok;
  out.detail = fmt("exit codes %s, report+model bytes %s",
                   codes_ok ? "clean" : "nonzero",
                   bytes_ok ? "identical" : "DIFFER");
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;  // 0 means unchecked
    Outcome (*body)();
  };
  const Criterion criteria[] = {
      {"exact oracle identities", 10.0, exact_oracle_identities},
      {"quantifier and syllogism checks", 30.0, quantifier_and_syllogism},
      {"mean-field marginal accuracy", 60.0, mean_field_marginals},
      {"uniform fixed point exactness", 0.0, uniform_fixed_point},
      {"chain query accuracy", 120.0, chain_query_accuracy},
      {"gradient finite differences", 0.0, gradient_finite_differences},
      {"synthetic world learning", 600.0, synthetic_world_learning},
      {"metric hand cases", 0.0, metric_hand_cases},
      {"byte determinism", 0.0, byte_determinism},
  };

  bool all_pass = true;
  std::size_t number = 1;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.body();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      outcome.pass = false;
      outcome.detail += fmt(" [over %.0fs budget]", c.budget_seconds);
    }
    all_pass &= outcome.pass;
    std::printf("criterion %zu (%s): %s  [%.1fs] %s\n", number, c.name,
                outcome.pass ? "PASS" : "FAIL", seconds,
                outcome.detail.c_str());
    std::fflush(stdout);
    ++number;
  }
  return all_pass ? 0 : 1;
}
