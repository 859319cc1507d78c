#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semfunc/corpus.hpp"
#include "semfunc/errors.hpp"
#include "semfunc/eval.hpp"
#include "semfunc/inference.hpp"
#include "semfunc/mean_field.hpp"
#include "semfunc/model.hpp"
#include "semfunc/model_io.hpp"
#include "semfunc/oracle.hpp"
#include "semfunc/training.hpp"

namespace semfunc {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
  if (std::isnan(v)) {
    return "n/a";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// NaN marks "no holdout"; JSON has no NaN, so it becomes null.
ordered_json json_number(double v) {
  if (!std::isfinite(v)) {
    return nullptr;
  }
  return v;
}

ArgRole parse_role(std::string role) {
  std::transform(role.begin(), role.end(), role.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (role == "sbj") {
    return ArgRole::Subject;
  }
  if (role == "obj") {
    return ArgRole::Object;
  }
  throw InputError("role must be SBJ or OBJ, got '" + role + "'");
}

RelpronSplit parse_split(std::string split) {
  std::transform(split.begin(), split.end(), split.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (split == "dev") {
    return RelpronSplit::Dev;
  }
  if (split == "test") {
    return RelpronSplit::Test;
  }
  throw InputError("split must be dev or test, got '" + split + "'");
}

std::string resolve_or_throw(const WorldModel& model, const std::string& word) {
  if (const auto pred = resolve_predicate(model, word)) {
    return *pred;
  }
  throw LookupError("word '" + word + "' is not in the model vocabulary (tried '" +
                    word + "', '" + noun_predicate(word) + "', '" +
                    verb_predicate(word) + "')");
}

struct MfOpts {
  double tolerance = 1e-4;
  std::size_t max_sweeps = 50;

  MeanFieldSettings settings() const {
    MeanFieldSettings s;
    s.tolerance = tolerance;
    s.max_sweeps = max_sweeps;
    return s;
  }
};

void add_mf_options(CLI::App* cmd, MfOpts& opts) {
  cmd->add_option("--mf-tolerance", opts.tolerance,
                  "mean-field convergence tolerance");
  cmd->add_option("--mf-max-sweeps", opts.max_sweeps,
                  "mean-field sweep limit");
}

// ---- train ----

struct TrainOpts {
  std::string corpus;
  std::string out_path;
  TrainingConfig config;
  MfOpts mf;
  bool keep_intransitives = false;
  bool json = false;
};

int do_train(const TrainOpts& o, std::ostream& out, std::ostream& err) {
  const TripleLoadResult loaded = load_triples_file(o.corpus);
  std::vector<TripleRecord> triples;
  if (o.keep_intransitives) {
    triples = loaded.triples;
  } else {
    for (const TripleRecord& t : loaded.triples) {
      if (t.transitive()) {
        triples.push_back(t);
      }
    }
  }
  const std::size_t intransitive_dropped = loaded.triples.size() - triples.size();

  const ProgressSink sink = [&err](const EpochStats& s) {
    err << "epoch " << s.epoch << ": train " << fmt(s.train_objective)
        << " holdout " << fmt(s.holdout_objective) << " (" << fmt(s.seconds)
        << "s)\n";
  };
  const TrainResult result = train(triples, o.config, o.mf.settings(), sink);
  save_model_file(result.model, o.out_path);

  if (o.json) {
    ordered_json j;
    j["command"] = "train";
    j["corpus"] = o.corpus;
    j["model"] = o.out_path;
    j["space"] = {{"dims", o.config.space.dims},
                  {"cardinality", o.config.space.cardinality}};
    j["triples"] = {{"data_lines", loaded.data_lines},
                    {"malformed", loaded.malformed.size()},
                    {"intransitive_dropped", intransitive_dropped},
                    {"kept", result.kept_triples},
                    {"pruned", result.dropped_triples}};
    j["vocabulary"] = result.model.vocab_size();
    j["observations"] = result.observation_count;
    j["holdout"] = result.holdout_count;
    ordered_json epochs = ordered_json::array();
    for (const EpochStats& e : result.epochs) {
      epochs.push_back({{"epoch", e.epoch},
                        {"train_objective", json_number(e.train_objective)},
                        {"holdout_objective", json_number(e.holdout_objective)}});
    }
    j["epochs"] = std::move(epochs);
    out << j.dump(2) << "\n";
  } else {
    out << "model written to " << o.out_path << "\n";
    out << "triples: " << result.kept_triples << " kept, "
        << result.dropped_triples << " pruned, " << intransitive_dropped
        << " intransitive dropped, " << loaded.malformed.size()
        << " malformed\n";
    out << "vocabulary: " << result.model.vocab_size() << " predicates\n";
    out << "observations: " << result.observation_count << " (holdout "
        << result.holdout_count << ")\n";
    for (const EpochStats& e : result.epochs) {
      out << "epoch " << e.epoch << ": train " << fmt(e.train_objective)
          << " holdout " << fmt(e.holdout_objective) << "\n";
    }
  }
  return 0;
}

// ---- query commands ----

struct QuerySimOpts {
  std::string model_path;
  std::string word1;
  std::string word2;
  MfOpts mf;
  bool json = false;
};

int do_query_sim(const QuerySimOpts& o, std::ostream& out) {
  const WorldModel model = load_model_file(o.model_path);
  const std::string p1 = resolve_or_throw(model, o.word1);
  const std::string p2 = resolve_or_throw(model, o.word2);
  const double score = similarity_score(model, p1, p2, o.mf.settings());
  if (o.json) {
    ordered_json j;
    j["command"] = "query-sim";
    j["word1"] = o.word1;
    j["word2"] = o.word2;
    j["predicate1"] = p1;
    j["predicate2"] = p2;
    j["score"] = score;
    out << j.dump(2) << "\n";
  } else {
    out << "predicates: " << p1 << " " << p2 << "\n";
    out << "similarity = " << fmt(score) << "\n";
  }
  return 0;
}

struct QueryImplOpts {
  std::string model_path;
  std::string premise;
  std::string conclusion;
  MfOpts mf;
  bool json = false;
};

int do_query_impl(const QueryImplOpts& o, std::ostream& out) {
  const WorldModel model = load_model_file(o.model_path);
  const std::string p = resolve_or_throw(model, o.premise);
  const std::string c = resolve_or_throw(model, o.conclusion);
  const double score = implication_score(model, p, c, o.mf.settings());
  if (o.json) {
    ordered_json j;
    j["command"] = "query-impl";
    j["premise"] = o.premise;
    j["conclusion"] = o.conclusion;
    j["predicate_premise"] = p;
    j["predicate_conclusion"] = c;
    j["score"] = score;
    out << j.dump(2) << "\n";
  } else {
    out << "predicates: " << p << " -> " << c << "\n";
    out << "implication = " << fmt(score) << "\n";
  }
  return 0;
}

struct QueryRelpronOpts {
  std::string model_path;
  std::string term;
  std::string hypernym;
  std::string verb;
  std::string argument;
  std::string role = "SBJ";
  MfOpts mf;
  bool json = false;
};

int do_query_relpron(const QueryRelpronOpts& o, std::ostream& out) {
  const WorldModel model = load_model_file(o.model_path);
  const ArgRole role = parse_role(o.role);
  const std::string term = resolve_or_throw(model, o.term);
  const std::string hyp = resolve_or_throw(model, o.hypernym);
  const std::string verb = resolve_or_throw(model, o.verb);
  const std::string arg = resolve_or_throw(model, o.argument);
  const double score =
      relpron_score(model, term, hyp, verb, arg, role, o.mf.settings());
  if (o.json) {
    ordered_json j;
    j["command"] = "query-relpron";
    j["term"] = o.term;
    j["hypernym"] = o.hypernym;
    j["verb"] = o.verb;
    j["argument"] = o.argument;
    j["role"] = role == ArgRole::Subject ? "SBJ" : "OBJ";
    j["predicates"] = {term, hyp, verb, arg};
    j["score"] = score;
    out << j.dump(2) << "\n";
  } else {
    out << "predicates: " << term << " | " << hyp << " " << verb << " " << arg
        << " (" << (role == ArgRole::Subject ? "SBJ" : "OBJ") << ")\n";
    out << "score = " << fmt(score) << "\n";
  }
  return 0;
}

// ---- eval commands ----

struct EvalSimOpts {
  std::string model_path;
  std::string dataset;
  MfOpts mf;
  bool json = false;
};

int do_eval_sim(const EvalSimOpts& o, std::ostream& out) {
  const WorldModel model = load_model_file(o.model_path);
  const std::vector<SimilarityPair> pairs = load_similarity_file(o.dataset);
  const EvalReport report = evaluate_similarity(model, pairs, o.mf.settings());
  if (o.json) {
    ordered_json j;
    j["command"] = "eval-sim";
    j["dataset"] = o.dataset;
    j["metric"] = report.metric;
    j["value"] = report.value;
    j["coverage"] = report.coverage;
    j["pairs"] = pairs.size();
    ordered_json items = ordered_json::array();
    for (const EvalItem& item : report.items) {
      items.push_back(
          {{"id", item.id}, {"gold", item.gold}, {"predicted", item.predicted}});
    }
    j["items"] = std::move(items);
    out << j.dump(2) << "\n";
  } else {
    out << "pairs: " << pairs.size() << " (" << report.items.size()
        << " scored)\n";
    out << "coverage = " << fmt(report.coverage) << "\n";
    out << "spearman = " << fmt(report.value) << "\n";
  }
  return 0;
}

struct EvalRelpronOpts {
  std::string model_path;
  std::string dataset;
  std::string split = "dev";
  MfOpts mf;
  bool json = false;
};

int do_eval_relpron(const EvalRelpronOpts& o, std::ostream& out) {
  const WorldModel model = load_model_file(o.model_path);
  const std::vector<RelpronEntry> entries = load_relpron_file(o.dataset);
  const RelpronSplit split = parse_split(o.split);
  const EvalReport report =
      evaluate_relpron(model, entries, split, o.mf.settings());
  if (o.json) {
    ordered_json j;
    j["command"] = "eval-relpron";
    j["dataset"] = o.dataset;
    j["split"] = o.split;
    j["metric"] = report.metric;
    j["value"] = report.value;
    j["coverage"] = report.coverage;
    ordered_json items = ordered_json::array();
    for (const EvalItem& item : report.items) {
      items.push_back({{"term", item.id},
                       {"properties", item.gold},
                       {"average_precision", item.predicted}});
    }
    j["items"] = std::move(items);
    out << j.dump(2) << "\n";
  } else {
    out << "terms scored: " << report.items.size() << "\n";
    out << "coverage = " << fmt(report.coverage) << "\n";
    out << "map = " << fmt(report.value) << "\n";
  }
  return 0;
}

// ---- oracle-check ----

struct OracleCheckOpts {
  std::string model_path;
  double budget = 1e7;
  std::size_t max_predicates = 6;
  MfOpts mf;
  bool json = false;
};

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t passed = 0;
  double threshold = 1.0;  // required passed/checks ratio

  bool ok() const {
    if (checks == 0) {
      return true;
    }
    return static_cast<double>(passed) / static_cast<double>(checks) >=
           threshold;
  }
};

// Exercises the exact-enumeration engine against identities that must
// hold on any model small enough to enumerate, then measures how close
// the iterative approximation lands.
int do_oracle_check(const OracleCheckOpts& o, std::ostream& out) {
  const WorldModel model = load_model_file(o.model_path);
  oracle::Options options;
  options.budget = o.budget;

  const GraphTopology node({"x"}, {});
  std::vector<std::string> preds(
      model.ids().begin(),
      model.ids().begin() +
          std::min<std::size_t>(model.vocab_size(), o.max_predicates));

  std::vector<SuiteResult> suites;

  {
    SuiteResult s{"normalization"};
    for (const std::string& a : preds) {
      const double yes =
          oracle::event_probability(model, node, {{"x", a, true}}, options);
      const double no =
          oracle::event_probability(model, node, {{"x", a, false}}, options);
      ++s.checks;
      s.passed += std::abs(yes + no - 1.0) <= 1e-9;
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"chain-rule"};
    for (const std::string& a : preds) {
      for (const std::string& b : preds) {
        if (a == b) {
          continue;
        }
        const double joint = oracle::event_probability(
            model, node, {{"x", a, true}, {"x", b, true}}, options);
        const double prior =
            oracle::event_probability(model, node, {{"x", b, true}}, options);
        const double cond =
            oracle::conditional_truth(model, node, {{"x", b, true}},
                                      {"x", a, true}, options)
                .probability;
        ++s.checks;
        s.passed += std::abs(joint - cond * prior) <= 1e-9;
      }
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"self-conditioning"};
    for (const std::string& a : preds) {
      const double p = oracle::conditional_truth(model, node, {{"x", a, true}},
                                                 {"x", a, true}, options)
                           .probability;
      ++s.checks;
      s.passed += p == 1.0;
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"marginal-consistency"};
    const double c = static_cast<double>(model.space.cardinality);
    for (const std::string& a : preds) {
      const auto marginals =
          oracle::posterior_marginals(model, node, {{"x", a, true}}, options);
      double sum = 0.0;
      for (const double m : marginals[0]) {
        sum += m;
      }
      ++s.checks;
      s.passed += std::abs(sum - c) <= 1e-9 * c;
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"quantifier-agreement"};
    for (const std::string& a : preds) {
      for (const std::string& b : preds) {
        if (a == b) {
          continue;
        }
        const auto report =
            oracle::check_quantifier_equivalence(model, a, b, options);
        ++s.checks;
        s.passed += report.agree;
      }
    }
    suites.push_back(s);
  }
  {
    SuiteResult s{"mean-field-accuracy"};
    s.threshold = 0.9;  // coordinates within 0.1 of the exact marginal
    for (const std::string& a : preds) {
      const auto exact =
          oracle::posterior_marginals(model, node, {{"x", a, true}}, options);
      const MeanFieldState state =
          mean_field_optimize(model, node, {{"x", a, true}}, o.mf.settings());
      const std::vector<double>& q = state.activations("x");
      for (std::size_t j = 0; j < q.size(); ++j) {
        ++s.checks;
        s.passed += std::abs(q[j] - exact[0][j]) <= 0.1;
      }
    }
    suites.push_back(s);
  }

  bool all_ok = true;
  for (const SuiteResult& s : suites) {
    all_ok = all_ok && s.ok();
  }

  if (o.json) {
    ordered_json j;
    j["command"] = "oracle-check";
    j["model"] = o.model_path;
    j["budget"] = o.budget;
    j["predicates_checked"] = preds.size();
    ordered_json rows = ordered_json::array();
    for (const SuiteResult& s : suites) {
      rows.push_back({{"name", s.name},
                      {"checks", s.checks},
                      {"passed", s.passed},
                      {"threshold", s.threshold},
                      {"ok", s.ok()}});
    }
    j["suites"] = std::move(rows);
    j["ok"] = all_ok;
    out << j.dump(2) << "\n";
  } else {
    for (const SuiteResult& s : suites) {
      out << s.name << ": " << s.passed << "/" << s.checks
          << (s.ok() ? "" : " FAILED") << "\n";
    }
    out << (all_ok ? "all suites passed" : "SUITE FAILURES") << "\n";
  }
  return all_ok ? 0 : 2;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"semantic world models over sparse binary vector spaces"};
  app.require_subcommand(1);

  TrainOpts train_opts;
  CLI::App* train_cmd =
      app.add_subcommand("train", "fit a model to a corpus of triples");
  train_cmd->add_option("--corpus", train_opts.corpus, "triples file")
      ->required();
  train_cmd->add_option("--out", train_opts.out_path, "output model file")
      ->required();
  train_cmd->add_option("--dims", train_opts.config.space.dims,
                        "space dimensions");
  train_cmd->add_option("--card", train_opts.config.space.cardinality,
                        "active bits per pixie");
  train_cmd->add_option("--lr", train_opts.config.learning_rate,
                        "learning rate");
  train_cmd->add_option("--epochs", train_opts.config.epochs, "epoch count");
  train_cmd->add_option("--neg", train_opts.config.negative_samples,
                        "negative samples per node");
  train_cmd->add_option("--l2", train_opts.config.l2_penalty, "L2 penalty");
  train_cmd->add_option("--alpha", train_opts.config.sampling_power,
                        "negative sampling frequency power");
  train_cmd->add_option("--seed", train_opts.config.seed, "random seed");
  train_cmd->add_option("--minibatch", train_opts.config.minibatch,
                        "minibatch size");
  train_cmd->add_option("--min-count", train_opts.config.min_count,
                        "vocabulary pruning threshold");
  train_cmd->add_option("--gain", train_opts.config.ppmi_gain,
                        "association score scale at initialization");
  train_cmd->add_option("--holdout", train_opts.config.holdout_fraction,
                        "holdout fraction");
  train_cmd->add_option("--divergence", train_opts.config.divergence_tolerance,
                        "allowed holdout objective drop");
  train_cmd->add_flag("--keep-intransitives", train_opts.keep_intransitives,
                      "train on triples with a missing argument too");
  train_cmd->add_flag("--json", train_opts.json, "machine-readable report");
  add_mf_options(train_cmd, train_opts.mf);

  QuerySimOpts sim_opts;
  CLI::App* sim_cmd =
      app.add_subcommand("query-sim", "graded similarity of two words");
  sim_cmd->add_option("--model", sim_opts.model_path, "model file")->required();
  sim_cmd->add_option("--word1", sim_opts.word1, "first word")->required();
  sim_cmd->add_option("--word2", sim_opts.word2, "second word")->required();
  sim_cmd->add_flag("--json", sim_opts.json, "machine-readable report");
  add_mf_options(sim_cmd, sim_opts.mf);

  QueryImplOpts impl_opts;
  CLI::App* impl_cmd = app.add_subcommand(
      "query-impl", "probability the conclusion holds given the premise");
  impl_cmd->add_option("--model", impl_opts.model_path, "model file")
      ->required();
  impl_cmd->add_option("--premise", impl_opts.premise, "premise word")
      ->required();
  impl_cmd->add_option("--conclusion", impl_opts.conclusion, "conclusion word")
      ->required();
  impl_cmd->add_flag("--json", impl_opts.json, "machine-readable report");
  add_mf_options(impl_cmd, impl_opts.mf);

  QueryRelpronOpts rel_opts;
  CLI::App* rel_cmd = app.add_subcommand(
      "query-relpron", "score a term against a relative-clause property");
  rel_cmd->add_option("--model", rel_opts.model_path, "model file")->required();
  rel_cmd->add_option("--term", rel_opts.term, "candidate term")->required();
  rel_cmd->add_option("--hypernym", rel_opts.hypernym, "property hypernym")
      ->required();
  rel_cmd->add_option("--verb", rel_opts.verb, "property verb")->required();
  rel_cmd->add_option("--arg", rel_opts.argument, "property other argument")
      ->required();
  rel_cmd->add_option("--role", rel_opts.role,
                      "argument position of the term, SBJ or OBJ");
  rel_cmd->add_flag("--json", rel_opts.json, "machine-readable report");
  add_mf_options(rel_cmd, rel_opts.mf);

  EvalSimOpts esim_opts;
  CLI::App* esim_cmd = app.add_subcommand(
      "eval-sim", "rank correlation against a gold similarity dataset");
  esim_cmd->add_option("--model", esim_opts.model_path, "model file")
      ->required();
  esim_cmd->add_option("--dataset", esim_opts.dataset, "similarity pairs file")
      ->required();
  esim_cmd->add_flag("--json", esim_opts.json, "machine-readable report");
  add_mf_options(esim_cmd, esim_opts.mf);

  EvalRelpronOpts erel_opts;
  CLI::App* erel_cmd = app.add_subcommand(
      "eval-relpron", "mean average precision on a property dataset");
  erel_cmd->add_option("--model", erel_opts.model_path, "model file")
      ->required();
  erel_cmd->add_option("--dataset", erel_opts.dataset, "property file")
      ->required();
  erel_cmd->add_option("--split", erel_opts.split, "dev or test");
  erel_cmd->add_flag("--json", erel_opts.json, "machine-readable report");
  add_mf_options(erel_cmd, erel_opts.mf);

  OracleCheckOpts oc_opts;
  CLI::App* oc_cmd = app.add_subcommand(
      "oracle-check",
      "verify exact-inference identities on an enumerable model");
  oc_cmd->add_option("--model", oc_opts.model_path, "model file")->required();
  oc_cmd->add_option("--budget", oc_opts.budget,
                     "max joint configurations to enumerate");
  oc_cmd->add_option("--max-predicates", oc_opts.max_predicates,
                     "cap on vocabulary entries exercised");
  oc_cmd->add_flag("--json", oc_opts.json, "machine-readable report");
  add_mf_options(oc_cmd, oc_opts.mf);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);  // --help lands here
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (*train_cmd) {
      return do_train(train_opts, out, err);
    }
    if (*sim_cmd) {
      return do_query_sim(sim_opts, out);
    }
    if (*impl_cmd) {
      return do_query_impl(impl_opts, out);
    }
    if (*rel_cmd) {
      return do_query_relpron(rel_opts, out);
    }
    if (*esim_cmd) {
      return do_eval_sim(esim_opts, out);
    }
    if (*erel_cmd) {
      return do_eval_relpron(erel_opts, out);
    }
    if (*oc_cmd) {
      return do_oracle_check(oc_opts, out);
    }
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace semfunc
