// Command-line front end: gen, delta, decide, sweep, verify, pn.
//
// Every command writes a JSON document {"command", "config", "result"} where
// "config" is the resolved option set (config file merged with flags).
// `--echo-config FILE` also writes that option set in CLI11 config format so
// the run can be repeated with `tracecause --config FILE <command>`.

#include "tracecause/errors.hpp"
#include "tracecause/estimators.hpp"
#include "tracecause/experiments.hpp"
#include "tracecause/sampling.hpp"
#include "tracecause/serialization.hpp"
#include "tracecause/theory.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace tracecause;

namespace {

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out = "-";
  std::string echo_config;
};

struct ModelOpts {
  std::size_t n = 40, m = 40, T = 100;
  double delta = 0.0;
  std::string spectrum = "power-law";
  double alpha = 1.0;
  double lo = 0.0, hi = 1.0;
  std::string values;
  bool normalize = false;
  double a_var = 1.0;
};

struct EstimatorOpts {
  std::string kind = "ridge";
  double lambda = 1e-2;
  double sv_rel = 0.0;  // 0 keeps the library default
  int p = 2;
  std::size_t mc_samples = kDefaultMcSamples;
  bool center = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Root seed");
  sub->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency)");
  sub->add_option("--out", c.out, "JSON output path, '-' for stdout");
  sub->add_option("--echo-config", c.echo_config, "Write the resolved configuration to this file");
}

void add_model(CLI::App* sub, ModelOpts& o) {
  sub->add_option("--n", o.n, "Cause dimension");
  sub->add_option("--m", o.m, "Effect dimension");
  sub->add_option("--T", o.T, "Sample count");
  sub->add_option("--delta", o.delta, "Noise scale");
  sub->add_option("--spectrum", o.spectrum, "power-law | identity | uniform | explicit")
      ->check(CLI::IsMember({"power-law", "identity", "uniform", "explicit"}));
  sub->add_option("--alpha", o.alpha, "Power-law exponent");
  sub->add_option("--lo", o.lo, "Uniform spectrum lower end");
  sub->add_option("--hi", o.hi, "Uniform spectrum upper end");
  sub->add_option("--values", o.values, "Explicit spectrum, comma separated");
  sub->add_flag("--normalize", o.normalize, "Rescale the spectrum to mean 1");
  sub->add_option("--a-var", o.a_var, "Variance of the i.i.d. Gaussian entries of A");
}

void add_estimator(CLI::App* sub, EstimatorOpts& e, bool with_kind) {
  if (with_kind) {
    sub->add_option("--estimator", e.kind, "empirical | ridge | pmoment")
        ->check(CLI::IsMember({"empirical", "ridge", "pmoment"}));
  }
  sub->add_option("--lambda", e.lambda, "Ridge parameter (pmoment: 0 uses the pseudo-inverse fit)");
  sub->add_option("--sv-rel", e.sv_rel, "Relative singular-value cutoff (0 = max(n,T) eps)");
  sub->add_option("--p", e.p, "Power for the pmoment estimator");
  sub->add_option("--mc-samples", e.mc_samples, "Haar draws for the pmoment estimator");
  sub->add_flag("--center", e.center, "Subtract the sample mean before forming moments");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidParameter, "cannot parse number '" + item + "'");
    }
  }
  return out;
}

// "lo:hi:log[:count]", "lo:hi:lin:count" or a comma list.
std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) {
    auto v = parse_list(text);
    if (v.empty()) throw Error(ErrorCode::InvalidParameter, "empty grid");
    return v;
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4) {
    throw Error(ErrorCode::InvalidParameter, "grid must be lo:hi:log[:count] or lo:hi:lin:count");
  }
  const double lo = parse_list(parts[0]).at(0);
  const double hi = parse_list(parts[1]).at(0);
  const bool log = parts[2] == "log";
  if (!log && parts[2] != "lin") throw Error(ErrorCode::InvalidParameter, "grid scale must be log or lin");
  if (!log && parts.size() != 4) throw Error(ErrorCode::InvalidParameter, "linear grid needs a count");
  const double count_d = parts.size() == 4 ? parse_list(parts[3]).at(0) : 11.0;
  if (!(count_d >= 1.0) || count_d != std::floor(count_d)) {
    throw Error(ErrorCode::InvalidParameter, "grid count must be a positive integer");
  }
  if (log && !(lo > 0.0 && hi > 0.0)) throw Error(ErrorCode::InvalidParameter, "log grid needs positive ends");
  const auto count = static_cast<std::size_t>(count_d);
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid[i] = log ? std::pow(10.0, std::log10(lo) + f * (std::log10(hi) - std::log10(lo)))
                  : lo + f * (hi - lo);
  }
  return grid;
}

SpectrumSpec build_spectrum(const ModelOpts& o) {
  SpectrumSpec s;
  if (o.spectrum == "power-law") {
    s = SpectrumSpec::power_law(o.n, o.alpha);
  } else if (o.spectrum == "identity") {
    s = SpectrumSpec::identity(o.n);
  } else if (o.spectrum == "uniform") {
    s = SpectrumSpec::uniform(o.n, o.lo, o.hi);
  } else {
    s = SpectrumSpec::explicit_values(parse_list(o.values));
  }
  s.normalize = o.normalize;
  return s;
}

CausalModelSpec build_spec(const ModelOpts& o) {
  CausalModelSpec spec;
  spec.n = o.n;
  spec.m = o.m;
  spec.sample_count = o.T;
  spec.noise_scale = o.delta;
  spec.spectrum = build_spectrum(o);
  spec.structural_law = StructuralLaw::gaussian(o.a_var);
  validate(spec);
  return spec;
}

EstimatorConfig build_estimator(const EstimatorOpts& e, const std::string& kind, const Common& c) {
  EstimatorConfig cfg;
  if (kind == "empirical") {
    cfg = EstimatorConfig::empirical();
  } else if (kind == "ridge") {
    cfg = EstimatorConfig::ridge(e.lambda);
  } else if (kind == "pmoment") {
    cfg = EstimatorConfig::p_moment(e.p, e.lambda, e.mc_samples, c.seed);
  } else {
    throw Error(ErrorCode::InvalidParameter, "unknown estimator '" + kind + "'");
  }
  if (e.sv_rel > 0.0) cfg.sv_threshold_rel = e.sv_rel;
  cfg.centered = e.center;
  cfg.threads = c.threads;
  return cfg;
}

// Resolved option values of a subcommand, keyed by long name.
Json echo_options(const CLI::App* sub) {
  Json j = Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "echo-config") continue;
    const auto res = opt->reduced_results();
    if (!res.empty()) {
      j[name] = res.front();
    } else {
      j[name] = opt->get_expected_min() == 0 ? "false" : opt->get_default_str();
    }
  }
  return j;
}

void emit(const CLI::App& app, const CLI::App* sub, const Common& c, Json result) {
  Json doc;
  doc["command"] = sub->get_name();
  doc["config"] = echo_options(sub);
  doc["result"] = std::move(result);
  const std::string text = doc.dump(2) + "\n";
  if (c.out == "-") {
    std::cout << text;
  } else {
    write_text_file(c.out, text);
  }
  if (!c.echo_config.empty()) {
    // Keep only this subcommand's section; the echo path itself is dropped so
    // a re-run does not overwrite it.
    std::istringstream all(app.config_to_str(true, false));
    std::ostringstream mine;
    const std::string prefix = sub->get_name() + ".";
    std::string line;
    while (std::getline(all, line)) {
      if (line.rfind(prefix, 0) != 0 || line.rfind(prefix + "echo-config=", 0) == 0) continue;
      mine << line << '\n';
    }
    write_text_file(c.echo_config, mine.str());
  }
}

Json run_gen(const Common& c, const ModelOpts& mo, const std::string& csv) {
  const CausalModelSpec spec = build_spec(mo);
  Rng rng(c.seed, 0);
  const SampleSet data = generate_dataset(rng, spec);
  write_sample_csv(csv, data);
  Json r;
  r["seed"] = c.seed;
  r["csv"] = csv;
  r["rows"] = data.count();
  r["columns"] = data.x.cols() + data.y.cols();
  r["spec"] = to_json(spec);
  r["realization_hash"] = realization_hash(*data.provenance);
  return r;
}

std::vector<Direction> directions(const std::string& d) {
  if (d == "xy") return {Direction::XtoY};
  if (d == "yx") return {Direction::YtoX};
  return {Direction::XtoY, Direction::YtoX};
}

// Rebuilds the model behind a `gen` run from its metadata file.
ModelRealization model_from_meta(const std::string& path) {
  Json meta;
  try {
    meta = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, "metadata '" + path + "': " + e.what());
  }
  const Json& r = meta.contains("result") ? meta.at("result") : meta;
  CausalModelSpec spec;
  std::uint64_t seed = 0;
  std::string hash;
  try {
    spec = model_spec_from_json(r.at("spec"));
    seed = r.at("seed").get<std::uint64_t>();
    hash = r.at("realization_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, "metadata '" + path + "': " + e.what());
  }
  Rng rng(seed, 0);
  ModelRealization model = realize_model(rng, spec);
  if (realization_hash(model) != hash) {
    throw Error(ErrorCode::Parse, "metadata '" + path + "': realization hash mismatch");
  }
  return model;
}

Json run_delta(const Common& c, const EstimatorOpts& e, const std::string& variant,
               const std::string& data_path, const std::string& meta_path,
               const std::string& dir) {
  Json scores = Json::array();
  if (variant == "population") {
    if (meta_path.empty()) throw Error(ErrorCode::InvalidParameter, "population variant needs --meta");
    const ModelRealization model = model_from_meta(meta_path);
    // Population moments, including the noise covariance for Y -> X.
    Json meta = Json::parse(read_text_file(meta_path));
    const Json& r = meta.contains("result") ? meta.at("result") : meta;
    const double delta = r.at("spec").at("noise_scale").get<double>();
    CovarianceEstimates pop;
    pop.cxx = model.sigma;
    pop.cxy = model.sigma * model.a.transpose();
    pop.cyx = pop.cxy.transpose();
    pop.cyy = symmetrized(model.a * model.sigma * model.a.transpose()) +
              delta * delta * Matrix::Identity(model.a.rows(), model.a.rows());
    for (Direction d : directions(dir)) {
      if (d == Direction::XtoY) {
        scores.push_back(to_json(delta_population(model.a, model.sigma, d)));
      } else {
        const StructuralFit back = fit_pseudo_inverse(pop, std::nullopt, d);
        scores.push_back(to_json(delta_population(back.a_hat, pop.cyy, d)));
      }
    }
  } else {
    const SampleSet data = read_sample_csv(data_path);
    const CovarianceEstimates cov = empirical_covariances(data, e.center);
    const EstimatorConfig cfg = build_estimator(e, variant, c);
    for (Direction d : directions(dir)) scores.push_back(to_json(score_direction(cov, cfg, d)));
  }
  Json r;
  r["variant"] = variant;
  r["scores"] = std::move(scores);
  return r;
}

Json run_decide(const Common& c, const EstimatorOpts& e, const std::string& data_path, double xi) {
  const SampleSet data = read_sample_csv(data_path);
  const CausalVerdict v = run_pipeline(data, build_estimator(e, e.kind, c), xi);
  return to_json(v);
}

Json run_sweep(const Common& c, const ModelOpts& mo, const EstimatorOpts& e,
               const std::string& axis, std::string grid_text, const std::string& estimators,
               double xi, std::size_t trials, const std::string& csv_prefix) {
  CausalModelSpec spec = build_spec(mo);
  std::vector<SweepResult> results;
  if (axis == "noise") {
    if (grid_text.empty()) grid_text = "0,0.003,0.01,0.02,0.03,0.05,0.1,0.2,0.5,1,2";
    std::vector<EstimatorConfig> configs;
    std::stringstream ss(estimators);
    std::string kind;
    while (std::getline(ss, kind, ',')) {
      EstimatorConfig cfg = build_estimator(e, kind, c);
      cfg.threads = 1;
      configs.push_back(cfg);
    }
    results = sweep_noise(c.seed, spec, parse_grid(grid_text), configs, xi, trials, c.threads);
  } else {
    if (grid_text.empty()) grid_text = "1e-5:1e2:log:15";
    results.push_back(sweep_lambda(c.seed, spec, mo.delta, parse_grid(grid_text), xi, trials, c.threads));
  }
  Json r = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    r.push_back(to_json(results[i]));
    if (!csv_prefix.empty()) {
      std::ostringstream buf;
      write_sweep_csv(buf, results[i]);
      const std::string tag = axis == "noise" ? std::to_string(i) + "_" +
                                                    results[i].estimator.substr(0, results[i].estimator.find('('))
                                              : std::string("lambda");
      write_text_file(csv_prefix + "_" + tag + ".csv", buf.str());
    }
  }
  return r;
}

struct VerifyOpts {
  std::string target = "concentration";
  std::string a_kind = "gaussian";
  int p = 1;
  std::size_t trials = 200;
  std::string eps = "0.05,0.1,0.2,0.5,1";
  std::size_t reference_samples = 0;
  double lambda_prime = 0.1;
  double c = 2.0;
  std::string lambda_mode = "uniform";
};

Json run_verify(const Common& c, ModelOpts mo, const VerifyOpts& v) {
  // a_var = 0 means 1/n.
  if (mo.a_var == 0.0) mo.a_var = 1.0 / static_cast<double>(mo.n);
  if (v.target == "bias") {
    const CausalModelSpec spec = build_spec(mo);
    const LambdaMode mode = v.lambda_mode == "fixed" ? LambdaMode::Fixed : LambdaMode::UniformRandom;
    return to_json(verify_bias_bounds(Rng(c.seed, 0), spec, v.lambda_prime, v.c, v.trials, c.threads, mode));
  }
  Rng draw(c.seed, 1);
  const SpectrumSpec sspec = build_spectrum(mo);
  validate(sspec);
  const Vector gamma = generate_spectrum(draw, sspec);
  const Matrix cmat = gamma.asDiagonal();
  const auto n = static_cast<Eigen::Index>(mo.n);
  const auto m = static_cast<Eigen::Index>(mo.m);
  Matrix a;
  if (v.a_kind == "identity") {
    if (m != n) throw Error(ErrorCode::InvalidDimension, "identity A needs m = n");
    a = Matrix::Identity(n, n);
  } else {
    a.resize(m, n);
    const double s = std::sqrt(mo.a_var);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = s * draw.normal();
    }
  }
  const ConcentrationReport rep = verify_concentration(Rng(c.seed, 2), a, cmat, v.p, v.trials, c.threads,
                                                       parse_grid(v.eps), v.reference_samples);
  return to_json(rep);
}

Json run_pn(const ModelOpts& mo, double c, double lambda_prime, double tol) {
  const SpectrumSpec sspec = build_spectrum(mo);
  validate(sspec);
  Rng rng(0, 0);
  const Vector lambda = generate_spectrum(rng, sspec);
  const std::vector<double> spectrum(lambda.data(), lambda.data() + lambda.size());
  const double p = pn_fixed_point(spectrum, c, lambda_prime, tol);
  Json r;
  r["p_n"] = p;
  r["residual"] = pn_residual(spectrum, c, lambda_prime, p);
  r["c"] = c;
  r["lambda_prime"] = lambda_prime;
  r["n"] = spectrum.size();
  return r;
}

int exit_code(ErrorCode code) {
  switch (classify(code)) {
    case ErrorClass::Validation: return 2;
    case ErrorClass::Io: return 3;
    case ErrorClass::Numerical: return 4;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-method causal direction tests"};
  app.set_config("--config", "", "Read options from a config file; flags override it");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Common common;

  // gen
  ModelOpts gen_model;
  std::string gen_csv = "samples.csv";
  CLI::App* gen = app.add_subcommand("gen", "Draw a dataset from a linear causal model");
  add_common(gen, common);
  add_model(gen, gen_model);
  gen->add_option("--csv", gen_csv, "Dataset CSV path");

  // delta
  EstimatorOpts delta_est;
  std::string delta_variant = "ridge", delta_data, delta_meta, delta_dir = "both";
  CLI::App* delta = app.add_subcommand("delta", "Score one or both directions");
  add_common(delta, common);
  add_estimator(delta, delta_est, false);
  delta->add_option("--variant", delta_variant, "population | empirical | ridge | pmoment")
      ->check(CLI::IsMember({"population", "empirical", "ridge", "pmoment"}));
  delta->add_option("--data", delta_data, "Dataset CSV");
  delta->add_option("--meta", delta_meta, "Metadata JSON written by gen (population variant)");
  delta->add_option("--direction", delta_dir, "xy | yx | both")->check(CLI::IsMember({"xy", "yx", "both"}));

  // decide
  EstimatorOpts decide_est;
  std::string decide_data;
  double decide_xi = kDefaultXi;
  CLI::App* decide_cmd = app.add_subcommand("decide", "Causal verdict for a dataset");
  add_common(decide_cmd, common);
  add_estimator(decide_cmd, decide_est, true);
  decide_cmd->add_option("--data", decide_data, "Dataset CSV")->required();
  decide_cmd->add_option("--xi", decide_xi, "Tolerance margin");

  // sweep
  ModelOpts sweep_model;
  {
    const CausalModelSpec base = sweep_default_spec();
    sweep_model.n = base.n;
    sweep_model.m = base.m;
    sweep_model.T = base.sample_count;
    sweep_model.alpha = base.spectrum.exponent;
    sweep_model.a_var = base.structural_law.variance;
    sweep_model.delta = 0.03;
  }
  EstimatorOpts sweep_est;
  std::string sweep_axis = "noise", sweep_grid, sweep_estimators = "empirical,ridge", sweep_csv;
  double sweep_xi = kDefaultXi;
  std::size_t sweep_trials = 100;
  CLI::App* sweep = app.add_subcommand("sweep", "Accuracy over a noise or ridge-parameter grid");
  add_common(sweep, common);
  add_model(sweep, sweep_model);
  add_estimator(sweep, sweep_est, false);
  sweep->add_option("--axis", sweep_axis, "noise | lambda")->check(CLI::IsMember({"noise", "lambda"}));
  sweep->add_option("--grid", sweep_grid, "lo:hi:log[:count], lo:hi:lin:count or a comma list");
  sweep->add_option("--estimators", sweep_estimators, "Comma list for the noise axis");
  sweep->add_option("--xi", sweep_xi, "Tolerance margin");
  sweep->add_option("--trials", sweep_trials, "Trials per grid point");
  sweep->add_option("--csv-prefix", sweep_csv, "Also write one CSV per curve");

  // verify
  ModelOpts verify_model;
  verify_model.n = 100;
  verify_model.m = 100;
  verify_model.T = 200;
  verify_model.delta = 0.1;
  verify_model.spectrum = "identity";
  verify_model.a_var = 0.0;
  VerifyOpts vopts;
  CLI::App* verify = app.add_subcommand("verify", "Monte-Carlo checks of the concentration and bias results");
  add_common(verify, common);
  add_model(verify, verify_model);
  verify->add_option("--target", vopts.target, "concentration | bias")
      ->check(CLI::IsMember({"concentration", "bias"}));
  verify->add_option("--a", vopts.a_kind, "gaussian | identity")->check(CLI::IsMember({"gaussian", "identity"}));
  verify->add_option("--p", vopts.p, "Power (concentration)");
  verify->add_option("--trials", vopts.trials, "Monte-Carlo trials (>= 100)");
  verify->add_option("--eps", vopts.eps, "Epsilon grid for the bound curves");
  verify->add_option("--reference-samples", vopts.reference_samples, "Haar draws for the p > 1 reference");
  verify->add_option("--lambda-prime", vopts.lambda_prime, "Upper end of the ridge parameter range (bias)");
  verify->add_option("--c", vopts.c, "Sample ratio T / n (bias)");
  verify->add_option("--lambda-mode", vopts.lambda_mode, "uniform | fixed")
      ->check(CLI::IsMember({"uniform", "fixed"}));

  // pn
  ModelOpts pn_model;
  pn_model.n = 50;
  pn_model.spectrum = "identity";
  double pn_c = 1.0, pn_lambda_prime = 1.0, pn_tol = 1e-12;
  CLI::App* pn = app.add_subcommand("pn", "Solve the p_n fixed-point equation");
  add_common(pn, common);
  pn->add_option("--n", pn_model.n, "Dimension");
  pn->add_option("--spectrum", pn_model.spectrum, "power-law | identity | explicit")
      ->check(CLI::IsMember({"power-law", "identity", "explicit"}));
  pn->add_option("--alpha", pn_model.alpha, "Power-law exponent");
  pn->add_option("--values", pn_model.values, "Explicit spectrum, comma separated");
  pn->add_flag("--normalize", pn_model.normalize, "Rescale the spectrum to mean 1");
  pn->add_option("--c", pn_c, "Sample ratio T / n");
  pn->add_option("--lambda-prime", pn_lambda_prime, "Ridge parameter");
  pn->add_option("--tol", pn_tol, "Residual tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) {
      emit(app, gen, common, run_gen(common, gen_model, gen_csv));
    } else if (*delta) {
      emit(app, delta, common,
           run_delta(common, delta_est, delta_variant, delta_data, delta_meta, delta_dir));
    } else if (*decide_cmd) {
      emit(app, decide_cmd, common, run_decide(common, decide_est, decide_data, decide_xi));
    } else if (*sweep) {
      emit(app, sweep, common,
           run_sweep(common, sweep_model, sweep_est, sweep_axis, sweep_grid, sweep_estimators,
                     sweep_xi, sweep_trials, sweep_csv));
    } else if (*verify) {
      emit(app, verify, common, run_verify(common, verify_model, vopts));
    } else if (*pn) {
      emit(app, pn, common, run_pn(pn_model, pn_c, pn_lambda_prime, pn_tol));
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
