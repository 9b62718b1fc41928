#include "tracecause/experiments.hpp"

#include "tracecause/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tracecause {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::XcausesY: return "XcausesY";
    case Verdict::YcausesX: return "YcausesX";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

const char* to_string(SweepResult::Axis a) {
  return a == SweepResult::Axis::Noise ? "noise" : "lambda";
}

CausalVerdict decide(const DeltaScore& score_xy, const DeltaScore& score_yx, double xi) {
  if (!std::isfinite(score_xy.value) || !std::isfinite(score_yx.value)) {
    throw Error(ErrorCode::UndefinedScore, "decide: non-finite Delta score");
  }
  if (!(xi >= 0.0)) throw Error(ErrorCode::InvalidParameter, "decide: xi must be >= 0");

  CausalVerdict out;
  out.score_xy = score_xy;
  out.score_yx = score_yx;
  out.xi = xi;
  if (score_xy.value >= score_yx.value + xi) {
    out.verdict = Verdict::XcausesY;
  } else if (score_yx.value >= score_xy.value + xi) {
    out.verdict = Verdict::YcausesX;
  } else {
    out.verdict = Verdict::Inconclusive;
  }
  return out;
}

std::string EstimatorConfig::label() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::Empirical: s << "empirical"; break;
    case Kind::Ridge: s << "ridge(lambda=" << lambda << ")"; break;
    case Kind::PMoment: s << "pmoment(p=" << p << ",lambda=" << lambda << ")"; break;
  }
  return s.str();
}

DeltaScore score_direction(const CovarianceEstimates& cov, const EstimatorConfig& config,
                           Direction d) {
  switch (config.kind) {
    case EstimatorConfig::Kind::Empirical:
      return delta_empirical(cov, fit_pseudo_inverse(cov, config.sv_threshold_rel, d));
    case EstimatorConfig::Kind::Ridge:
      return delta_ridge(cov, fit_ridge(cov, config.lambda, d));
    case EstimatorConfig::Kind::PMoment: {
      const StructuralFit fit = config.lambda > 0.0
                                    ? fit_ridge(cov, config.lambda, d)
                                    : fit_pseudo_inverse(cov, config.sv_threshold_rel, d);
      // Both directions share the Haar stream so swapping X and Y mirrors the result.
      const Rng rng(config.mc_seed, 0);
      return delta_p_moment(rng, fit.a_hat, oriented(cov, d).cause_cov, config.p,
                            config.mc_samples, config.threads, d);
    }
  }
  throw Error(ErrorCode::InvalidParameter, "score_direction: unknown estimator");
}

CausalVerdict run_pipeline(const SampleSet& data, const EstimatorConfig& config, double xi) {
  if (!(xi >= 0.0)) throw Error(ErrorCode::InvalidParameter, "run_pipeline: xi must be >= 0");
  const CovarianceEstimates cov = empirical_covariances(data, config.centered);

  CausalVerdict out;
  out.xi = xi;
  for (Direction d : {Direction::XtoY, Direction::YtoX}) {
    try {
      DeltaScore s = score_direction(cov, config, d);
      (d == Direction::XtoY ? out.score_xy : out.score_yx) = s;
    } catch (const Error& e) {
      if (classify(e.code()) != ErrorClass::Numerical) throw;
      if (!out.reason) {
        out.reason = e.code();
        out.detail = e.what();
      }
    }
  }
  if (out.reason) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }
  return decide(*out.score_xy, *out.score_yx, xi);
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

// Linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) return 0.0;
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

ConcentrationReport verify_concentration(const Rng& rng, const Matrix& a, const Matrix& c,
                                         int p, std::size_t trials, unsigned threads,
                                         const std::vector<double>& eps_grid,
                                         std::size_t reference_samples) {
  if (trials < 100) throw Error(ErrorCode::InvalidCount, "verify_concentration: need >= 100 trials");
  require_square(c, "verify_concentration");
  if (a.cols() != c.rows()) throw Error(ErrorCode::Shape, "verify_concentration: A must be m x n");
  if (p < 1) throw Error(ErrorCode::InvalidParameter, "verify_concentration: p must be >= 1");

  ConcentrationReport rep;
  rep.n = static_cast<std::size_t>(c.rows());
  rep.m = static_cast<std::size_t>(a.rows());
  rep.p = p;
  rep.trials = trials;

  if (p == 1) {
    rep.reference = mc_expected_p_trace(rng, a, c, 1, 2).mean;
  } else {
    const std::size_t ref_n = reference_samples > 0 ? reference_samples
                                                    : std::max<std::size_t>(10 * trials, 20000);
    const Rng ref_rng(rng.seed(), derive_stream(rng.stream_id(), 0x5245465ULL));
    const McEstimate ref = mc_expected_p_trace(ref_rng, a, c, p, ref_n, threads);
    rep.reference = ref.mean;
    rep.reference_std_err = ref.std_err;
  }

  std::vector<double> values(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng draw = rng.child(i);
    const Matrix u = haar_orthogonal(draw, rep.n);
    values[i] = conjugated_power_trace(a * u, c, p);
  });

  const MeanStd ms = mean_std(values);
  rep.sample_mean = ms.mean;
  rep.sample_std = ms.std;
  rep.mean_std_err = ms.std / std::sqrt(static_cast<double>(trials));
  const double combined_se = std::hypot(rep.mean_std_err, rep.reference_std_err);
  const double floor = 1e-12 * std::max(1.0, std::abs(rep.reference));
  rep.mean_within_3se = std::abs(rep.sample_mean - rep.reference) <= 3.0 * combined_se + floor;

  std::vector<double> dev(trials);
  for (std::size_t i = 0; i < trials; ++i) dev[i] = std::abs(values[i] - rep.reference);
  const MeanStd dms = mean_std(dev);
  std::sort(dev.begin(), dev.end());
  rep.deviations.mean = dms.mean;
  rep.deviations.std = dms.std;
  rep.deviations.max = dev.back();
  for (double level : {0.5, 0.9, 0.95, 0.99}) {
    rep.deviations.quantiles.emplace_back(level, quantile_sorted(dev, level));
  }

  for (double eps : eps_grid) {
    const ConcentrationBound b = thm3_bound(a, c, p, eps);
    rep.bound_curve.emplace_back(eps, b.bound);
    rep.operator_norm_curve.emplace_back(eps, b.operator_norm_bound);
  }
  return rep;
}

BiasReport verify_bias_bounds(const Rng& rng, CausalModelSpec spec, double lambda_prime,
                              double c, std::size_t trials, unsigned threads,
                              LambdaMode mode) {
  if (trials < 100) throw Error(ErrorCode::InvalidCount, "verify_bias_bounds: need >= 100 trials");
  if (!(lambda_prime > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "verify_bias_bounds: lambda' must be > 0");
  }
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidParameter, "verify_bias_bounds: c must be > 0");
  spec.sample_count = static_cast<std::size_t>(
      std::max(1.0, std::round(c * static_cast<double>(spec.n))));
  validate(spec);
  const double sigma2 = spec.noise_scale * spec.noise_scale;

  struct Trial {
    double frob = 0.0, num = 0.0;
    double frob_lo = 0.0, frob_hi = 0.0, num_lo = 0.0, num_hi = 0.0;
    double p_n = 0.0, plugin = 0.0;
  };
  std::vector<Trial> out(trials);

  parallel_for(trials, threads, [&](std::size_t t) {
    Rng r = rng.child(t);
    const ModelRealization model = realize_model(r, spec);
    const SampleSet data = sample_dataset(r, model, spec.sample_count, spec.noise_scale, spec.mean);
    const double lambda = mode == LambdaMode::UniformRandom ? lambda_prime * r.uniform() : lambda_prime;
    const CovarianceEstimates cov = empirical_covariances(data);
    const StructuralFit fit = fit_ridge(cov, lambda);

    const std::vector<double> spectrum(model.lambda.data(), model.lambda.data() + model.lambda.size());
    const double a_sq = model.a.squaredNorm();
    Trial& tr = out[t];
    tr.frob = fit.a_hat.squaredNorm() - a_sq;
    tr.num = (fit.a_hat * cov.cxx).cwiseProduct(fit.a_hat).sum() -
             (model.a * model.sigma).cwiseProduct(model.a).sum();

    const BiasInterval i31 = lemma31_interval(lambda_prime, c, sigma2, a_sq, spectrum, spec.n);
    const BiasInterval i32 = lemma32_interval(lambda_prime, c, sigma2, model.a * model.u, spectrum, spec.n);
    tr.frob_lo = i31.lower;
    tr.frob_hi = i31.upper;
    tr.num_lo = i32.lower;
    tr.num_hi = i32.upper;
    tr.p_n = i31.p_n;
    tr.plugin = plugin_bias_bound(a_sq, c, i31.p_n);
  });

  auto column = [&](double Trial::*field) {
    std::vector<double> v(trials);
    for (std::size_t t = 0; t < trials; ++t) v[t] = out[t].*field;
    return v;
  };
  auto check = [&](double Trial::*value, double Trial::*lo, double Trial::*hi) {
    const MeanStd ms = mean_std(column(value));
    BiasCheck b;
    b.mean = ms.mean;
    b.std_err = ms.std / std::sqrt(static_cast<double>(trials));
    b.lower = mean_std(column(lo)).mean;
    b.upper = mean_std(column(hi)).mean;
    b.contained = b.mean >= b.lower - 3.0 * b.std_err && b.mean <= b.upper + 3.0 * b.std_err;
    return b;
  };

  BiasReport rep;
  rep.n = spec.n;
  rep.m = spec.m;
  rep.sample_count = spec.sample_count;
  rep.trials = trials;
  rep.c = c;
  rep.lambda_prime = lambda_prime;
  rep.sigma2 = sigma2;
  rep.lambda_mode = mode;
  rep.frobenius = check(&Trial::frob, &Trial::frob_lo, &Trial::frob_hi);
  rep.numerator = check(&Trial::num, &Trial::num_lo, &Trial::num_hi);
  rep.p_n = mean_std(column(&Trial::p_n)).mean;
  rep.plugin_bound = mean_std(column(&Trial::plugin)).mean;
  rep.within_plugin_bound =
      std::abs(rep.frobenius.mean) <= rep.plugin_bound + 3.0 * rep.frobenius.std_err;
  return rep;
}

namespace {

struct TrialOutcome {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> xy, yx;
};

TrialOutcome run_trial(const SampleSet& data, const EstimatorConfig& config, double xi) {
  const CausalVerdict v = run_pipeline(data, config, xi);
  TrialOutcome o;
  o.verdict = v.verdict;
  if (v.score_xy) o.xy = v.score_xy->value;
  if (v.score_yx) o.yx = v.score_yx->value;
  return o;
}

// Appends one grid point's statistics from per-trial outcomes.
void accumulate(SweepResult& r, double grid_value, const std::vector<TrialOutcome>& outcomes) {
  const double count = static_cast<double>(outcomes.size());
  double correct = 0.0, inconclusive = 0.0;
  double sum_xy = 0.0, sum_yx = 0.0;
  std::size_t n_xy = 0, n_yx = 0;
  for (const auto& o : outcomes) {
    if (o.verdict == Verdict::XcausesY) correct += 1.0;
    if (o.verdict == Verdict::Inconclusive) inconclusive += 1.0;
    if (o.xy) { sum_xy += *o.xy; ++n_xy; }
    if (o.yx) { sum_yx += *o.yx; ++n_yx; }
  }
  const double acc = correct / count;
  r.grid.push_back(grid_value);
  r.accuracy.push_back(acc);
  r.std_err.push_back(std::sqrt(acc * (1.0 - acc) / count));
  r.inconclusive.push_back(inconclusive / count);
  r.mean_delta_xy.push_back(n_xy ? sum_xy / static_cast<double>(n_xy) : std::nan(""));
  r.mean_delta_yx.push_back(n_yx ? sum_yx / static_cast<double>(n_yx) : std::nan(""));
}

void check_sweep_args(double xi, std::size_t trials) {
  if (!(xi >= 0.0)) throw Error(ErrorCode::InvalidParameter, "sweep: xi must be >= 0");
  if (trials == 0) throw Error(ErrorCode::InvalidCount, "sweep: trials per point must be >= 1");
}

}  // namespace

std::vector<SweepResult> sweep_noise(std::uint64_t seed, const CausalModelSpec& base_spec,
                                     const std::vector<double>& delta_grid,
                                     const std::vector<EstimatorConfig>& estimators,
                                     double xi, std::size_t trials_per_point,
                                     unsigned threads) {
  check_sweep_args(xi, trials_per_point);
  if (delta_grid.empty() || estimators.empty()) {
    throw Error(ErrorCode::InvalidCount, "sweep_noise: empty grid or estimator list");
  }
  validate(base_spec);

  std::vector<SweepResult> results(estimators.size());
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    results[e].axis = SweepResult::Axis::Noise;
    results[e].estimator = estimators[e].label();
    results[e].seed = seed;
    results[e].trials_per_point = trials_per_point;
  }

  for (std::size_t point = 0; point < delta_grid.size(); ++point) {
    CausalModelSpec spec = base_spec;
    spec.noise_scale = delta_grid[point];
    validate(spec);
    // outcomes[e][t]
    std::vector<std::vector<TrialOutcome>> outcomes(
        estimators.size(), std::vector<TrialOutcome>(trials_per_point));
    parallel_for(trials_per_point, threads, [&](std::size_t t) {
      Rng rng(seed, trial_stream(point, t));
      const SampleSet data = generate_dataset(rng, spec);
      for (std::size_t e = 0; e < estimators.size(); ++e) {
        outcomes[e][t] = run_trial(data, estimators[e], xi);
      }
    });
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      accumulate(results[e], delta_grid[point], outcomes[e]);
    }
  }
  return results;
}

SweepResult sweep_lambda(std::uint64_t seed, const CausalModelSpec& base_spec, double delta,
                         const std::vector<double>& lambda_grid, double xi,
                         std::size_t trials_per_point, unsigned threads) {
  check_sweep_args(xi, trials_per_point);
  if (lambda_grid.empty()) throw Error(ErrorCode::InvalidCount, "sweep_lambda: empty grid");
  for (double l : lambda_grid) {
    if (!(l >= 0.0)) throw Error(ErrorCode::InvalidParameter, "sweep_lambda: lambda values must be >= 0");
  }
  CausalModelSpec spec = base_spec;
  spec.noise_scale = delta;
  validate(spec);

  std::vector<std::vector<TrialOutcome>> outcomes(
      lambda_grid.size(), std::vector<TrialOutcome>(trials_per_point));
  parallel_for(trials_per_point, threads, [&](std::size_t t) {
    Rng rng(seed, trial_stream(0, t));
    const SampleSet data = generate_dataset(rng, spec);
    for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
      outcomes[k][t] = run_trial(data, EstimatorConfig::ridge(lambda_grid[k]), xi);
    }
  });

  SweepResult r;
  r.axis = SweepResult::Axis::Lambda;
  r.estimator = "ridge";
  r.seed = seed;
  r.trials_per_point = trials_per_point;
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) accumulate(r, lambda_grid[k], outcomes[k]);
  return r;
}

CausalModelSpec sweep_default_spec() {
  CausalModelSpec spec;
  spec.n = 40;
  spec.m = 40;
  spec.sample_count = 100;
  spec.spectrum = SpectrumSpec::power_law(40, 3.0);
  spec.structural_law = StructuralLaw::gaussian(0.2);
  return spec;
}

}  // namespace tracecause
