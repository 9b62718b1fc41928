#pragma once

#include "tracecause/errors.hpp"
#include "tracecause/estimators.hpp"
#include "tracecause/sampling.hpp"
#include "tracecause/theory.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tracecause {

inline constexpr double kDefaultXi = 0.05;

enum class Verdict { XcausesY, YcausesX, Inconclusive };

const char* to_string(Verdict v);

struct CausalVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<DeltaScore> score_xy;
  std::optional<DeltaScore> score_yx;
  double xi = kDefaultXi;
  // Set when a direction could not be scored.
  std::optional<ErrorCode> reason;
  std::string detail;
};

// X->Y is tested before Y->X. Throws UndefinedScore on non-finite scores.
CausalVerdict decide(const DeltaScore& score_xy, const DeltaScore& score_yx, double xi);

// How run_pipeline scores each direction.
struct EstimatorConfig {
  enum class Kind { Empirical, Ridge, PMoment };

  Kind kind = Kind::Ridge;
  double lambda = 1e-2;                   // Ridge, and the fit used by PMoment
  std::optional<double> sv_threshold_rel; // Empirical rank cutoff
  int p = 2;                              // PMoment
  std::size_t mc_samples = kDefaultMcSamples;
  std::uint64_t mc_seed = 0;              // PMoment Haar draws
  bool centered = false;
  unsigned threads = 1;

  static EstimatorConfig empirical() {
    EstimatorConfig c;
    c.kind = Kind::Empirical;
    return c;
  }
  static EstimatorConfig ridge(double lambda) {
    EstimatorConfig c;
    c.kind = Kind::Ridge;
    c.lambda = lambda;
    return c;
  }
  static EstimatorConfig p_moment(int p, double lambda, std::size_t mc_samples,
                                  std::uint64_t seed = 0) {
    EstimatorConfig c;
    c.kind = Kind::PMoment;
    c.p = p;
    c.lambda = lambda;
    c.mc_samples = mc_samples;
    c.mc_seed = seed;
    return c;
  }

  std::string label() const;
};

// Scores one direction of a dataset under `config`.
DeltaScore score_direction(const CovarianceEstimates& cov, const EstimatorConfig& config,
                           Direction d);

// Both directions scored symmetrically, then decide(). Numerical failures in
// either direction give Inconclusive with `reason` set.
CausalVerdict run_pipeline(const SampleSet& data, const EstimatorConfig& config,
                           double xi = kDefaultXi);

struct DeviationSummary {
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (level, value), levels ascending
};

struct ConcentrationReport {
  std::size_t n = 0, m = 0;
  int p = 1;
  std::size_t trials = 0;
  double reference = 0.0;          // closed form (p = 1) or high-sample Haar mean
  double reference_std_err = 0.0;
  double sample_mean = 0.0;        // of tau_m((A U C U^T A^T)^p)
  double sample_std = 0.0;
  double mean_std_err = 0.0;
  bool mean_within_3se = false;
  DeviationSummary deviations;     // of |value - reference|
  std::vector<std::pair<double, double>> bound_curve;  // (eps, improved bound)
  std::vector<std::pair<double, double>> operator_norm_curve;  // (eps, 2 eps ||C|| ||AA^T||)
};

inline const std::vector<double> kDefaultEpsGrid = {0.05, 0.1, 0.2, 0.5, 1.0};

// Haar draw i uses rng.child(i); a p > 1 reference uses an independent
// stream with `reference_samples` draws (0 picks max(10 * trials, 20000)).
ConcentrationReport verify_concentration(const Rng& rng, const Matrix& a, const Matrix& c,
                                         int p, std::size_t trials, unsigned threads = 1,
                                         const std::vector<double>& eps_grid = kDefaultEpsGrid,
                                         std::size_t reference_samples = 0);

struct BiasCheck {
  double mean = 0.0;       // Monte-Carlo mean of the empirical bias
  double std_err = 0.0;
  double lower = 0.0;      // trial-averaged asymptotic interval
  double upper = 0.0;
  bool contained = false;  // mean in [lower - 3 se, upper + 3 se]
};

enum class LambdaMode { UniformRandom, Fixed };

struct BiasReport {
  std::size_t n = 0, m = 0, sample_count = 0, trials = 0;
  double c = 0.0;
  double lambda_prime = 0.0;
  double sigma2 = 0.0;
  LambdaMode lambda_mode = LambdaMode::UniformRandom;
  double p_n = 0.0;  // trial-averaged
  BiasCheck frobenius;  // ||A_hat||_F^2 - ||A||_F^2
  BiasCheck numerator;  // tr(A_hat C_XX A_hat^T) - tr(A Sigma A^T)
  // Trial-averaged ||A||_F^2 (c p_n - c + 1).
  double plugin_bound = 0.0;
  bool within_plugin_bound = false;  // |frobenius.mean| <= plugin_bound + 3 se
};

// Each trial draws (U, A, X, E) from `spec` with T = round(c n) and
// sigma^2 = delta^2, then lambda ~ U[0, lambda'] (or lambda = lambda' when Fixed).
BiasReport verify_bias_bounds(const Rng& rng, CausalModelSpec spec, double lambda_prime,
                              double c, std::size_t trials, unsigned threads = 1,
                              LambdaMode mode = LambdaMode::UniformRandom);

struct SweepResult {
  enum class Axis { Noise, Lambda };

  Axis axis = Axis::Noise;
  std::string estimator;
  std::uint64_t seed = 0;
  std::size_t trials_per_point = 0;
  std::vector<double> grid;
  std::vector<double> accuracy;        // fraction of XcausesY verdicts
  std::vector<double> std_err;         // binomial sqrt(a (1 - a) / trials)
  std::vector<double> inconclusive;    // fraction of Inconclusive verdicts
  std::vector<double> mean_delta_xy;   // over trials where the direction scored
  std::vector<double> mean_delta_yx;
};

const char* to_string(SweepResult::Axis a);

// Base model for the accuracy sweeps: n = m = 40, T = 100, power-law
// spectrum with exponent 3 and A entries of variance 0.2. With the sampling
// defaults (exponent 1, variance 1) the pseudo-inverse estimator barely
// reacts to delta = 0.03, so the sweeps use a steeper spectrum.
CausalModelSpec sweep_default_spec();

// One SweepResult per estimator. Trial t at grid point i draws a fresh model
// and dataset from Rng(seed, trial_stream(i, t)); all estimators see the same
// datasets at a given point.
std::vector<SweepResult> sweep_noise(std::uint64_t seed, const CausalModelSpec& base_spec,
                                     const std::vector<double>& delta_grid,
                                     const std::vector<EstimatorConfig>& estimators,
                                     double xi, std::size_t trials_per_point,
                                     unsigned threads = 1);

// Ridge accuracy over lambda at fixed delta. Every lambda sees the same
// datasets, drawn from Rng(seed, trial_stream(0, t)).
SweepResult sweep_lambda(std::uint64_t seed, const CausalModelSpec& base_spec, double delta,
                         const std::vector<double>& lambda_grid, double xi,
                         std::size_t trials_per_point, unsigned threads = 1);

}  // namespace tracecause
