#pragma once

#include "tracecause/linalg.hpp"
#include "tracecause/rng.hpp"
#include "tracecause/sampling.hpp"

#include <optional>
#include <string>

namespace tracecause {

enum class Direction { XtoY, YtoX };

const char* to_string(Direction d);

// Second-moment matrices of a SampleSet. Uncentered estimates divide by T;
// centered ones subtract the sample mean and divide by T - 1.
struct CovarianceEstimates {
  Matrix cxx;  // n x n
  Matrix cyy;  // m x m
  Matrix cxy;  // n x m
  Matrix cyx;  // m x n, exactly cxy^T
  Eigen::Index sample_count = 0;
  bool centered = false;
};

CovarianceEstimates empirical_covariances(const SampleSet& data, bool centered = false);

// Moments seen from a candidate cause: for YtoX the roles of X and Y swap.
struct OrientedMoments {
  const Matrix& cause_cov;
  const Matrix& effect_cov;
  const Matrix& cross;  // cause x effect
};

OrientedMoments oriented(const CovarianceEstimates& cov, Direction d);

struct StructuralFit {
  enum class Method { PseudoInverse, Ridge };

  Matrix a_hat;  // effect_dim x cause_dim
  Method method = Method::PseudoInverse;
  Direction direction = Direction::XtoY;
  Eigen::Index rank = 0;       // PseudoInverse: numerical rank of the cause covariance
  double sv_threshold = 0.0;   // PseudoInverse: absolute singular-value cutoff
  double lambda = 0.0;         // Ridge
};

// Default relative singular-value cutoff: max(n, T) * machine epsilon.
double default_sv_threshold_rel(Eigen::Index dim, Eigen::Index sample_count);

// A_hat = C_{effect,cause} pinv(C_{cause,cause}); singular values below
// sv_threshold_rel * sigma_max are discarded.
StructuralFit fit_pseudo_inverse(const CovarianceEstimates& cov,
                                 std::optional<double> sv_threshold_rel = std::nullopt,
                                 Direction d = Direction::XtoY);

// A_hat^T = (C_cause + lambda I)^{-1} C_{cause,effect} on the 1/T-normalized
// moments, so this lambda equals the unnormalized-Gram lambda divided by T.
StructuralFit fit_ridge(const CovarianceEstimates& cov, double lambda,
                        Direction d = Direction::XtoY);
StructuralFit fit_ridge(const SampleSet& data, double lambda,
                        Direction d = Direction::XtoY);

struct DeltaVariant {
  enum class Kind { Population, Empirical, Ridge, PMoment };

  Kind kind = Kind::Population;
  double lambda = 0.0;  // Ridge
  int p = 1;            // PMoment
  std::size_t mc_samples = 0;

  static DeltaVariant population() { return {Kind::Population, 0.0, 1, 0}; }
  static DeltaVariant empirical() { return {Kind::Empirical, 0.0, 1, 0}; }
  static DeltaVariant ridge(double lambda) { return {Kind::Ridge, lambda, 1, 0}; }
  static DeltaVariant p_moment(int p, std::size_t mc_samples) {
    return {Kind::PMoment, 0.0, p, mc_samples};
  }
};

const char* to_string(DeltaVariant::Kind k);

struct DeltaScore {
  DeltaVariant variant;
  Direction direction = Direction::XtoY;
  double numerator = 0.0;
  double denominator = 0.0;
  double value = 0.0;  // ln(numerator) - ln(denominator)
  std::optional<double> mc_std_err;
  std::optional<Eigen::Index> rank;
};

// ln tau_m(A Sigma A^T) - ln(tau_m(A A^T) tau_n(Sigma)).
DeltaScore delta_population(const Matrix& a, const Matrix& sigma,
                            Direction d = Direction::XtoY);

// Pseudo-inverse plug-in with the n / r rank correction in the denominator.
DeltaScore delta_empirical(const CovarianceEstimates& cov, const StructuralFit& fit);

DeltaScore delta_ridge(const CovarianceEstimates& cov, const StructuralFit& fit);

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kDefaultMcSamples = 1000;

// E_U tau_m((A U C U^T A^T)^p) over Haar U. p = 1 uses the closed form
// tau_m(A A^T) tau_n(C) with zero standard error. Draw i uses rng.child(i),
// so the estimate is independent of `threads`.
McEstimate mc_expected_p_trace(const Rng& rng, const Matrix& a, const Matrix& c,
                               int p, std::size_t mc_samples = kDefaultMcSamples,
                               unsigned threads = 1);

// ln tau_m((A C A^T)^p) - ln of the Haar expectation above.
DeltaScore delta_p_moment(const Rng& rng, const Matrix& a, const Matrix& c, int p,
                          std::size_t mc_samples = kDefaultMcSamples,
                          unsigned threads = 1, Direction d = Direction::XtoY);

// tau_m((A C A^T)^p) for one conjugated covariance.
double conjugated_power_trace(const Matrix& a, const Matrix& c, int p);

}  // namespace tracecause
