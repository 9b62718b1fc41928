#include "tracecause/theory.hpp"

#include "tracecause/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tracecause {

const char* to_string(BiasInterval::Target t) {
  return t == BiasInterval::Target::FrobeniusNormSq ? "frobenius_norm_sq" : "numerator_trace";
}

const char* to_string(ConcentrationBound::Theorem t) {
  return t == ConcentrationBound::Theorem::LinearImproved ? "linear" : "power_moment";
}

namespace {

Vector clamped_desc_eigenvalues(const Matrix& m) {
  return symmetric_eigenvalues_desc(symmetrized(m)).cwiseMax(0.0);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be finite and > 0 (got " << v << ")";
    throw Error(ErrorCode::InvalidParameter, msg.str());
  }
}

void check_spectrum(std::span<const double> spectrum, std::size_t n, const char* what) {
  if (spectrum.empty()) throw Error(ErrorCode::InvalidDimension, std::string(what) + ": empty spectrum");
  if (spectrum.size() != n) {
    throw Error(ErrorCode::Shape, std::string(what) + ": spectrum length differs from n");
  }
  for (double v : spectrum) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidParameter, std::string(what) + ": eigenvalues must be >= 0");
    }
  }
}

double resolvent_trace(std::span<const double> spectrum, double p_n, double lambda_prime) {
  double s = 0.0;
  for (double l : spectrum) s += 1.0 / (p_n * l + lambda_prime);
  return s;
}

}  // namespace

ConcentrationBound thm3_bound(const Matrix& a, const Matrix& c, int p, double epsilon) {
  require_square(c, "concentration bound");
  if (a.cols() != c.rows() || a.rows() == 0) {
    throw Error(ErrorCode::Shape, "concentration bound: A must be m x n with C n x n");
  }
  if (p < 1) throw Error(ErrorCode::InvalidParameter, "concentration bound: p must be >= 1");
  require_positive(epsilon, "concentration bound: epsilon");

  ConcentrationBound out;
  out.theorem = p == 1 ? ConcentrationBound::Theorem::LinearImproved
                       : ConcentrationBound::Theorem::PowerMoment;
  out.p = p;
  out.epsilon = epsilon;
  out.beta = clamped_desc_eigenvalues(a.transpose() * a);
  out.gamma = clamped_desc_eigenvalues(c);

  const double m = static_cast<double>(a.rows());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < out.beta.size(); ++i) {
    const double bg = out.beta(i) * out.gamma(i);
    sum += p == 1 ? bg * bg : std::pow(bg, 2 * p);
  }
  out.bound = (static_cast<double>(p) * epsilon / m) * std::sqrt(sum);

  const double aat_norm = out.beta.size() > 0 ? out.beta(0) : 0.0;
  const double c_norm = out.gamma.size() > 0 ? out.gamma(0) : 0.0;
  out.operator_norm_bound = 2.0 * epsilon * c_norm * aat_norm;
  out.relaxed_bound = (static_cast<double>(p) * epsilon / std::sqrt(m)) *
                      std::pow(aat_norm, p) * std::pow(c_norm, p);
  out.failure_probability = "2 exp(-kappa2 n eps^2)";
  return out;
}

ConcentrationBound thm2_bound(const Matrix& a, const Matrix& c, double epsilon) {
  return thm3_bound(a, c, 1, epsilon);
}

double pn_residual(std::span<const double> spectrum, double c, double lambda_prime, double p) {
  const double cn = c * static_cast<double>(spectrum.size());
  double s = 0.0;
  for (double l : spectrum) s += l / (p * l + lambda_prime);
  return std::abs(1.0 - p - (p / cn) * s);
}

double pn_fixed_point(std::span<const double> spectrum, double c, double lambda_prime,
                      double tol) {
  require_positive(lambda_prime, "pn_fixed_point: lambda'");
  require_positive(c, "pn_fixed_point: c");
  require_positive(tol, "pn_fixed_point: tol");
  check_spectrum(spectrum, spectrum.size(), "pn_fixed_point");

  const double cn = c * static_cast<double>(spectrum.size());
  auto g = [&](double p) {
    double s = 0.0;
    for (double l : spectrum) s += l / (p * l + lambda_prime);
    return p + (p / cn) * s - 1.0;
  };

  double lo = 0.0;
  double hi = 1.0;
  if (g(hi) <= 0.0) return hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double best = std::abs(g(lo)) < std::abs(g(hi)) && lo > 0.0 ? lo : hi;
  if (std::abs(g(best)) > tol) {
    std::ostringstream msg;
    msg << "pn_fixed_point: residual " << std::abs(g(best)) << " exceeds tolerance " << tol;
    throw Error(ErrorCode::InvalidParameter, msg.str());
  }
  return best;
}

BiasInterval lemma31_interval(double lambda_prime, double c, double sigma2,
                              double a_frob_sq, std::span<const double> spectrum,
                              std::size_t n) {
  check_spectrum(spectrum, n, "lemma31_interval");
  require_positive(a_frob_sq, "lemma31_interval: ||A||_F^2");
  if (!(sigma2 >= 0.0)) throw Error(ErrorCode::InvalidParameter, "lemma31_interval: sigma^2 must be >= 0");

  BiasInterval out;
  out.target = BiasInterval::Target::FrobeniusNormSq;
  out.lambda_prime = lambda_prime;
  out.c = c;
  out.sigma2 = sigma2;
  out.a_frob_sq = a_frob_sq;
  out.p_n = pn_fixed_point(spectrum, c, lambda_prime);
  out.resolvent_trace = resolvent_trace(spectrum, out.p_n, lambda_prime);

  const double dn = static_cast<double>(n);
  const double shrink = lambda_prime * a_frob_sq / dn;
  out.lower = -shrink * out.resolvent_trace;
  out.upper = (sigma2 / (c * dn) - shrink) * out.resolvent_trace;
  return out;
}

BiasInterval lemma32_interval(double lambda_prime, double c, double sigma2,
                              const Matrix& a, std::span<const double> spectrum,
                              std::size_t n) {
  check_spectrum(spectrum, n, "lemma32_interval");
  if (a.cols() != static_cast<Eigen::Index>(n) || a.rows() == 0) {
    throw Error(ErrorCode::Shape, "lemma32_interval: A must have n columns");
  }
  if (!(sigma2 >= 0.0)) throw Error(ErrorCode::InvalidParameter, "lemma32_interval: sigma^2 must be >= 0");

  BiasInterval out;
  out.target = BiasInterval::Target::NumeratorTrace;
  out.lambda_prime = lambda_prime;
  out.c = c;
  out.sigma2 = sigma2;
  out.a_frob_sq = a.squaredNorm();
  out.p_n = pn_fixed_point(spectrum, c, lambda_prime);
  out.resolvent_trace = resolvent_trace(spectrum, out.p_n, lambda_prime);

  // tr(A (p_n Lambda + lambda' I)^{-1} A^T) with Lambda diagonal.
  double weighted = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    weighted += a.col(col).squaredNorm() / (out.p_n * spectrum[j] + lambda_prime);
  }
  const double dn = static_cast<double>(n);
  const double base = -lambda_prime * out.a_frob_sq + lambda_prime * lambda_prime * weighted;
  out.lower = base;
  out.upper = base + (sigma2 / (c * dn)) * (dn - lambda_prime * out.resolvent_trace);
  return out;
}

double select_lambda_prime(double sigma_hat2, double c, double a_frob_sq) {
  require_positive(sigma_hat2, "select_lambda_prime: sigma_hat^2");
  require_positive(c, "select_lambda_prime: c");
  require_positive(a_frob_sq, "select_lambda_prime: ||A||_F^2");
  return sigma_hat2 / (2.0 * c * a_frob_sq);
}

double plugin_bias_bound(double a_frob_sq, double c, double p_n) {
  return a_frob_sq * (c * p_n - c + 1.0);
}

}  // namespace tracecause
