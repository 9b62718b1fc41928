#pragma once

#include "tracecause/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace tracecause {

// Concentration bounds for tau_m((A U C U^T A^T)^p) around its Haar mean.
// The universal constants in the failure probabilities are never given
// numeric values; they stay symbolic in failure_probability.
struct ConcentrationBound {
  enum class Theorem { LinearImproved, PowerMoment };

  Theorem theorem = Theorem::LinearImproved;
  int p = 1;
  double epsilon = 0.0;
  // (p eps / m) sqrt(sum_i beta_i^{2p} gamma_i^{2p})
  double bound = 0.0;
  // Original operator-norm bound 2 eps ||C|| ||A A^T|| (p = 1 only).
  double operator_norm_bound = 0.0;
  // (p eps / sqrt(m)) ||A A^T||^p ||C||^p, the rank-free relaxation.
  double relaxed_bound = 0.0;
  std::string failure_probability;
  Vector beta;   // eigenvalues of A^T A, descending
  Vector gamma;  // eigenvalues of C, descending
};

ConcentrationBound thm2_bound(const Matrix& a, const Matrix& c, double epsilon);
ConcentrationBound thm3_bound(const Matrix& a, const Matrix& c, int p, double epsilon);

// Solves 1 - p = (p / (c n)) sum_i lambda_i / (p lambda_i + lambda')
// by bisection on (0, 1]. g(p) = p + (p / (c n)) sum_i lambda_i / (p lambda_i + lambda')
// is strictly increasing with g(0) = 0 < 1 <= g(1).
double pn_fixed_point(std::span<const double> spectrum, double c, double lambda_prime,
                      double tol = 1e-12);

// |1 - p - (p / (c n)) sum_i lambda_i / (p lambda_i + lambda')|.
double pn_residual(std::span<const double> spectrum, double c, double lambda_prime, double p);

struct BiasInterval {
  enum class Target { FrobeniusNormSq, NumeratorTrace };

  Target target = Target::FrobeniusNormSq;
  double lower = 0.0;
  double upper = 0.0;
  double lambda_prime = 0.0;
  double c = 0.0;
  double sigma2 = 0.0;
  double a_frob_sq = 0.0;
  double p_n = 0.0;
  // sum_i 1 / (p_n lambda_i + lambda')
  double resolvent_trace = 0.0;
  // The vanishing asymptotic correction is taken as zero.
  bool asymptotic_term_omitted = true;
};

// Interval for E[||A_hat_lambda||_F^2 - ||A||_F^2] with lambda ~ U[0, lambda'].
BiasInterval lemma31_interval(double lambda_prime, double c, double sigma2,
                              double a_frob_sq, std::span<const double> spectrum,
                              std::size_t n);

// Interval for E[tr(A_hat C_XX A_hat^T) - tr(A Sigma A^T)]. `a` must be
// expressed in the eigenbasis of Sigma (i.e. A U for Sigma = U Lambda U^T).
// Upper end adds (sigma^2 / (c n)) (n - lambda' tr((p_n Lambda + lambda' I)^{-1})).
BiasInterval lemma32_interval(double lambda_prime, double c, double sigma2,
                              const Matrix& a, std::span<const double> spectrum,
                              std::size_t n);

// lambda' = sigma_hat^2 / (2 c ||A||_F^2).
double select_lambda_prime(double sigma_hat2, double c, double a_frob_sq);

// ||A||_F^2 (c p_n - c + 1): the bias magnitude bound under select_lambda_prime.
double plugin_bias_bound(double a_frob_sq, double c, double p_n);

const char* to_string(BiasInterval::Target t);
const char* to_string(ConcentrationBound::Theorem t);

}  // namespace tracecause
