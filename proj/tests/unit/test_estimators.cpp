#include "tracecause/estimators.hpp"
#include "tracecause/sampling.hpp"

#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace tracecause;

namespace {

SampleSet make_data(const Matrix& x, const Matrix& y) {
  SampleSet s;
  s.x = x;
  s.y = y;
  return s;
}

// Haar O(n) sampler written against Eigen directly (not the library's).
Matrix oracle_haar(tctest::Gen& g, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(g.gaussian(n, n));
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

// E tr(B U C U^T B U C U^T) for U Haar on O(n), from the second-moment
// structure E[X_ij X_kl] = a d_ij d_kl + b (d_ik d_jl + d_il d_jk), X = U C U^T.
double weingarten_p2(const Matrix& b, const Matrix& c) {
  const double n = static_cast<double>(c.rows());
  const double t1 = c.trace(), t2 = (c * c).trace();
  const double beta = (n * t2 - t1 * t1) / (n * (n - 1.0) * (n + 2.0));
  const double alpha = (t1 * t1 - 2.0 * beta * n) / (n * n);
  const double b1 = b.trace(), b2 = (b * b).trace();
  return alpha * b2 + beta * (b2 + b1 * b1);
}

CovarianceEstimates noiseless_cov(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t t,
                                  Matrix* a_out = nullptr) {
  CausalModelSpec spec;
  spec.n = n;
  spec.m = m;
  spec.sample_count = t;
  spec.spectrum = SpectrumSpec::uniform(n, 0.5, 2.0);
  Rng r(seed);
  const SampleSet data = generate_dataset(r, spec);
  if (a_out) *a_out = data.provenance->a;
  return empirical_covariances(data);
}

}  // namespace

TEST(Covariance, SingleSampleOuterProduct) {
  const CovarianceEstimates c = empirical_covariances(make_data(Matrix{{1.0, 0.0}}, Matrix{{2.0}}));
  EXPECT_EQ(c.cxx, (Matrix{{1.0, 0.0}, {0.0, 0.0}}));
  EXPECT_EQ(c.cxy, (Matrix{{2.0}, {0.0}}));
  EXPECT_EQ(c.cyy, (Matrix{{4.0}}));
}

TEST(Covariance, AverageOfOuterProducts) {
  const CovarianceEstimates c =
      empirical_covariances(make_data(Matrix{{1.0, 0.0}, {-1.0, 0.0}}, Matrix{{1.0}, {1.0}}));
  EXPECT_EQ(c.cxx, (Matrix{{1.0, 0.0}, {0.0, 0.0}}));
  EXPECT_EQ(c.cxy, (Matrix{{0.0}, {0.0}}));
  EXPECT_EQ(c.sample_count, 2);
}

TEST(Covariance, CenteredUsesSampleMean) {
  const Matrix x{{1.0}, {3.0}};
  const CovarianceEstimates c = empirical_covariances(make_data(x, x), true);
  EXPECT_DOUBLE_EQ(c.cxx(0, 0), 2.0);  // ((1-2)^2 + (3-2)^2) / (T - 1)
  EXPECT_ERROR_CODE(empirical_covariances(make_data(Matrix{{1.0}}, Matrix{{1.0}}), true),
                    ErrorCode::InvalidCount);
}

TEST(Covariance, EmptyRejected) {
  EXPECT_ERROR_CODE(empirical_covariances(make_data(Matrix(0, 2), Matrix(0, 1))), ErrorCode::InvalidCount);
}

TEST(Covariance, SymmetryAndTransposeInvariants) {
  tctest::Gen g(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int t = g.integer(1, 30), n = g.integer(1, 10), m = g.integer(1, 10);
    const CovarianceEstimates c = empirical_covariances(make_data(g.gaussian(t, n), g.gaussian(t, m)));
    EXPECT_EQ(c.cxx, c.cxx.transpose());
    EXPECT_EQ(c.cyy, c.cyy.transpose());
    EXPECT_EQ(c.cyx, c.cxy.transpose());
    EXPECT_GE(symmetric_eigenvalues_desc(c.cxx).minCoeff(), -1e-10);
    EXPECT_GE(symmetric_eigenvalues_desc(c.cyy).minCoeff(), -1e-10);
  }
}

// Gaussian oracle: E ||C_XX - Sigma||_F^2 = (tr(Sigma)^2 + tr(Sigma^2)) / T.
TEST(Covariance, ConvergesAtRateOneOverT) {
  const std::size_t n = 5, t = 100 * n;
  CausalModelSpec spec;
  spec.n = n;
  spec.m = 1;
  spec.sample_count = t;
  spec.spectrum = SpectrumSpec::power_law(n, 1.0);
  const int reps = 300;
  std::vector<double> err(reps);
  Rng r0(9);
  const ModelRealization model = realize_model(r0, spec);
  for (int i = 0; i < reps; ++i) {
    Rng r(9, static_cast<std::uint64_t>(i) + 1);
    const SampleSet data = sample_dataset(r, model, t, 0.0);
    err[static_cast<std::size_t>(i)] = (empirical_covariances(data).cxx - model.sigma).squaredNorm();
  }
  double mean = 0.0;
  for (double e : err) mean += e;
  mean /= reps;
  double var = 0.0;
  for (double e : err) var += (e - mean) * (e - mean);
  var /= reps - 1;
  const double s1 = model.sigma.trace(), s2 = (model.sigma * model.sigma).trace();
  const double expected = (s1 * s1 + s2) / static_cast<double>(t);
  EXPECT_LE(std::abs(mean - expected), 3.0 * std::sqrt(var / reps));
}

TEST(PseudoInverse, IdentityCovarianceReturnsCross) {
  tctest::Gen g(1);
  CovarianceEstimates c;
  c.cxx = Matrix::Identity(4, 4);
  const Matrix m = g.gaussian(3, 4);
  c.cyx = m;
  c.cxy = m.transpose();
  c.cyy = Matrix::Identity(3, 3);
  c.sample_count = 10;
  const StructuralFit f = fit_pseudo_inverse(c);
  EXPECT_LE((f.a_hat - m).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(f.rank, 4);
}

TEST(PseudoInverse, NoiselessRecovery) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Matrix a;
    const CovarianceEstimates c = noiseless_cov(seed, 10, 6, 50, &a);
    const StructuralFit f = fit_pseudo_inverse(c);
    EXPECT_EQ(f.rank, 10);
    EXPECT_LE((f.a_hat - a).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(PseudoInverse, RankEqualsSampleCountWhenShort) {
  const CovarianceEstimates c = noiseless_cov(3, 20, 5, 8);
  const StructuralFit f = fit_pseudo_inverse(c);
  EXPECT_EQ(f.rank, 8);
  Eigen::JacobiSVD<Matrix> svd(f.a_hat);
  svd.setThreshold(1e-10);
  EXPECT_LE(svd.rank(), 8);
}

TEST(PseudoInverse, ZeroCovarianceIsRankZero) {
  const CovarianceEstimates c = empirical_covariances(make_data(Matrix::Zero(5, 3), Matrix::Ones(5, 2)));
  EXPECT_ERROR_CODE(fit_pseudo_inverse(c), ErrorCode::RankZero);
}

TEST(Ridge, ZeroLambdaMatchesLeastSquares) {
  Matrix a;
  const CovarianceEstimates c = noiseless_cov(2, 8, 5, 40, &a);
  const StructuralFit f = fit_ridge(c, 0.0);
  EXPECT_LE((f.a_hat - a).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Ridge, SingularAtZeroLambda) {
  const CovarianceEstimates c = noiseless_cov(2, 20, 5, 8);
  EXPECT_ERROR_CODE(fit_ridge(c, 0.0), ErrorCode::SingularSystem);
  EXPECT_NO_THROW(fit_ridge(c, 1e-3));
  EXPECT_ERROR_CODE(fit_ridge(c, -1.0), ErrorCode::InvalidParameter);
}

TEST(Ridge, NormShrinksMonotonically) {
  tctest::Gen g(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int t = g.integer(5, 40), n = g.integer(2, 15), m = g.integer(1, 8);
    const SampleSet data = make_data(g.gaussian(t, n), g.gaussian(t, m));
    double prev = std::numeric_limits<double>::infinity();
    for (double e = -4.0; e <= 6.0; e += 0.25) {
      const double norm = fit_ridge(data, std::pow(10.0, e)).a_hat.norm();
      EXPECT_LE(norm, prev * (1.0 + 1e-12));
      prev = norm;
    }
    EXPECT_LT(prev, 1e-4);
  }
}

TEST(Ridge, MatchesNormalEquations) {
  tctest::Gen g(22);
  const Matrix x = g.gaussian(30, 6), y = g.gaussian(30, 3);
  const double lambda = 0.3;
  // Unnormalized Gram form with lambda scaled by T.
  const Matrix expected =
      ((x.transpose() * x + 30.0 * lambda * Matrix::Identity(6, 6)).inverse() * x.transpose() * y).transpose();
  EXPECT_LE((fit_ridge(make_data(x, y), lambda).a_hat - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ridge, ReverseDirectionSwapsRoles) {
  tctest::Gen g(23);
  const Matrix x = g.gaussian(30, 4), y = g.gaussian(30, 3);
  const StructuralFit back = fit_ridge(make_data(x, y), 0.1, Direction::YtoX);
  const StructuralFit swapped = fit_ridge(make_data(y, x), 0.1, Direction::XtoY);
  EXPECT_LE((back.a_hat - swapped.a_hat).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_EQ(back.a_hat.rows(), 4);
}

TEST(DeltaPopulation, HandExample) {
  const Matrix a = Vector::LinSpaced(2, 1.0, 2.0).asDiagonal();
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(0, 0) = 3.0;
  sigma(1, 1) = 1.0;
  const DeltaScore s = delta_population(a, sigma);
  EXPECT_NEAR(s.value, std::log(0.7), 1e-14);
  EXPECT_NEAR(s.value, -0.35667494393873245, 1e-14);
  EXPECT_NEAR(s.numerator, 3.5, 1e-14);
  EXPECT_NEAR(s.denominator, 5.0, 1e-14);
}

TEST(DeltaPopulation, ExactZeros) {
  tctest::Gen g(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = g.integer(1, 64), m = g.integer(1, 64);
    const double c = g.uniform(0.1, 10.0);
    EXPECT_NEAR(delta_population(g.gaussian(m, n), c * Matrix::Identity(n, n)).value, 0.0, 1e-12);
    EXPECT_NEAR(delta_population(g.orthogonal(n), g.psd(n)).value, 0.0, 1e-12);
  }
}

TEST(DeltaPopulation, ScaleInvariance) {
  tctest::Gen g(32);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = g.integer(1, 20), m = g.integer(1, 20);
    const Matrix a = g.gaussian(m, n), c = g.psd(n);
    const double s = std::exp(g.uniform(-5.0, 5.0));
    const double base = delta_population(a, c).value;
    EXPECT_NEAR(delta_population(s * a, c).value, base, 1e-12);
    EXPECT_NEAR(delta_population(a, s * c).value, base, 1e-12);
  }
}

TEST(DeltaPopulation, LogRatioInvariant) {
  tctest::Gen g(33);
  const DeltaScore s = delta_population(g.gaussian(5, 7), g.psd(7));
  EXPECT_NEAR(s.value, std::log(s.numerator) - std::log(s.denominator), 1e-12);
}

TEST(DeltaPopulation, ZeroInputsUndefined) {
  EXPECT_ERROR_CODE(delta_population(Matrix::Zero(2, 3), Matrix::Identity(3, 3)), ErrorCode::UndefinedScore);
  EXPECT_ERROR_CODE(delta_population(Matrix::Ones(2, 3), Matrix::Zero(3, 3)), ErrorCode::UndefinedScore);
  EXPECT_ERROR_CODE(delta_population(Matrix::Ones(2, 3), Matrix::Identity(4, 4)), ErrorCode::Shape);
}

TEST(DeltaRidge, ScalarCovarianceCancels) {
  tctest::Gen g(41);
  for (double lambda : {0.0, 1e-3, 1.0, 100.0}) {
    CovarianceEstimates c;
    c.cxx = 2.5 * Matrix::Identity(6, 6);
    c.cxy = g.gaussian(6, 4);
    c.cyx = c.cxy.transpose();
    c.cyy = g.psd(4);
    c.sample_count = 20;
    EXPECT_NEAR(delta_ridge(c, fit_ridge(c, lambda)).value, 0.0, 1e-12);
  }
}

TEST(DeltaRidge, ScaleInvarianceAtFixedFit) {
  tctest::Gen g(42);
  CovarianceEstimates c;
  c.cxx = g.psd(5);
  StructuralFit f;
  f.method = StructuralFit::Method::Ridge;
  f.a_hat = g.gaussian(3, 5);
  const double base = delta_ridge(c, f).value;
  f.a_hat *= 7.0;
  EXPECT_NEAR(delta_ridge(c, f).value, base, 1e-12);
  c.cxx *= 0.01;
  EXPECT_NEAR(delta_ridge(c, f).value, base, 1e-12);
}

TEST(DeltaRidge, ZeroFitUndefined) {
  CovarianceEstimates c;
  c.cxx = Matrix::Identity(3, 3);
  StructuralFit f;
  f.method = StructuralFit::Method::Ridge;
  f.a_hat = Matrix::Zero(2, 3);
  EXPECT_ERROR_CODE(delta_ridge(c, f), ErrorCode::UndefinedScore);
}

TEST(DeltaEmpirical, IdentityCovarianceIsZero) {
  tctest::Gen g(51);
  CovarianceEstimates c;
  c.cxx = Matrix::Identity(5, 5);
  c.cxy = g.gaussian(5, 3);
  c.cyx = c.cxy.transpose();
  c.cyy = g.psd(3);
  c.sample_count = 10;
  const DeltaScore s = delta_empirical(c, fit_pseudo_inverse(c));
  EXPECT_NEAR(s.value, 0.0, 1e-12);
  EXPECT_EQ(*s.rank, 5);
}

TEST(DeltaEmpirical, RankCorrectionUsesT) {
  const CovarianceEstimates c = noiseless_cov(8, 20, 6, 8);
  const StructuralFit f = fit_pseudo_inverse(c);
  const DeltaScore s = delta_empirical(c, f);
  ASSERT_EQ(*s.rank, 8);
  // Oracle: direct trace ratio with n / r = 20 / 8.
  const double m = 6.0;
  const double num = (f.a_hat * c.cxx * f.a_hat.transpose()).trace() / m;
  const double den = 2.5 * (f.a_hat * f.a_hat.transpose()).trace() / m * c.cxx.trace() / 20.0;
  EXPECT_NEAR(s.value, std::log(num / den), 1e-12);
}

TEST(DeltaEmpirical, RequiresPseudoInverseFit) {
  const CovarianceEstimates c = noiseless_cov(1, 4, 2, 20);
  EXPECT_ERROR_CODE(delta_empirical(c, fit_ridge(c, 0.1)), ErrorCode::InvalidParameter);
  EXPECT_ERROR_CODE(delta_ridge(c, fit_pseudo_inverse(c)), ErrorCode::InvalidParameter);
}

// lambda = 0 and full rank: ridge = empirical (r = n) = population on plug-ins.
TEST(DeltaConsistency, Chain) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CausalModelSpec spec;
    spec.n = 8;
    spec.m = 5;
    spec.sample_count = 60;
    spec.noise_scale = 0.2;
    spec.spectrum = SpectrumSpec::uniform(8, 0.5, 2.0);
    Rng r(seed);
    const CovarianceEstimates c = empirical_covariances(generate_dataset(r, spec));
    for (Direction d : {Direction::XtoY, Direction::YtoX}) {
      const StructuralFit ridge = fit_ridge(c, 0.0, d);
      const StructuralFit pinv = fit_pseudo_inverse(c, std::nullopt, d);
      const double vr = delta_ridge(c, ridge).value;
      const double ve = delta_empirical(c, pinv).value;
      const double vp = delta_population(pinv.a_hat, oriented(c, d).cause_cov).value;
      EXPECT_NEAR(vr, ve, 1e-10);
      EXPECT_NEAR(ve, vp, 1e-10);
    }
  }
}

TEST(McExpectation, PowerOneClosedForm) {
  tctest::Gen g(61);
  const Matrix a = g.gaussian(4, 6), c = g.psd(6);
  const McEstimate e = mc_expected_p_trace(Rng(1), a, c, 1, 10);
  EXPECT_DOUBLE_EQ(e.mean, (a * a.transpose()).trace() / 4.0 * c.trace() / 6.0);
  EXPECT_EQ(e.std_err, 0.0);
}

TEST(McExpectation, IdentityAIsExact) {
  tctest::Gen g(62);
  const Matrix c = g.psd(5);
  const double target = (c * c * c).trace() / 5.0;
  const McEstimate e = mc_expected_p_trace(Rng(2), Matrix::Identity(5, 5), c, 3, 50);
  EXPECT_NEAR(e.mean, target, 1e-10 * target);
  EXPECT_LE(e.std_err, 1e-10 * target);
}

// n = m = 3, p = 2 against the closed-form second moment and an independent
// 10^5-draw sampler.
TEST(McExpectation, PowerTwoAgainstOracles) {
  const Matrix a{{1.0, 0.5, 0.0}, {0.0, 1.0, -0.3}, {0.2, 0.0, 0.8}};
  const Matrix c = Vector{{3.0, 1.0, 0.25}}.asDiagonal();
  const double exact = weingarten_p2(a.transpose() * a, c) / 3.0;

  tctest::Gen g(63);
  const int draws = 100000;
  double s = 0.0, q = 0.0;
  for (int i = 0; i < draws; ++i) {
    Matrix u = oracle_haar(g, 3);
    if (g.uniform(0.0, 1.0) < 0.5) u.col(0) *= -1.0;
    const Matrix b = a * u * c * u.transpose() * a.transpose();
    const double v = (b * b).trace() / 3.0;
    s += v;
    q += v * v;
  }
  const double brute = s / draws;
  const double brute_se = std::sqrt((q / draws - brute * brute) / draws);
  EXPECT_LE(std::abs(brute - exact), 3.0 * brute_se);

  const McEstimate lib = mc_expected_p_trace(Rng(64), a, c, 2, 4000);
  EXPECT_LE(std::abs(lib.mean - exact), 3.0 * lib.std_err);
  EXPECT_LE(std::abs(lib.mean - brute), 3.0 * std::hypot(lib.std_err, brute_se));
}

TEST(McExpectation, IndependentOfThreadCount) {
  tctest::Gen g(65);
  const Matrix a = g.gaussian(4, 6), c = g.psd(6);
  const McEstimate one = mc_expected_p_trace(Rng(5), a, c, 2, 300, 1);
  const McEstimate four = mc_expected_p_trace(Rng(5), a, c, 2, 300, 4);
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.std_err, four.std_err);
}

TEST(McExpectation, NeedsTwoSamples) {
  EXPECT_ERROR_CODE(mc_expected_p_trace(Rng(1), Matrix::Identity(2, 2), Matrix::Identity(2, 2), 2, 1),
                    ErrorCode::InvalidCount);
}

TEST(DeltaPMoment, PowerOneEqualsPopulation) {
  tctest::Gen g(71);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = g.gaussian(g.integer(1, 8), 6), c = g.psd(6);
    EXPECT_NEAR(delta_p_moment(Rng(1), a, c, 1, 10).value, delta_population(a, c).value, 1e-12);
  }
}

TEST(DeltaPMoment, IdentityAIsZero) {
  tctest::Gen g(72);
  const Matrix c = g.psd(6);
  for (int p = 1; p <= 4; ++p) {
    EXPECT_NEAR(delta_p_moment(Rng(2), Matrix::Identity(6, 6), c, p, 20).value, 0.0, 1e-10);
  }
}

// Causal direction, n = 20, p = 2. Since Sigma = U Lambda U^T with Haar U,
// the score is ln of one draw over its mean. The oracle regenerates that draw
// with fresh Haar matrices and takes its 0.5% and 99.5% quantiles.
TEST(DeltaPMoment, CausalScoreInsideHaarQuantileBand) {
  const int models = 10, oracle_draws = 400;
  int inside = 0, anticausal_below = 0;
  for (int k = 0; k < models; ++k) {
    CausalModelSpec spec;
    spec.n = 20;
    spec.m = 20;
    spec.spectrum = SpectrumSpec::power_law(20);
    Rng r(static_cast<std::uint64_t>(k));
    const ModelRealization model = realize_model(r, spec);
    const DeltaScore causal =
        delta_p_moment(Rng(100, static_cast<std::uint64_t>(k)), model.a, model.sigma, 2, 400);
    const double log_mean = std::log(causal.denominator);

    const Matrix lam = model.lambda.asDiagonal();
    std::vector<double> oracle;
    for (int i = 0; i < oracle_draws; ++i) {
      Rng ur(300 + static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
      const Matrix u = haar_orthogonal(ur, 20);
      oracle.push_back(std::log(conjugated_power_trace(model.a, u * lam * u.transpose(), 2)) - log_mean);
    }
    std::sort(oracle.begin(), oracle.end());
    const double lo = oracle[2], hi = oracle[oracle_draws - 3];
    if (causal.value >= lo && causal.value <= hi) ++inside;

    // Reverse-direction population quantities with noise-free Y.
    const Matrix syy = model.a * model.sigma * model.a.transpose();
    const Matrix back = model.sigma * model.a.transpose() *
                        syy.completeOrthogonalDecomposition().pseudoInverse();
    const double anticausal =
        delta_p_moment(Rng(200, static_cast<std::uint64_t>(k)), back, syy, 2, 400).value;
    if (anticausal < lo) ++anticausal_below;
  }
  EXPECT_GE(inside, models - 1);
  EXPECT_GE(anticausal_below, models - 1);
}

// Signed form for symmetric A, B with eigenvalues sorted descending:
// sum alpha_i beta_(n+1-i) <= tr(AB) <= sum alpha_i beta_i.
TEST(EigenInequalities, VonNeumannSymmetric) {
  tctest::Gen g(81);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(1, 12);
    const Matrix a = g.symmetric(n), b = g.symmetric(n);
    const Vector ea = symmetric_eigenvalues_desc(a), eb = symmetric_eigenvalues_desc(b);
    const double tr = (a * b).trace();
    EXPECT_GE(ea.dot(eb) - tr, -1e-10);
    EXPECT_GE(tr - ea.dot(eb.reverse()), -1e-10);
  }
}

// The absolute-value form holds for PSD pairs, the case the bounds rely on.
TEST(EigenInequalities, VonNeumannPsd) {
  tctest::Gen g(83);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(1, 12);
    const Matrix a = g.psd(n, g.integer(1, n)), b = g.psd(n, g.integer(1, n));
    const Vector ea = symmetric_eigenvalues_desc(a), eb = symmetric_eigenvalues_desc(b);
    EXPECT_GE(ea.dot(eb) - std::abs((a * b).trace()), -1e-10);
  }
}

// Z_t = t U + (1 - t) V: lambda_i(Z A Z^T) <= lambda_i(A) for PSD A.
TEST(EigenInequalities, ConvexCombinationOfOrthogonal) {
  tctest::Gen g(82);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(1, 12);
    const Matrix a = g.psd(n), u = g.orthogonal(n), v = g.orthogonal(n);
    const double t = g.uniform(0.0, 1.0);
    const Matrix z = t * u + (1.0 - t) * v;
    const Vector lhs = symmetric_eigenvalues_desc(symmetrized(z * a * z.transpose()));
    const Vector rhs = symmetric_eigenvalues_desc(a);
    for (int i = 0; i < n; ++i) EXPECT_GE(rhs(i) - lhs(i), -1e-10);
  }
}
