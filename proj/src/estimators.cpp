#include "tracecause/estimators.hpp"

#include "tracecause/errors.hpp"
#include "tracecause/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace tracecause {

const char* to_string(Direction d) {
  return d == Direction::XtoY ? "XtoY" : "YtoX";
}

const char* to_string(DeltaVariant::Kind k) {
  switch (k) {
    case DeltaVariant::Kind::Population: return "population";
    case DeltaVariant::Kind::Empirical: return "empirical";
    case DeltaVariant::Kind::Ridge: return "ridge";
    case DeltaVariant::Kind::PMoment: return "pmoment";
  }
  return "unknown";
}

CovarianceEstimates empirical_covariances(const SampleSet& data, bool centered) {
  validate(data);
  const Eigen::Index t = data.count();
  if (centered && t < 2) {
    throw Error(ErrorCode::InvalidCount, "empirical_covariances: centering needs T >= 2");
  }

  CovarianceEstimates cov;
  cov.sample_count = t;
  cov.centered = centered;
  if (centered) {
    const Matrix xc = data.x.rowwise() - data.x.colwise().mean();
    const Matrix yc = data.y.rowwise() - data.y.colwise().mean();
    const double scale = 1.0 / static_cast<double>(t - 1);
    cov.cxx = scale * (xc.transpose() * xc);
    cov.cyy = scale * (yc.transpose() * yc);
    cov.cxy = scale * (xc.transpose() * yc);
  } else {
    const double scale = 1.0 / static_cast<double>(t);
    cov.cxx = scale * (data.x.transpose() * data.x);
    cov.cyy = scale * (data.y.transpose() * data.y);
    cov.cxy = scale * (data.x.transpose() * data.y);
  }
  cov.cxx = symmetrized(cov.cxx);
  cov.cyy = symmetrized(cov.cyy);
  cov.cyx = cov.cxy.transpose();
  return cov;
}

OrientedMoments oriented(const CovarianceEstimates& cov, Direction d) {
  if (d == Direction::XtoY) return {cov.cxx, cov.cyy, cov.cxy};
  return {cov.cyy, cov.cxx, cov.cyx};
}

double default_sv_threshold_rel(Eigen::Index dim, Eigen::Index sample_count) {
  return static_cast<double>(std::max(dim, sample_count)) *
         std::numeric_limits<double>::epsilon();
}

StructuralFit fit_pseudo_inverse(const CovarianceEstimates& cov,
                                 std::optional<double> sv_threshold_rel,
                                 Direction d) {
  const OrientedMoments mom = oriented(cov, d);
  const Eigen::Index dim = mom.cause_cov.rows();
  const double rel = sv_threshold_rel.value_or(default_sv_threshold_rel(dim, cov.sample_count));
  if (!(rel >= 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "fit_pseudo_inverse: threshold must be >= 0");
  }

  Eigen::JacobiSVD<Matrix> svd(mom.cause_cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  if (!(sigma_max > 0.0)) {
    throw Error(ErrorCode::RankZero, "fit_pseudo_inverse: cause covariance is zero");
  }
  const double cutoff = rel * sigma_max;

  Vector inv_sv = Vector::Zero(sv.size());
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      inv_sv(i) = 1.0 / sv(i);
      ++rank;
    }
  }
  const Matrix pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();

  StructuralFit fit;
  fit.method = StructuralFit::Method::PseudoInverse;
  fit.direction = d;
  fit.a_hat = mom.cross.transpose() * pinv;
  fit.rank = rank;
  fit.sv_threshold = cutoff;
  return fit;
}

StructuralFit fit_ridge(const CovarianceEstimates& cov, double lambda, Direction d) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidParameter, "fit_ridge: lambda must be finite and >= 0");
  }
  const OrientedMoments mom = oriented(cov, d);
  const Eigen::Index dim = mom.cause_cov.rows();
  Matrix system = mom.cause_cov;
  system.diagonal().array() += lambda;

  Eigen::LLT<Matrix> llt(system);
  const double eps = std::numeric_limits<double>::epsilon();
  if (llt.info() != Eigen::Success || !(llt.rcond() > static_cast<double>(dim) * eps)) {
    std::ostringstream msg;
    msg << "fit_ridge: (C + lambda I) is numerically singular at lambda = " << lambda
        << "; use lambda > 0 or the pseudo-inverse fit";
    throw Error(ErrorCode::SingularSystem, msg.str());
  }

  StructuralFit fit;
  fit.method = StructuralFit::Method::Ridge;
  fit.direction = d;
  fit.lambda = lambda;
  fit.a_hat = llt.solve(mom.cross).transpose();
  fit.rank = dim;
  return fit;
}

StructuralFit fit_ridge(const SampleSet& data, double lambda, Direction d) {
  return fit_ridge(empirical_covariances(data), lambda, d);
}

namespace {

// tr(A S A^T) without forming the product.
double conjugated_trace(const Matrix& a, const Matrix& s) {
  return (a * s).cwiseProduct(a).sum();
}

DeltaScore make_score(DeltaVariant variant, Direction d, double numerator,
                      double denominator) {
  if (!(numerator > 0.0) || !(denominator > 0.0) || !std::isfinite(numerator) ||
      !std::isfinite(denominator)) {
    std::ostringstream msg;
    msg << "delta (" << to_string(variant.kind) << ", " << to_string(d)
        << "): trace ratio undefined (numerator " << numerator << ", denominator "
        << denominator << ")";
    throw Error(ErrorCode::UndefinedScore, msg.str());
  }
  DeltaScore score;
  score.variant = variant;
  score.direction = d;
  score.numerator = numerator;
  score.denominator = denominator;
  score.value = std::log(numerator) - std::log(denominator);
  return score;
}

void check_conformable(const Matrix& a, const Matrix& c, std::string_view what) {
  require_square(c, what);
  if (a.cols() != c.rows()) {
    std::ostringstream msg;
    msg << what << ": A has " << a.cols() << " columns but covariance is " << c.rows()
        << "x" << c.cols();
    throw Error(ErrorCode::Shape, msg.str());
  }
  if (a.rows() == 0 || a.cols() == 0) throw Error(ErrorCode::Shape, std::string(what) + ": empty A");
}

}  // namespace

DeltaScore delta_population(const Matrix& a, const Matrix& sigma, Direction d) {
  check_conformable(a, sigma, "delta_population");
  const double m = static_cast<double>(a.rows());
  const double numerator = conjugated_trace(a, sigma) / m;
  const double denominator = (a.squaredNorm() / m) * normalized_trace(sigma);
  return make_score(DeltaVariant::population(), d, numerator, denominator);
}

DeltaScore delta_empirical(const CovarianceEstimates& cov, const StructuralFit& fit) {
  if (fit.method != StructuralFit::Method::PseudoInverse) {
    throw Error(ErrorCode::InvalidParameter, "delta_empirical: needs a pseudo-inverse fit");
  }
  if (fit.rank < 1) throw Error(ErrorCode::UndefinedScore, "delta_empirical: rank r = 0");
  const Matrix& c = oriented(cov, fit.direction).cause_cov;
  check_conformable(fit.a_hat, c, "delta_empirical");

  const double m = static_cast<double>(fit.a_hat.rows());
  const double n = static_cast<double>(c.rows());
  const double correction = n / static_cast<double>(fit.rank);
  const double numerator = conjugated_trace(fit.a_hat, c) / m;
  const double denominator = correction * (fit.a_hat.squaredNorm() / m) * normalized_trace(c);
  DeltaScore score = make_score(DeltaVariant::empirical(), fit.direction, numerator, denominator);
  score.rank = fit.rank;
  return score;
}

DeltaScore delta_ridge(const CovarianceEstimates& cov, const StructuralFit& fit) {
  if (fit.method != StructuralFit::Method::Ridge) {
    throw Error(ErrorCode::InvalidParameter, "delta_ridge: needs a ridge fit");
  }
  const Matrix& c = oriented(cov, fit.direction).cause_cov;
  check_conformable(fit.a_hat, c, "delta_ridge");

  const double m = static_cast<double>(fit.a_hat.rows());
  const double numerator = conjugated_trace(fit.a_hat, c) / m;
  const double denominator = (fit.a_hat.squaredNorm() / m) * normalized_trace(c);
  return make_score(DeltaVariant::ridge(fit.lambda), fit.direction, numerator, denominator);
}

double conjugated_power_trace(const Matrix& a, const Matrix& c, int p) {
  check_conformable(a, c, "conjugated_power_trace");
  const Matrix b = a * c * a.transpose();
  return psd_power_trace(symmetrized(b), p) / static_cast<double>(a.rows());
}

McEstimate mc_expected_p_trace(const Rng& rng, const Matrix& a, const Matrix& c,
                               int p, std::size_t mc_samples, unsigned threads) {
  check_conformable(a, c, "mc_expected_p_trace");
  if (p < 1) throw Error(ErrorCode::InvalidParameter, "mc_expected_p_trace: p must be >= 1");
  if (mc_samples < 2) {
    throw Error(ErrorCode::InvalidCount, "mc_expected_p_trace: need at least 2 samples");
  }

  McEstimate est;
  est.samples = mc_samples;
  if (p == 1) {
    const double m = static_cast<double>(a.rows());
    est.mean = (a.squaredNorm() / m) * normalized_trace(c);
    est.std_err = 0.0;
    return est;
  }

  const auto n = static_cast<std::size_t>(c.rows());
  std::vector<double> draws(mc_samples);
  parallel_for(mc_samples, threads, [&](std::size_t i) {
    Rng draw_rng = rng.child(i);
    const Matrix u = haar_orthogonal(draw_rng, n);
    const Matrix au = a * u;
    draws[i] = conjugated_power_trace(au, c, p);
  });

  double sum = 0.0;
  for (double v : draws) sum += v;
  est.mean = sum / static_cast<double>(mc_samples);
  double ss = 0.0;
  for (double v : draws) ss += (v - est.mean) * (v - est.mean);
  const double var = ss / static_cast<double>(mc_samples - 1);
  est.std_err = std::sqrt(var / static_cast<double>(mc_samples));
  return est;
}

DeltaScore delta_p_moment(const Rng& rng, const Matrix& a, const Matrix& c, int p,
                          std::size_t mc_samples, unsigned threads, Direction d) {
  check_conformable(a, c, "delta_p_moment");
  const double numerator = conjugated_power_trace(a, c, p);
  const McEstimate expected = mc_expected_p_trace(rng, a, c, p, mc_samples, threads);
  if (!(expected.mean > 0.0) || !(expected.std_err < 0.5 * expected.mean)) {
    std::ostringstream msg;
    msg << "delta_p_moment: Haar expectation estimate " << expected.mean
        << " (std err " << expected.std_err << ") is not usable";
    throw Error(ErrorCode::UnstableEstimate, msg.str());
  }
  DeltaScore score =
      make_score(DeltaVariant::p_moment(p, mc_samples), d, numerator, expected.mean);
  score.mc_std_err = expected.std_err;
  return score;
}

}  // namespace tracecause
