#include "tracecause/sampling.hpp"

#include "tracecause/errors.hpp"

#include <cmath>
#include <sstream>

namespace tracecause {

SpectrumSpec SpectrumSpec::power_law(std::size_t n, double exponent) {
  SpectrumSpec s;
  s.kind = Kind::PowerLaw;
  s.dimension = n;
  s.exponent = exponent;
  return s;
}

SpectrumSpec SpectrumSpec::uniform(std::size_t n, double lo, double hi) {
  SpectrumSpec s;
  s.kind = Kind::Uniform;
  s.dimension = n;
  s.lo = lo;
  s.hi = hi;
  return s;
}

SpectrumSpec SpectrumSpec::explicit_values(std::vector<double> values) {
  SpectrumSpec s;
  s.kind = Kind::Explicit;
  s.dimension = values.size();
  s.values = std::move(values);
  return s;
}

SpectrumSpec SpectrumSpec::identity(std::size_t n) {
  return explicit_values(std::vector<double>(n, 1.0));
}

void validate(const SpectrumSpec& spec) {
  if (spec.dimension == 0) {
    throw Error(ErrorCode::InvalidDimension, "spectrum: dimension must be >= 1");
  }
  switch (spec.kind) {
    case SpectrumSpec::Kind::PowerLaw:
      if (!(spec.exponent > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "spectrum: power-law exponent must be > 0");
      }
      break;
    case SpectrumSpec::Kind::Uniform:
      if (!(spec.lo >= 0.0 && spec.lo <= spec.hi)) {
        throw Error(ErrorCode::InvalidParameter, "spectrum: uniform bounds need 0 <= lo <= hi");
      }
      break;
    case SpectrumSpec::Kind::Explicit:
      if (spec.values.size() != spec.dimension) {
        throw Error(ErrorCode::Shape, "spectrum: explicit list length differs from dimension");
      }
      for (double v : spec.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw Error(ErrorCode::InvalidParameter, "spectrum: eigenvalues must be finite and >= 0");
        }
      }
      break;
  }
}

Vector generate_spectrum(Rng& rng, const SpectrumSpec& spec) {
  validate(spec);
  const auto n = static_cast<Eigen::Index>(spec.dimension);
  Vector lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (spec.kind) {
      case SpectrumSpec::Kind::PowerLaw:
        lambda(i) = std::pow(static_cast<double>(i + 1), -spec.exponent);
        break;
      case SpectrumSpec::Kind::Uniform:
        lambda(i) = rng.uniform(spec.lo, spec.hi);
        break;
      case SpectrumSpec::Kind::Explicit:
        lambda(i) = spec.values[static_cast<std::size_t>(i)];
        break;
    }
  }
  if (spec.normalize) {
    const double mean = lambda.mean();
    if (mean > 0.0) lambda /= mean;
  }
  return lambda;
}

void validate(const CausalModelSpec& spec) {
  if (spec.n == 0 || spec.m == 0) {
    throw Error(ErrorCode::InvalidDimension, "model: n and m must be >= 1");
  }
  if (spec.sample_count == 0) {
    throw Error(ErrorCode::InvalidCount, "model: sample count T must be >= 1");
  }
  if (!(spec.noise_scale >= 0.0) || !std::isfinite(spec.noise_scale)) {
    throw Error(ErrorCode::InvalidParameter, "model: noise scale must be finite and >= 0");
  }
  if (spec.spectrum.dimension != spec.n) {
    throw Error(ErrorCode::Shape, "model: spectrum dimension differs from n");
  }
  validate(spec.spectrum);
  if (spec.mean.size() != 0 && spec.mean.size() != static_cast<Eigen::Index>(spec.n)) {
    throw Error(ErrorCode::Shape, "model: mean vector length differs from n");
  }
  const auto& law = spec.structural_law;
  if (law.kind == StructuralLaw::Kind::GaussianIID && !(law.variance > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "model: structural variance must be > 0");
  }
  if (law.kind == StructuralLaw::Kind::Explicit) {
    require_shape(law.matrix, static_cast<Eigen::Index>(spec.m),
                  static_cast<Eigen::Index>(spec.n), "model: explicit structural matrix");
  }
}

void validate(const SampleSet& data) {
  if (data.x.rows() != data.y.rows()) {
    throw Error(ErrorCode::Shape, "sample set: X and Y row counts differ");
  }
  if (data.x.rows() == 0) {
    throw Error(ErrorCode::InvalidCount, "sample set: no observations");
  }
  if (data.x.cols() == 0 || data.y.cols() == 0) {
    throw Error(ErrorCode::InvalidDimension, "sample set: zero-width variable");
  }
}

Matrix haar_orthogonal(Rng& rng, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidDimension, "haar_orthogonal: n must be >= 1");
  const auto k = static_cast<Eigen::Index>(n);
  Matrix g(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(k, k);
  const auto r_diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r_diag(j) < 0.0) q.col(j) *= -1.0;
  }
  if (rng.coin()) q.col(0) *= -1.0;
  return q;
}

ModelRealization realize_model(Rng& rng, const CausalModelSpec& spec) {
  validate(spec);
  ModelRealization model;
  model.u = haar_orthogonal(rng, spec.n);
  model.lambda = generate_spectrum(rng, spec.spectrum);

  const auto m = static_cast<Eigen::Index>(spec.m);
  const auto n = static_cast<Eigen::Index>(spec.n);
  if (spec.structural_law.kind == StructuralLaw::Kind::Explicit) {
    model.a = spec.structural_law.matrix;
  } else {
    const double scale = std::sqrt(spec.structural_law.variance);
    model.a.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) model.a(i, j) = scale * rng.normal();
    }
  }
  model.sigma = symmetrized(model.u * model.lambda.asDiagonal() * model.u.transpose());
  return model;
}

SampleSet sample_dataset(Rng& rng, const ModelRealization& model,
                         std::size_t count, double noise_scale,
                         const Vector& mean) {
  if (count == 0) throw Error(ErrorCode::InvalidCount, "sample_dataset: T must be >= 1");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw Error(ErrorCode::InvalidParameter, "sample_dataset: noise scale must be finite and >= 0");
  }
  const auto t = static_cast<Eigen::Index>(count);
  const Eigen::Index n = model.u.rows();
  const Eigen::Index m = model.a.rows();
  if (mean.size() != 0 && mean.size() != n) {
    throw Error(ErrorCode::Shape, "sample_dataset: mean vector length differs from n");
  }
  for (Eigen::Index i = 0; i < model.lambda.size(); ++i) {
    if (!(model.lambda(i) >= 0.0)) {
      throw Error(ErrorCode::InvalidParameter, "sample_dataset: negative eigenvalue in spectrum");
    }
  }

  Matrix z(t, n);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = rng.normal();
  }
  Matrix e(t, m);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) e(i, j) = rng.normal();
  }

  // Row i: X_i^T = z_i^T diag(sqrt(lambda)) U^T (+ mu^T).
  const Vector root = model.lambda.cwiseSqrt();
  SampleSet data;
  data.x = z * root.asDiagonal() * model.u.transpose();
  if (mean.size() != 0) data.x.rowwise() += mean.transpose();
  data.y = data.x * model.a.transpose();
  if (noise_scale > 0.0) data.y += noise_scale * e;
  data.provenance = std::make_shared<const ModelRealization>(model);
  return data;
}

SampleSet generate_dataset(Rng& rng, const CausalModelSpec& spec) {
  const ModelRealization model = realize_model(rng, spec);
  return sample_dataset(rng, model, spec.sample_count, spec.noise_scale, spec.mean);
}

}  // namespace tracecause
