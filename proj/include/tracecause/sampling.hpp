#pragma once

#include "tracecause/linalg.hpp"
#include "tracecause/rng.hpp"

#include <cstddef>
#include <memory>
#include <vector>

namespace tracecause {

// Eigenvalue profile for the cause covariance.
struct SpectrumSpec {
  enum class Kind { PowerLaw, Uniform, Explicit };

  Kind kind = Kind::PowerLaw;
  std::size_t dimension = 0;
  double exponent = 1.0;          // PowerLaw: lambda_i = i^(-exponent)
  double lo = 0.0, hi = 1.0;      // Uniform: i.i.d. draws from [lo, hi]
  std::vector<double> values;     // Explicit
  // Rescale so the eigenvalues average to 1 (tr = n). Off by default.
  bool normalize = false;

  static SpectrumSpec power_law(std::size_t n, double exponent = 1.0);
  static SpectrumSpec uniform(std::size_t n, double lo, double hi);
  static SpectrumSpec explicit_values(std::vector<double> values);
  static SpectrumSpec identity(std::size_t n);
};

void validate(const SpectrumSpec& spec);

// Uniform spectra consume rng; the other kinds are deterministic.
Vector generate_spectrum(Rng& rng, const SpectrumSpec& spec);

struct StructuralLaw {
  enum class Kind { GaussianIID, Explicit };

  Kind kind = Kind::GaussianIID;
  double variance = 1.0;
  Matrix matrix;  // Explicit: m x n

  static StructuralLaw gaussian(double variance = 1.0) {
    return {Kind::GaussianIID, variance, {}};
  }
  static StructuralLaw explicit_matrix(Matrix a) {
    return {Kind::Explicit, 1.0, std::move(a)};
  }
};

// Linear causal model Y = A X + delta E with X ~ N(mu, U diag(Lambda) U^T).
struct CausalModelSpec {
  std::size_t n = 40;
  std::size_t m = 40;
  SpectrumSpec spectrum = SpectrumSpec::power_law(40);
  StructuralLaw structural_law;
  double noise_scale = 0.0;
  Vector mean;  // empty means zero
  std::size_t sample_count = 100;
};

void validate(const CausalModelSpec& spec);

struct ModelRealization {
  Matrix u;        // n x n orthogonal
  Vector lambda;   // n eigenvalues of Sigma_XX
  Matrix a;        // m x n structural matrix
  Matrix sigma;    // U diag(lambda) U^T
};

struct SampleSet {
  Matrix x;  // T x n, one observation per row
  Matrix y;  // T x m
  std::shared_ptr<const ModelRealization> provenance;

  Eigen::Index count() const { return x.rows(); }
};

void validate(const SampleSet& data);

// Haar-distributed element of O(n): QR of a Gaussian matrix with the columns
// of Q rescaled by sign(R_ii), followed by a fair-coin sign flip of the first
// column.
Matrix haar_orthogonal(Rng& rng, std::size_t n);

// Draws U, then Lambda, then A (in that order).
ModelRealization realize_model(Rng& rng, const CausalModelSpec& spec);

// Draws T rows of X (row-major Gaussian fill), then T rows of E. E is drawn
// even when delta = 0 so the stream layout does not depend on delta.
SampleSet sample_dataset(Rng& rng, const ModelRealization& model,
                         std::size_t count, double noise_scale,
                         const Vector& mean = Vector());

// realize_model followed by sample_dataset with the spec's T, delta, mu.
SampleSet generate_dataset(Rng& rng, const CausalModelSpec& spec);

}  // namespace tracecause
