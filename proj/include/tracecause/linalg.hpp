#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

namespace tracecause {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// tr(M) / k for a k x k matrix. Throws Shape on non-square input.
double normalized_trace(const Matrix& m);

// (M + M^T) / 2.
Matrix symmetrized(const Matrix& m);

// Eigenvalues of a symmetric matrix, sorted in descending order.
Vector symmetric_eigenvalues_desc(const Matrix& m);

// Largest singular value.
double spectral_norm(const Matrix& m);

// tr(M^p) for symmetric PSD M via its eigenvalues; negative rounding noise
// in the spectrum is clamped to zero.
double psd_power_trace(const Matrix& m, int p);

// Entrywise max |M_ij|.
double max_abs(const Matrix& m);

void require_square(const Matrix& m, std::string_view what);
void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   std::string_view what);

}  // namespace tracecause
