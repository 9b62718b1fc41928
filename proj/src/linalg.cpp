#include "tracecause/linalg.hpp"

#include "tracecause/errors.hpp"

#include <cmath>
#include <sstream>

namespace tracecause {

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << what << ": expected a square matrix, got " << m.rows() << "x"
        << m.cols();
    throw Error(ErrorCode::Shape, msg.str());
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   std::string_view what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << what << ": expected " << rows << "x" << cols << ", got " << m.rows()
        << "x" << m.cols();
    throw Error(ErrorCode::Shape, msg.str());
  }
}

double normalized_trace(const Matrix& m) {
  require_square(m, "normalized_trace");
  if (m.rows() == 0) throw Error(ErrorCode::Shape, "normalized_trace: empty matrix");
  return m.trace() / static_cast<double>(m.rows());
}

Matrix symmetrized(const Matrix& m) {
  require_square(m, "symmetrized");
  return 0.5 * (m + m.transpose());
}

Vector symmetric_eigenvalues_desc(const Matrix& m) {
  require_square(m, "symmetric_eigenvalues_desc");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  // Eigen returns ascending order.
  return solver.eigenvalues().reverse();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double psd_power_trace(const Matrix& m, int p) {
  require_square(m, "psd_power_trace");
  if (p < 1) throw Error(ErrorCode::InvalidParameter, "psd_power_trace: p must be >= 1");
  if (p == 1) return m.trace();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  double total = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    total += std::pow(std::max(solver.eigenvalues()(i), 0.0), p);
  }
  return total;
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace tracecause
