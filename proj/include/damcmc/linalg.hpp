#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <string>

#include "damcmc/errors.hpp"

namespace damcmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline Matrix symmetrize(const Matrix& m) {
    return 0.5 * (m + m.transpose());
}

// Cholesky of an SPD matrix; throws instead of returning a broken factor.
// No jitter is added here: if the caller wants regularization it must be
// explicit in the caller's formula.
inline Eigen::LLT<Matrix> spd_factor(const Matrix& m, const std::string& what) {
    if (m.rows() != m.cols())
        throw DimensionError(what + ": matrix is " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()));
    if (!is_symmetric(m))
        throw FactorizationError(what + ": matrix is not symmetric");
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw FactorizationError(what + ": matrix is not positive definite");
    return llt;
}

// r^T M^{-1} r given the Cholesky factor of M.
inline double quad_form(const Eigen::LLT<Matrix>& llt, const Vector& r) {
    return llt.matrixL().solve(r).squaredNorm();
}

}  // namespace damcmc
