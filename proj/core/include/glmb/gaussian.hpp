#pragma once

#include <Eigen/Dense>

#include "glmb/error.hpp"
#include "glmb/label.hpp"

namespace glmb {

/// Single Gaussian density N(x; mean, cov).
struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Eigen::Index dim() const { return mean.size(); }
};

/// Throws invalid_model unless cov is square, matches the mean dimension,
/// is symmetric to tolerance and has a valid Cholesky factorization.
inline void validate(const Gaussian& g) {
  if (g.cov.rows() != g.dim() || g.cov.cols() != g.dim())
    throw invalid_model("covariance shape does not match mean dimension");
  if (g.dim() == 0) throw invalid_model("empty Gaussian");
  const double scale = std::max(1.0, g.cov.cwiseAbs().maxCoeff());
  if ((g.cov - g.cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw invalid_model("covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(g.cov);
  if (llt.info() != Eigen::Success)
    throw invalid_model("covariance is not positive definite");
}

/// Track hypothesis: a label plus its state density.
struct LabeledTrack {
  Label label;
  Gaussian density;
};

}  // namespace glmb
