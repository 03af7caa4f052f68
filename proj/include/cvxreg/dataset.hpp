#pragma once

#include <Eigen/Dense>

#include "cvxreg/transform.hpp"

namespace cvxreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// N x d design matrix (rows are samples) with N targets. Immutable once built.
class Dataset {
 public:
  Dataset(Matrix features, Vector targets);

  const Matrix& features() const noexcept { return features_; }
  const Vector& targets() const noexcept { return targets_; }
  Eigen::Index n_samples() const noexcept { return features_.rows(); }
  Eigen::Index n_features() const noexcept { return features_.cols(); }

  auto row(Eigen::Index n) const { return features_.row(n); }
  double target(Eigen::Index n) const { return targets_[n]; }

 private:
  Matrix features_;
  Vector targets_;
};

// Prediction is g(w . x).
struct Model {
  Vector weights;
  TransformKind transform;

  double predict(const Eigen::Ref<const Vector>& x) const;
};

}  // namespace cvxreg
