#include "cvxreg/kernels.hpp"
#include "cvxreg/loss.hpp"

namespace cvxreg::reference {

double total_loss(const TransformKind& t, const Vector& w, const Dataset& ds) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < ds.n_samples(); ++n)
    acc += loss_z(t, ds.row(n).dot(w), ds.target(n));
  return acc;
}

Vector total_gradient(const TransformKind& t, const Vector& w, const Dataset& ds) {
  Vector acc = Vector::Zero(ds.n_features());
  for (Eigen::Index n = 0; n < ds.n_samples(); ++n) {
    const double slope = dloss_dz(t, ds.row(n).dot(w), ds.target(n));
    for (Eigen::Index j = 0; j < ds.n_features(); ++j) acc[j] += slope * ds.row(n)[j];
  }
  return acc;
}

}  // namespace cvxreg::reference
