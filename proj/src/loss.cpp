#include "cvxreg/loss.hpp"

#include <cmath>
#include <sstream>

#include "cvxreg/error.hpp"
#include "cvxreg/kernels.hpp"

namespace cvxreg {

double loss_z(const TransformKind& t, double z, double y) noexcept {
  const double r = evaluate(t, z) - y;
  return r * r;
}

double dloss_dz(const TransformKind& t, double z, double y) noexcept {
  return std::visit([&](const auto& g) { return 2.0 * (g.evaluate(z) - y) * g.derivative(z); },
                    t);
}

double psd_condition_value(const TransformKind& t, double z, double y) {
  const double curvature = second_derivative(t, z);
  const double slope = derivative(t, z);
  return 2.0 * slope * slope + 2.0 * (evaluate(t, z) - y) * curvature;
}

void check_dimensions(const Model& m, const Dataset& ds) {
  if (m.weights.size() != ds.n_features()) {
    std::ostringstream msg;
    msg << "model has " << m.weights.size() << " weights but dataset has " << ds.n_features()
        << " features";
    throw Error(ErrorKind::dimension_mismatch, msg.str());
  }
  if (!m.weights.allFinite()) throw Error(ErrorKind::invalid_argument, "weights must be finite");
}

Vector sample_gradient(const Model& m, const Eigen::Ref<const Vector>& x, double y) {
  if (x.size() != m.weights.size())
    throw Error(ErrorKind::dimension_mismatch, "feature length does not match weights");
  return dloss_dz(m.transform, m.weights.dot(x), y) * x;
}

double total_loss(const Model& m, const Dataset& ds) {
  check_dimensions(m, ds);
  return kernels::total_loss(m.transform, m.weights, ds);
}

Vector total_gradient(const Model& m, const Dataset& ds) {
  check_dimensions(m, ds);
  return kernels::total_gradient(m.transform, m.weights, ds);
}

std::size_t targets_outside_bound(const TransformKind& t, const Dataset& ds) {
  const auto* g = std::get_if<ConvexSqrtTransform>(&t);
  if (g == nullptr) return 0;
  std::size_t count = 0;
  for (Eigen::Index n = 0; n < ds.n_samples(); ++n)
    if (std::fabs(ds.target(n)) > g->y_bound()) ++count;
  return count;
}

}  // namespace cvxreg
