#include "cvxreg/dataset.hpp"

#include <utility>

#include "cvxreg/error.hpp"

namespace cvxreg {

Dataset::Dataset(Matrix features, Vector targets)
    : features_(std::move(features)), targets_(std::move(targets)) {
  if (features_.rows() < 1 || features_.cols() < 1)
    throw Error(ErrorKind::invalid_argument, "dataset needs at least one sample and one feature");
  if (targets_.size() != features_.rows())
    throw Error(ErrorKind::dimension_mismatch, "target count does not match feature rows");
  if (!features_.allFinite() || !targets_.allFinite())
    throw Error(ErrorKind::invalid_argument, "dataset entries must be finite");
}

double Model::predict(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != weights.size())
    throw Error(ErrorKind::dimension_mismatch, "feature length does not match weights");
  return evaluate(transform, weights.dot(x));
}

}  // namespace cvxreg
