#include "cvxreg/kernels.hpp"

#include <vector>

#include "cvxreg/loss.hpp"

namespace cvxreg::kernels {

namespace {

double pairwise_sum(const std::vector<double>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(parts, lo, mid) + pairwise_sum(parts, mid, hi);
}

Vector pairwise_sum(const Matrix& parts, Eigen::Index lo, Eigen::Index hi) {
  if (hi - lo == 1) return parts.row(lo).transpose();
  const Eigen::Index mid = lo + (hi - lo) / 2;
  return pairwise_sum(parts, lo, mid) + pairwise_sum(parts, mid, hi);
}

template <class G>
double block_loss(const G& g, const Vector& w, const Dataset& ds, Eigen::Index begin,
                  Eigen::Index end) {
  double acc = 0.0;
  for (Eigen::Index n = begin; n < end; ++n) {
    const double r = g.evaluate(ds.row(n).dot(w)) - ds.target(n);
    acc += r * r;
  }
  return acc;
}

template <class G, class Out>
void block_gradient(const G& g, const Vector& w, const Dataset& ds, Eigen::Index begin,
                    Eigen::Index end, Out&& acc) {
  for (Eigen::Index n = begin; n < end; ++n) {
    const double z = ds.row(n).dot(w);
    const double slope = 2.0 * (g.evaluate(z) - ds.target(n)) * g.derivative(z);
    acc += slope * ds.row(n);
  }
}

Eigen::Index block_count(Eigen::Index n) { return (n + kBlockSize - 1) / kBlockSize; }

}  // namespace

double total_loss(const TransformKind& t, const Vector& w, const Dataset& ds) {
  return std::visit(
      [&](const auto& g) {
        const Eigen::Index n = ds.n_samples();
        if (n <= kPairwiseThreshold) return block_loss(g, w, ds, 0, n);
        const Eigen::Index blocks = block_count(n);
        std::vector<double> parts(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
        for (Eigen::Index b = 0; b < blocks; ++b) {
          const Eigen::Index begin = b * kBlockSize;
          parts[static_cast<std::size_t>(b)] =
              block_loss(g, w, ds, begin, std::min(n, begin + kBlockSize));
        }
        return pairwise_sum(parts, 0, parts.size());
      },
      t);
}

Vector total_gradient(const TransformKind& t, const Vector& w, const Dataset& ds) {
  return std::visit(
      [&](const auto& g) -> Vector {
        const Eigen::Index n = ds.n_samples();
        const Eigen::Index d = ds.n_features();
        if (n <= kPairwiseThreshold) {
          Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
          block_gradient(g, w, ds, 0, n, acc);
          return acc.transpose();
        }
        const Eigen::Index blocks = block_count(n);
        Matrix parts = Matrix::Zero(blocks, d);
#pragma omp parallel for schedule(static)
        for (Eigen::Index b = 0; b < blocks; ++b) {
          const Eigen::Index begin = b * kBlockSize;
          block_gradient(g, w, ds, begin, std::min(n, begin + kBlockSize), parts.row(b));
        }
        return pairwise_sum(parts, 0, blocks);
      },
      t);
}

}  // namespace cvxreg::kernels
