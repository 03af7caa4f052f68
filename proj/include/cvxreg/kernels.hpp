#pragma once

// Data-parallel reductions over samples.
//
// Accumulation order is fixed: for N <= kPairwiseThreshold samples are summed
// in ascending index order; above it, samples are grouped into blocks of
// kBlockSize (each summed ascending) and block partials are combined by a
// fixed pairwise tree. Results are bit-identical for any OpenMP thread count.

#include "cvxreg/dataset.hpp"

namespace cvxreg::kernels {

inline constexpr Eigen::Index kPairwiseThreshold = 10000;
inline constexpr Eigen::Index kBlockSize = 1024;

double total_loss(const TransformKind& t, const Vector& w, const Dataset& ds);
Vector total_gradient(const TransformKind& t, const Vector& w, const Dataset& ds);

}  // namespace cvxreg::kernels

namespace cvxreg::reference {

// Serial, straight ascending-index sums. Kept as the test oracle for the
// kernels above; identical to them for N <= kPairwiseThreshold.
double total_loss(const TransformKind& t, const Vector& w, const Dataset& ds);
Vector total_gradient(const TransformKind& t, const Vector& w, const Dataset& ds);

}  // namespace cvxreg::reference
