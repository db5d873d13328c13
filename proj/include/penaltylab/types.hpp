#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>

namespace penaltylab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A scalar function on R^n with values in R ∪ {+∞}, reported as a double
/// where +∞ is std::numeric_limits<double>::infinity(). Evaluation failures
/// are mapped to +∞ by the adapters that build these.
using ScalarFn = std::function<double(const Vec&)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace penaltylab
