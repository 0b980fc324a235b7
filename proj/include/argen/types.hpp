#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace argen {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr const char* kVersion = "0.1.0";

/// Unreadable or malformed data files (CSV/JSON inputs, price tables).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Portfolio bound sets that cannot hold a fully invested portfolio.
class InfeasibleBounds : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace argen
