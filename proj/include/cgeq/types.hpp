#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace cgeq {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexMatrixX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

// Hilbert-space dimension guard for dense 2^n work. Overridable per call.
inline constexpr Index default_dim_cap = Index{1} << 14;

// Thrown when a requested dimension exceeds the configured cap.
struct resource_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a dephasing-time estimate is requested for a state with no
// off-diagonal weight (stationary states).
struct no_dynamics_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a signal never crosses the requested decay threshold.
struct never_crossed_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a fit is requested with too few points.
struct insufficient_data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_dim_cap(int n, Index dim_cap, const char* what) {
  if (n >= 63 || (Index{1} << n) > dim_cap)
    throw resource_limit_error(std::string(what) + ": 2^" + std::to_string(n) +
                               " exceeds dimension cap " + std::to_string(dim_cap));
}

// Quantization axis given by polar/azimuthal angles (radians). theta = 0 is
// the z axis regardless of phi.
template <typename Scalar>
struct Direction {
  Scalar theta{0};
  Scalar phi{0};

  static Direction z() { return {Scalar(0), Scalar(0)}; }
  static Direction x() { return {Scalar(EIGEN_PI / 2), Scalar(0)}; }
  static Direction y() { return {Scalar(EIGEN_PI / 2), Scalar(EIGEN_PI / 2)}; }
};

}  // namespace cgeq
