#pragma once

// Coarse-grained initial states: uniform equal-phase superpositions of all
// product states with exactly k (FlipCase::exact) or at most k
// (FlipCase::at_most) down-spins along a chosen quantization axis.
//
// States are assembled in the z basis from the sparse support (Gosper walk
// over fixed-popcount indices) and then rotated, site by site, with the
// single-spin unitary taking z-up to the +1 eigenstate of n.sigma.

#include <cmath>
#include <complex>
#include <cstdint>

#include "cgeq/types.hpp"

namespace cgeq {

enum class FlipCase { exact, at_most };  // case (a) / case (b)

template <typename Scalar>
struct CoarseGrainedSpec {
  int n = 1;
  int k = 0;
  FlipCase flip_case = FlipCase::exact;
  Direction<Scalar> direction = Direction<Scalar>::z();
};

namespace detail {

// Next larger integer with the same popcount (Gosper's hack).
inline std::uint64_t next_same_popcount(std::uint64_t v) {
  const std::uint64_t c = v & (~v + 1);
  const std::uint64_t r = v + c;
  return (((r ^ v) >> 2) / c) | r;
}

}  // namespace detail

template <typename Scalar>
ComplexVectorX<Scalar> build_z_basis_state(int n, int k, FlipCase flip_case,
                                           Index dim_cap = default_dim_cap) {
  if (n < 1) throw std::invalid_argument("build_z_basis_state: n must be >= 1");
  if (k < 0 || k > n)
    throw std::invalid_argument("build_z_basis_state: k must satisfy 0 <= k <= n");
  check_dim_cap(n, dim_cap, "build_z_basis_state");

  const Index dim = Index{1} << n;
  ComplexVectorX<Scalar> state = ComplexVectorX<Scalar>::Zero(dim);

  const int j_min = flip_case == FlipCase::exact ? k : 0;
  Index support = 0;
  for (int j = j_min; j <= k; ++j) {
    if (j == 0) {
      state(0) = std::complex<Scalar>(1, 0);
      ++support;
      continue;
    }
    std::uint64_t idx = (std::uint64_t{1} << j) - 1;  // lowest index with j bits set
    const std::uint64_t last = idx << (n - j);        // highest
    while (true) {
      state(static_cast<Index>(idx)) = std::complex<Scalar>(1, 0);
      ++support;
      if (idx == last) break;
      idx = detail::next_same_popcount(idx);
    }
  }
  state /= std::sqrt(Scalar(support));
  return state;
}

// Applies the same single-spin rotation U(theta, phi) to every site:
//   U|up>   =  cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>
//   U|down> = -e^{-i phi} sin(theta/2)|up> + cos(theta/2)|down>
// so U|up> is the +1 eigenstate of n.sigma, n = (sin t cos p, sin t sin p, cos t).
template <typename Scalar>
ComplexVectorX<Scalar> rotate_to_direction(const ComplexVectorX<Scalar>& state, int n,
                                           Scalar theta, Scalar phi) {
  if (state.size() != (Index{1} << n))
    throw std::invalid_argument("rotate_to_direction: state dimension != 2^n");
  if (theta == Scalar(0)) return state;  // z axis, any phi: identity

  using C = std::complex<Scalar>;
  const Scalar c = std::cos(theta / 2), s = std::sin(theta / 2);
  const C phase = std::polar(Scalar(1), phi);
  const C u00 = c, u01 = -std::conj(phase) * s;
  const C u10 = phase * s, u11 = c;

  ComplexVectorX<Scalar> out = state;
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (int site = 0; site < n; ++site) {
    const std::uint64_t bit = std::uint64_t{1} << site;
    for (std::uint64_t a = 0; a < dim; ++a) {
      if (a & bit) continue;
      const Index i0 = static_cast<Index>(a), i1 = static_cast<Index>(a | bit);
      const C a0 = out(i0), a1 = out(i1);
      out(i0) = u00 * a0 + u01 * a1;
      out(i1) = u10 * a0 + u11 * a1;
    }
  }
  return out;
}

template <typename Scalar>
ComplexVectorX<Scalar> build_initial_state(const CoarseGrainedSpec<Scalar>& spec,
                                           Index dim_cap = default_dim_cap) {
  auto state = build_z_basis_state<Scalar>(spec.n, spec.k, spec.flip_case, dim_cap);
  return rotate_to_direction(state, spec.n, spec.direction.theta, spec.direction.phi);
}

}  // namespace cgeq
