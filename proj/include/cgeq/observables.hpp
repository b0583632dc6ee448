#pragma once

// The magnetization observable (Pauli normalization, eigenvalues +-1 per
// site) and basis changes into the energy eigenbasis. Note the convention
// split: the Hamiltonian uses spin-1/2 operators sigma/2, the measured
// magnetization uses bare Pauli matrices, so ||M_z|| = n and the full
// excursion M_max - M_min is 2n.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>

#include "cgeq/hamiltonian.hpp"
#include "cgeq/types.hpp"

namespace cgeq {

// Diagonal of M_z in the product basis: n - 2 popcount(index).
template <typename Scalar>
VectorX<Scalar> magnetization_z_diagonal(int n) {
  if (n < 1) throw std::invalid_argument("magnetization_z_diagonal: n must be >= 1");
  const Index dim = Index{1} << n;
  VectorX<Scalar> diag(dim);
  for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(dim); ++a)
    diag(static_cast<Index>(a)) = Scalar(n - 2 * std::popcount(a));
  return diag;
}

// M along an arbitrary axis: sum over sites of n.sigma at that site. Complex
// Hermitian in general; real diagonal for the z axis.
template <typename Scalar>
ComplexMatrixX<Scalar> build_magnetization(int n, const Direction<Scalar>& direction) {
  if (n < 1) throw std::invalid_argument("build_magnetization: n must be >= 1");
  using C = std::complex<Scalar>;
  const Index dim = Index{1} << n;
  const Scalar ct = std::cos(direction.theta), st = std::sin(direction.theta);
  const C lower = st * std::polar(Scalar(1), direction.phi);  // <down|n.sigma|up>

  ComplexMatrixX<Scalar> m = ComplexMatrixX<Scalar>::Zero(dim, dim);
  for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(dim); ++a) {
    C diag{0};
    for (int site = 0; site < n; ++site) {
      diag += ct * Scalar(pauli_z(a, site));
      const std::uint64_t b = a ^ (std::uint64_t{1} << site);
      const bool raising = (a >> site) & 1u;  // flipping down -> up
      m(static_cast<Index>(b), static_cast<Index>(a)) += raising ? std::conj(lower) : lower;
    }
    m(static_cast<Index>(a), static_cast<Index>(a)) = diag;
  }
  return m;
}

// M_ij = <E_i| M |E_j> for a real symmetric observable in the product basis.
template <typename Scalar>
MatrixX<Scalar> to_energy_basis(const MatrixX<Scalar>& m, const Spectrum<Scalar>& spectrum) {
  if (m.rows() != spectrum.dim() || m.cols() != spectrum.dim())
    throw std::invalid_argument("to_energy_basis: dimension mismatch");
  const auto& v = spectrum.eigenvectors;
  return v.transpose() * (m * v);
}

// Diagonal-observable overload: skips the first matrix product.
template <typename Scalar>
MatrixX<Scalar> to_energy_basis(const VectorX<Scalar>& diagonal, const Spectrum<Scalar>& spectrum) {
  if (diagonal.size() != spectrum.dim())
    throw std::invalid_argument("to_energy_basis: dimension mismatch");
  const auto& v = spectrum.eigenvectors;
  return v.transpose() * (diagonal.asDiagonal() * v);
}

// Energy-basis amplitudes c_k = <E_k|psi>. Real eigenvectors, so the real and
// imaginary parts transform independently.
template <typename Scalar>
ComplexVectorX<Scalar> expand_in_energy_basis(const ComplexVectorX<Scalar>& state,
                                              const Spectrum<Scalar>& spectrum) {
  if (state.size() != spectrum.dim())
    throw std::invalid_argument("expand_in_energy_basis: dimension mismatch");
  const auto& v = spectrum.eigenvectors;
  VectorX<Scalar> re = v.transpose() * state.real();
  VectorX<Scalar> im = v.transpose() * state.imag();
  ComplexVectorX<Scalar> c(state.size());
  c.real() = re;
  c.imag() = im;
  return c;
}

}  // namespace cgeq
