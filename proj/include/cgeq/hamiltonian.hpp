#pragma once

// Dense construction and full diagonalization of the spin-1/2 chain
//
//   H = sum_i J ( Sx_i Sx_{i+1} + Jy Sy_i Sy_{i+1} + Jz Sz_i Sz_{i+1}
//                 + Sz_i Sz_{i+2} + hz Sz_i ),
//
// with S = sigma/2, open boundary conditions (terms reaching past the last
// site are dropped) and the next-nearest-neighbor Sz Sz term breaking
// integrability. The overall J multiplies every bracketed term, field
// included.
//
// Computational basis: index bit b (bit 0 = site 1) encodes the spin at site
// b+1, bit value 0 = up, 1 = down. In this basis H is real symmetric: the
// only off-diagonal term, Sx Sx + Jy Sy Sy, connects states differing by a
// flipped neighboring pair with element J(1 - Jy)/4 for aligned pairs and
// J(1 + Jy)/4 for anti-aligned pairs (the sigma_y factors i and -i multiply
// to -1 or +1 respectively).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cgeq/types.hpp"

namespace cgeq {

template <typename Scalar>
struct HamiltonianSpec {
  int n = 2;        // spin count
  Scalar J{1};      // overall coupling, units of inverse time
  Scalar Jy{1};     // dimensionless y anisotropy
  Scalar Jz{1};     // dimensionless z anisotropy
  Scalar hz{0};     // field, units of inverse time

  Index dim() const { return Index{1} << n; }
};

template <typename Scalar>
void validate_spec(const HamiltonianSpec<Scalar>& spec) {
  if (spec.n < 1) throw std::invalid_argument("HamiltonianSpec: n must be >= 1");
  if (spec.Jy < Scalar(0)) throw std::invalid_argument("HamiltonianSpec: Jy must be >= 0");
  if (spec.Jz < Scalar(0)) throw std::invalid_argument("HamiltonianSpec: Jz must be >= 0");
  if (spec.hz < Scalar(0)) throw std::invalid_argument("HamiltonianSpec: hz must be >= 0");
  if (!(std::isfinite(static_cast<double>(spec.J)) && std::isfinite(static_cast<double>(spec.Jy)) &&
        std::isfinite(static_cast<double>(spec.Jz)) && std::isfinite(static_cast<double>(spec.hz))))
    throw std::invalid_argument("HamiltonianSpec: couplings must be finite");
}

// sigma_z eigenvalue (+1 up / -1 down) of site `site` (0-based) in basis state `state`.
inline int pauli_z(std::uint64_t state, int site) {
  return (state >> site) & 1u ? -1 : +1;
}

template <typename Scalar>
MatrixX<Scalar> build_hamiltonian(const HamiltonianSpec<Scalar>& spec,
                                  Index dim_cap = default_dim_cap) {
  validate_spec(spec);
  check_dim_cap(spec.n, dim_cap, "build_hamiltonian");

  const int n = spec.n;
  const Index dim = spec.dim();
  MatrixX<Scalar> h = MatrixX<Scalar>::Zero(dim, dim);

  const Scalar zz_nn = spec.J * spec.Jz / Scalar(4);
  const Scalar zz_nnn = spec.J / Scalar(4);
  const Scalar field = spec.J * spec.hz / Scalar(2);
  const Scalar flip_aligned = spec.J * (Scalar(1) - spec.Jy) / Scalar(4);
  const Scalar flip_opposed = spec.J * (Scalar(1) + spec.Jy) / Scalar(4);

  for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(dim); ++a) {
    Scalar diag{0};
    for (int i = 0; i < n; ++i) {
      const int zi = pauli_z(a, i);
      if (i + 1 < n) diag += zz_nn * Scalar(zi * pauli_z(a, i + 1));
      if (i + 2 < n) diag += zz_nnn * Scalar(zi * pauli_z(a, i + 2));
      diag += field * Scalar(zi);
    }
    h(static_cast<Index>(a), static_cast<Index>(a)) = diag;

    for (int i = 0; i + 1 < n; ++i) {
      const std::uint64_t b = a ^ (std::uint64_t{3} << i);  // flip sites i, i+1
      const bool aligned = pauli_z(a, i) == pauli_z(a, i + 1);
      h(static_cast<Index>(b), static_cast<Index>(a)) += aligned ? flip_aligned : flip_opposed;
    }
  }
  return h;
}

// Eigenvalues ascending; eigenvectors the matching orthonormal columns with
// the sign of each column fixed so its largest-magnitude entry is positive.
template <typename Scalar>
struct Spectrum {
  VectorX<Scalar> energies;
  MatrixX<Scalar> eigenvectors;

  Index dim() const { return energies.size(); }
};

template <typename Scalar>
Spectrum<Scalar> diagonalize(const MatrixX<Scalar>& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("diagonalize: matrix not square");
  if (h.rows() > 0) {
    const Scalar asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    if (!(asym < Scalar(1e-12)))
      throw std::invalid_argument("diagonalize: matrix not symmetric (max |H - H^T| = " +
                                  std::to_string(static_cast<double>(asym)) + ")");
  }

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(h);
  if (solver.info() != Eigen::Success) {
    const Scalar residual =
        (h * solver.eigenvectors() - solver.eigenvectors() * solver.eigenvalues().asDiagonal())
            .cwiseAbs()
            .maxCoeff();
    throw std::runtime_error("diagonalize: eigensolver did not converge, max residual " +
                             std::to_string(static_cast<double>(residual)));
  }

  Spectrum<Scalar> spectrum{solver.eigenvalues(), solver.eigenvectors()};
  for (Index j = 0; j < spectrum.dim(); ++j) {
    Index imax = 0;
    spectrum.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (spectrum.eigenvectors(imax, j) < Scalar(0)) spectrum.eigenvectors.col(j) *= Scalar(-1);
  }
  return spectrum;
}

struct GapCollisionReport {
  Index degenerate_energy_pairs = 0;  // pairs k < l with |E_k - E_l| < tol
  Index degenerate_gap_pairs = 0;     // nontrivial gap collisions, see below
};

// Counts degenerate energies and degenerate gaps within `tol`.
//
// A gap collision is a pair of index pairs (k,l) != (m,n), k<l, m<n, with
// |G_kl - G_mn| < tol. Collisions explained by the trivial identifications
// (E_k = E_m and E_l = E_n, or both gaps zero) are excluded: those are the
// allowed cases of the non-degeneracy condition, not genuine resonances.
//
// Sorted gap list, O(D^2 log D) time and O(D^2) memory; refuses D beyond the
// cap, and bails out if the candidate-collision count explodes (near-integrable
// spectra), since the count itself is then the diagnosis.
template <typename Scalar>
GapCollisionReport scan_degenerate_gaps(const Spectrum<Scalar>& spectrum, Scalar tol,
                                        Index dim_cap = default_dim_cap) {
  if (!(tol > Scalar(0))) throw std::invalid_argument("scan_degenerate_gaps: tol must be > 0");
  const Index dim = spectrum.dim();
  if (dim > dim_cap)
    throw resource_limit_error("scan_degenerate_gaps: dimension " + std::to_string(dim) +
                               " exceeds cap " + std::to_string(dim_cap));

  GapCollisionReport report;
  const auto& e = spectrum.energies;

  // Degenerate energies: two-pointer window over the ascending spectrum.
  for (Index lo = 0, hi = 0; lo < dim; ++lo) {
    if (hi < lo + 1) hi = lo + 1;
    while (hi < dim && e(hi) - e(lo) < tol) ++hi;
    report.degenerate_energy_pairs += hi - lo - 1;
  }

  struct Gap {
    Scalar value;
    Index k, l;
  };
  std::vector<Gap> gaps;
  gaps.reserve(static_cast<std::size_t>(dim) * (dim - 1) / 2);
  for (Index k = 0; k < dim; ++k)
    for (Index l = k + 1; l < dim; ++l) gaps.push_back({e(l) - e(k), k, l});
  std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) { return a.value < b.value; });

  constexpr std::size_t max_candidates = std::size_t{1} << 26;
  std::size_t candidates = 0;
  for (std::size_t i = 0, j = 0; i < gaps.size(); ++i) {
    if (j < i + 1) j = i + 1;
    while (j < gaps.size() && gaps[j].value - gaps[i].value < tol) ++j;
    candidates += j - i - 1;
    if (candidates > max_candidates)
      throw resource_limit_error("scan_degenerate_gaps: collision candidates exceed " +
                                 std::to_string(max_candidates) + "; spectrum too resonant");
    for (std::size_t m = i + 1; m < j; ++m) {
      const Gap& a = gaps[i];
      const Gap& b = gaps[m];
      const bool same_energies =
          std::abs(e(a.k) - e(b.k)) < tol && std::abs(e(a.l) - e(b.l)) < tol;
      const bool both_zero = a.value < tol && b.value < tol;
      if (!same_energies && !both_zero) ++report.degenerate_gap_pairs;
    }
  }
  return report;
}

}  // namespace cgeq
