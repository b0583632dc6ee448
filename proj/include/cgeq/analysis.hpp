#pragma once

// Everything derived from a spectrum, an observable in the energy basis, and
// the energy-basis amplitudes of an initial state: effective dimension, LDOS
// and DOS histograms, the relative-fluctuation signal g(t), the dephasing
// estimate of the equilibration time, the time-averaged fluctuation bound,
// and power-law scaling fits.
//
// All O(D^2) pair sums are organized as dense matrix products; lists of
// index pairs are never materialized.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cgeq/hamiltonian.hpp"
#include "cgeq/states.hpp"
#include "cgeq/types.hpp"

namespace cgeq {

namespace detail {

template <typename Scalar>
void require_normalized(const ComplexVectorX<Scalar>& c, Scalar tol, const char* what) {
  const Scalar sum = c.squaredNorm();
  if (!(std::abs(sum - Scalar(1)) <= tol))
    throw std::invalid_argument(std::string(what) + ": amplitudes not normalized, sum |c|^2 = " +
                                std::to_string(static_cast<double>(sum)));
}

// y = (M .* M) x without materializing the squared matrix.
template <typename Scalar>
VectorX<Scalar> squared_entry_product(const MatrixX<Scalar>& m, const VectorX<Scalar>& x) {
  VectorX<Scalar> y(m.rows());
  for (Index i = 0; i < m.rows(); ++i)
    y(i) = m.row(i).cwiseProduct(m.row(i)).dot(x);
  return y;
}

}  // namespace detail

// 1 / sum |c_k|^4, the participation ratio of the state in the energy basis.
template <typename Scalar>
Scalar effective_dimension(const ComplexVectorX<Scalar>& c) {
  detail::require_normalized(c, Scalar(1e-9), "effective_dimension");
  const Scalar sum4 = c.cwiseAbs2().cwiseAbs2().sum();
  return Scalar(1) / sum4;
}

template <typename Scalar>
struct LdosHistogram {
  VectorX<Scalar> bin_edges;  // size bins + 1, uniform width 2, anchored
  VectorX<Scalar> weights;    // sum |c_k|^2 per bin, sums to 1
  Scalar mean{0};             // weighted moments of the unbinned distribution
  Scalar stddev{0};
};

template <typename Scalar>
struct DosHistogram {
  VectorX<Scalar> bin_edges;
  VectorX<std::int64_t> counts;  // eigenstates per bin, sums to D
};

namespace detail {

template <typename Scalar>
VectorX<Scalar> width2_edges(const VectorX<Scalar>& energies, Scalar anchor, Index& first_bin) {
  const Scalar lo = energies.minCoeff(), hi = energies.maxCoeff();
  const auto bin_of = [&](Scalar e) {
    return static_cast<Index>(std::floor((e - anchor) / Scalar(2)));
  };
  first_bin = bin_of(lo);
  const Index last_bin = bin_of(hi);
  VectorX<Scalar> edges(last_bin - first_bin + 2);
  for (Index b = 0; b < edges.size(); ++b) edges(b) = anchor + Scalar(2) * Scalar(first_bin + b);
  return edges;
}

}  // namespace detail

// Strength function P(E): weight sum |c_k|^2 per width-2 energy bin, edges
// aligned so `anchor` (default 0) is an edge.
template <typename Scalar>
LdosHistogram<Scalar> ldos(const ComplexVectorX<Scalar>& c, const Spectrum<Scalar>& spectrum,
                           Scalar anchor = Scalar(0)) {
  if (c.size() != spectrum.dim()) throw std::invalid_argument("ldos: dimension mismatch");
  detail::require_normalized(c, Scalar(1e-9), "ldos");

  LdosHistogram<Scalar> hist;
  Index first_bin = 0;
  hist.bin_edges = detail::width2_edges(spectrum.energies, anchor, first_bin);
  hist.weights = VectorX<Scalar>::Zero(hist.bin_edges.size() - 1);

  const VectorX<Scalar> p = c.cwiseAbs2();
  for (Index k = 0; k < spectrum.dim(); ++k) {
    const Index b =
        static_cast<Index>(std::floor((spectrum.energies(k) - anchor) / Scalar(2))) - first_bin;
    hist.weights(b) += p(k);
  }
  hist.mean = p.dot(spectrum.energies);
  const Scalar var = p.dot((spectrum.energies.array() - hist.mean).square().matrix());
  hist.stddev = std::sqrt(std::max(var, Scalar(0)));
  return hist;
}

// Eigenvalue counts per width-2 bin. Bins are centered on `center` (default
// 0), so the peak bar of a symmetric spectrum straddles zero.
template <typename Scalar>
DosHistogram<Scalar> dos_histogram(const Spectrum<Scalar>& spectrum, Scalar center = Scalar(0)) {
  const Scalar anchor = center - Scalar(1);
  DosHistogram<Scalar> hist;
  Index first_bin = 0;
  hist.bin_edges = detail::width2_edges(spectrum.energies, anchor, first_bin);
  hist.counts = VectorX<std::int64_t>::Zero(hist.bin_edges.size() - 1);
  for (Index k = 0; k < spectrum.dim(); ++k) {
    const Index b =
        static_cast<Index>(std::floor((spectrum.energies(k) - anchor) / Scalar(2))) - first_bin;
    hist.counts(b) += 1;
  }
  return hist;
}

// Unweighted skewness of a sample; used to probe the DOS shape.
template <typename Scalar>
Scalar skewness(const VectorX<Scalar>& samples) {
  if (samples.size() < 2) throw std::invalid_argument("skewness: need at least 2 samples");
  const Scalar mean = samples.mean();
  const auto centered = samples.array() - mean;
  const Scalar m2 = centered.square().mean();
  const Scalar m3 = centered.cube().mean();
  if (!(m2 > Scalar(0))) throw std::invalid_argument("skewness: zero variance");
  return m3 / std::pow(m2, Scalar(1.5));
}

template <typename Scalar>
struct FluctuationSignal {
  VectorX<Scalar> times;
  ComplexVectorX<Scalar> values;  // g(t), real up to roundoff
  Scalar delta_M{0};              // spread of the magnetization spectrum, 2n
  Scalar diagonal_average{0};     // M_bar = sum_k |c_k|^2 M_kk
  Scalar time_average_abs2{0};    // mean |g|^2 over the sampled window
};

// g(t) = (M(t) - M_bar) / delta_M with M_bar the diagonal-ensemble average
// sum_k |c_k|^2 M_kk and
//   M(t) = sum_ij c_i^* c_j M_ij e^{i(E_i - E_j)t} = u(t)^dag B u(t),
//   B_ij = c_i^* M_ij c_j,  u_k(t) = e^{-i E_k t}.
// Evaluated in time blocks as dense products B U; real B (real amplitudes)
// takes the two-real-product path.
template <typename Scalar>
FluctuationSignal<Scalar> time_signal(const ComplexVectorX<Scalar>& c,
                                      const MatrixX<Scalar>& m_energy,
                                      const Spectrum<Scalar>& spectrum,
                                      const VectorX<Scalar>& times,
                                      Index dim_cap = default_dim_cap) {
  const Index dim = spectrum.dim();
  if (c.size() != dim || m_energy.rows() != dim || m_energy.cols() != dim)
    throw std::invalid_argument("time_signal: dimension mismatch");
  if (dim > dim_cap)
    throw resource_limit_error("time_signal: dimension exceeds cap " + std::to_string(dim_cap));
  detail::require_normalized(c, Scalar(1e-9), "time_signal");
  for (Index t = 0; t < times.size(); ++t) {
    if (!std::isfinite(static_cast<double>(times(t))))
      throw std::invalid_argument("time_signal: times must be finite");
    if (t > 0 && !(times(t) > times(t - 1)))
      throw std::invalid_argument("time_signal: times must be strictly ascending");
  }

  const int n = static_cast<int>(std::round(std::log2(static_cast<double>(dim))));
  if ((Index{1} << n) != dim)
    throw std::invalid_argument("time_signal: dimension must be a power of two");
  FluctuationSignal<Scalar> signal;
  signal.times = times;
  signal.values.resize(times.size());
  signal.delta_M = Scalar(2 * n);

  using C = std::complex<Scalar>;
  const bool real_amplitudes = c.size() == 0 || c.imag().cwiseAbs().maxCoeff() == Scalar(0);

  constexpr Index block = 256;
  MatrixX<Scalar> b_re, b_im;
  const VectorX<Scalar> cr = c.real(), ci = c.imag();
  b_re = cr.asDiagonal() * m_energy * cr.asDiagonal();
  if (!real_amplitudes) {
    // B = diag(conj c) M diag(c); split into real and imaginary parts.
    b_re += ci.asDiagonal() * m_energy * ci.asDiagonal();
    b_im = cr.asDiagonal() * m_energy * ci.asDiagonal();
    b_im -= ci.asDiagonal() * m_energy * cr.asDiagonal();
  }
  signal.diagonal_average = b_re.diagonal().sum();  // trace B = sum |c_k|^2 M_kk
  const Scalar diag_average = signal.diagonal_average;

  MatrixX<Scalar> u_re(dim, block), u_im(dim, block);
  MatrixX<Scalar> w_re(dim, block), w_im(dim, block);
  for (Index start = 0; start < times.size(); start += block) {
    const Index cols = std::min(block, times.size() - start);
    for (Index t = 0; t < cols; ++t) {
      u_re.col(t) = (spectrum.energies * times(start + t)).array().cos();
      u_im.col(t) = -(spectrum.energies * times(start + t)).array().sin();
    }
    auto ur = u_re.leftCols(cols), ui = u_im.leftCols(cols);
    // w = B u
    w_re.leftCols(cols).noalias() = b_re * ur;
    w_im.leftCols(cols).noalias() = b_re * ui;
    if (!real_amplitudes) {
      w_re.leftCols(cols).noalias() -= b_im * ui;
      w_im.leftCols(cols).noalias() += b_im * ur;
    }
    for (Index t = 0; t < cols; ++t) {
      // u^dag w, column by column
      const Scalar re = ur.col(t).dot(w_re.col(t)) + ui.col(t).dot(w_im.col(t));
      const Scalar im = ur.col(t).dot(w_im.col(t)) - ui.col(t).dot(w_re.col(t));
      signal.values(start + t) = (C(re, im) - C(diag_average, 0)) / signal.delta_M;
    }
  }
  signal.time_average_abs2 =
      times.size() > 0 ? signal.values.cwiseAbs2().mean() : Scalar(0);
  return signal;
}

// Dephasing estimate T_eq = pi / sqrt(sum_a q_a G_a^2): pi over the
// root-mean-square energy gap weighted by q_a ~ |c_i|^2 |c_j|^2 |M_ij|^2 over
// pairs i != j (the 1/2 in nu_a cancels in the normalization). Contracted as
//   sum_{i,j} w_ij (E_i - E_j)^2 = 2 [ (p.E.E)^T A p - (p.E)^T A (p.E) ],
//   sum_{i != j} w_ij = p^T A p - sum_i p_i^2 A_ii,
// with p_k = |c_k|^2 and A = M .* M, applied row-wise.
template <typename Scalar>
Scalar equilibration_time(const ComplexVectorX<Scalar>& c, const MatrixX<Scalar>& m_energy,
                          const Spectrum<Scalar>& spectrum) {
  const Index dim = spectrum.dim();
  if (c.size() != dim || m_energy.rows() != dim || m_energy.cols() != dim)
    throw std::invalid_argument("equilibration_time: dimension mismatch");
  detail::require_normalized(c, Scalar(1e-9), "equilibration_time");

  const VectorX<Scalar> p = c.cwiseAbs2();
  const VectorX<Scalar> pe = p.cwiseProduct(spectrum.energies);
  const VectorX<Scalar> pee = pe.cwiseProduct(spectrum.energies);

  const VectorX<Scalar> ap = detail::squared_entry_product(m_energy, p);
  const VectorX<Scalar> ape = detail::squared_entry_product(m_energy, pe);

  const Scalar diagonal_weight = p.cwiseProduct(p).dot(m_energy.diagonal().cwiseAbs2());
  const Scalar total_weight = p.dot(ap) - diagonal_weight;
  if (!(total_weight > Scalar(0)))
    throw no_dynamics_error("equilibration_time: no off-diagonal weight (stationary state)");

  const Scalar gap_second_moment = Scalar(2) * (pee.dot(ap) - pe.dot(ape));
  if (!(gap_second_moment > Scalar(0)))
    throw no_dynamics_error("equilibration_time: zero gap dispersion");

  return Scalar(EIGEN_PI) / std::sqrt(gap_second_moment / total_weight);
}

// First sampled time at which |g(t)|^2 drops to threshold_fraction |g(0)|^2,
// linearly interpolated between samples.
template <typename Scalar>
Scalar first_decay_time(const FluctuationSignal<Scalar>& signal, Scalar threshold_fraction) {
  if (!(threshold_fraction > Scalar(0) && threshold_fraction < Scalar(1)))
    throw std::invalid_argument("first_decay_time: threshold_fraction must be in (0, 1)");
  if (signal.times.size() == 0) throw std::invalid_argument("first_decay_time: empty signal");
  const Scalar start = std::norm(signal.values(0));
  if (!(start > Scalar(0)))
    throw std::invalid_argument("first_decay_time: |g(0)| must be > 0");

  const Scalar target = threshold_fraction * start;
  Scalar prev = start;
  for (Index t = 1; t < signal.times.size(); ++t) {
    const Scalar cur = std::norm(signal.values(t));
    if (cur <= target) {
      const Scalar frac = (prev - target) / (prev - cur);
      return signal.times(t - 1) + frac * (signal.times(t) - signal.times(t - 1));
    }
    prev = cur;
  }
  throw never_crossed_error("first_decay_time: threshold never crossed in the sampled window");
}

template <typename Scalar>
struct FluctuationBoundReport {
  Scalar time_avg_sq_fluctuation{0};  // window average of (M(t) - M_bar)^2
  Scalar bound_norm{0};               // ||M|| / d_eff, as printed
  Scalar bound_norm_sq{0};            // ||M||^2 / d_eff, dimensionally consistent
  bool violates_norm_sq = false;
  bool violates_norm = false;
};

// Compares the sampled time average of (M(t) - M_bar)^2 against both
// normalizations of the d_eff bound. Only the squared-norm variant is a
// consistent bound; the other is reported for reference.
template <typename Scalar>
FluctuationBoundReport<Scalar> check_fluctuation_bound(const FluctuationSignal<Scalar>& signal,
                                                       Scalar d_eff, Scalar norm_M) {
  if (!(d_eff >= Scalar(1))) throw std::invalid_argument("check_fluctuation_bound: d_eff < 1");
  FluctuationBoundReport<Scalar> report;
  report.time_avg_sq_fluctuation =
      signal.delta_M * signal.delta_M * signal.time_average_abs2;
  report.bound_norm = norm_M / d_eff;
  report.bound_norm_sq = norm_M * norm_M / d_eff;
  report.violates_norm_sq = report.time_avg_sq_fluctuation > report.bound_norm_sq;
  report.violates_norm = report.time_avg_sq_fluctuation > report.bound_norm;
  return report;
}

template <typename Scalar>
struct PowerLawFit {
  Scalar exponent{0};   // slope in log-log space
  Scalar prefactor{0};
  Scalar residual{0};   // RMS log-space misfit
  int point_count{0};
};

// Least squares for y = b x^a on (log x, log y).
template <typename Scalar>
PowerLawFit<Scalar> fit_power_law(const std::vector<std::pair<Scalar, Scalar>>& points) {
  if (points.size() < 3)
    throw insufficient_data_error("fit_power_law: need at least 3 points, got " +
                                  std::to_string(points.size()));
  const Index m = static_cast<Index>(points.size());
  VectorX<Scalar> lx(m), ly(m);
  for (Index i = 0; i < m; ++i) {
    if (!(points[i].first > Scalar(0) && points[i].second > Scalar(0)))
      throw std::invalid_argument("fit_power_law: points must be positive");
    lx(i) = std::log(points[i].first);
    ly(i) = std::log(points[i].second);
  }
  const Scalar mx = lx.mean(), my = ly.mean();
  const Scalar sxx = (lx.array() - mx).square().sum();
  if (!(sxx > Scalar(0))) throw std::invalid_argument("fit_power_law: x values all equal");
  const Scalar sxy = ((lx.array() - mx) * (ly.array() - my)).sum();

  PowerLawFit<Scalar> fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  fit.residual = std::sqrt(
      (ly.array() - (my + fit.exponent * (lx.array() - mx))).square().mean());
  fit.point_count = static_cast<int>(m);
  return fit;
}

template <typename Scalar>
struct EquilibrationReport {
  int n = 0;
  int k = 0;
  FlipCase flip_case = FlipCase::exact;
  Direction<Scalar> direction = Direction<Scalar>::z();
  Scalar d_eff{0};
  Scalar ldos_mean{0};
  Scalar ldos_stddev{0};
  Scalar bound_value{0};  // ||M_z||^2 / d_eff
  Scalar t_eq{0};
  Scalar first_decay{0};
  Scalar time_average_abs2{0};
  bool degenerate_energies = false;  // diagonal-ensemble average flagged
};

}  // namespace cgeq
