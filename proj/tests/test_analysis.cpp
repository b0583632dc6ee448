#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "doctest.h"

#include "cgeq/analysis.hpp"
#include "cgeq/hamiltonian.hpp"
#include "cgeq/observables.hpp"
#include "cgeq/states.hpp"
#include "oracles.hpp"

using namespace cgeq;
using Complex = std::complex<double>;

namespace {

HamiltonianSpec<double> chain_spec(int n) {
  HamiltonianSpec<double> spec;
  spec.n = n;
  spec.J = 1;
  spec.Jy = 1.4;
  spec.Jz = 0.5;
  spec.hz = 0.01;
  return spec;
}

struct ChainSetup {
  Spectrum<double> spectrum;
  MatrixX<double> m_energy;
};

ChainSetup chain_setup(int n) {
  ChainSetup setup;
  setup.spectrum = diagonalize(build_hamiltonian(chain_spec(n)));
  setup.m_energy = to_energy_basis(magnetization_z_diagonal<double>(n), setup.spectrum);
  return setup;
}

ComplexVectorX<double> chain_coefficients(const ChainSetup& setup, int n, int k, FlipCase fc,
                                          Direction<double> dir = Direction<double>::z()) {
  CoarseGrainedSpec<double> cg;
  cg.n = n;
  cg.k = k;
  cg.flip_case = fc;
  cg.direction = dir;
  return expand_in_energy_basis(build_initial_state(cg), setup.spectrum);
}

}  // namespace

TEST_CASE("effective dimension of concentrated and uniform amplitude vectors") {
  ComplexVectorX<double> c = ComplexVectorX<double>::Zero(8);
  c(3) = Complex(1, 0);
  CHECK(effective_dimension(c) == doctest::Approx(1.0).epsilon(1e-14));

  c.setZero();
  for (Index i = 0; i < 4; ++i) c(i) = Complex(0.5, 0);
  CHECK(effective_dimension(c) == doctest::Approx(4.0).epsilon(1e-12));

  c.setConstant(Complex(1.0 / std::sqrt(8.0), 0));
  CHECK(effective_dimension(c) == doctest::Approx(8.0).epsilon(1e-12));

  c *= 1.1;
  CHECK_THROWS_AS(effective_dimension(c), std::invalid_argument);
}

TEST_CASE("effective dimension agrees with the independent oracle pipeline") {
  const auto setup = chain_setup(6);
  const auto c = chain_coefficients(setup, 6, 2, FlipCase::at_most);
  const double lib = effective_dimension(c);

  const auto oracle_h = oracle::hamiltonian(6, 1, 1.4, 0.5, 0.01);
  Eigen::SelfAdjointEigenSolver<MatrixX<double>> solver(oracle_h.real());
  const auto oracle_c =
      oracle::energy_coefficients(solver.eigenvectors(), oracle::z_state(6, 2, true));
  const double ref = oracle::effective_dimension(oracle_c);
  CHECK(lib == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("effective dimension ignores phase and degenerate relabeling") {
  const auto setup = chain_setup(4);
  const auto c = chain_coefficients(setup, 4, 1, FlipCase::at_most);
  const double base = effective_dimension(c);
  const ComplexVectorX<double> rephased = c * std::polar(1.0, 0.913);
  CHECK(effective_dimension(rephased) == doctest::Approx(base).epsilon(1e-14));

  // Exactly degenerate block: swapping or sign-flipping its eigenvectors is
  // an equally valid spectrum and must not move d_eff.
  Spectrum<double> sp;
  sp.energies = VectorX<double>(4);
  sp.energies << 0, 1, 1, 2;
  sp.eigenvectors = MatrixX<double>::Identity(4, 4);
  Spectrum<double> relabeled = sp;
  relabeled.eigenvectors.col(1) = sp.eigenvectors.col(2);
  relabeled.eigenvectors.col(2) = -sp.eigenvectors.col(1);

  ComplexVectorX<double> psi(4);
  psi << Complex(0.5, 0), Complex(0.5, 0), Complex(0.1, 0.3), Complex(0.1, -0.6);
  psi /= std::sqrt(psi.squaredNorm());
  CHECK(effective_dimension(expand_in_energy_basis(psi, sp)) ==
        doctest::Approx(effective_dimension(expand_in_energy_basis(psi, relabeled)))
            .epsilon(1e-14));

  // A state with no weight in the degenerate block is also indifferent to a
  // rotation of that block's basis.
  Spectrum<double> remixed = sp;
  const double angle = 0.37;
  remixed.eigenvectors.col(1) =
      std::cos(angle) * sp.eigenvectors.col(1) + std::sin(angle) * sp.eigenvectors.col(2);
  remixed.eigenvectors.col(2) =
      -std::sin(angle) * sp.eigenvectors.col(1) + std::cos(angle) * sp.eigenvectors.col(2);
  ComplexVectorX<double> outside(4);
  outside << Complex(0.8, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0.6);
  CHECK(effective_dimension(expand_in_energy_basis(outside, sp)) ==
        doctest::Approx(effective_dimension(expand_in_energy_basis(outside, remixed)))
            .epsilon(1e-12));
}

TEST_CASE("effective dimension stays within the Hilbert-space bounds") {
  for (int n : {3, 5}) {
    const auto setup = chain_setup(n);
    for (int k = 0; k <= n; ++k)
      for (auto fc : {FlipCase::exact, FlipCase::at_most})
        for (const auto dir : {Direction<double>::z(), Direction<double>::x()}) {
          const double d = effective_dimension(chain_coefficients(setup, n, k, fc, dir));
          CHECK(d >= 1.0 - 1e-12);
          CHECK(d <= static_cast<double>(Index{1} << n) + 1e-9);
        }
  }
}

TEST_CASE("ldos weights, moments, and bin anchoring") {
  const auto setup = chain_setup(6);
  const auto c = chain_coefficients(setup, 6, 1, FlipCase::exact);
  const auto hist = ldos(c, setup.spectrum);

  CHECK(std::abs(hist.weights.sum() - 1.0) < 1e-12);
  for (Index b = 1; b < hist.bin_edges.size(); ++b)
    CHECK(hist.bin_edges(b) - hist.bin_edges(b - 1) == 2.0);
  for (Index b = 0; b < hist.bin_edges.size(); ++b)
    CHECK(std::fmod(hist.bin_edges(b), 2.0) == 0.0);

  const auto psi = build_z_basis_state<double>(6, 1, FlipCase::exact);
  const auto h = build_hamiltonian(chain_spec(6));
  const Complex energy = psi.dot(h.cast<Complex>() * psi);
  CHECK(std::abs(hist.mean - energy.real()) < 1e-9);
  CHECK(hist.stddev > 0.0);

  const auto shifted = ldos(c, setup.spectrum, 0.5);
  for (Index b = 0; b < shifted.bin_edges.size(); ++b)
    CHECK(std::abs(std::fmod(shifted.bin_edges(b) - 0.5, 2.0)) == 0.0);
}

TEST_CASE("ldos of a single eigenstate is one full bin") {
  const auto setup = chain_setup(3);
  ComplexVectorX<double> c = ComplexVectorX<double>::Zero(8);
  c(5) = Complex(1, 0);
  const auto hist = ldos(c, setup.spectrum);
  Index nonzero = 0, hot = -1;
  for (Index b = 0; b < hist.weights.size(); ++b)
    if (hist.weights(b) != 0.0) {
      ++nonzero;
      hot = b;
    }
  REQUIRE(nonzero == 1);
  CHECK(hist.weights(hot) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hist.bin_edges(hot) <= setup.spectrum.energies(5));
  CHECK(setup.spectrum.energies(5) < hist.bin_edges(hot + 1));
}

TEST_CASE("dos bins are centered and count every eigenstate") {
  const auto two_level = diagonalize(build_hamiltonian(chain_spec(1)));
  const auto hist1 = dos_histogram(two_level);
  REQUIRE(hist1.counts.size() == 1);
  CHECK(hist1.counts(0) == 2);
  CHECK(hist1.bin_edges(0) == -1.0);
  CHECK(hist1.bin_edges(1) == 1.0);

  const auto setup = chain_setup(6);
  const auto hist = dos_histogram(setup.spectrum);
  CHECK(hist.counts.sum() == 64);
  CHECK(std::abs(setup.spectrum.energies.mean()) < 1e-9);
}

TEST_CASE("skewness of hand-computed samples") {
  VectorX<double> sym(3);
  sym << -1, 0, 1;
  CHECK(std::abs(skewness(sym)) < 1e-14);

  VectorX<double> tail(4);
  tail << 0, 0, 0, 1;
  CHECK(skewness(tail) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));

  VectorX<double> one(1);
  one << 3;
  CHECK_THROWS_AS(skewness(one), std::invalid_argument);
  VectorX<double> flat(3);
  flat << 2, 2, 2;
  CHECK_THROWS_AS(skewness(flat), std::invalid_argument);
}

TEST_CASE("time signal matches the brute-force dephasing sum") {
  const auto setup = chain_setup(4);
  VectorX<double> times(4);
  times << 0, 0.5, 1, 2.7;
  // the y-tilted axis produces genuinely complex amplitudes, exercising the
  // split-matrix path; z stays on the real fast path
  for (const auto dir : {Direction<double>::z(), Direction<double>{0.7, 1.3}}) {
    const auto c = chain_coefficients(setup, 4, 1, FlipCase::exact, dir);
    const auto signal = time_signal(c, setup.m_energy, setup.spectrum, times);
    REQUIRE(signal.values.size() == 4);
    CHECK(signal.delta_M == 8.0);
    for (Index t = 0; t < times.size(); ++t) {
      const Complex m_ref =
          oracle::time_value(c, setup.m_energy, setup.spectrum.energies, times(t));
      const Complex g_ref = (m_ref - Complex(signal.diagonal_average, 0)) / 8.0;
      CHECK(std::abs(signal.values(t) - g_ref) < 1e-12);
      CHECK(std::abs(signal.values(t).imag()) < 1e-10);
      CHECK(std::abs(signal.values(t)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("time signal matches matrix-exponential evolution") {
  const int n = 4;
  const auto setup = chain_setup(n);
  const auto oracle_h = oracle::hamiltonian(n, 1, 1.4, 0.5, 0.01);
  const auto mz = magnetization_z_diagonal<double>(n);

  CoarseGrainedSpec<double> cg;
  cg.n = n;
  cg.k = 1;
  cg.flip_case = FlipCase::at_most;
  cg.direction = Direction<double>::x();
  const auto psi = build_initial_state(cg);
  const auto c = expand_in_energy_basis(psi, setup.spectrum);

  VectorX<double> times = VectorX<double>::LinSpaced(9, 0.0, 4.0);
  const auto signal = time_signal(c, setup.m_energy, setup.spectrum, times);

  const Complex e0 = psi.dot(oracle_h * psi);
  for (Index t = 0; t < times.size(); ++t) {
    const auto psi_t = oracle::evolve_expm(oracle_h, psi, times(t));
    CHECK(std::abs(psi_t.squaredNorm() - 1.0) < 1e-10);
    CHECK(std::abs(psi_t.dot(oracle_h * psi_t) - e0) < 1e-9);
    const double m_t = psi_t.cwiseAbs2().dot(mz);
    const double g_ref = (m_t - signal.diagonal_average) / signal.delta_M;
    CHECK(std::abs(signal.values(t) - Complex(g_ref, 0)) < 1e-8);
  }
}

TEST_CASE("stationary and single-site signals are flat") {
  const auto setup = chain_setup(3);
  ComplexVectorX<double> c = ComplexVectorX<double>::Zero(8);
  c(2) = Complex(1, 0);
  VectorX<double> times = VectorX<double>::LinSpaced(5, 0.0, 10.0);
  const auto signal = time_signal(c, setup.m_energy, setup.spectrum, times);
  CHECK(signal.values.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(signal.time_average_abs2 < 1e-28);

  // one site: the magnetization commutes with the field-only chain, so g is
  // frozen at its initial value for any state
  const auto one = chain_setup(1);
  CoarseGrainedSpec<double> cg;
  cg.n = 1;
  cg.k = 1;
  cg.flip_case = FlipCase::at_most;
  cg.direction = Direction<double>{0.7, 1.3};
  const auto c1 = expand_in_energy_basis(build_initial_state(cg), one.spectrum);
  const auto flat = time_signal(c1, one.m_energy, one.spectrum, times);
  for (Index t = 1; t < times.size(); ++t)
    CHECK(std::abs(flat.values(t) - flat.values(0)) < 1e-12);
}

TEST_CASE("time signal validates its inputs") {
  const auto setup = chain_setup(3);
  const auto c = chain_coefficients(setup, 3, 1, FlipCase::exact);
  VectorX<double> good = VectorX<double>::LinSpaced(3, 0.0, 1.0);

  VectorX<double> descending(3);
  descending << 0, 1, 0.5;
  CHECK_THROWS_AS(time_signal(c, setup.m_energy, setup.spectrum, descending),
                  std::invalid_argument);
  VectorX<double> infinite(2);
  infinite << 0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(time_signal(c, setup.m_energy, setup.spectrum, infinite),
                  std::invalid_argument);
  const ComplexVectorX<double> short_state = c.head(4);
  CHECK_THROWS_AS(time_signal(short_state, setup.m_energy, setup.spectrum, good),
                  std::invalid_argument);
  CHECK_THROWS_AS(time_signal(c, setup.m_energy, setup.spectrum, good, Index{4}),
                  resource_limit_error);
  ComplexVectorX<double> unnormalized = c * 1.2;
  CHECK_THROWS_AS(time_signal(unnormalized, setup.m_energy, setup.spectrum, good),
                  std::invalid_argument);
}

TEST_CASE("two-level equilibration time is pi over the gap") {
  Spectrum<double> sp;
  sp.energies = VectorX<double>(2);
  sp.energies << -0.5, 1.5;
  sp.eigenvectors = MatrixX<double>::Identity(2, 2);
  MatrixX<double> me(2, 2);
  me << 0.3, 0.4, 0.4, -0.1;
  ComplexVectorX<double> c(2);
  c << Complex(1 / std::sqrt(2.0), 0), Complex(1 / std::sqrt(2.0), 0);
  CHECK(equilibration_time(c, me, sp) == doctest::Approx(EIGEN_PI / 2.0).epsilon(1e-12));
}

TEST_CASE("equilibration time matches the pair-enumeration oracle") {
  for (int n : {5, 6}) {
    const auto setup = chain_setup(n);
    for (const auto dir : {Direction<double>::z(), Direction<double>{0.7, 1.3}}) {
      const auto c = chain_coefficients(setup, n, 1, FlipCase::exact, dir);
      const double lib = equilibration_time(c, setup.m_energy, setup.spectrum);
      const double ref =
          oracle::equilibration_time(c, setup.m_energy, setup.spectrum.energies);
      CHECK(lib == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("equilibration time is invariant under observable rescaling") {
  const auto setup = chain_setup(5);
  const auto c = chain_coefficients(setup, 5, 2, FlipCase::at_most);
  const double base = equilibration_time(c, setup.m_energy, setup.spectrum);
  const MatrixX<double> doubled = 2.0 * setup.m_energy;
  CHECK(equilibration_time(c, doubled, setup.spectrum) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("equilibration time refuses stationary states") {
  const auto setup = chain_setup(3);
  ComplexVectorX<double> c = ComplexVectorX<double>::Zero(8);
  c(1) = Complex(1, 0);
  CHECK_THROWS_AS(equilibration_time(c, setup.m_energy, setup.spectrum), no_dynamics_error);

  // one-site chain: magnetization diagonal in the energy basis, no gaps carry weight
  const auto one = chain_setup(1);
  ComplexVectorX<double> cx(2);
  cx << Complex(1 / std::sqrt(2.0), 0), Complex(1 / std::sqrt(2.0), 0);
  CHECK_THROWS_AS(equilibration_time(cx, one.m_energy, one.spectrum), no_dynamics_error);
}

TEST_CASE("first decay time interpolates the threshold crossing") {
  FluctuationSignal<double> signal;
  signal.times = VectorX<double>::LinSpaced(501, 0.0, 5.0);
  signal.values.resize(501);
  for (Index t = 0; t < 501; ++t)
    signal.values(t) = Complex(std::exp(-signal.times(t)), 0);
  signal.delta_M = 2;

  const double crossing = first_decay_time(signal, std::exp(-2.0));
  CHECK(crossing == doctest::Approx(1.0).epsilon(1e-3));

  FluctuationSignal<double> flat = signal;
  flat.values.setConstant(Complex(0.4, 0));
  CHECK_THROWS_AS(first_decay_time(flat, 0.1), never_crossed_error);

  CHECK_THROWS_AS(first_decay_time(signal, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(first_decay_time(signal, 1.0), std::invalid_argument);

  FluctuationSignal<double> dead = signal;
  dead.values.setZero();
  CHECK_THROWS_AS(first_decay_time(dead, 0.1), std::invalid_argument);
}

TEST_CASE("fluctuation bound holds on a long window") {
  const int n = 6;
  const auto setup = chain_setup(n);
  const auto c = chain_coefficients(setup, n, 1, FlipCase::exact);
  const double d_eff = effective_dimension(c);

  VectorX<double> times = VectorX<double>::LinSpaced(2000, 0.0, 1000.0);
  const auto signal = time_signal(c, setup.m_energy, setup.spectrum, times);
  const auto report = check_fluctuation_bound(signal, d_eff, static_cast<double>(n));

  CHECK(report.bound_norm == doctest::Approx(n / d_eff).epsilon(1e-14));
  CHECK(report.bound_norm_sq == doctest::Approx(n * n / d_eff).epsilon(1e-14));
  CHECK(report.time_avg_sq_fluctuation <= report.bound_norm_sq);
  CHECK_FALSE(report.violates_norm_sq);

  FluctuationSignal<double> still;
  still.times = times;
  still.values = ComplexVectorX<double>::Zero(times.size());
  still.delta_M = 2.0 * n;
  still.time_average_abs2 = 0;
  const auto silent = check_fluctuation_bound(still, d_eff, static_cast<double>(n));
  CHECK(silent.time_avg_sq_fluctuation == 0.0);
  CHECK_FALSE(silent.violates_norm);
  CHECK_FALSE(silent.violates_norm_sq);

  CHECK_THROWS_AS(check_fluctuation_bound(signal, 0.5, static_cast<double>(n)),
                  std::invalid_argument);
}

TEST_CASE("time average of the signal itself vanishes on long windows") {
  const int n = 6;
  const auto setup = chain_setup(n);
  const auto c = chain_coefficients(setup, n, 1, FlipCase::exact);
  VectorX<double> probe(1);
  probe << 0.0;
  const auto g0 = time_signal(c, setup.m_energy, setup.spectrum, probe).values(0);
  REQUIRE(std::abs(g0) > 0.01);

  VectorX<double> times = VectorX<double>::LinSpaced(10001, 0.0, 1e4);
  const auto signal = time_signal(c, setup.m_energy, setup.spectrum, times);
  CHECK(std::abs(signal.values.mean()) < std::abs(g0) / 100.0);
}

TEST_CASE("power-law fit recovers synthetic scaling") {
  std::vector<std::pair<double, double>> points;
  for (double d : {4.0, 8.0, 16.0, 32.0, 64.0}) points.push_back({d, 2.0 * std::pow(d, 0.9)});
  const auto fit = fit_power_law(points);
  CHECK(fit.exponent == doctest::Approx(0.9).epsilon(1e-10));
  CHECK(fit.prefactor == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.point_count == 5);

  std::vector<std::pair<double, double>> flat{{2, 3}, {4, 3}, {8, 3}};
  CHECK(std::abs(fit_power_law(flat).exponent) < 1e-14);

  std::vector<std::pair<double, double>> two{{2, 3}, {4, 5}};
  CHECK_THROWS_AS(fit_power_law(two), insufficient_data_error);
  std::vector<std::pair<double, double>> negative{{2, 3}, {4, -5}, {8, 9}};
  CHECK_THROWS_AS(fit_power_law(negative), std::invalid_argument);
  std::vector<std::pair<double, double>> vertical{{2, 3}, {2, 5}, {2, 9}};
  CHECK_THROWS_AS(fit_power_law(vertical), std::invalid_argument);
}

TEST_CASE("widening the flip budget does not shrink the effective dimension") {
  for (int n : {6, 7}) {
    const auto setup = chain_setup(n);
    for (int k = 1; k <= 3; ++k) {
      const double da = effective_dimension(chain_coefficients(setup, n, k, FlipCase::exact));
      const double db = effective_dimension(chain_coefficients(setup, n, k, FlipCase::at_most));
      CHECK(db >= da);
    }
  }
}
