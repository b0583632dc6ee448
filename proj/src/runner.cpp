#include "cgeq/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>

#include "cgeq/analysis.hpp"
#include "cgeq/csv.hpp"
#include "cgeq/observables.hpp"
#include "cgeq/states.hpp"

namespace cgeq {

namespace {

HamiltonianSpec<double> chain_spec(const SweepConfig& config, int n) {
  return {.n = n, .J = config.J, .Jy = config.Jy, .Jz = config.Jz, .hz = config.hz};
}

VectorX<double> time_grid(const SweepConfig& config) {
  VectorX<double> times(config.time_samples);
  if (config.time_samples == 1) {
    times(0) = config.time_start;
    return times;
  }
  const double step =
      (config.time_end - config.time_start) / static_cast<double>(config.time_samples - 1);
  for (int t = 0; t < config.time_samples; ++t) times(t) = config.time_start + step * t;
  return times;
}

ComplexVectorX<double> energy_coefficients(const SweepConfig& config, const SweepPoint& pt,
                                           const Spectrum<double>& spectrum) {
  const auto state = build_initial_state<double>(
      {.n = pt.n, .k = pt.k, .flip_case = pt.flip_case, .direction = pt.direction.axis},
      config.dim_cap);
  return expand_in_energy_basis(state, spectrum);
}

std::string point_label(const SweepPoint& pt) {
  return "n=" + std::to_string(pt.n) + " k=" + std::to_string(pt.k) +
         " case=" + case_label(pt.flip_case) + " direction=" + pt.direction.label;
}

std::string csv_path(const SweepConfig& config, const std::string& name) {
  return (std::filesystem::path(config.out_dir) / name).string();
}

// Runs fn(0..count-1) across up to `threads` workers. Points land in
// preallocated slots, so the later serial write phase sees a fixed order no
// matter which thread computed what. The first unexpected exception is
// rethrown after all workers drain.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (error) std::rethrow_exception(error);
}

std::vector<SweepPoint> enumerate_points(const SweepConfig& config, bool scaling) {
  std::vector<SweepPoint> points;
  for (int n = config.n_min; n <= config.n_max; ++n)
    for (int k = std::max(config.k_min, 0); k <= config.k_max; ++k) {
      if (scaling ? n <= 2 * k : k > n) continue;
      for (const auto flip_case : config.cases)
        for (const auto& direction : config.directions)
          points.push_back({n, k, flip_case, direction});
    }
  return points;
}

}  // namespace

std::vector<SweepPoint> enumerate_scaling_points(const SweepConfig& config) {
  return enumerate_points(config, true);
}

std::vector<SweepPoint> enumerate_dynamic_points(const SweepConfig& config) {
  return enumerate_points(config, false);
}

int run_deff_sweep(const SweepConfig& config, SpectrumStore& store, std::ostream& log) {
  std::filesystem::create_directories(config.out_dir);
  const auto points = enumerate_scaling_points(config);

  struct Slot {
    bool ok = false;
    std::string skip;
    std::int64_t dim = 0;
    double d_eff = 0;
  };
  std::vector<Slot> slots(points.size());

  parallel_for(points.size(), config.threads, [&](std::size_t i) {
    Slot& slot = slots[i];
    try {
      const auto spectrum = store.spectrum(chain_spec(config, points[i].n));
      const auto c = energy_coefficients(config, points[i], *spectrum);
      slot.dim = spectrum->dim();
      slot.d_eff = effective_dimension(c);
      slot.ok = true;
    } catch (const resource_limit_error& err) {
      slot.skip = err.what();
    }
  });

  CsvTable table;
  table.comments = {
      "effective dimension d_eff = 1 / sum_k p_k^2 of the initial state over energy eigenstates",
      "case a: exactly k spins opposite the preparation direction; case b: at most k"};
  table.header = {"n", "D", "k", "case", "direction", "d_eff"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!slots[i].ok) {
      log << "skip " << point_label(points[i]) << ": " << slots[i].skip << "\n";
      continue;
    }
    table.rows.push_back({format_number(std::int64_t{points[i].n}), format_number(slots[i].dim),
                          format_number(std::int64_t{points[i].k}),
                          case_label(points[i].flip_case), points[i].direction.label,
                          format_number(slots[i].d_eff)});
  }
  write_csv(csv_path(config, "deff_sweep.csv"), table);

  CsvTable fits;
  fits.comments = {"least-squares fits d_eff ~ prefactor * D^exponent, one row per curve",
                   "residual is the rms misfit in log-log space"};
  fits.header = {"k", "case", "direction", "exponent", "prefactor", "residual", "points"};
  for (int k = std::max(config.k_min, 0); k <= config.k_max; ++k)
    for (const auto flip_case : config.cases)
      for (const auto& direction : config.directions) {
        std::vector<std::pair<double, double>> curve;
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (points[i].k != k || points[i].flip_case != flip_case ||
              points[i].direction.label != direction.label || !slots[i].ok)
            continue;
          curve.emplace_back(static_cast<double>(slots[i].dim), slots[i].d_eff);
        }
        if (curve.empty()) continue;
        if (curve.size() < 3) {
          log << "skip fit k=" << k << " case=" << case_label(flip_case) << " direction="
              << direction.label << ": only " << curve.size() << " point(s)\n";
          continue;
        }
        const auto fit = fit_power_law(curve);
        fits.rows.push_back({format_number(std::int64_t{k}), case_label(flip_case),
                             direction.label, format_number(fit.exponent),
                             format_number(fit.prefactor), format_number(fit.residual),
                             format_number(std::int64_t{fit.point_count})});
      }
  write_csv(csv_path(config, "deff_fits.csv"), fits);
  return 0;
}

int run_ldos(const SweepConfig& config, SpectrumStore& store, std::ostream& log) {
  if (config.n_min != config.n_max || config.k_min != config.k_max ||
      config.cases.size() != 1 || config.directions.size() != 1) {
    log << "error: ldos wants a single point: set n_min = n_max and k_min = k_max, "
           "and pick one case and one direction\n";
    return 1;
  }
  const SweepPoint pt{config.n_max, config.k_max, config.cases.front(),
                      config.directions.front()};
  if (pt.k > pt.n) {
    log << "error: ldos: k must not exceed n\n";
    return 1;
  }

  std::filesystem::create_directories(config.out_dir);
  try {
    const auto spectrum = store.spectrum(chain_spec(config, pt.n));
    const auto c = energy_coefficients(config, pt, *spectrum);
    const auto state_hist = ldos(c, *spectrum);
    const auto level_hist = dos_histogram(*spectrum);

    CsvTable state_table;
    state_table.comments = {
        "energy distribution of the initial state " + point_label(pt),
        "width-2 bins, weight = summed |c_k|^2 over eigenstates in the bin",
        "mean " + format_number(state_hist.mean) + ", stddev " +
            format_number(state_hist.stddev)};
    state_table.header = {"bin_lo", "bin_hi", "weight"};
    for (Index b = 0; b < state_hist.weights.size(); ++b)
      state_table.rows.push_back({format_number(state_hist.bin_edges(b)),
                                  format_number(state_hist.bin_edges(b + 1)),
                                  format_number(state_hist.weights(b))});
    write_csv(csv_path(config, "ldos.csv"), state_table);

    CsvTable level_table;
    level_table.comments = {"eigenvalue counts in width-2 bins centered on zero"};
    level_table.header = {"bin_lo", "bin_hi", "count"};
    for (Index b = 0; b < level_hist.counts.size(); ++b)
      level_table.rows.push_back({format_number(level_hist.bin_edges(b)),
                                  format_number(level_hist.bin_edges(b + 1)),
                                  format_number(level_hist.counts(b))});
    write_csv(csv_path(config, "dos.csv"), level_table);
  } catch (const resource_limit_error& err) {
    log << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

int run_evolution(const SweepConfig& config, SpectrumStore& store, std::ostream& log) {
  std::filesystem::create_directories(config.out_dir);
  const auto points = enumerate_dynamic_points(config);
  const auto times = time_grid(config);

  struct Slot {
    bool ok = false;
    std::string skip;
    FluctuationSignal<double> signal;
  };
  std::vector<Slot> slots(points.size());

  parallel_for(points.size(), config.threads, [&](std::size_t i) {
    Slot& slot = slots[i];
    try {
      const auto spec = chain_spec(config, points[i].n);
      const auto spectrum = store.spectrum(spec);
      const auto m_energy = store.magnetization_energy(spec);
      const auto c = energy_coefficients(config, points[i], *spectrum);
      slot.signal = time_signal(c, *m_energy, *spectrum, times, config.dim_cap);
      slot.ok = true;
    } catch (const resource_limit_error& err) {
      slot.skip = err.what();
    }
  });

  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& pt = points[i];
    if (!slots[i].ok) {
      log << "skip " << point_label(pt) << ": " << slots[i].skip << "\n";
      continue;
    }
    const auto& signal = slots[i].signal;
    CsvTable table;
    table.comments = {
        "normalized magnetization fluctuation g(t) = (M(t) - M_bar) / (2 n) for " +
            point_label(pt),
        "M_bar " + format_number(signal.diagonal_average) + ", window average of |g|^2 " +
            format_number(signal.time_average_abs2)};
    table.header = {"t", "re_g", "im_g", "abs2_g"};
    for (Index t = 0; t < signal.times.size(); ++t) {
      const double re = signal.values(t).real(), im = signal.values(t).imag();
      table.rows.push_back({format_number(signal.times(t)), format_number(re),
                            format_number(im), format_number(re * re + im * im)});
    }
    const std::string name = "evolve_n" + std::to_string(pt.n) + "_k" + std::to_string(pt.k) +
                             "_case" + case_label(pt.flip_case) + "_" + pt.direction.label +
                             ".csv";
    write_csv(csv_path(config, name), table);
  }
  return 0;
}

int run_teq(const SweepConfig& config, SpectrumStore& store, std::ostream& log) {
  if (config.directions.size() != 1) {
    log << "error: teq wants exactly one direction; pass --direction or narrow the config\n";
    return 1;
  }
  std::filesystem::create_directories(config.out_dir);
  const auto points = enumerate_dynamic_points(config);
  const auto times = time_grid(config);

  struct Slot {
    bool ok = false;
    std::string skip;
    double t_eq = 0;
    double first_decay = 0;
  };
  std::vector<Slot> slots(points.size());

  parallel_for(points.size(), config.threads, [&](std::size_t i) {
    Slot& slot = slots[i];
    try {
      const auto spec = chain_spec(config, points[i].n);
      const auto spectrum = store.spectrum(spec);
      const auto m_energy = store.magnetization_energy(spec);
      const auto c = energy_coefficients(config, points[i], *spectrum);
      slot.t_eq = equilibration_time(c, *m_energy, *spectrum);
      const auto signal = time_signal(c, *m_energy, *spectrum, times, config.dim_cap);
      slot.first_decay = first_decay_time(signal, config.decay_threshold);
      slot.ok = true;
    } catch (const resource_limit_error& err) {
      slot.skip = err.what();
    } catch (const no_dynamics_error& err) {
      slot.skip = err.what();
    } catch (const never_crossed_error& err) {
      slot.skip = err.what();
    }
  });

  // Near-degenerate spectra make the diagonal-ensemble average (and with it
  // g) depend on the eigenbasis the solver happened to pick; flag them.
  int last_warned_n = -1;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!slots[i].ok || points[i].n == last_warned_n) continue;
    const int n = points[i].n;
    const auto spectrum = store.spectrum(chain_spec(config, n));
    Index close_pairs = 0;
    for (Index j = 1; j < spectrum->dim(); ++j)
      if (spectrum->energies(j) - spectrum->energies(j - 1) <= config.gap_tolerance)
        ++close_pairs;
    if (close_pairs > 0)
      log << "warning: n=" << n << ": " << close_pairs
          << " adjacent energy pair(s) within gap_tolerance "
          << format_number(config.gap_tolerance) << "\n";
    last_warned_n = n;
  }

  CsvTable table;
  table.comments = {
      "equilibration time scale t_eq from spectral moments of the signal, and the first time "
      "|g| falls below decay_threshold * |g(0)|",
      "direction " + config.directions.front().label + ", decay_threshold " +
          format_number(config.decay_threshold)};
  table.header = {"n", "k", "case", "t_eq", "first_decay_time"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!slots[i].ok) {
      log << "skip " << point_label(points[i]) << ": " << slots[i].skip << "\n";
      continue;
    }
    table.rows.push_back({format_number(std::int64_t{points[i].n}),
                          format_number(std::int64_t{points[i].k}),
                          case_label(points[i].flip_case), format_number(slots[i].t_eq),
                          format_number(slots[i].first_decay)});
  }
  write_csv(csv_path(config, "teq.csv"), table);
  return 0;
}

int run_validate(const ConfigResult& result, std::ostream& out) {
  out << "config ok\n" << describe_config(result.config);
  for (const auto& warning : result.warnings)
    out << "warning: " << warning.field << ": " << warning.message << "\n";
  return 0;
}

}  // namespace cgeq
