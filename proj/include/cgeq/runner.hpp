#pragma once

#include <iosfwd>
#include <vector>

#include "cgeq/cache.hpp"
#include "cgeq/config.hpp"

namespace cgeq {

struct SweepPoint {
  int n = 0;
  int k = 0;
  FlipCase flip_case = FlipCase::exact;
  DirectionSpec direction;
};

// Scaling sweeps keep only n > 2k, where the state support grows with n for
// both flip cases; dynamic runs keep every k <= n. Points are ordered
// n -> k -> case -> direction so output files are reproducible.
std::vector<SweepPoint> enumerate_scaling_points(const SweepConfig& config);
std::vector<SweepPoint> enumerate_dynamic_points(const SweepConfig& config);

// Each runner writes CSV files into config.out_dir and returns a process exit
// code. Points that hit a resource cap or have no usable dynamics are logged
// to `log` and skipped; unexpected failures propagate as exceptions.
int run_deff_sweep(const SweepConfig& config, SpectrumStore& store, std::ostream& log);
int run_ldos(const SweepConfig& config, SpectrumStore& store, std::ostream& log);
int run_evolution(const SweepConfig& config, SpectrumStore& store, std::ostream& log);
int run_teq(const SweepConfig& config, SpectrumStore& store, std::ostream& log);
int run_validate(const ConfigResult& result, std::ostream& out);

}  // namespace cgeq
