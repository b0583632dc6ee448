#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "cgeq/hamiltonian.hpp"
#include "cgeq/types.hpp"

namespace cgeq {

// Environment variable naming a directory for on-disk spectrum reuse.
inline constexpr const char* cache_dir_env = "CGEQ_CACHE_DIR";

std::string spectrum_cache_path(const std::string& dir, const HamiltonianSpec<double>& spec);

// Returns false on any mismatch (missing file, wrong format version, or
// parameters that are not bit-identical to `spec`).
bool read_cached_spectrum(const std::string& path, const HamiltonianSpec<double>& spec,
                          Spectrum<double>& out);

// Atomic write (temp file + rename). Throws std::runtime_error on I/O failure.
void write_cached_spectrum(const std::string& path, const HamiltonianSpec<double>& spec,
                           const Spectrum<double>& spectrum);

// Thread-safe memoizing store for spectra and for the z magnetization in the
// energy eigenbasis. Each parameter set is computed once and shared. When
// disk_dir is non-empty, spectra are persisted there and reused across runs;
// disk I/O failures fall back to in-memory computation.
class SpectrumStore {
 public:
  explicit SpectrumStore(Index dim_cap = default_dim_cap,
                         std::string disk_dir = disk_dir_from_env());

  static std::string disk_dir_from_env();

  std::shared_ptr<const Spectrum<double>> spectrum(const HamiltonianSpec<double>& spec);
  std::shared_ptr<const MatrixX<double>> magnetization_energy(const HamiltonianSpec<double>& spec);

  Index dim_cap() const { return dim_cap_; }
  const std::string& disk_dir() const { return disk_dir_; }

 private:
  struct Key {
    int n;
    double J, Jy, Jz, hz;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& key) const;
  };
  struct Entry {
    std::mutex mutex;
    std::shared_ptr<const Spectrum<double>> spectrum;
    std::shared_ptr<const MatrixX<double>> m_energy;
  };

  Entry& entry_for(const HamiltonianSpec<double>& spec);

  Index dim_cap_;
  std::string disk_dir_;
  std::mutex mutex_;
  std::unordered_map<Key, std::unique_ptr<Entry>, KeyHash> entries_;
};

}  // namespace cgeq
