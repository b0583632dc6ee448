#include "cgeq/cache.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "cgeq/observables.hpp"

namespace cgeq {

namespace {

constexpr char file_magic[8] = {'C', 'G', 'E', 'Q', 'S', 'P', 'E', 'C'};
constexpr std::uint32_t format_version = 1;

std::uint64_t fnv1a(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 1469598103934665603ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

// Packed parameter block; hashed for file names, compared bitwise on read.
struct ParamBlock {
  std::int32_t n = 0;
  std::int32_t pad = 0;
  double params[4] = {0, 0, 0, 0};
};
static_assert(sizeof(ParamBlock) == 40);

ParamBlock param_block(const HamiltonianSpec<double>& spec) {
  ParamBlock block;
  block.n = spec.n;
  block.params[0] = spec.J;
  block.params[1] = spec.Jy;
  block.params[2] = spec.Jz;
  block.params[3] = spec.hz;
  return block;
}

template <typename T>
bool read_pod(std::istream& in, T& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  return in.gcount() == sizeof value;
}

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

}  // namespace

std::string spectrum_cache_path(const std::string& dir, const HamiltonianSpec<double>& spec) {
  const ParamBlock block = param_block(spec);
  const std::uint64_t hash = fnv1a(&block, sizeof block);
  char name[64];
  std::snprintf(name, sizeof name, "spectrum_n%d_%016llx.bin", spec.n,
                static_cast<unsigned long long>(hash));
  return (std::filesystem::path(dir) / name).string();
}

bool read_cached_spectrum(const std::string& path, const HamiltonianSpec<double>& spec,
                          Spectrum<double>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;

  char magic[sizeof file_magic];
  in.read(magic, sizeof magic);
  if (in.gcount() != sizeof magic || std::memcmp(magic, file_magic, sizeof magic) != 0)
    return false;

  std::uint32_t version = 0;
  if (!read_pod(in, version) || version != format_version) return false;

  ParamBlock stored;
  const ParamBlock want = param_block(spec);
  if (!read_pod(in, stored) || std::memcmp(&stored, &want, sizeof stored) != 0) return false;

  std::int64_t dim = 0;
  if (!read_pod(in, dim) || dim != static_cast<std::int64_t>(spec.dim())) return false;

  Spectrum<double> loaded;
  loaded.energies.resize(dim);
  loaded.eigenvectors.resize(dim, dim);
  in.read(reinterpret_cast<char*>(loaded.energies.data()),
          static_cast<std::streamsize>(dim * sizeof(double)));
  in.read(reinterpret_cast<char*>(loaded.eigenvectors.data()),
          static_cast<std::streamsize>(dim * dim * sizeof(double)));
  if (!in) return false;
  if (in.peek() != std::char_traits<char>::eof()) return false;

  out = std::move(loaded);
  return true;
}

void write_cached_spectrum(const std::string& path, const HamiltonianSpec<double>& spec,
                           const Spectrum<double>& spectrum) {
  if (spectrum.dim() != spec.dim())
    throw std::invalid_argument("write_cached_spectrum: spectrum does not match spec dimension");

  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());

  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));

  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");

    const ParamBlock block = param_block(spec);
    const std::int64_t dim = spectrum.dim();
    out.write(file_magic, sizeof file_magic);
    write_pod(out, format_version);
    write_pod(out, block);
    write_pod(out, dim);
    out.write(reinterpret_cast<const char*>(spectrum.energies.data()),
              static_cast<std::streamsize>(dim * sizeof(double)));
    out.write(reinterpret_cast<const char*>(spectrum.eigenvectors.data()),
              static_cast<std::streamsize>(dim * dim * sizeof(double)));
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

std::string SpectrumStore::disk_dir_from_env() {
  const char* dir = std::getenv(cache_dir_env);
  return dir ? std::string(dir) : std::string();
}

SpectrumStore::SpectrumStore(Index dim_cap, std::string disk_dir)
    : dim_cap_(dim_cap), disk_dir_(std::move(disk_dir)) {}

std::size_t SpectrumStore::KeyHash::operator()(const Key& key) const {
  const ParamBlock block =
      param_block(HamiltonianSpec<double>{key.n, key.J, key.Jy, key.Jz, key.hz});
  return static_cast<std::size_t>(fnv1a(&block, sizeof block));
}

SpectrumStore::Entry& SpectrumStore::entry_for(const HamiltonianSpec<double>& spec) {
  const Key key{spec.n, spec.J, spec.Jy, spec.Jz, spec.hz};
  std::scoped_lock lock(mutex_);
  auto& slot = entries_[key];
  if (!slot) slot = std::make_unique<Entry>();
  return *slot;
}

std::shared_ptr<const Spectrum<double>> SpectrumStore::spectrum(
    const HamiltonianSpec<double>& spec) {
  validate_spec(spec);
  check_dim_cap(spec.n, dim_cap_, "SpectrumStore::spectrum");

  Entry& entry = entry_for(spec);
  std::scoped_lock lock(entry.mutex);
  if (entry.spectrum) return entry.spectrum;

  if (!disk_dir_.empty()) {
    Spectrum<double> cached;
    if (read_cached_spectrum(spectrum_cache_path(disk_dir_, spec), spec, cached)) {
      entry.spectrum = std::make_shared<const Spectrum<double>>(std::move(cached));
      return entry.spectrum;
    }
  }

  auto computed =
      std::make_shared<const Spectrum<double>>(diagonalize(build_hamiltonian(spec, dim_cap_)));
  if (!disk_dir_.empty()) {
    try {
      write_cached_spectrum(spectrum_cache_path(disk_dir_, spec), spec, *computed);
    } catch (const std::exception&) {
      // best effort; keep the in-memory result
    }
  }
  entry.spectrum = std::move(computed);
  return entry.spectrum;
}

std::shared_ptr<const MatrixX<double>> SpectrumStore::magnetization_energy(
    const HamiltonianSpec<double>& spec) {
  const auto spec_spectrum = spectrum(spec);
  Entry& entry = entry_for(spec);
  std::scoped_lock lock(entry.mutex);
  if (entry.m_energy) return entry.m_energy;
  entry.m_energy = std::make_shared<const MatrixX<double>>(
      to_energy_basis(magnetization_z_diagonal<double>(spec.n), *spec_spectrum));
  return entry.m_energy;
}

}  // namespace cgeq
