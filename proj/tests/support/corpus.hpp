#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spectral_forge.hpp"

namespace corpus {

struct Entry {
  std::string label;
  spectral_forge::Matrix t;
  std::vector<spectral_forge::Complex> spectrum;
  bool hermitian = false;
  double scale = 1.0;
};

/// Seeded test corpus: `normal` random normal matrices followed by
/// `hermitian` random Hermitian ones, sizes uniform in [2, 64], spectral
/// radii log-uniform in [1e-2, 1e2].
inline std::vector<Entry> build(std::size_t normal = 200, std::size_t hermitian = 40,
                                std::uint64_t base_seed = 20240601) {
  spectral_forge::Rng meta(base_seed);
  std::vector<Entry> out;
  for (std::size_t k = 0; k < normal + hermitian; ++k) {
    const auto n = static_cast<std::size_t>(2 + static_cast<std::size_t>(meta.uniform() * 63.0));
    const double scale = std::pow(10.0, -2.0 + 4.0 * meta.uniform());
    const std::uint64_t seed = base_seed + 1000 + k;
    const bool herm = k >= normal;
    auto g = spectral_forge::random_normal_with_spectrum(n, scale, seed, herm);
    out.push_back({(herm ? "hermitian#" : "normal#") + std::to_string(k) + " n=" + std::to_string(n),
                   std::move(g.matrix), std::move(g.spectrum), herm, scale});
  }
  return out;
}

}  // namespace corpus
