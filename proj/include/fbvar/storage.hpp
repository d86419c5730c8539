#pragma once

#include "fbvar/gibbs.hpp"

#include <cstdint>
#include <string>

namespace fbvar {

/// draws.bin layout (little-endian, version 1):
///
///   char[8]  magic "FBVARDRW"
///   u32      version
///   u32      N, m, r, p, T
///   u32      flags (bit 0 tv loadings, 1 stochastic volatility, 2 Student-t, 3 truncated run)
///   u32      number of tv coefficients C
///   u64      number of draws D
///   u64      payload size in bytes
///   u64      FNV-1a 64 checksum of the payload
///   u32[2C]  (row, shock) of each tv coefficient
///   payload  D records of f64, in order:
///              phi (N x (1+Np), row-major), loadings (N x r, row-major),
///              tv paths (C x T, row-major), q (C), w (m),
///              macro variances (n x T row-major with stochastic volatility, n otherwise),
///              omega2 (n, stochastic volatility only), dof (n, Student-t only),
///              spectral radius, dof acceptance
inline constexpr char kDrawsMagic[8] = {'F', 'B', 'V', 'A', 'R', 'D', 'R', 'W'};
inline constexpr std::uint32_t kDrawsVersion = 1;

std::uint64_t fnv1a64(const void* data, std::size_t size);

void write_draws(const std::string& path, const PosteriorDraws& draws);
/// Throws IntegrityError on a bad magic, version, size or checksum.
PosteriorDraws read_draws(const std::string& path);

/// Long-format CSV: draw,param,i,j,t,value (j and t empty when unused).
void write_draws_csv(const std::string& path, const PosteriorDraws& draws);

/// Number of doubles in one stored record.
std::size_t record_length(const DrawLayout& layout);

}  // namespace fbvar
