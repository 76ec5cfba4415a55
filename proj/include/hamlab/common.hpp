#pragma once

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hamlab {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Tolerances used by the invariant checks across the library.
namespace tol {
inline constexpr double hermitian_input = 1e-12;    // per-element, on term blocks
inline constexpr double hermitian_assembled = 1e-10;
inline constexpr double unitary_gate = 1e-12;
inline constexpr double projector_input = 1e-10;
inline constexpr double eigen_residual = 1e-8;      // scaled by max(1, norm bound)
inline constexpr double basis_orthonormal = 1e-8;
inline constexpr double subspace_commutator = 1e-7;
}  // namespace tol

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, blocks, indices).
struct SchemaError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
// Requested full-space dimension exceeds the configured cap.
struct DimensionCapError : Error {
  using Error::Error;
};
// Iterative eigensolver failed to reach the requested residual.
struct ConvergenceError : Error {
  using Error::Error;
};
// Ground expectation requested on a degenerate ground space.
struct DegenerateGroundError : Error {
  using Error::Error;
};
// Strict-mode construction rejected a promise-violating instance.
struct PromiseConstructionError : Error {
  using Error::Error;
};

// Dense storage is used up to this full-space dimension, sparse above.
inline constexpr Index kDenseDimensionLimit = Index(1) << 12;

inline constexpr Index kDefaultDimensionCap = Index(1) << 14;

// Hard cap on full-space dimension; HAMLAB_DIM_CAP overrides the default.
inline Index dimension_cap() {
  if (const char* env = std::getenv("HAMLAB_DIM_CAP")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 1) return static_cast<Index>(v);
  }
  return kDefaultDimensionCap;
}

// FNV-1a, used for stable instance digests (std::hash is not portable).
inline std::uint64_t fnv1a(const void* data, std::size_t size,
                           std::uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s,
                           std::uint64_t seed = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), seed);
}

inline std::string hex_digest(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

inline const char* version() { return "0.1.0"; }

}  // namespace hamlab
