#pragma once

#include <cmath>
#include <random>

#include "hamlab/common.hpp"

namespace hamlab {

// Deterministic random source. std::normal_distribution is implementation
// defined, so the Gaussian is generated by Box-Muller on raw 53-bit uniforms;
// a stream from a fixed seed is identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t integer(std::uint64_t bound) { return gen_() % bound; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Complex complex_gaussian() { return {gaussian(), gaussian()}; }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline Matrix random_gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.complex_gaussian();
  return m;
}

inline Matrix random_hermitian(Index dim, Rng& rng) {
  Matrix g = random_gaussian_matrix(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

// Haar-ish unitary from the QR of a Gaussian matrix with phase fixing.
inline Matrix random_unitary(Index dim, Rng& rng) {
  Matrix g = random_gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < dim; ++i) {
    Complex d = r(i, i);
    q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1, 0);
  }
  return q;
}

inline Vector random_state(Index dim, Rng& rng) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
  v.normalize();
  return v;
}

// Rank-r orthogonal projector onto a random subspace.
inline Matrix random_projector(Index dim, Index rank, Rng& rng) {
  Matrix g = random_gaussian_matrix(dim, rank, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = Matrix(qr.householderQ()).leftCols(rank);
  return q * q.adjoint();
}

// Hermitian matrix with the prescribed spectrum in a Haar-random eigenbasis.
inline Matrix hermitian_with_spectrum(const RealVector& spectrum, Rng& rng) {
  const Index dim = spectrum.size();
  Matrix u = random_unitary(dim, rng);
  return u * spectrum.asDiagonal() * u.adjoint();
}

}  // namespace hamlab
