#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hamlab/common.hpp"
#include "hamlab/rng.hpp"

namespace hamlab {

// Block Lanczos with full reorthogonalization for the lowest eigenvalues of
// a Hermitian operator given by its matvec. The full Krylov basis is kept
// (desk-scale dimensions), so the projected problem is an exact
// Rayleigh-Ritz step at every iteration and the method degrades gracefully
// into a full diagonalization when the basis exhausts the space.
//
// Runs are deterministic for a fixed seed: the start block and every restart
// direction come from the seeded generator. Eigenvalue multiplicities above
// the block size are resolved only once the basis grows past them, which the
// generic random start makes overwhelmingly likely at these sizes.
template <typename Scalar>
struct BlockLanczosResult {
  Eigen::VectorXd eigenvalues;  // ascending, k entries
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;
  Eigen::VectorXd residuals;
  int iterations = 0;
  bool converged = false;
};

template <typename Scalar>
struct BlockLanczosOptions {
  int block_size = 2;
  double residual_tol = 1e-10;
  std::uint64_t seed = 1;
  int max_basis = 0;  // 0: grow until the full space if needed
};

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> seeded_start_block(
    Index dim, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v(dim, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < dim; ++i) {
      if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
        v(i, j) = Scalar(rng.gaussian(), rng.gaussian());
      else
        v(i, j) = Scalar(rng.gaussian());
    }
  return v;
}

}  // namespace detail

template <typename Scalar, typename MatVec>
BlockLanczosResult<Scalar> block_lanczos_lowest(
    const MatVec& matvec, Index dim, int k,
    const BlockLanczosOptions<Scalar>& opts = {}) {
  using MatrixS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  if (k < 1) throw ValidationError("k must be >= 1");
  if (k > dim) throw ValidationError("k exceeds the space dimension");
  const int block = std::max(1, std::min<int>(opts.block_size, int(dim)));
  const Index max_basis =
      opts.max_basis > 0 ? std::min<Index>(opts.max_basis, dim) : dim;

  Rng restart_rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  MatrixS basis(dim, 0);    // orthonormal Krylov basis Q
  MatrixS h_basis(dim, 0);  // H Q, column for column

  // Orthonormalizes `cand` against basis and itself; rank-deficient columns
  // are replaced by fresh random directions so the block stays full.
  auto append_block = [&](MatrixS cand) -> bool {
    MatrixS fresh(dim, 0);
    for (Index c = 0; c < cand.cols(); ++c) {
      VectorS v = cand.col(c);
      for (int pass = 0; pass < 2; ++pass) {
        if (basis.cols() > 0) v -= basis * (basis.adjoint() * v).eval();
        if (fresh.cols() > 0) v -= fresh * (fresh.adjoint() * v).eval();
      }
      double norm = v.norm();
      int tries = 0;
      while (norm < 1e-10 && tries < 5) {
        if (basis.cols() + fresh.cols() >= dim) break;
        for (Index i = 0; i < dim; ++i) {
          if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
            v(i) = Scalar(restart_rng.gaussian(), restart_rng.gaussian());
          else
            v(i) = Scalar(restart_rng.gaussian());
        }
        for (int pass = 0; pass < 2; ++pass) {
          if (basis.cols() > 0) v -= basis * (basis.adjoint() * v).eval();
          if (fresh.cols() > 0) v -= fresh * (fresh.adjoint() * v).eval();
        }
        norm = v.norm();
        ++tries;
      }
      if (norm < 1e-10) continue;  // space exhausted
      v /= norm;
      fresh.conservativeResize(Eigen::NoChange, fresh.cols() + 1);
      fresh.col(fresh.cols() - 1) = v;
      if (basis.cols() + fresh.cols() >= max_basis) break;
    }
    if (fresh.cols() == 0) return false;
    const Index old = basis.cols();
    basis.conservativeResize(Eigen::NoChange, old + fresh.cols());
    basis.rightCols(fresh.cols()) = fresh;
    h_basis.conservativeResize(Eigen::NoChange, old + fresh.cols());
    for (Index c = 0; c < fresh.cols(); ++c)
      h_basis.col(old + c) = matvec(VectorS(fresh.col(c)));
    return true;
  };

  append_block(detail::seeded_start_block<Scalar>(dim, block, opts.seed));

  BlockLanczosResult<Scalar> result;
  while (true) {
    ++result.iterations;
    const Index m = basis.cols();
    // Rayleigh-Ritz on the accumulated basis.
    MatrixS projected = basis.adjoint() * h_basis;
    projected = Scalar(0.5) * (projected + MatrixS(projected.adjoint()));
    Eigen::SelfAdjointEigenSolver<MatrixS> es(projected);
    if (m >= k) {
      const auto ritz_values = es.eigenvalues().head(k);
      MatrixS ritz_vectors = basis * es.eigenvectors().leftCols(k);
      Eigen::VectorXd res(k);
      for (int i = 0; i < k; ++i) {
        VectorS hv = h_basis * es.eigenvectors().col(i);
        res(i) = (hv - ritz_values(i) * ritz_vectors.col(i)).norm();
      }
      const bool basis_full = m >= max_basis;
      if (res.maxCoeff() <= opts.residual_tol || basis_full) {
        result.eigenvalues = ritz_values;
        result.eigenvectors = std::move(ritz_vectors);
        result.residuals = std::move(res);
        result.converged = res.maxCoeff() <= opts.residual_tol || m >= dim;
        return result;
      }
    }
    // Next block: H times the newest basis block, reorthogonalized.
    const Index take = std::min<Index>(block, m);
    if (!append_block(h_basis.rightCols(take))) {
      // Krylov space is invariant and smaller than requested; pad randomly.
      MatrixS pad =
          detail::seeded_start_block<Scalar>(dim, block, restart_rng.integer(
                                                             UINT64_MAX));
      if (!append_block(std::move(pad))) {
        throw ConvergenceError("Lanczos basis cannot be extended further");
      }
    }
  }
}

}  // namespace hamlab
