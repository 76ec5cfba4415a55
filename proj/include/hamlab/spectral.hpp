#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hamlab/ham_core.hpp"
#include "hamlab/lanczos.hpp"

namespace hamlab {

enum class EigenMethod { Auto, Dense, Lanczos };

struct SpectrumReport {
  RealVector eigenvalues;  // k lowest, ascending
  double degeneracy_tol = 0.0;
  int ground_degeneracy = 1;
  Matrix basis;  // dim x k orthonormal eigenvectors
  RealVector residuals;
  std::string method;

  double lambda1() const { return eigenvalues(0); }
  double lambda2() const { return eigenvalues(1); }
};

struct LowEnergySubspace {
  double threshold = 0.0;
  Matrix basis;  // orthonormal, spans all eigenvectors with eigenvalue <= threshold
};

struct SpectrumOptions {
  EigenMethod method = EigenMethod::Auto;
  Storage storage = Storage::Auto;
  double residual_tol = 1e-10;
  std::uint64_t seed = 1;
  double degeneracy_tol = -1.0;  // <0: use 1e-7 * max(1, norm bound)
};

namespace detail {

inline double effective_degeneracy_tol(const SpectrumOptions& opts,
                                       double norm_bound) {
  if (opts.degeneracy_tol >= 0) return opts.degeneracy_tol;
  return 1e-7 * std::max(1.0, norm_bound);
}

inline SpectrumReport dense_spectrum_report(const Matrix& full, int k,
                                            double degeneracy_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(full);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("dense eigensolver failed");
  SpectrumReport rep;
  rep.method = "dense";
  rep.eigenvalues = es.eigenvalues().head(k);
  rep.basis = es.eigenvectors().leftCols(k);
  rep.residuals.resize(k);
  for (int i = 0; i < k; ++i)
    rep.residuals(i) =
        (full * rep.basis.col(i) - rep.eigenvalues(i) * rep.basis.col(i))
            .norm();
  rep.degeneracy_tol = degeneracy_tol;
  // counted over the complete spectrum, not just the k reported values
  rep.ground_degeneracy = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) <= es.eigenvalues()(0) + degeneracy_tol)
      ++rep.ground_degeneracy;
  return rep;
}

}  // namespace detail

// The k lowest eigenvalues and eigenvectors of the assembled Hamiltonian.
// Dense full diagonalization below the dense-dimension limit, seeded block
// Lanczos above (or when requested explicitly).
inline SpectrumReport lowest_k(const LocalHamiltonian& h, int k,
                               const SpectrumOptions& opts = {}) {
  if (k < 1) throw ValidationError("k must be >= 1");
  const Index dim = h.dimension();
  if (k > dim) throw ValidationError("k exceeds the space dimension");
  const double nb = h.norm_bound();
  const double dtol = detail::effective_degeneracy_tol(opts, nb);

  AssembledOperator op = assemble(h, opts.storage);
  const bool dense_path =
      opts.method == EigenMethod::Dense ||
      (opts.method == EigenMethod::Auto && op.is_dense());

  if (dense_path) return detail::dense_spectrum_report(op.to_dense(), k, dtol);

  BlockLanczosOptions<Complex> lopts;
  lopts.block_size = 2;
  lopts.seed = opts.seed;
  lopts.residual_tol = opts.residual_tol * std::max(1.0, nb);
  auto matvec = [&op](const Vector& v) { return op.apply(v); };
  auto res = block_lanczos_lowest<Complex>(matvec, dim, k, lopts);

  const double residual_bound = tol::eigen_residual * std::max(1.0, nb);
  if (res.residuals.maxCoeff() > residual_bound) {
    std::ostringstream msg;
    msg << "Lanczos did not converge; residuals:";
    for (int i = 0; i < res.residuals.size(); ++i)
      msg << ' ' << res.residuals(i);
    throw ConvergenceError(msg.str());
  }

  SpectrumReport rep;
  rep.method = "lanczos";
  rep.eigenvalues = res.eigenvalues;
  rep.basis = res.eigenvectors;
  rep.residuals = res.residuals;
  rep.degeneracy_tol = dtol;
  rep.ground_degeneracy = 0;
  for (int i = 0; i < k; ++i)
    if (rep.eigenvalues(i) <= rep.eigenvalues(0) + dtol)
      ++rep.ground_degeneracy;
  return rep;
}

struct GapReport {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gap = 0.0;
};

inline GapReport spectral_gap(const LocalHamiltonian& h,
                              const SpectrumOptions& opts = {}) {
  SpectrumReport rep = lowest_k(h, 2, opts);
  GapReport g;
  g.lambda1 = rep.eigenvalues(0);
  g.lambda2 = rep.eigenvalues(1);
  g.gap = std::max(0.0, g.lambda2 - g.lambda1);
  return g;
}

// <psi|A|psi> for the unique ground state. Degenerate grounds make the value
// basis dependent; callers must use min_expectation_in_subspace instead.
inline double ground_expectation(const LocalHamiltonian& h,
                                 const Observable& a,
                                 const SpectrumOptions& opts = {}) {
  if (h.n != a.n)
    throw ValidationError("observable qubit count differs from Hamiltonian");
  const int k = h.dimension() >= 2 ? 2 : 1;
  SpectrumReport rep = lowest_k(h, k, opts);
  if (rep.ground_degeneracy > 1)
    throw DegenerateGroundError(
        "ground state is degenerate; expectation is basis dependent");
  const Vector psi = rep.basis.col(0);
  AssembledOperator op = assemble(a);
  return std::real(psi.dot(op.apply(psi)));
}

// Orthonormal basis of the span of eigenvectors with eigenvalue <= threshold.
inline LowEnergySubspace low_energy_subspace(const LocalHamiltonian& h,
                                             double threshold,
                                             const SpectrumOptions& opts = {}) {
  const Index dim = h.dimension();
  AssembledOperator op = assemble(h, opts.storage);
  LowEnergySubspace sub;
  sub.threshold = threshold;
  if (op.is_dense() && opts.method != EigenMethod::Lanczos) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(op.to_dense());
    Index count = 0;
    while (count < dim && es.eigenvalues()(count) <= threshold) ++count;
    sub.basis = es.eigenvectors().leftCols(count);
    return sub;
  }
  // Iterative path: grow k until the spectrum crosses the threshold.
  int k = std::min<Index>(8, dim);
  while (true) {
    BlockLanczosOptions<Complex> lopts;
    lopts.seed = opts.seed;
    lopts.residual_tol = opts.residual_tol * std::max(1.0, h.norm_bound());
    auto matvec = [&op](const Vector& v) { return op.apply(v); };
    auto res = block_lanczos_lowest<Complex>(matvec, dim, k, lopts);
    if (res.eigenvalues(k - 1) > threshold || k == dim) {
      Index count = 0;
      while (count < k && res.eigenvalues(count) <= threshold) ++count;
      sub.basis = res.eigenvectors.leftCols(count);
      return sub;
    }
    k = std::min<Index>(2 * k, dim);
  }
}

// Minimum of <psi|A|psi> over the low-energy eigen-subspace of h, i.e. the
// smallest eigenvalue of P A P restricted to that subspace.
inline double min_expectation_in_subspace(const LocalHamiltonian& h,
                                          const Observable& a,
                                          double threshold,
                                          const SpectrumOptions& opts = {}) {
  if (h.n != a.n)
    throw ValidationError("observable qubit count differs from Hamiltonian");
  LowEnergySubspace sub = low_energy_subspace(h, threshold, opts);
  if (sub.basis.cols() == 0)
    throw ValidationError("low-energy subspace is empty at this threshold");
  AssembledOperator op = assemble(a);
  Matrix restricted(sub.basis.cols(), sub.basis.cols());
  Matrix applied(sub.basis.rows(), sub.basis.cols());
  for (Index c = 0; c < sub.basis.cols(); ++c)
    applied.col(c) = op.apply(sub.basis.col(c));
  restricted = sub.basis.adjoint() * applied;
  restricted = 0.5 * (restricted + Matrix(restricted.adjoint()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(restricted, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Minimum of <psi|A|psi> over the ground eigenspace only.
inline double ground_space_min_expectation(const LocalHamiltonian& h,
                                           const Observable& a,
                                           const SpectrumOptions& opts = {}) {
  SpectrumReport rep = lowest_k(h, 1, opts);
  return min_expectation_in_subspace(h, a,
                                     rep.lambda1() + rep.degeneracy_tol, opts);
}

// Exact minimum of <psi|A|psi> over ALL unit states with <psi|H|psi> <=
// energy_cap (not only eigen-subspace states), via the concave Lagrangian
// dual max_{mu>=0} [lambda_min(A + mu H) - mu * energy_cap]. Strong duality
// holds whenever some state lies strictly below the cap. Dense only.
inline double min_expectation_over_states_below(const LocalHamiltonian& h,
                                                const Observable& a,
                                                double energy_cap) {
  Matrix hm = assemble(h, Storage::Dense).to_dense();
  Matrix am = assemble(a, Storage::Dense).to_dense();
  Eigen::SelfAdjointEigenSolver<Matrix> esh(hm, Eigen::EigenvaluesOnly);
  const double lambda1 = esh.eigenvalues()(0);
  if (energy_cap < lambda1)
    return std::numeric_limits<double>::infinity();  // empty feasible set

  auto dual = [&](double mu) {
    Matrix pencil = am + mu * hm;
    Eigen::SelfAdjointEigenSolver<Matrix> es(pencil, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0) - mu * energy_cap;
  };

  double best = dual(0.0);
  if (energy_cap - lambda1 < 1e-13) {
    // Cap sits on the ground energy: feasible set is the ground eigenspace.
    return min_expectation_in_subspace(h, a, lambda1 + 1e-12);
  }
  // Bracket the concave maximum, then golden-section.
  double hi = 1.0;
  for (int i = 0; i < 80 && dual(hi) > dual(hi * 0.5) - 1e-15; ++i) hi *= 2.0;
  double lo = 0.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = dual(x1), f2 = dual(x2);
  for (int it = 0; it < 160; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = dual(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = dual(x1);
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

// --- Two-projector geometry -------------------------------------------------

// One invariant block of p1 + p2. One-dimensional blocks are spanned by a
// common eigenvector (eigenvalue p1_eigen + p2_eigen); two-dimensional blocks
// carry a principal angle alpha with eigenvalues 2cos^2(a/2) and 2sin^2(a/2).
struct TwoProjectorBlock {
  bool two_dimensional = false;
  double angle = 0.0;  // radians, in [0, pi/2]
  int p1_eigen = 0;
  int p2_eigen = 0;

  std::vector<double> eigenvalues() const {
    if (!two_dimensional)
      return {static_cast<double>(p1_eigen + p2_eigen)};
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    return {2 * c * c, 2 * s * s};
  }
};

namespace detail {

inline Matrix projector_range_basis(const Matrix& p, const char* name) {
  if (hermiticity_defect(p) > tol::projector_input)
    throw ValidationError(std::string(name) + " is not Hermitian");
  if ((p * p - p).cwiseAbs().maxCoeff() > tol::projector_input)
    throw ValidationError(std::string(name) + " is not idempotent within 1e-10");
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  Index rank = 0;
  for (Index i = 0; i < p.rows(); ++i)
    if (es.eigenvalues()(i) > 0.5) ++rank;
  return es.eigenvectors().rightCols(rank);
}

}  // namespace detail

// Jordan decomposition of a projector pair: the space splits into invariant
// blocks of p1 + p2 of dimension at most two. Computed from the SVD of the
// overlap of the two range bases (cosines of the principal angles).
inline std::vector<TwoProjectorBlock> two_projector_spectrum(const Matrix& p1,
                                                             const Matrix& p2) {
  if (p1.rows() != p2.rows())
    throw ValidationError("projector dimensions differ");
  const Index dim = p1.rows();
  Matrix a = detail::projector_range_basis(p1, "p1");
  Matrix b = detail::projector_range_basis(p2, "p2");
  const Index r1 = a.cols(), r2 = b.cols();

  std::vector<TwoProjectorBlock> blocks;
  Index common = 0;
  const double edge = 1e-12;
  if (r1 > 0 && r2 > 0) {
    Eigen::JacobiSVD<Matrix> svd(a.adjoint() * b);
    const auto& sv = svd.singularValues();
    for (Index i = 0; i < sv.size(); ++i) {
      const double sigma = std::min(1.0, std::max(0.0, sv(i)));
      if (sigma >= 1.0 - edge) {
        blocks.push_back({false, 0.0, 1, 1});  // shared direction
        ++common;
      } else if (sigma <= edge) {
        blocks.push_back({false, 0.0, 1, 0});
        blocks.push_back({false, 0.0, 0, 1});
      } else {
        blocks.push_back({true, std::acos(sigma), 0, 0});
      }
    }
  }
  const Index paired = (r1 > 0 && r2 > 0) ? std::min(r1, r2) : 0;
  for (Index i = 0; i < r1 - paired; ++i) blocks.push_back({false, 0.0, 1, 0});
  for (Index i = 0; i < r2 - paired; ++i) blocks.push_back({false, 0.0, 0, 1});
  Index used = 0;
  for (const auto& blk : blocks) used += blk.two_dimensional ? 2 : 1;
  for (Index i = used; i < dim; ++i) blocks.push_back({false, 0.0, 0, 0});
  return blocks;
}

inline std::vector<double> two_projector_eigenvalues(
    const std::vector<TwoProjectorBlock>& blocks) {
  std::vector<double> out;
  for (const auto& blk : blocks)
    for (double e : blk.eigenvalues()) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hamlab
