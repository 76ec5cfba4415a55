#pragma once

#include <cmath>
#include <utility>

#include "hamlab/oracle.hpp"
#include "hamlab/spectral.hpp"

namespace hamlab {

// Affine map sending the spectrum of h into [0, 1]:
// normalized = (h + bound * I) / (2 * bound) with bound = norm_bound(h).
struct Normalization {
  LocalHamiltonian normalized;
  double scale = 1.0;   // original = normalized_value * scale - offset
  double offset = 0.0;

  double to_original(double x) const { return x * scale - offset; }
  double from_original(double x) const { return (x + offset) / scale; }
  double width_from_original(double w) const { return w / scale; }
};

inline Normalization normalize_to_unit_interval(const LocalHamiltonian& h) {
  Normalization norm;
  const double bound = h.norm_bound();
  if (bound <= 0) {  // zero Hamiltonian; spectrum is {0} already
    norm.normalized = h;
    return norm;
  }
  norm.normalized = scale(shift(h, bound), 1.0 / (2.0 * bound));
  norm.scale = 2.0 * bound;
  norm.offset = bound;
  return norm;
}

struct BinarySearchResult {
  double bracket_low = 0.0;
  double width = 0.0;
  OracleTranscript transcript;
};

// Localizes the ground energy of a Hamiltonian whose spectrum lies in [0, 1]
// (the caller normalizes, see normalize_to_unit_interval). Queries
// LH(h, mid - delta/4, mid + delta/4) with delta = eps/2 and shrinks the
// bracket to the queried edge, so the final width is <= eps/2 after at most
// ceil(log2(2/eps)) + 1 queries and the bracket always contains lambda_1.
inline BinarySearchResult binary_search_ground_energy(const LocalHamiltonian& h,
                                                      double eps,
                                                      Oracle& oracle) {
  if (!(eps > 0)) throw ValidationError("binary search requires eps > 0");
  const double delta = eps / 2.0;
  double a = 0.0, b = 1.0;
  BinarySearchResult result;
  int guard = 0;
  while (b - a > eps / 2.0) {
    if (++guard > 128)
      throw ConvergenceError("binary search failed to shrink the bracket");
    const double mid = 0.5 * (a + b);
    const PromiseInstance query =
        PromiseInstance::lh(h, mid - delta / 4.0, mid + delta / 4.0);
    const PromiseDecision dec = record(oracle, query, result.transcript);
    if (effective_bit(dec.value)) b = mid + delta / 4.0;
    else a = mid - delta / 4.0;
  }
  result.bracket_low = a;
  result.width = b - a;
  return result;
}

struct ExactLhResult {
  PromiseDecision decision;
  OracleTranscript transcript;
  Verdict e1 = Verdict::YES;  // LH(h, a+eps, a+eps+delta)
  Verdict e2 = Verdict::YES;  // LH(h, a-eps-delta, a-eps)
};

// EXACT-LH through two LH queries: YES (ground energy within eps of a) iff
// the first query answers YES and the second answers NO. Exactly two oracle
// queries; strict-mode violations of either sub-promise propagate.
inline ExactLhResult decide_exact_lh(const LocalHamiltonian& h, double a,
                                     double eps, double delta,
                                     Oracle& oracle) {
  if (!(eps > 0) || !(delta > 0))
    throw ValidationError("decide_exact_lh requires eps, delta > 0");
  ExactLhResult result;
  const PromiseDecision d1 = record(
      oracle, PromiseInstance::lh(h, a + eps, a + eps + delta),
      result.transcript);
  const PromiseDecision d2 = record(
      oracle, PromiseInstance::lh(h, a - eps - delta, a - eps),
      result.transcript);
  result.e1 = d1.value;
  result.e2 = d2.value;
  result.decision.witness_info = d1.witness_info;
  if (d1.value == Verdict::PROMISE_VIOLATED ||
      d2.value == Verdict::PROMISE_VIOLATED) {
    result.decision.value = Verdict::PROMISE_VIOLATED;
  } else {
    result.decision.value =
        (d1.value == Verdict::YES && d2.value == Verdict::NO) ? Verdict::YES
                                                              : Verdict::NO;
  }
  return result;
}

struct ApproxSimResult {
  PromiseDecision decision;
  OracleTranscript transcript;
  double bracket_low = 0.0;   // original energy units
  double bracket_width = 0.0;
  double subspace_value = 0.0;    // min <A> over the bracket subspace
  double no_check_value = 0.0;    // min <A> over the lambda1+eps subspace
};

// APPROX-SIMULATION: binary search localizes lambda_1 to a bracket of width
// eps/2, then one more query checks for a low-energy state with <A> <=
// alpha1. The final query is realized classically as a subspace-restricted
// minimum eigenvalue and is counted as one oracle call in the transcript.
inline ApproxSimResult decide_approx_simulation(const LocalHamiltonian& h,
                                                const Observable& obs,
                                                double alpha1, double alpha2,
                                                double eps, Oracle& oracle,
                                                const SpectrumOptions& sopts = {}) {
  if (!(alpha2 > alpha1))
    throw ValidationError("decide_approx_simulation requires alpha2 > alpha1");
  if (!(eps > 0)) throw ValidationError("eps must be positive");

  const Normalization norm = normalize_to_unit_interval(h);
  const double eps_norm = norm.width_from_original(eps);
  ApproxSimResult result;
  BinarySearchResult bs =
      binary_search_ground_energy(norm.normalized, eps_norm, oracle);
  result.transcript = std::move(bs.transcript);
  result.bracket_low = norm.to_original(bs.bracket_low);
  result.bracket_width = bs.width * norm.scale;

  const double slack = 1e-12 * std::max(1.0, norm.scale);
  result.subspace_value = min_expectation_in_subspace(
      h, obs, result.bracket_low + eps / 2.0 + slack, sopts);

  const double lambda1 = lowest_k(h, 1, sopts).lambda1();
  result.no_check_value =
      min_expectation_in_subspace(h, obs, lambda1 + eps + slack, sopts);

  PromiseDecision dec;
  dec.witness_info = WitnessInfo{lambda1, 0.0, result.subspace_value};
  if (result.subspace_value <= alpha1) dec.value = Verdict::YES;
  else if (result.no_check_value >= alpha2) dec.value = Verdict::NO;
  else dec.value = Verdict::PROMISE_VIOLATED;
  if (dec.value == Verdict::PROMISE_VIOLATED) {
    if (auto forced = oracle.violation_answer()) dec.value = *forced;
  }

  const PromiseInstance final_query =
      PromiseInstance::approx_sim(h, obs, alpha1, alpha2, eps);
  result.transcript.append({final_query.digest(), ProblemKind::APPROX_SIM,
                            dec.value,
                            result.subspace_value <= alpha1 ? 1 : 0});
  result.decision = dec;
  return result;
}

// SPECTRAL GAP decided directly from the two lowest eigenvalues.
inline PromiseDecision decide_spectral_gap_direct(const LocalHamiltonian& h,
                                                  double eps,
                                                  const SpectrumOptions& opts = {}) {
  if (!(eps > 0)) throw ValidationError("eps must be positive");
  const GapReport g = spectral_gap(h, opts);
  PromiseDecision dec;
  dec.witness_info = WitnessInfo{g.lambda1, g.lambda2, std::nullopt};
  if (g.gap <= eps) dec.value = Verdict::YES;
  else if (g.gap >= 2 * eps) dec.value = Verdict::NO;
  else dec.value = Verdict::PROMISE_VIOLATED;
  return dec;
}

// --- Antisymmetric doubling --------------------------------------------------

enum class DoubledKind { Sum, Product };

// Isometry onto the antisymmetric subspace of C^D (x) C^D: columns are
// (|i,j> - |j,i>)/sqrt(2) for i < j, with |i,j> = e_{i*D+j}.
inline Matrix antisymmetric_basis(Index d) {
  const Index pairs = d * (d - 1) / 2;
  Matrix basis = Matrix::Zero(d * d, pairs);
  Index col = 0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j, ++col) {
      basis(i * d + j, col) = inv_sqrt2;
      basis(j * d + i, col) = -inv_sqrt2;
    }
  return basis;
}

// Restriction of the doubled operator to the antisymmetric subspace, in the
// (i < j) pair basis and without forming the D^2-dimensional operator.
// Sum:     Pi_- (H (x) I + I (x) H) Pi_-, spectrum {lambda_i + lambda_j, i<j}
// Product: Pi_- (H (x) H) Pi_-,          spectrum {lambda_i * lambda_j, i<j}
// The Sum operator is what the threshold arithmetic of the gap algorithm
// needs; the Product form follows the paper's notation literally and is kept
// for comparison.
inline Matrix doubled_antisymmetric_operator(const Matrix& h,
                                             DoubledKind kind) {
  const Index d = h.rows();
  const Index pairs = d * (d - 1) / 2;
  std::vector<std::pair<Index, Index>> idx;
  idx.reserve(pairs);
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) idx.emplace_back(i, j);
  Matrix out(pairs, pairs);
  for (Index p = 0; p < pairs; ++p) {
    const auto [i, j] = idx[p];
    for (Index q = 0; q < pairs; ++q) {
      const auto [k, l] = idx[q];
      if (kind == DoubledKind::Sum) {
        Complex v = 0.0;
        if (j == l) v += h(i, k);
        if (i == k) v += h(j, l);
        if (j == k) v -= h(i, l);
        if (i == l) v -= h(j, k);
        out(p, q) = v;
      } else {
        out(p, q) = h(i, k) * h(j, l) - h(i, l) * h(j, k);
      }
    }
  }
  return out;
}

struct GapDoubledResult {
  PromiseDecision decision;
  OracleTranscript transcript;
  double bracket_low = 0.0;      // original units
  double antisym_minimum = 0.0;  // original units
  double threshold = 0.0;        // original units
};

// SPECTRAL GAP via the antisymmetric doubling: localize lambda_1 to a
// bracket of width eps/4, then accept iff the minimum eigenvalue of the
// doubled operator restricted to the antisymmetric subspace (= the smallest
// pairwise sum lambda_i + lambda_j over i < j) is at most 2a + 7eps/4.
inline GapDoubledResult decide_spectral_gap_doubled(
    const LocalHamiltonian& h, double eps, Oracle& oracle,
    DoubledKind kind = DoubledKind::Sum) {
  if (!(eps > 0)) throw ValidationError("eps must be positive");
  const Index d = h.dimension();
  if (d * d > dimension_cap())
    throw DimensionCapError("doubled dimension exceeds the cap");

  const Normalization norm = normalize_to_unit_interval(h);
  const double eps_norm = norm.width_from_original(eps);
  GapDoubledResult result;

  if (eps_norm <= 0) {  // zero Hamiltonian: gap is 0, trivially YES
    result.decision.value = Verdict::YES;
    result.decision.witness_info = WitnessInfo{0.0, 0.0, std::nullopt};
    return result;
  }

  // Bracket width eps/4, i.e. request eps/2 from the eps/2-width contract.
  BinarySearchResult bs =
      binary_search_ground_energy(norm.normalized, eps_norm / 2.0, oracle);
  result.transcript = std::move(bs.transcript);

  const Matrix full = assemble(norm.normalized, Storage::Dense).to_dense();
  Matrix restricted = doubled_antisymmetric_operator(full, kind);
  Eigen::SelfAdjointEigenSolver<Matrix> es(restricted, Eigen::EigenvaluesOnly);
  const double mu = es.eigenvalues()(0);
  const double threshold = 2.0 * bs.bracket_low + 1.75 * eps_norm;

  result.bracket_low = norm.to_original(bs.bracket_low);
  result.antisym_minimum = 2.0 * norm.to_original(mu * 0.5);
  result.threshold = 2.0 * norm.to_original(threshold * 0.5);
  result.decision.value = mu <= threshold ? Verdict::YES : Verdict::NO;
  result.decision.witness_info =
      WitnessInfo{result.bracket_low, result.antisym_minimum, std::nullopt};

  const PromiseInstance summary = PromiseInstance::gap(h, eps);
  result.transcript.append({summary.digest(), ProblemKind::GAP,
                            result.decision.value,
                            result.decision.value == Verdict::YES ? 1 : 0});
  return result;
}

}  // namespace hamlab
