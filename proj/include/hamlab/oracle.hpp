#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamlab/rng.hpp"
#include "hamlab/spectral.hpp"

namespace hamlab {

enum class ProblemKind { LH, UNIQUE_LH, EXACT_LH, GAP, APPROX_SIM };

enum class Verdict { YES, NO, PROMISE_VIOLATED };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::YES: return "YES";
    case Verdict::NO: return "NO";
    default: return "PROMISE_VIOLATED";
  }
}

inline const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::LH: return "LH";
    case ProblemKind::UNIQUE_LH: return "UNIQUE_LH";
    case ProblemKind::EXACT_LH: return "EXACT_LH";
    case ProblemKind::GAP: return "GAP";
    default: return "APPROX_SIM";
  }
}

// Value-level digest: stable under serialization round trips because it
// hashes the binary representation of the numbers, not their text form.
inline std::uint64_t digest_hamiltonian(const LocalHamiltonian& h,
                                        std::uint64_t seed =
                                            0xcbf29ce484222325ULL) {
  std::uint64_t d = fnv1a(&h.n, sizeof(h.n), seed);
  for (const auto& t : h.terms) {
    const int arity = t.arity();
    d = fnv1a(&arity, sizeof(arity), d);
    for (int q : t.qubits) d = fnv1a(&q, sizeof(q), d);
    d = fnv1a(&t.weight, sizeof(t.weight), d);
    for (Index j = 0; j < t.block.cols(); ++j)
      for (Index i = 0; i < t.block.rows(); ++i) {
        const double re = t.block(i, j).real(), im = t.block(i, j).imag();
        d = fnv1a(&re, sizeof(re), d);
        d = fnv1a(&im, sizeof(im), d);
      }
  }
  return d;
}

// One promise-problem query. Parameters not used by `kind` stay zero.
struct PromiseInstance {
  ProblemKind kind = ProblemKind::LH;
  LocalHamiltonian hamiltonian;
  double a = 0.0, b = 0.0;           // LH / UNIQUE_LH thresholds
  double eps = 0.0, delta = 0.0;     // EXACT_LH / GAP / APPROX_SIM
  double alpha1 = 0.0, alpha2 = 0.0; // APPROX_SIM
  std::optional<Observable> observable;

  static PromiseInstance lh(LocalHamiltonian h, double a, double b) {
    PromiseInstance inst;
    inst.kind = ProblemKind::LH;
    inst.hamiltonian = std::move(h);
    inst.a = a;
    inst.b = b;
    inst.validate();
    return inst;
  }
  static PromiseInstance unique_lh(LocalHamiltonian h, double a, double b) {
    PromiseInstance inst = lh(std::move(h), a, b);
    inst.kind = ProblemKind::UNIQUE_LH;
    return inst;
  }
  static PromiseInstance exact_lh(LocalHamiltonian h, double a, double eps,
                                  double delta) {
    PromiseInstance inst;
    inst.kind = ProblemKind::EXACT_LH;
    inst.hamiltonian = std::move(h);
    inst.a = a;
    inst.eps = eps;
    inst.delta = delta;
    inst.validate();
    return inst;
  }
  static PromiseInstance gap(LocalHamiltonian h, double eps) {
    PromiseInstance inst;
    inst.kind = ProblemKind::GAP;
    inst.hamiltonian = std::move(h);
    inst.eps = eps;
    inst.validate();
    return inst;
  }
  static PromiseInstance approx_sim(LocalHamiltonian h, Observable obs,
                                    double alpha1, double alpha2, double eps) {
    PromiseInstance inst;
    inst.kind = ProblemKind::APPROX_SIM;
    inst.hamiltonian = std::move(h);
    inst.observable = std::move(obs);
    inst.alpha1 = alpha1;
    inst.alpha2 = alpha2;
    inst.eps = eps;
    inst.validate();
    return inst;
  }

  void validate() const {
    switch (kind) {
      case ProblemKind::LH:
      case ProblemKind::UNIQUE_LH:
        if (!(b > a)) throw ValidationError("LH instance requires b > a");
        break;
      case ProblemKind::EXACT_LH:
        if (!(eps > 0) || !(delta > 0))
          throw ValidationError("EXACT_LH requires eps > 0 and delta > 0");
        break;
      case ProblemKind::GAP:
        if (!(eps > 0)) throw ValidationError("GAP requires eps > 0");
        break;
      case ProblemKind::APPROX_SIM:
        if (!(alpha2 > alpha1))
          throw ValidationError("APPROX_SIM requires alpha2 > alpha1");
        if (!(eps > 0)) throw ValidationError("APPROX_SIM requires eps > 0");
        if (!observable)
          throw ValidationError("APPROX_SIM requires an observable");
        if (observable->n != hamiltonian.n)
          throw ValidationError("observable acts on a different qubit count");
        break;
    }
  }

  std::string digest() const {
    std::uint64_t d = digest_hamiltonian(hamiltonian);
    const int k = static_cast<int>(kind);
    d = fnv1a(&k, sizeof(k), d);
    for (double p : {a, b, eps, delta, alpha1, alpha2})
      d = fnv1a(&p, sizeof(p), d);
    if (observable) d = digest_hamiltonian(*observable, d);
    return hex_digest(d);
  }
};

struct WitnessInfo {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::optional<double> expectation;
};

struct PromiseDecision {
  Verdict value = Verdict::PROMISE_VIOLATED;
  std::optional<WitnessInfo> witness_info;
};

struct TranscriptEntry {
  std::string digest;
  ProblemKind kind = ProblemKind::LH;
  Verdict verdict = Verdict::YES;
  int bit = 0;  // binary answer the querying algorithm continued with
};

struct OracleTranscript {
  std::vector<TranscriptEntry> entries;

  int query_count() const { return static_cast<int>(entries.size()); }
  void append(TranscriptEntry e) { entries.push_back(std::move(e)); }
  void extend(const OracleTranscript& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  }
};

enum class OracleMode { Strict, AdversarialBit, AdversarialSeeded };

// Exact-diagonalization stand-in for the QMA/UQMA oracle. Strict mode keeps
// the three-valued semantics; the adversarial modes answer promise-violating
// queries with a fixed policy bit or a seeded coin, which is how the paper's
// "answers arbitrarily" behaviour is modelled for robustness tests.
class Oracle {
 public:
  explicit Oracle(OracleMode mode = OracleMode::Strict, int policy_bit = 1,
                  std::uint64_t seed = 1, SpectrumOptions spectral = {})
      : mode_(mode),
        policy_bit_(policy_bit),
        rng_(seed),
        spectral_(spectral) {}

  OracleMode mode() const { return mode_; }

  // nullopt in strict mode; otherwise the verdict substituted on violations.
  std::optional<Verdict> violation_answer() {
    switch (mode_) {
      case OracleMode::Strict: return std::nullopt;
      case OracleMode::AdversarialBit:
        return policy_bit_ ? Verdict::YES : Verdict::NO;
      default:
        return rng_.uniform() < 0.5 ? Verdict::NO : Verdict::YES;
    }
  }

  PromiseDecision decide_lh(const LocalHamiltonian& h, double a, double b) {
    return decide(PromiseInstance::lh(h, a, b));
  }
  PromiseDecision decide_unique_lh(const LocalHamiltonian& h, double a,
                                   double b) {
    return decide(PromiseInstance::unique_lh(h, a, b));
  }

  PromiseDecision decide(const PromiseInstance& inst) {
    inst.validate();
    PromiseDecision dec;
    switch (inst.kind) {
      case ProblemKind::LH: {
        const auto [l1, l2] = two_lowest(inst.hamiltonian);
        dec.witness_info = WitnessInfo{l1, l2, std::nullopt};
        if (l1 <= inst.a) dec.value = Verdict::YES;
        else if (l1 >= inst.b) dec.value = Verdict::NO;
        else dec.value = Verdict::PROMISE_VIOLATED;
        break;
      }
      case ProblemKind::UNIQUE_LH: {
        const auto [l1, l2] = two_lowest(inst.hamiltonian);
        dec.witness_info = WitnessInfo{l1, l2, std::nullopt};
        if (l1 <= inst.a && l2 >= inst.b) dec.value = Verdict::YES;
        else if (l1 >= inst.b) dec.value = Verdict::NO;
        else dec.value = Verdict::PROMISE_VIOLATED;
        break;
      }
      case ProblemKind::EXACT_LH: {
        const auto [l1, l2] = two_lowest(inst.hamiltonian);
        dec.witness_info = WitnessInfo{l1, l2, std::nullopt};
        if (l1 >= inst.a - inst.eps && l1 <= inst.a + inst.eps)
          dec.value = Verdict::YES;
        else if (l1 < inst.a - inst.eps - inst.delta ||
                 l1 > inst.a + inst.eps + inst.delta)
          dec.value = Verdict::NO;
        else dec.value = Verdict::PROMISE_VIOLATED;
        break;
      }
      case ProblemKind::GAP: {
        const auto [l1, l2] = two_lowest(inst.hamiltonian);
        dec.witness_info = WitnessInfo{l1, l2, std::nullopt};
        const double gap = l2 - l1;
        if (gap <= inst.eps) dec.value = Verdict::YES;
        else if (gap >= 2 * inst.eps) dec.value = Verdict::NO;
        else dec.value = Verdict::PROMISE_VIOLATED;
        break;
      }
      case ProblemKind::APPROX_SIM: {
        const auto [l1, l2] = two_lowest(inst.hamiltonian);
        const double ground_min = min_expectation_in_subspace(
            inst.hamiltonian, *inst.observable, l1 + 1e-12, spectral_);
        dec.witness_info = WitnessInfo{l1, l2, ground_min};
        if (ground_min <= inst.alpha1) {
          dec.value = Verdict::YES;
        } else {
          const double floor = min_expectation_over_states_below(
              inst.hamiltonian, *inst.observable, l1 + inst.eps);
          if (floor >= inst.alpha2) dec.value = Verdict::NO;
          else dec.value = Verdict::PROMISE_VIOLATED;
        }
        break;
      }
    }
    if (dec.value == Verdict::PROMISE_VIOLATED) {
      if (auto forced = violation_answer()) dec.value = *forced;
    }
    return dec;
  }

 private:
  std::pair<double, double> two_lowest(const LocalHamiltonian& h) {
    const std::uint64_t key = digest_hamiltonian(h);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    SpectrumReport rep = lowest_k(h, h.dimension() >= 2 ? 2 : 1, spectral_);
    std::pair<double, double> out{rep.eigenvalues(0),
                                  rep.eigenvalues(rep.eigenvalues.size() - 1)};
    cache_.emplace(key, out);
    return out;
  }

  OracleMode mode_;
  int policy_bit_;
  Rng rng_;
  SpectrumOptions spectral_;
  std::map<std::uint64_t, std::pair<double, double>> cache_;
};

// Binary answer a querying algorithm adopts. Strict-mode violations map to
// the YES branch; for the binary-search update both branches preserve the
// bracket invariant, so the choice is only a convention (and it is recorded
// in the transcript together with the three-valued verdict).
inline int effective_bit(Verdict v) { return v == Verdict::NO ? 0 : 1; }

// Asks the oracle and appends the (digest, answer) pair to the transcript.
inline PromiseDecision record(Oracle& oracle, const PromiseInstance& inst,
                              OracleTranscript& transcript) {
  PromiseDecision dec = oracle.decide(inst);
  transcript.append(
      {inst.digest(), inst.kind, dec.value, effective_bit(dec.value)});
  return dec;
}

}  // namespace hamlab
