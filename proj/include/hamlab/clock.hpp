#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hamlab/ham_core.hpp"
#include "hamlab/spectral.hpp"

namespace hamlab {

struct Gate {
  std::vector<int> qubits;  // 1 or 2 distinct work-qubit indices
  Matrix unitary;           // 2x2 or 4x4, bit j of its index is qubits[j]
};

// Verifier circuit for the clock compiler. The work register holds the
// witness qubits at indices 0..w-1 and the ancillas (initialized to |0>) at
// indices w..w+m-1. Acceptance is the probability of measuring |1> on the
// output qubit after the last gate.
struct VerifierCircuit {
  int witness_qubits = 0;
  int ancilla_qubits = 0;
  int output_qubit = 0;
  std::vector<Gate> gates;

  int work_qubits() const { return witness_qubits + ancilla_qubits; }
  int steps() const { return static_cast<int>(gates.size()); }

  void validate() const {
    const int n = work_qubits();
    if (witness_qubits < 0 || ancilla_qubits < 0 || n < 1)
      throw ValidationError("circuit needs at least one work qubit");
    if (gates.empty()) throw ValidationError("circuit needs T >= 1 gates");
    if (output_qubit < 0 || output_qubit >= n)
      throw ValidationError("output qubit out of range");
    for (const auto& g : gates) {
      if (g.qubits.empty() || g.qubits.size() > 2)
        throw ValidationError("gates act on 1 or 2 qubits");
      if (g.qubits.size() == 2 && g.qubits[0] == g.qubits[1])
        throw ValidationError("gate qubits must be distinct");
      for (int q : g.qubits)
        if (q < 0 || q >= n)
          throw ValidationError("gate qubit out of range");
      const Index d = Index(1) << g.qubits.size();
      if (g.unitary.rows() != d || g.unitary.cols() != d)
        throw ValidationError("gate matrix dimension mismatch");
      if ((g.unitary * g.unitary.adjoint() - Matrix::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() > tol::unitary_gate)
        throw ValidationError("gate is not unitary within 1e-12");
    }
  }
};

// --- State-vector simulation -------------------------------------------------

inline void apply_gate(Vector& state, const Gate& gate, int n) {
  const Index dim = Index(1) << n;
  if (state.size() != dim) throw ValidationError("state dimension mismatch");
  if (gate.qubits.size() == 1) {
    const Index bit = Index(1) << gate.qubits[0];
    for (Index idx = 0; idx < dim; ++idx) {
      if (idx & bit) continue;
      const Complex a0 = state(idx), a1 = state(idx | bit);
      state(idx) = gate.unitary(0, 0) * a0 + gate.unitary(0, 1) * a1;
      state(idx | bit) = gate.unitary(1, 0) * a0 + gate.unitary(1, 1) * a1;
    }
  } else {
    const Index b0 = Index(1) << gate.qubits[0];
    const Index b1 = Index(1) << gate.qubits[1];
    for (Index idx = 0; idx < dim; ++idx) {
      if ((idx & b0) || (idx & b1)) continue;
      Index sub[4] = {idx, idx | b0, idx | b1, idx | b0 | b1};
      Complex amp[4];
      for (int i = 0; i < 4; ++i) amp[i] = state(sub[i]);
      for (int i = 0; i < 4; ++i) {
        Complex v = 0;
        for (int j = 0; j < 4; ++j) v += gate.unitary(i, j) * amp[j];
        state(sub[i]) = v;
      }
    }
  }
}

// Initial work-register state: witness on the low qubits, ancillas |0...0>.
inline Vector circuit_input_state(const VerifierCircuit& c,
                                  const Vector& witness) {
  const Index w_dim = Index(1) << c.witness_qubits;
  if (witness.size() != w_dim)
    throw ValidationError("witness dimension mismatch");
  Vector state = Vector::Zero(Index(1) << c.work_qubits());
  state.head(w_dim) = witness;
  return state;
}

// States psi_0 .. psi_T of the verifier run.
inline std::vector<Vector> circuit_trajectory(const VerifierCircuit& c,
                                              const Vector& witness) {
  c.validate();
  std::vector<Vector> states;
  states.reserve(c.steps() + 1);
  states.push_back(circuit_input_state(c, witness));
  for (const auto& g : c.gates) {
    Vector next = states.back();
    apply_gate(next, g, c.work_qubits());
    states.push_back(std::move(next));
  }
  return states;
}

// ||  |1><1|_O  U_T ... U_1 |input> ||^2
inline double acceptance_probability(const VerifierCircuit& c,
                                     const Vector& witness) {
  const Vector final_state = circuit_trajectory(c, witness).back();
  const Index bit = Index(1) << c.output_qubit;
  double p = 0.0;
  for (Index idx = 0; idx < final_state.size(); ++idx)
    if (idx & bit) p += std::norm(final_state(idx));
  return p;
}

// Largest acceptance probability over all witness states: the squared top
// singular value of the output-projected circuit map on the witness space.
inline double max_acceptance_probability(const VerifierCircuit& c) {
  c.validate();
  const Index w_dim = Index(1) << c.witness_qubits;
  const Index full = Index(1) << c.work_qubits();
  Matrix mapped(full, w_dim);
  for (Index j = 0; j < w_dim; ++j) {
    Vector e = Vector::Zero(w_dim);
    e(j) = 1.0;
    mapped.col(j) = circuit_trajectory(c, e).back();
  }
  const Index bit = Index(1) << c.output_qubit;
  Matrix projected = mapped;
  for (Index idx = 0; idx < full; ++idx)
    if (!(idx & bit)) projected.row(idx).setZero();
  Eigen::JacobiSVD<Matrix> svd(projected);
  const double s = svd.singularValues()(0);
  return s * s;
}

// --- Abstract clock (qudit register with basis |0>..|T>) ---------------------

// Full-space index = clock_value * 2^work + work_index. The clock is kept as
// a genuine (T+1)-state register so that no junk clock states enter the
// spectrum; the qubit-local encoding is the unary variant below.
struct AbstractClock {
  int work_qubits = 0;
  int steps = 0;
  Matrix h_in, h_out, h_prop;

  Index dimension() const {
    return (Index(1) << work_qubits) * (steps + 1);
  }
  Matrix total() const { return h_in + h_out + h_prop; }
};

inline AbstractClock compile_abstract(const VerifierCircuit& c) {
  c.validate();
  const int wk = c.work_qubits();
  const Index w_dim = Index(1) << wk;
  const int t_steps = c.steps();
  const Index dim = w_dim * (t_steps + 1);
  if (dim > dimension_cap())
    throw DimensionCapError("abstract clock dimension exceeds the cap");

  AbstractClock out;
  out.work_qubits = wk;
  out.steps = t_steps;
  out.h_in = Matrix::Zero(dim, dim);
  out.h_out = Matrix::Zero(dim, dim);
  out.h_prop = Matrix::Zero(dim, dim);

  // H_in = sum_i |1><1|_{A_i} (x) |0><0|_C
  for (int i = 0; i < c.ancilla_qubits; ++i) {
    const Index bit = Index(1) << (c.witness_qubits + i);
    for (Index w = 0; w < w_dim; ++w)
      if (w & bit) out.h_in(w, w) += 1.0;  // clock block t = 0
  }
  // H_out = |0><0|_O (x) |T><T|_C
  {
    const Index bit = Index(1) << c.output_qubit;
    const Index base = Index(t_steps) * w_dim;
    for (Index w = 0; w < w_dim; ++w)
      if (!(w & bit)) out.h_out(base + w, base + w) += 1.0;
  }
  // H_prop = sum_{t=1..T} 1/2 ( I(x)|t><t| + I(x)|t-1><t-1|
  //                             - U_t(x)|t><t-1| - U_t^dag(x)|t-1><t| )
  for (int t = 1; t <= t_steps; ++t) {
    const Matrix u =
        embed_block_dense(c.gates[t - 1].unitary, c.gates[t - 1].qubits, wk);
    const Index bt = Index(t) * w_dim, btm = Index(t - 1) * w_dim;
    for (Index w = 0; w < w_dim; ++w) {
      out.h_prop(bt + w, bt + w) += 0.5;
      out.h_prop(btm + w, btm + w) += 0.5;
    }
    out.h_prop.block(bt, btm, w_dim, w_dim) -= 0.5 * u;
    out.h_prop.block(btm, bt, w_dim, w_dim) -= 0.5 * u.adjoint();
  }
  return out;
}

// Normalized history state (1/sqrt(T+1)) sum_t |psi_t> (x) |t>.
inline Vector history_state(const VerifierCircuit& c, const Vector& witness) {
  const auto states = circuit_trajectory(c, witness);
  const Index w_dim = Index(1) << c.work_qubits();
  Vector hist = Vector::Zero(w_dim * states.size());
  for (std::size_t t = 0; t < states.size(); ++t)
    hist.segment(Index(t) * w_dim, w_dim) = states[t];
  hist /= std::sqrt(static_cast<double>(states.size()));
  return hist;
}

// --- Unary clock (T clock qubits, |t> = 1^t 0^{T-t}) -------------------------

// Clock qubit c_t lives at qubit index work + t - 1. Legal clock states are
// the T+1 strings 1^t 0^{T-t}; H_clock penalizes every 0-then-1 pattern with
// penalty_scale * T^6, so its ground space is exactly the legal subspace.
//
// Dictionary realizing the clock operators on at most 3 clock qubits:
//   |0><0|_C   -> |0><0|_{c_1}
//   |t><t|_C   -> |1><1|_{c_t} |0><0|_{c_{t+1}}   (1 <= t <= T-1)
//   |T><T|_C   -> |1><1|_{c_T}
//   |t><t-1|_C -> |1><0|_{c_t}, guarded by |1><1|_{c_{t-1}} (t >= 2)
//                               and |0><0|_{c_{t+1}} (t <= T-1)
// Restricted to the legal subspace these reproduce the abstract operators
// exactly; with 2-qubit gates the propagation terms are at most 5-local.
struct UnaryClock {
  int work_qubits = 0;
  int steps = 0;
  double clock_penalty = 0.0;
  LocalHamiltonian h_in, h_out, h_prop, h_clock;

  LocalHamiltonian total() const {
    return add(add(h_in, h_out), add(h_prop, h_clock));
  }
};

namespace detail {

using ClockFactors = std::vector<std::pair<int, Matrix>>;  // (clock index c_t, op)

inline ClockFactors clock_projector_factors(int t, int t_total) {
  if (t == 0) return {{1, projector0()}};
  if (t == t_total) return {{t_total, projector1()}};
  return {{t, projector1()}, {t + 1, projector0()}};
}

inline ClockFactors clock_transition_factors(int t, int t_total) {
  ClockFactors f{{t, ket_bra(1, 0)}};
  if (t >= 2) f.emplace_back(t - 1, projector1());
  if (t <= t_total - 1) f.emplace_back(t + 1, projector0());
  return f;
}

// Expands factor list onto an ordered union of clock indices (identity on
// the uninvolved ones).
inline Matrix on_union(const ClockFactors& factors,
                       const std::vector<int>& union_indices) {
  std::vector<Matrix> blocks;
  blocks.reserve(union_indices.size());
  for (int idx : union_indices) {
    Matrix op = identity(2);
    for (const auto& [fi, fm] : factors)
      if (fi == idx) op = fm;
    blocks.push_back(op);
  }
  return kron_lsb(blocks);
}

}  // namespace detail

inline UnaryClock compile_unary(const VerifierCircuit& c,
                                double penalty_multiplier = 1.0) {
  c.validate();
  const int wk = c.work_qubits();
  const int t_steps = c.steps();
  const int n = wk + t_steps;
  check_dimension(n);

  UnaryClock out;
  out.work_qubits = wk;
  out.steps = t_steps;
  out.clock_penalty = penalty_multiplier * std::pow(double(t_steps), 6.0);
  out.h_in = LocalHamiltonian(n);
  out.h_out = LocalHamiltonian(n);
  out.h_prop = LocalHamiltonian(n);
  out.h_clock = LocalHamiltonian(n);

  const auto clock_qubit = [&](int t) { return wk + t - 1; };

  // H'_in = sum_i |1><1|_{A_i} (x) |0><0|_{c_1}
  for (int i = 0; i < c.ancilla_qubits; ++i)
    out.h_in.add_term(LocalTerm({c.witness_qubits + i, clock_qubit(1)},
                                kron(projector0(), projector1()), 1.0));
  // H'_out = |0><0|_O (x) |1><1|_{c_T}
  out.h_out.add_term(LocalTerm({c.output_qubit, clock_qubit(t_steps)},
                               kron(projector1(), projector0()), 1.0));
  // H_clock = penalty * sum_i |0><0|_{c_i} (x) |1><1|_{c_{i+1}}
  for (int i = 1; i <= t_steps - 1; ++i)
    out.h_clock.add_term(LocalTerm({clock_qubit(i), clock_qubit(i + 1)},
                                   kron(projector1(), projector0()),
                                   out.clock_penalty));
  // H'_prop: one merged Hermitian term per step.
  for (int t = 1; t <= t_steps; ++t) {
    const Gate& g = c.gates[t - 1];
    const auto proj_t = detail::clock_projector_factors(t, t_steps);
    const auto proj_tm1 = detail::clock_projector_factors(t - 1, t_steps);
    const auto trans = detail::clock_transition_factors(t, t_steps);

    std::vector<int> clock_union;
    for (const auto& f : {proj_t, proj_tm1, trans})
      for (const auto& [ci, cm] : f)
        if (std::find(clock_union.begin(), clock_union.end(), ci) ==
            clock_union.end())
          clock_union.push_back(ci);
    std::sort(clock_union.begin(), clock_union.end());

    const Matrix pt = detail::on_union(proj_t, clock_union);
    const Matrix ptm1 = detail::on_union(proj_tm1, clock_union);
    const Matrix tr = detail::on_union(trans, clock_union);
    const Index g_dim = g.unitary.rows();
    const Matrix ig = Matrix::Identity(g_dim, g_dim);

    Matrix block = 0.5 * (kron(pt, ig) + kron(ptm1, ig) -
                          kron(tr, g.unitary) -
                          kron(Matrix(tr.adjoint()), Matrix(g.unitary.adjoint())));
    std::vector<int> qs = g.qubits;
    for (int ci : clock_union) qs.push_back(clock_qubit(ci));
    out.h_prop.add_term(LocalTerm(qs, block, 1.0));
  }
  return out;
}

// Isometry from the abstract space onto the legal unary subspace:
// |work> (x) |t>  ->  |work> (x) |1^t 0^{T-t}>.
inline Matrix legal_clock_isometry(int work_qubits, int steps) {
  const Index w_dim = Index(1) << work_qubits;
  const Index big = Index(1) << (work_qubits + steps);
  Matrix iso = Matrix::Zero(big, w_dim * (steps + 1));
  for (int t = 0; t <= steps; ++t) {
    const Index clock_bits = (Index(1) << t) - 1;
    for (Index w = 0; w < w_dim; ++w)
      iso((clock_bits << work_qubits) | w, Index(t) * w_dim + w) = 1.0;
  }
  return iso;
}

// --- UQMA gap certification --------------------------------------------------

struct UqmaGapReport {
  double witness_acceptance = 0.0;
  double max_orthogonal_acceptance = 0.0;
  double lambda1_h1 = 0.0, lambda2_h1 = 0.0;
  double lambda1_h2 = 0.0, lambda2_h2 = 0.0;
  double t3_ratio_h1 = 0.0;  // lambda2(H1) * T^3
  double t3_ratio_h2 = 0.0;
};

// Empirical check of the unique-witness gap bound: reports the two lowest
// eigenvalues of H1 and H2 together with lambda2 * T^3. The unique-witness
// hypothesis is verified numerically first: the given witness must be
// accepted with probability >= accept_min and every orthogonal witness-space
// basis vector with probability <= orthogonal_max.
inline UqmaGapReport certify_uqma_gap(const VerifierCircuit& c,
                                      const Vector& witness,
                                      double accept_min = 0.9,
                                      double orthogonal_max = 0.1) {
  c.validate();
  const Index w_dim = Index(1) << c.witness_qubits;
  if (witness.size() != w_dim)
    throw ValidationError("witness dimension mismatch");

  UqmaGapReport report;
  report.witness_acceptance = acceptance_probability(c, witness);
  if (report.witness_acceptance < accept_min)
    throw ValidationError("witness check failure: acceptance below threshold");

  // Complete the witness to an orthonormal basis and probe the complement.
  Matrix basis = Matrix::Identity(w_dim, w_dim);
  Index pivot = 0;
  witness.cwiseAbs().maxCoeff(&pivot);
  basis.col(pivot) = basis.col(0);
  basis.col(0) = witness.normalized();
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix q = qr.householderQ();
  q.col(0) = witness.normalized();  // phase-stable first column
  for (Index j = 1; j < w_dim; ++j) {
    const double p = acceptance_probability(c, Vector(q.col(j)));
    report.max_orthogonal_acceptance =
        std::max(report.max_orthogonal_acceptance, p);
  }
  if (report.max_orthogonal_acceptance > orthogonal_max)
    throw ValidationError(
        "witness check failure: an orthogonal state is accepted");

  const double t3 = std::pow(double(c.steps()), 3.0);
  {
    AbstractClock abstract = compile_abstract(c);
    Eigen::SelfAdjointEigenSolver<Matrix> es(abstract.total(),
                                             Eigen::EigenvaluesOnly);
    report.lambda1_h1 = es.eigenvalues()(0);
    report.lambda2_h1 = es.eigenvalues()(1);
    report.t3_ratio_h1 = report.lambda2_h1 * t3;
  }
  {
    UnaryClock unary = compile_unary(c);
    SpectrumReport rep = lowest_k(unary.total(), 2);
    report.lambda1_h2 = rep.eigenvalues(0);
    report.lambda2_h2 = rep.eigenvalues(1);
    report.t3_ratio_h2 = report.lambda2_h2 * t3;
  }
  return report;
}

}  // namespace hamlab
