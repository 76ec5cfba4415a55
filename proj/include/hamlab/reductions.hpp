#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hamlab/oracle.hpp"
#include "hamlab/spectral.hpp"

namespace hamlab {

// Combiner for the EXACT-LH hardness reduction:
//   H = |0><0| (x) H1 + 3 |1><1| (x) H2 + 4 eps |0><0| (x) I
// on m+1 qubits. The selector is the new highest qubit (index m), so the
// |0> sector carries spec(H1) + 4 eps and the |1> sector carries 3 spec(H2).
inline LocalHamiltonian dqma_combine(const LocalHamiltonian& h1,
                                     const LocalHamiltonian& h2, double eps) {
  if (h1.n != h2.n)
    throw ValidationError("dqma_combine requires equal qubit counts");
  const int sel = h1.n;
  LocalHamiltonian out(h1.n + 1);
  for (const auto& t : h1.terms) {
    std::vector<int> qs = t.qubits;
    qs.push_back(sel);
    out.add_term(LocalTerm(qs, kron(projector0(), t.block), t.weight));
  }
  for (const auto& t : h2.terms) {
    std::vector<int> qs = t.qubits;
    qs.push_back(sel);
    out.add_term(LocalTerm(qs, kron(projector1(), t.block), 3.0 * t.weight));
  }
  out.add_term(LocalTerm({sel}, projector0(), 4.0 * eps));
  return out;
}

// The EXACT-LH instance parameters the combiner decides: (4.5 eps, eps/2, eps).
struct DqmaInstanceParams {
  double a, eps, delta;
};
inline DqmaInstanceParams dqma_exact_lh_params(double eps) {
  return {4.5 * eps, eps / 2.0, eps};
}

// Query tree: one Hamiltonian per answer prefix, all on a shared q-qubit
// query space, plus the accept predicate over full answer strings.
struct QueryTree {
  double epsilon = 0.0;
  int depth = 0;
  int query_qubits = 0;
  std::map<std::string, LocalHamiltonian> queries;  // key: prefix y_1..y_{i-1}
  std::set<std::string> accept;
};

namespace detail {

inline void for_each_bitstring(int length,
                               const std::function<void(const std::string&)>& f) {
  std::string s(static_cast<std::size_t>(length), '0');
  const std::uint64_t count = 1ULL << length;
  for (std::uint64_t v = 0; v < count; ++v) {
    for (int i = 0; i < length; ++i) s[i] = (v >> i) & 1 ? '1' : '0';
    f(s);
  }
}

}  // namespace detail

inline void validate_tree_structure(const QueryTree& tree) {
  if (tree.depth < 1) throw ValidationError("query tree depth must be >= 1");
  if (tree.query_qubits < 1)
    throw ValidationError("query space must have >= 1 qubit");
  if (!(tree.epsilon > 0)) throw ValidationError("tree epsilon must be > 0");
  std::size_t expected = 0;
  for (int i = 1; i <= tree.depth; ++i) expected += std::size_t(1) << (i - 1);
  if (tree.queries.size() != expected)
    throw ValidationError("query tree must hold one Hamiltonian per prefix");
  for (int i = 1; i <= tree.depth; ++i) {
    detail::for_each_bitstring(i - 1, [&](const std::string& prefix) {
      auto it = tree.queries.find(prefix);
      if (it == tree.queries.end())
        throw ValidationError("missing query Hamiltonian for prefix '" +
                              prefix + "'");
      if (it->second.n != tree.query_qubits)
        throw ValidationError("query Hamiltonian qubit count mismatch");
    });
  }
  for (const auto& s : tree.accept) {
    if (static_cast<int>(s.size()) != tree.depth)
      throw ValidationError("accept string length differs from depth");
    for (char c : s)
      if (c != '0' && c != '1')
        throw ValidationError("accept strings must be binary");
  }
}

// LH promise at (a, b) = (eps, 3 eps): every query ground energy is <= eps
// or >= 3 eps.
inline void validate_tree_lh_promise(const QueryTree& tree,
                                     const SpectrumOptions& opts = {}) {
  for (const auto& [prefix, h] : tree.queries) {
    const double l1 = lowest_k(h, 1, opts).lambda1();
    if (l1 > tree.epsilon && l1 < 3 * tree.epsilon)
      throw PromiseConstructionError(
          "query '" + prefix + "' violates the LH promise: lambda1 = " +
          std::to_string(l1));
  }
}

// UNIQUE-LH-style promise for the gap-hardness construction: the LH promise
// plus a spectral gap of at least eps in every query Hamiltonian.
inline void validate_tree_gap_promise(const QueryTree& tree,
                                      const SpectrumOptions& opts = {}) {
  validate_tree_lh_promise(tree, opts);
  for (const auto& [prefix, h] : tree.queries) {
    const GapReport g = spectral_gap(h, opts);
    if (g.gap < tree.epsilon - 1e-12)
      throw PromiseConstructionError(
          "query '" + prefix + "' violates the gap promise: gap = " +
          std::to_string(g.gap));
  }
}

// Register layout, level-major: level i (1-based) occupies qubits
// (i-1)(1+q) .. i(1+q)-1, answer qubit first, query register after it.
inline int answer_qubit(int level, int query_qubits) {
  return (level - 1) * (1 + query_qubits);
}
inline int query_register_base(int level, int query_qubits) {
  return answer_qubit(level, query_qubits) + 1;
}

inline std::vector<int> answer_qubit_positions(int levels, int query_qubits) {
  std::vector<int> out;
  out.reserve(levels);
  for (int i = 1; i <= levels; ++i)
    out.push_back(answer_qubit(i, query_qubits));
  return out;
}

// Simulated oracle answers along the correct path: y_i = 1 iff the ground
// energy of the level-i query under prefix y_1..y_{i-1} is at most eps.
inline std::string correct_answer_path(const QueryTree& tree,
                                       const SpectrumOptions& opts = {}) {
  std::string path;
  for (int i = 1; i <= tree.depth; ++i) {
    const LocalHamiltonian& h = tree.queries.at(path);
    path += lowest_k(h, 1, opts).lambda1() <= tree.epsilon ? '1' : '0';
  }
  return path;
}

inline bool machine_output(const QueryTree& tree,
                           const SpectrumOptions& opts = {}) {
  return tree.accept.count(correct_answer_path(tree, opts)) > 0;
}

namespace detail {

inline std::vector<Matrix> prefix_projectors(const std::string& prefix) {
  std::vector<Matrix> blocks;
  blocks.reserve(prefix.size());
  for (char c : prefix) blocks.push_back(c == '1' ? projector1() : projector0());
  return blocks;
}

inline std::vector<int> prefix_answer_qubits(int level, int query_qubits) {
  std::vector<int> qs;
  qs.reserve(level - 1);
  for (int j = 1; j < level; ++j) qs.push_back(answer_qubit(j, query_qubits));
  return qs;
}

}  // namespace detail

// The level-t query-tree Hamiltonian
//   H_t = sum_{i<=t} 4^{1-i} sum_prefix |prefix><prefix| (x)
//         ( 2 eps |0><0|_{ans i} + |1><1|_{ans i} (x) H^{(i)}_prefix )
// on t(1+q) qubits. Strict mode validates the LH promise first.
inline LocalHamiltonian query_tree_hamiltonian(const QueryTree& tree, int level,
                                               bool strict = true,
                                               const SpectrumOptions& opts = {}) {
  validate_tree_structure(tree);
  if (level < 1 || level > tree.depth)
    throw ValidationError("level out of range");
  if (strict) validate_tree_lh_promise(tree, opts);

  const int q = tree.query_qubits;
  LocalHamiltonian out(level * (1 + q));
  for (int i = 1; i <= level; ++i) {
    const double scale = std::pow(4.0, -(i - 1));
    detail::for_each_bitstring(i - 1, [&](const std::string& prefix) {
      std::vector<int> ctrl_qs = detail::prefix_answer_qubits(i, q);
      std::vector<Matrix> ctrl_blocks = detail::prefix_projectors(prefix);

      // 2 eps |0><0| branch on the level-i answer qubit
      {
        std::vector<int> qs = ctrl_qs;
        qs.push_back(answer_qubit(i, q));
        std::vector<Matrix> blocks = ctrl_blocks;
        blocks.push_back(projector0());
        out.add_term(
            LocalTerm(qs, kron_lsb(blocks), 2.0 * tree.epsilon * scale));
      }
      // |1><1| (x) H^{(i)}_prefix branch
      const LocalHamiltonian& query = tree.queries.at(prefix);
      for (const auto& t : query.terms) {
        std::vector<int> qs = ctrl_qs;
        qs.push_back(answer_qubit(i, q));
        for (int tq : t.qubits) qs.push_back(query_register_base(i, q) + tq);
        std::vector<Matrix> blocks = ctrl_blocks;
        blocks.push_back(projector1());
        const Matrix low = kron_lsb(blocks);
        out.add_term(LocalTerm(qs, kron(t.block, low), t.weight * scale));
      }
    });
  }
  return out;
}

enum class AnswerOrientation { AcceptedStrings, RejectedStrings };

// Projector onto answer-register strings. The rejected-string orientation is
// the observable whose APPROX-SIMULATION instance with thresholds (0, 1)
// reproduces the machine output (the accepted orientation would invert it:
// the ground sector carries <A> = 1 exactly on accepted paths).
inline Observable query_tree_observable(
    const QueryTree& tree,
    AnswerOrientation orientation = AnswerOrientation::RejectedStrings) {
  validate_tree_structure(tree);
  const int q = tree.query_qubits;
  Observable out(tree.depth * (1 + q));
  detail::for_each_bitstring(tree.depth, [&](const std::string& s) {
    const bool accepted = tree.accept.count(s) > 0;
    const bool include = orientation == AnswerOrientation::AcceptedStrings
                             ? accepted
                             : !accepted;
    if (!include) return;
    out.add_term(LocalTerm(answer_qubit_positions(tree.depth, q),
                           kron_lsb(detail::prefix_projectors(s)), 1.0));
  });
  return out;
}

// Gadget with a unique ground state at 2 eps and everything else at 3 eps:
//   H0 = 2 eps |0...0><0...0| + 3 eps (I - |0...0><0...0|)
// expressed as one q-local term. Its spectral gap is exactly eps.
struct GadgetH0 {
  LocalHamiltonian hamiltonian;
  double epsilon = 0.0;
};

inline GadgetH0 make_h0(double eps, int q) {
  if (q < 1) throw ValidationError("gadget needs at least one qubit");
  if (!(eps > 0)) throw ValidationError("gadget eps must be > 0");
  const Index dim = Index(1) << q;
  Matrix block = 3.0 * eps * Matrix::Identity(dim, dim);
  block(0, 0) = 2.0 * eps;
  std::vector<int> qs(q);
  for (int i = 0; i < q; ++i) qs[i] = i;
  GadgetH0 out;
  out.epsilon = eps;
  out.hamiltonian = LocalHamiltonian(q);
  out.hamiltonian.add_term(LocalTerm(qs, block, 1.0));
  return out;
}

// Spectral-gap hardness Hamiltonian (query tree with H0 wells in the |0>
// branches, plus the extra qubit B):
//   H_final = I_B (x) H_d + eps |0><0|_B (x) H'
// where H' projects onto rejecting answer strings. B is the last qubit.
inline LocalHamiltonian gap_hardness_hamiltonian(const QueryTree& tree,
                                                 bool strict = true,
                                                 const SpectrumOptions& opts = {}) {
  validate_tree_structure(tree);
  if (strict) validate_tree_gap_promise(tree, opts);

  const int q = tree.query_qubits;
  const int d = tree.depth;
  const int b_qubit = d * (1 + q);
  const GadgetH0 gadget = make_h0(tree.epsilon, q);

  LocalHamiltonian out(b_qubit + 1);
  for (int i = 1; i <= d; ++i) {
    const double scale = std::pow(4.0, -(i - 1));
    detail::for_each_bitstring(i - 1, [&](const std::string& prefix) {
      std::vector<int> ctrl_qs = detail::prefix_answer_qubits(i, q);
      std::vector<Matrix> ctrl_blocks = detail::prefix_projectors(prefix);

      // |0><0| (x) H0 branch
      for (const auto& t : gadget.hamiltonian.terms) {
        std::vector<int> qs = ctrl_qs;
        qs.push_back(answer_qubit(i, q));
        for (int tq : t.qubits) qs.push_back(query_register_base(i, q) + tq);
        std::vector<Matrix> blocks = ctrl_blocks;
        blocks.push_back(projector0());
        out.add_term(LocalTerm(qs, kron(t.block, kron_lsb(blocks)),
                               t.weight * scale));
      }
      // |1><1| (x) H^{(i)}_prefix branch
      const LocalHamiltonian& query = tree.queries.at(prefix);
      for (const auto& t : query.terms) {
        std::vector<int> qs = ctrl_qs;
        qs.push_back(answer_qubit(i, q));
        for (int tq : t.qubits) qs.push_back(query_register_base(i, q) + tq);
        std::vector<Matrix> blocks = ctrl_blocks;
        blocks.push_back(projector1());
        out.add_term(LocalTerm(qs, kron(t.block, kron_lsb(blocks)),
                               t.weight * scale));
      }
    });
  }
  // eps |0><0|_B (x) H' over rejecting strings
  detail::for_each_bitstring(d, [&](const std::string& s) {
    if (tree.accept.count(s) > 0) return;
    std::vector<int> qs = answer_qubit_positions(d, q);
    qs.push_back(b_qubit);
    std::vector<Matrix> blocks = detail::prefix_projectors(s);
    blocks.push_back(projector0());
    out.add_term(LocalTerm(qs, kron_lsb(blocks), tree.epsilon));
  });
  return out;
}

// --- Sector diagnostics (certificates and tests) -----------------------------

// Minimum energy within each answer sector: entry s of the result is the
// smallest eigenvalue of the block whose answer bits spell s (bit i-1 of s is
// the level-i answer).
inline RealVector sector_minima(const Matrix& full,
                                const std::vector<int>& answer_positions) {
  const int t = static_cast<int>(answer_positions.size());
  const Index sectors = Index(1) << t;
  RealVector out(sectors);
  for (Index s = 0; s < sectors; ++s) {
    std::vector<Index> members;
    for (Index idx = 0; idx < full.rows(); ++idx) {
      bool match = true;
      for (int i = 0; i < t && match; ++i)
        match = (((idx >> answer_positions[i]) & 1) == ((s >> i) & 1));
      if (match) members.push_back(idx);
    }
    Matrix sub(members.size(), members.size());
    for (std::size_t r = 0; r < members.size(); ++r)
      for (std::size_t c = 0; c < members.size(); ++c)
        sub(r, c) = full(members[r], members[c]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sub, Eigen::EigenvaluesOnly);
    out(s) = es.eigenvalues()(0);
  }
  return out;
}

inline std::uint64_t sector_bits(const std::string& path) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < path.size(); ++i)
    if (path[i] == '1') v |= std::uint64_t(1) << i;
  return v;
}

// Squared norm of the projection of `state` onto the answer sector.
inline double sector_overlap(const Vector& state,
                             const std::vector<int>& answer_positions,
                             std::uint64_t sector) {
  double sum = 0.0;
  for (Index idx = 0; idx < state.size(); ++idx) {
    bool match = true;
    for (std::size_t i = 0; i < answer_positions.size() && match; ++i)
      match = (((idx >> answer_positions[i]) & 1) ==
               ((sector >> i) & 1));
    if (match) sum += std::norm(state(idx));
  }
  return sum;
}

}  // namespace hamlab
