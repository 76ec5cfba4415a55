#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "hamlab/common.hpp"

namespace hamlab {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

// Bit-order convention used everywhere: qubit q is bit q of the
// computational-basis index, so qubit 0 is the least significant bit.
// A term block follows the same rule relative to its own qubit list:
// bit j of the block index belongs to qubits[j].

inline Matrix pauli_matrix(char p) {
  Matrix m(2, 2);
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default:
      throw SchemaError(std::string("unknown Pauli letter '") + p + "'");
  }
  return m;
}

inline Matrix identity(Index dim) { return Matrix::Identity(dim, dim); }

inline Matrix ket_bra(int a, int b) {
  Matrix m = Matrix::Zero(2, 2);
  m(a, b) = 1.0;
  return m;
}

inline Matrix projector0() { return ket_bra(0, 0); }
inline Matrix projector1() { return ket_bra(1, 1); }

// Kronecker product with the SECOND factor on the low bits, i.e.
// (A ⊗ B)|a⟩|b⟩ indexes as a * dim(B) + b.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Block for an ordered qubit list: factors[j] acts on bit j of the index,
// so later factors end up on higher bits.
inline Matrix kron_lsb(const std::vector<Matrix>& factors) {
  if (factors.empty()) return Matrix::Identity(1, 1);
  Matrix acc = factors.front();
  for (std::size_t j = 1; j < factors.size(); ++j) acc = kron(factors[j], acc);
  return acc;
}

inline double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double spectral_norm_hermitian(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// One weighted interaction: a Hermitian block on an ordered set of qubits.
struct LocalTerm {
  std::vector<int> qubits;
  Matrix block;
  double weight = 1.0;

  LocalTerm() = default;
  LocalTerm(std::vector<int> qs, Matrix b, double w = 1.0)
      : qubits(std::move(qs)), block(std::move(b)), weight(w) {
    validate();
  }

  int arity() const { return static_cast<int>(qubits.size()); }

  void validate() const {
    const Index d = Index(1) << qubits.size();
    if (block.rows() != d || block.cols() != d)
      throw ValidationError("term block dimension does not match qubit count");
    if (hermiticity_defect(block) > tol::hermitian_input)
      throw ValidationError("term block is not Hermitian within 1e-12");
    std::vector<int> sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("term qubit indices are not distinct");
    for (int q : qubits)
      if (q < 0) throw ValidationError("negative qubit index");
  }
};

// Weighted sum of local terms on n qubits; the full operator is never formed
// until assemble() is called.
struct LocalHamiltonian {
  int n = 0;
  std::vector<LocalTerm> terms;

  LocalHamiltonian() = default;
  explicit LocalHamiltonian(int qubits) : n(qubits) {
    if (qubits < 1) throw ValidationError("qubit count must be >= 1");
  }
  LocalHamiltonian(int qubits, std::vector<LocalTerm> ts)
      : n(qubits), terms(std::move(ts)) {
    if (qubits < 1) throw ValidationError("qubit count must be >= 1");
    for (const auto& t : terms) check_term(t);
  }

  void add_term(LocalTerm t) {
    check_term(t);
    terms.push_back(std::move(t));
  }

  Index dimension() const { return Index(1) << n; }

  int locality() const {
    int k = 0;
    for (const auto& t : terms) k = std::max(k, t.arity());
    return k;
  }

  // Upper bound on the spectral radius: sum of |weight| * ||block||_2.
  double norm_bound() const {
    double s = 0.0;
    for (const auto& t : terms)
      s += std::abs(t.weight) * spectral_norm_hermitian(t.block);
    return s;
  }

 private:
  void check_term(const LocalTerm& t) const {
    t.validate();
    for (int q : t.qubits)
      if (q >= n)
        throw ValidationError("term qubit index " + std::to_string(q) +
                              " out of range for n=" + std::to_string(n));
  }
};

// An observable is structurally a local Hamiltonian; the alias records the
// role in signatures.
using Observable = LocalHamiltonian;

enum class Storage { Auto, Dense, Sparse };

// Full 2^n-dimensional operator, dense or coordinate-sparse depending on
// size. Both representations are exact.
class AssembledOperator {
 public:
  static AssembledOperator dense(Matrix m) {
    AssembledOperator op;
    op.dim_ = m.rows();
    op.dense_ = std::move(m);
    op.is_dense_ = true;
    return op;
  }
  static AssembledOperator sparse(SparseMatrix m) {
    AssembledOperator op;
    op.dim_ = m.rows();
    op.sparse_ = std::move(m);
    op.is_dense_ = false;
    return op;
  }

  Index dim() const { return dim_; }
  bool is_dense() const { return is_dense_; }
  const Matrix& dense_matrix() const {
    if (!is_dense_) throw Error("operator is stored sparse");
    return dense_;
  }
  const SparseMatrix& sparse_matrix() const {
    if (is_dense_) throw Error("operator is stored dense");
    return sparse_;
  }

  Matrix to_dense() const {
    if (is_dense_) return dense_;
    return Matrix(sparse_);
  }

  Vector apply(const Vector& v) const {
    return is_dense_ ? Vector(dense_ * v) : Vector(sparse_ * v);
  }

  double hermiticity_defect() const {
    if (is_dense_) return hamlab::hermiticity_defect(dense_);
    SparseMatrix d = SparseMatrix(sparse_.adjoint()) - sparse_;
    double m = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(d, k); it; ++it)
        m = std::max(m, std::abs(it.value()));
    return m;
  }

 private:
  Index dim_ = 0;
  bool is_dense_ = true;
  Matrix dense_;
  SparseMatrix sparse_;
};

namespace detail {

// Scatters the bits of `sub` into the positions listed in `positions`.
inline Index deposit_bits(Index sub, const std::vector<int>& positions) {
  Index out = 0;
  for (std::size_t j = 0; j < positions.size(); ++j)
    out |= ((sub >> j) & 1) << positions[j];
  return out;
}

inline std::vector<int> complement_positions(const std::vector<int>& qubits,
                                             int n) {
  std::vector<int> rest;
  rest.reserve(static_cast<std::size_t>(n) - qubits.size());
  for (int q = 0; q < n; ++q)
    if (std::find(qubits.begin(), qubits.end(), q) == qubits.end())
      rest.push_back(q);
  return rest;
}

template <typename Sink>
void scatter_block(const Matrix& block, const std::vector<int>& qubits, int n,
                   Sink&& sink) {
  const Index block_dim = block.rows();
  const std::vector<int> rest = complement_positions(qubits, n);
  const Index rest_dim = Index(1) << rest.size();
  for (Index r = 0; r < rest_dim; ++r) {
    const Index base = deposit_bits(r, rest);
    for (Index i = 0; i < block_dim; ++i) {
      const Index row = base | deposit_bits(i, qubits);
      for (Index j = 0; j < block_dim; ++j) {
        const Complex v = block(i, j);
        if (v == Complex(0, 0)) continue;
        sink(row, base | deposit_bits(j, qubits), v);
      }
    }
  }
}

template <typename Sink>
void scatter_term(const LocalTerm& term, int n, Sink&& sink) {
  scatter_block(term.block, term.qubits, n, sink);
}

}  // namespace detail

inline void check_dimension(int n) {
  if (n < 1) throw ValidationError("qubit count must be >= 1");
  const Index cap = dimension_cap();
  if (n >= 62 || (Index(1) << n) > cap)
    throw DimensionCapError("full dimension 2^" + std::to_string(n) +
                            " exceeds cap " + std::to_string(cap));
}

// Embeds one term into the full 2^n space: acts as `block` on its qubits and
// as identity elsewhere.
inline AssembledOperator embed_term(const LocalTerm& term, int n,
                                    Storage storage = Storage::Auto) {
  term.validate();
  for (int q : term.qubits)
    if (q >= n) throw ValidationError("term qubit index out of range");
  check_dimension(n);
  const Index dim = Index(1) << n;
  const bool use_dense =
      storage == Storage::Dense ||
      (storage == Storage::Auto && dim <= kDenseDimensionLimit);
  if (use_dense) {
    Matrix full = Matrix::Zero(dim, dim);
    detail::scatter_term(term, n, [&](Index r, Index c, Complex v) {
      full(r, c) += v;
    });
    return AssembledOperator::dense(std::move(full));
  }
  std::vector<Eigen::Triplet<Complex>> trips;
  detail::scatter_term(term, n, [&](Index r, Index c, Complex v) {
    trips.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
  });
  SparseMatrix sp(dim, dim);
  sp.setFromTriplets(trips.begin(), trips.end());
  return AssembledOperator::sparse(std::move(sp));
}

// Embeds an arbitrary (not necessarily Hermitian) block, e.g. a gate
// unitary, into the full space as a dense matrix.
inline Matrix embed_block_dense(const Matrix& block,
                                const std::vector<int>& qubits, int n) {
  const Index dim = Index(1) << n;
  Matrix full = Matrix::Zero(dim, dim);
  detail::scatter_block(block, qubits, n,
                        [&](Index r, Index c, Complex v) { full(r, c) += v; });
  return full;
}

// Sum of all embedded terms. Hermiticity of the result is verified to 1e-10.
inline AssembledOperator assemble(const LocalHamiltonian& h,
                                  Storage storage = Storage::Auto) {
  check_dimension(h.n);
  const Index dim = h.dimension();
  const bool use_dense =
      storage == Storage::Dense ||
      (storage == Storage::Auto && dim <= kDenseDimensionLimit);
  AssembledOperator out;
  if (use_dense) {
    Matrix full = Matrix::Zero(dim, dim);
    for (const auto& t : h.terms) {
      const Complex w(t.weight, 0);
      detail::scatter_term(t, h.n, [&](Index r, Index c, Complex v) {
        full(r, c) += w * v;
      });
    }
    out = AssembledOperator::dense(std::move(full));
  } else {
    std::vector<Eigen::Triplet<Complex>> trips;
    for (const auto& t : h.terms) {
      const Complex w(t.weight, 0);
      detail::scatter_term(t, h.n, [&](Index r, Index c, Complex v) {
        trips.emplace_back(static_cast<int>(r), static_cast<int>(c), w * v);
      });
    }
    SparseMatrix sp(dim, dim);
    sp.setFromTriplets(trips.begin(), trips.end());
    out = AssembledOperator::sparse(std::move(sp));
  }
  if (out.hermiticity_defect() > tol::hermitian_assembled)
    throw ValidationError("assembled operator is not Hermitian within 1e-10");
  return out;
}

inline LocalHamiltonian add(const LocalHamiltonian& a,
                            const LocalHamiltonian& b) {
  if (a.n != b.n)
    throw ValidationError("cannot add Hamiltonians on different qubit counts");
  LocalHamiltonian out(a.n);
  out.terms = a.terms;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out;
}

inline LocalHamiltonian scale(const LocalHamiltonian& h, double c) {
  LocalHamiltonian out = h;
  for (auto& t : out.terms) t.weight *= c;
  return out;
}

// Inserts `count` fresh qubits starting at index `position`; existing qubits
// at or above `position` shift up by `count`. The new qubits carry no terms.
inline LocalHamiltonian tensor_with_ancilla(const LocalHamiltonian& h,
                                            int count, int position) {
  if (count < 0) throw ValidationError("ancilla count must be >= 0");
  if (position < 0 || position > h.n)
    throw ValidationError("ancilla position out of range [0, n]");
  LocalHamiltonian out(h.n + count);
  out.terms = h.terms;
  for (auto& t : out.terms)
    for (auto& q : t.qubits)
      if (q >= position) q += count;
  return out;
}

// Adds c * I as an explicit term (identity block on qubit 0).
inline LocalHamiltonian shift(const LocalHamiltonian& h, double c) {
  LocalHamiltonian out = h;
  if (c != 0.0) out.add_term(LocalTerm({0}, identity(2), c));
  return out;
}

}  // namespace hamlab
