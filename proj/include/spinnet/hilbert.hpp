#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "spinnet/network.hpp"

namespace spinnet {

// Enumerated product basis of a fixed total-z-magnetization subspace.
// States are ordered by increasing mixed-radix code; site 0 is the most
// significant digit and digit d_j = m_j + s_j runs over 0..2s_j.
class SectorBasis {
 public:
  SectorBasis(SpinNetwork network, HalfInt m);  // throws EmptySectorError

  const SpinNetwork& network() const { return network_; }
  HalfInt m() const { return m_; }
  std::size_t dimension() const { return codes_.size(); }
  int site_count() const { return network_.site_count(); }

  int local_dim(int site_index) const { return local_dims_[site_index]; }
  std::uint64_t stride(int site_index) const { return strides_[site_index]; }
  std::uint64_t code(std::size_t state) const { return codes_[state]; }

  int digit(std::size_t state, int site_index) const {
    return static_cast<int>((codes_[state] / strides_[site_index]) %
                            static_cast<std::uint64_t>(local_dims_[site_index]));
  }
  HalfInt local_m(std::size_t state, int site_index) const {
    return HalfInt(2 * digit(state, site_index) - network_.sites()[site_index].spin.twice());
  }

  void decode(std::uint64_t code, std::span<int> digits) const;
  std::uint64_t encode(std::span<const int> digits) const;

  // Position of a code in the enumeration; exact inverse of code().
  std::optional<std::size_t> find_code(std::uint64_t code) const;

 private:
  SpinNetwork network_;
  HalfInt m_;
  std::vector<int> local_dims_;
  std::vector<std::uint64_t> strides_;
  std::vector<std::uint64_t> codes_;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

BasisPtr build_basis(const SpinNetwork& network, HalfInt m);

// Hermitian operator within one sector. Static operators have real matrix
// elements, so storage is a real sparse matrix; apply() also acts on complex
// vectors for dynamics.
class SparseOperator {
 public:
  SparseOperator(BasisPtr basis, Eigen::SparseMatrix<double> matrix);

  const SectorBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  std::size_t dimension() const { return basis_->dimension(); }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

  double hermiticity_defect() const;  // max |A - A^T| entrywise

 private:
  BasisPtr basis_;
  Eigen::SparseMatrix<double> matrix_;
};

// Matrix of S_j . S_k within the sector, exact ladder amplitudes.
SparseOperator heisenberg_term(const BasisPtr& basis, int site_j, int site_k);

// H = sum_e J_e (S_a . S_b). Couplings must refer to network edges; zero
// values are allowed (inactive edge).
SparseOperator assemble_hamiltonian(const BasisPtr& basis, const CouplingMap& couplings);

// S_tot^2 over all site pairs, not only edges.
SparseOperator total_spin_squared(const BasisPtr& basis);

// Uniform z-field: b * m * Identity within the sector.
SparseOperator zeeman_z(const BasisPtr& basis, double b);

// Cached per-edge terms over a shared sparsity pattern, for repeated
// assembly of H(t) along a schedule without re-enumerating matrix elements.
class HamiltonianAssembler {
 public:
  explicit HamiltonianAssembler(BasisPtr basis);

  const SectorBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }

  // Writes sum_e J_e T_e into the shared pattern. Unknown edges throw.
  void set_couplings(const CouplingMap& couplings);

  // y = H x for the couplings most recently set, plus `diagonal_shift` * x.
  void apply(const Eigen::Ref<const Eigen::VectorXcd>& x, Eigen::VectorXcd& y,
             double diagonal_shift = 0.0) const;

  const Eigen::SparseMatrix<double>& current_matrix() const { return pattern_; }

 private:
  BasisPtr basis_;
  Eigen::SparseMatrix<double> pattern_;  // compressed; values rewritten in place
  std::vector<EdgeKey> edge_keys_;
  // per edge: (slot into pattern value array, matrix element)
  std::vector<std::vector<std::pair<std::ptrdiff_t, double>>> edge_slots_;
};

}  // namespace spinnet
