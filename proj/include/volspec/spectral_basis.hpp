#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace volspec {

// Row-major dense matrix. Only used for materialized bases and the small
// tridiagonal "Jacobi-type" matrices in checks and tests.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class BasisKind {
  SimlCosine,   // P_n: cosine basis diagonalizing J_n
  FourierReal,  // Q_n: real Fourier basis on an odd grid, diagonalizes the circulant
  DstSine,      // R_n: type-I sine basis diagonalizing the pure tridiagonal
};

enum class JacobiKind {
  Jn,            // tridiagonal with (1,1) = 1
  JnTilde,       // circulant: wrap-around corners, zero diagonal
  JnTildePrime,  // plain tridiagonal, zero diagonal
};

const char* to_string(BasisKind kind) noexcept;
const char* to_string(JacobiKind kind) noexcept;

// The Jacobi matrix each basis diagonalizes.
JacobiKind paired_jacobi(BasisKind kind) noexcept;

/// One of the three closed-form orthogonal families, described by kind and
/// dimension. Entries are evaluated on demand; `dense()` materializes the
/// full matrix and is meant for checks on small dimensions.
///
/// Indexing is zero-based in both arguments. For SimlCosine and DstSine row r
/// and column c correspond to k = r + 1 and l = c + 1. For FourierReal they
/// are the k and l of the real Fourier family directly (both run 0..dim-1).
class SpectralBasis {
 public:
  SpectralBasis(BasisKind kind, std::size_t dim);

  BasisKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }

  double entry(std::size_t row, std::size_t col) const;
  void column(std::size_t col, std::span<double> out) const;
  DenseMatrix dense() const;

 private:
  BasisKind kind_;
  std::size_t dim_;
  // Entries depend on an integer phase p reduced modulo 2 * denom_; the
  // trigonometric factor for every reduced phase is tabulated once.
  std::size_t denom_;
  std::vector<double> trig_;
  double scale_;
};

SpectralBasis build_basis(BasisKind kind, std::size_t dim);

DenseMatrix build_jacobi(JacobiKind kind, std::size_t dim);

// Eigenvalues in the column order of the paired basis.
std::vector<double> eigenvalues_closed_form(JacobiKind kind, std::size_t dim);

// (sum_k B(k, l) x_k) for the first num_modes columns l.
std::vector<double> project(const SpectralBasis& basis, std::span<const double> x,
                            std::size_t num_modes);

// The first num_modes columns of a basis, evaluated once and stored column by
// column. Repeated projections onto the same basis (Monte Carlo loops) reuse it.
class ProjectionPlan {
 public:
  ProjectionPlan(const SpectralBasis& basis, std::size_t num_modes);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_modes() const noexcept { return num_modes_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;

 private:
  std::size_t dim_;
  std::size_t num_modes_;
  std::vector<double> columns_;
};

// sum_{l=1}^{m} cos^2((2l-1) pi / (2(2n+1))), in closed form.
double cosine_square_sum(std::size_t m, std::size_t n);

struct BasisCheck {
  double orthogonality_error = 0.0;    // max |B^T B - I|
  double diagonalization_error = 0.0;  // max |B^T J B - diag(eigenvalues)|
};

BasisCheck check_basis(BasisKind kind, std::size_t dim);

}  // namespace volspec
