#include "volspec/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "volspec/error.hpp"

namespace volspec {

namespace {

constexpr double kPi = std::numbers::pi;

// cos / sin of pi * p / denom with p first reduced modulo 2 * denom, so the
// argument never grows with the matrix dimension.
double cos_pi_ratio(std::uint64_t p, std::uint64_t denom) {
  p %= 2 * denom;
  return std::cos(kPi * static_cast<double>(p) / static_cast<double>(denom));
}

double sin_pi_ratio(std::uint64_t p, std::uint64_t denom) {
  p %= 2 * denom;
  return std::sin(kPi * static_cast<double>(p) / static_cast<double>(denom));
}

void validate_basis(BasisKind kind, std::size_t dim) {
  if (dim < 1) fail(ErrorCode::InvalidDimension, "basis dimension must be >= 1");
  if (kind == BasisKind::FourierReal && dim % 2 == 0)
    fail(ErrorCode::InvalidDimension,
         "FourierReal basis requires an odd dimension, got " + std::to_string(dim));
}

void validate_jacobi(JacobiKind kind, std::size_t dim) {
  if (dim < 1) fail(ErrorCode::InvalidDimension, "Jacobi dimension must be >= 1");
  if (kind == JacobiKind::JnTilde && dim < 3)
    fail(ErrorCode::InvalidDimension, "JnTilde requires dimension >= 3");
}

}  // namespace

const char* to_string(BasisKind kind) noexcept {
  switch (kind) {
    case BasisKind::SimlCosine: return "SimlCosine";
    case BasisKind::FourierReal: return "FourierReal";
    case BasisKind::DstSine: return "DstSine";
  }
  return "?";
}

const char* to_string(JacobiKind kind) noexcept {
  switch (kind) {
    case JacobiKind::Jn: return "Jn";
    case JacobiKind::JnTilde: return "JnTilde";
    case JacobiKind::JnTildePrime: return "JnTildePrime";
  }
  return "?";
}

JacobiKind paired_jacobi(BasisKind kind) noexcept {
  switch (kind) {
    case BasisKind::SimlCosine: return JacobiKind::Jn;
    case BasisKind::FourierReal: return JacobiKind::JnTilde;
    case BasisKind::DstSine: return JacobiKind::JnTildePrime;
  }
  return JacobiKind::Jn;
}

SpectralBasis::SpectralBasis(BasisKind kind, std::size_t dim)
    : kind_(kind), dim_(dim), denom_(0), scale_(0.0) {
  validate_basis(kind, dim);
  const auto n = static_cast<std::uint64_t>(dim);
  switch (kind) {
    case BasisKind::SimlCosine:
      // (l - 1/2) pi (k - 1/2) / (n + 1/2) = (2l-1)(2k-1) pi / (2(2n+1))
      denom_ = 2 * (2 * n + 1);
      scale_ = std::sqrt(2.0 / (static_cast<double>(dim) + 0.5));
      break;
    case BasisKind::FourierReal:
      denom_ = n;
      scale_ = std::numbers::sqrt2 / std::sqrt(static_cast<double>(dim));
      break;
    case BasisKind::DstSine:
      denom_ = n + 1;
      scale_ = std::sqrt(2.0 / (static_cast<double>(dim) + 1.0));
      break;
  }
  // SimlCosine stores cosines; DstSine sines; FourierReal cosines followed by sines.
  const std::size_t period = 2 * denom_;
  trig_.resize(kind == BasisKind::FourierReal ? 2 * period : period);
  for (std::size_t p = 0; p < period; ++p) {
    switch (kind) {
      case BasisKind::SimlCosine: trig_[p] = cos_pi_ratio(p, denom_); break;
      case BasisKind::DstSine: trig_[p] = sin_pi_ratio(p, denom_); break;
      case BasisKind::FourierReal:
        trig_[p] = cos_pi_ratio(p, denom_);
        trig_[period + p] = sin_pi_ratio(p, denom_);
        break;
    }
  }
}

double SpectralBasis::entry(std::size_t row, std::size_t col) const {
  const auto r = static_cast<std::uint64_t>(row);
  const auto c = static_cast<std::uint64_t>(col);
  const std::uint64_t period = 2 * denom_;
  switch (kind_) {
    case BasisKind::SimlCosine:
      return scale_ * trig_[((2 * c + 1) * (2 * r + 1)) % period];
    case BasisKind::FourierReal:
      if (c == 0) return 1.0 / std::sqrt(static_cast<double>(dim_));
      if (c % 2 == 0) return scale_ * trig_[(c * r) % period];
      return scale_ * trig_[period + ((c + 1) * r) % period];
    case BasisKind::DstSine:
      return scale_ * trig_[((r + 1) * (c + 1)) % period];
  }
  return 0.0;
}

void SpectralBasis::column(std::size_t col, std::span<double> out) const {
  if (col >= dim_ || out.size() != dim_)
    fail(ErrorCode::DimensionMismatch, "column index or output size out of range");
  for (std::size_t r = 0; r < dim_; ++r) out[r] = entry(r, col);
}

DenseMatrix SpectralBasis::dense() const {
  DenseMatrix m(dim_, dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) m(r, c) = entry(r, c);
  return m;
}

SpectralBasis build_basis(BasisKind kind, std::size_t dim) { return SpectralBasis(kind, dim); }

DenseMatrix build_jacobi(JacobiKind kind, std::size_t dim) {
  validate_jacobi(kind, dim);
  DenseMatrix j(dim, dim);
  for (std::size_t i = 0; i + 1 < dim; ++i) {
    j(i, i + 1) = 1.0;
    j(i + 1, i) = 1.0;
  }
  if (kind == JacobiKind::Jn) j(0, 0) = 1.0;
  if (kind == JacobiKind::JnTilde) {
    j(0, dim - 1) = 1.0;
    j(dim - 1, 0) = 1.0;
  }
  return j;
}

std::vector<double> eigenvalues_closed_form(JacobiKind kind, std::size_t dim) {
  validate_jacobi(kind, dim);
  std::vector<double> ev;
  ev.reserve(dim);
  const auto n = static_cast<std::uint64_t>(dim);
  switch (kind) {
    case JacobiKind::Jn:
      for (std::uint64_t k = 1; k <= n; ++k) ev.push_back(2.0 * cos_pi_ratio(2 * k - 1, 2 * n + 1));
      break;
    case JacobiKind::JnTildePrime:
      for (std::uint64_t k = 1; k <= n; ++k) ev.push_back(2.0 * cos_pi_ratio(k, n + 1));
      break;
    case JacobiKind::JnTilde: {
      if (dim % 2 == 0)
        fail(ErrorCode::InvalidDimension, "JnTilde eigenvalues require an odd dimension");
      ev.push_back(2.0);
      // sine column then cosine column for each frequency f, both 2cos(2 f pi / dim)
      for (std::uint64_t f = 1; 2 * f < n; ++f) {
        const double lambda = 2.0 * cos_pi_ratio(2 * f, n);
        ev.push_back(lambda);
        ev.push_back(lambda);
      }
      break;
    }
  }
  return ev;
}

std::vector<double> project(const SpectralBasis& basis, std::span<const double> x,
                            std::size_t num_modes) {
  if (x.size() != basis.dim())
    fail(ErrorCode::DimensionMismatch, "input length " + std::to_string(x.size()) +
                                           " does not match basis dimension " +
                                           std::to_string(basis.dim()));
  if (num_modes > basis.dim())
    fail(ErrorCode::DimensionMismatch, "more modes requested than the basis has");
  std::vector<double> out(num_modes, 0.0);
  for (std::size_t l = 0; l < num_modes; ++l) {
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) acc += basis.entry(k, l) * x[k];
    out[l] = acc;
  }
  return out;
}

ProjectionPlan::ProjectionPlan(const SpectralBasis& basis, std::size_t num_modes)
    : dim_(basis.dim()), num_modes_(num_modes) {
  if (num_modes > dim_)
    fail(ErrorCode::DimensionMismatch, "more modes requested than the basis has");
  columns_.resize(dim_ * num_modes_);
  for (std::size_t l = 0; l < num_modes_; ++l)
    basis.column(l, std::span<double>(columns_.data() + l * dim_, dim_));
}

void ProjectionPlan::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim_ || out.size() != num_modes_)
    fail(ErrorCode::DimensionMismatch, "projection input/output size mismatch");
  for (std::size_t l = 0; l < num_modes_; ++l) {
    const double* col = columns_.data() + l * dim_;
    double acc = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) acc += col[k] * x[k];
    out[l] = acc;
  }
}

std::vector<double> ProjectionPlan::apply(std::span<const double> x) const {
  std::vector<double> out(num_modes_);
  apply(x, out);
  return out;
}

double cosine_square_sum(std::size_t m, std::size_t n) {
  if (m < 1 || m > n)
    fail(ErrorCode::InvalidDimension, "cosine_square_sum requires 1 <= m <= n");
  const auto denom = static_cast<std::uint64_t>(2 * n + 1);
  return static_cast<double>(m) / 2.0 +
         0.25 * sin_pi_ratio(2 * static_cast<std::uint64_t>(m), denom) / sin_pi_ratio(1, denom);
}

BasisCheck check_basis(BasisKind kind, std::size_t dim) {
  const SpectralBasis basis(kind, dim);
  const DenseMatrix b = basis.dense();
  const JacobiKind jk = paired_jacobi(kind);
  const DenseMatrix j = build_jacobi(jk, dim);
  const std::vector<double> ev = eigenvalues_closed_form(jk, dim);

  // J B, exploiting the sparsity of J.
  DenseMatrix jb(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    auto out = jb.row(r);
    for (std::size_t c = 0; c < dim; ++c) {
      const double w = j(r, c);
      if (w == 0.0) continue;
      const auto src = b.row(c);
      for (std::size_t t = 0; t < dim; ++t) out[t] += w * src[t];
    }
  }

  // B^T B and B^T (J B) are symmetric; accumulate both upper triangles in one
  // pass of rank-1 updates over rows of B so the inner loop is contiguous.
  DenseMatrix gram(dim, dim), diag(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double* __restrict brow = b.row(k).data();
    const double* __restrict jrow = jb.row(k).data();
    for (std::size_t i = 0; i < dim; ++i) {
      const double a = brow[i];
      double* __restrict gi = gram.row(i).data();
      double* __restrict di = diag.row(i).data();
      for (std::size_t c = i; c < dim; ++c) {
        gi[c] += a * brow[c];
        di[c] += a * jrow[c];
      }
    }
  }

  BasisCheck result;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t c = i; c < dim; ++c) {
      const double id = (i == c) ? 1.0 : 0.0;
      const double lam = (i == c) ? ev[i] : 0.0;
      result.orthogonality_error = std::max(result.orthogonality_error, std::abs(gram(i, c) - id));
      result.diagonalization_error =
          std::max(result.diagonalization_error, std::abs(diag(i, c) - lam));
    }
  }
  return result;
}

}  // namespace volspec
