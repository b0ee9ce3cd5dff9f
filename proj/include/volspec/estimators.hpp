#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "volspec/market_model.hpp"
#include "volspec/spectral_basis.hpp"

namespace volspec {

enum class EstimatorKind {
  Siml,               // cosine basis, prefactor n / m
  MmFourierComplex,   // Fourier coefficient of spot volatility at integer q
  MmFourierRealZero,  // q = 0 coefficient through the real Fourier basis
  InaSine,            // sine basis, prefactor (n + 1) / m
};

// Short names used on the command line and in CSV output:
// siml, mm_complex, mm_real, ina.
const char* to_string(EstimatorKind kind) noexcept;
EstimatorKind parse_estimator_kind(std::string_view name);

struct EstimateResult {
  EstimatorKind kind = EstimatorKind::Siml;
  long q = 0;
  std::size_t m = 0;
  std::vector<std::size_t> n_per_asset;
  std::vector<std::complex<double>> values;  // row-major, assets x assets

  std::size_t assets() const noexcept { return n_per_asset.size(); }
  std::complex<double> at(std::size_t j, std::size_t jp) const { return values[j * assets() + jp]; }
  double real(std::size_t j, std::size_t jp) const { return at(j, jp).real(); }
};

/// A real-valued spectral estimator on a fixed number of increments: the
/// first modes() basis columns of the kind's basis, cached, and the kind's
/// prefactor. Applying it to increments gives the estimate; applying it to
/// noise increments gives the noise functional.
class SpectralEstimator {
 public:
  SpectralEstimator(EstimatorKind kind, std::size_t increments, std::size_t m);

  EstimatorKind kind() const noexcept { return kind_; }
  std::size_t length() const noexcept { return plan_.dim(); }
  std::size_t cutoff() const noexcept { return m_; }
  std::size_t modes() const noexcept { return plan_.num_modes(); }
  double prefactor() const noexcept { return prefactor_; }

  std::vector<double> coefficients(std::span<const double> deltas) const;
  double evaluate(std::span<const double> deltas) const;
  double bilinear(std::span<const double> a, std::span<const double> b) const;

 private:
  EstimatorKind kind_;
  std::size_t m_;
  double prefactor_;
  ProjectionPlan plan_;
};

// Basis used by a real estimator kind.
BasisKind basis_for(EstimatorKind kind);

EstimateResult siml(std::span<const std::vector<double>> deltas, std::size_t m);
double siml(std::span<const double> deltas, std::size_t m);

EstimateResult ina(std::span<const std::vector<double>> deltas, std::size_t m);
double ina(std::span<const double> deltas, std::size_t m);

// Increments on the odd equidistant grid t_k = k / (2n + 1).
EstimateResult mm_fourier_real_zero(std::span<const std::vector<double>> deltas, std::size_t m);
double mm_fourier_real_zero(std::span<const double> deltas, std::size_t m);

// General (possibly asynchronous) grids inside [0, 1].
EstimateResult mm_fourier_complex(std::span<const ObservationSeries> obs, long q, std::size_t m);

// The kind's quadratic form applied to the increments of a raw noise vector
// v_0..v_N.
double noise_functional(EstimatorKind kind, std::span<const double> noise, std::size_t m);

// Exact expectation of noise_functional under independent centred noise with
// variance nu at every index, except that v_0 (v_n) is zero when
// include_initial (include_terminal) is false. n is the number of increments.
double noise_expectation_exact(EstimatorKind kind, std::size_t n, std::size_t m, double nu,
                               bool include_initial, bool include_terminal);

}  // namespace volspec
