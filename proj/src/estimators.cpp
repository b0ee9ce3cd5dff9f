#include "volspec/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "volspec/error.hpp"

namespace volspec {

namespace {

// Modes retained for cutoff m.
std::size_t modes_for(EstimatorKind kind, std::size_t m) {
  return kind == EstimatorKind::MmFourierRealZero ? 2 * m + 1 : m;
}

// The "n" of the prefactor: n for SIML and MM, n + 1 for the sine basis.
double length_scale(EstimatorKind kind, std::size_t n) {
  return kind == EstimatorKind::InaSine ? static_cast<double>(n) + 1.0 : static_cast<double>(n);
}

void validate_cutoff(EstimatorKind kind, std::size_t n, std::size_t m) {
  if (n == 0) fail(ErrorCode::EmptyInput, "no increments");
  switch (kind) {
    case EstimatorKind::Siml:
    case EstimatorKind::InaSine:
      if (m < 1) fail(ErrorCode::InvalidParameter, "cutoff m must be >= 1");
      if (m > n)
        fail(ErrorCode::CutoffTooLarge,
             "cutoff m = " + std::to_string(m) + " exceeds n = " + std::to_string(n));
      break;
    case EstimatorKind::MmFourierRealZero:
      if (n % 2 == 0)
        fail(ErrorCode::EvenLength, "real Fourier form needs an odd number of increments, got " +
                                        std::to_string(n));
      if (2 * m + 1 > n)
        fail(ErrorCode::CutoffTooLarge,
             "2m + 1 = " + std::to_string(2 * m + 1) + " exceeds n = " + std::to_string(n));
      break;
    case EstimatorKind::MmFourierComplex:
      fail(ErrorCode::InvalidParameter, "the complex Fourier estimator is not a real quadratic form");
  }
}

EstimateResult real_estimate(EstimatorKind kind, std::span<const std::vector<double>> deltas,
                             std::size_t m) {
  if (deltas.empty()) fail(ErrorCode::EmptyInput, "no assets");
  const std::size_t assets = deltas.size();

  EstimateResult res;
  res.kind = kind;
  res.m = m;
  res.values.assign(assets * assets, {0.0, 0.0});

  std::vector<std::vector<double>> coeffs(assets);
  std::vector<double> scale(assets);
  for (std::size_t j = 0; j < assets; ++j) {
    const std::size_t n = deltas[j].size();
    validate_cutoff(kind, n, m);
    res.n_per_asset.push_back(n);
    const SpectralEstimator est(kind, n, m);
    coeffs[j] = est.coefficients(deltas[j]);
    scale[j] = length_scale(kind, n);
  }

  const double divisor = static_cast<double>(modes_for(kind, m));
  for (std::size_t j = 0; j < assets; ++j) {
    for (std::size_t jp = j; jp < assets; ++jp) {
      double acc = 0.0;
      for (std::size_t l = 0; l < coeffs[j].size(); ++l) acc += coeffs[j][l] * coeffs[jp][l];
      // Unequal lengths use the geometric mean of the two scales.
      const double s = (j == jp) ? scale[j] : std::sqrt(scale[j] * scale[jp]);
      const double v = s / divisor * acc;
      res.values[j * assets + jp] = v;
      res.values[jp * assets + j] = v;
    }
  }
  return res;
}

}  // namespace

const char* to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::Siml: return "siml";
    case EstimatorKind::MmFourierComplex: return "mm_complex";
    case EstimatorKind::MmFourierRealZero: return "mm_real";
    case EstimatorKind::InaSine: return "ina";
  }
  return "?";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  if (name == "siml") return EstimatorKind::Siml;
  if (name == "mm_complex") return EstimatorKind::MmFourierComplex;
  if (name == "mm_real") return EstimatorKind::MmFourierRealZero;
  if (name == "ina") return EstimatorKind::InaSine;
  fail(ErrorCode::InvalidParameter, "unknown estimator kind '" + std::string(name) +
                                        "' (expected siml, mm_complex, mm_real or ina)");
}

BasisKind basis_for(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Siml: return BasisKind::SimlCosine;
    case EstimatorKind::InaSine: return BasisKind::DstSine;
    case EstimatorKind::MmFourierRealZero: return BasisKind::FourierReal;
    case EstimatorKind::MmFourierComplex: break;
  }
  fail(ErrorCode::InvalidParameter, "the complex Fourier estimator has no real basis");
}

SpectralEstimator::SpectralEstimator(EstimatorKind kind, std::size_t increments, std::size_t m)
    : kind_(kind),
      m_(m),
      prefactor_(0.0),
      plan_((validate_cutoff(kind, increments, m), SpectralBasis(basis_for(kind), increments)),
            modes_for(kind, m)) {
  prefactor_ = length_scale(kind, increments) / static_cast<double>(modes_for(kind, m));
}

std::vector<double> SpectralEstimator::coefficients(std::span<const double> deltas) const {
  return plan_.apply(deltas);
}

double SpectralEstimator::evaluate(std::span<const double> deltas) const {
  const auto c = coefficients(deltas);
  double acc = 0.0;
  for (double x : c) acc += x * x;
  return prefactor_ * acc;
}

double SpectralEstimator::bilinear(std::span<const double> a, std::span<const double> b) const {
  const auto ca = coefficients(a);
  const auto cb = coefficients(b);
  double acc = 0.0;
  for (std::size_t l = 0; l < ca.size(); ++l) acc += ca[l] * cb[l];
  return prefactor_ * acc;
}

EstimateResult siml(std::span<const std::vector<double>> deltas, std::size_t m) {
  return real_estimate(EstimatorKind::Siml, deltas, m);
}

double siml(std::span<const double> deltas, std::size_t m) {
  return SpectralEstimator(EstimatorKind::Siml, deltas.size(), m).evaluate(deltas);
}

EstimateResult ina(std::span<const std::vector<double>> deltas, std::size_t m) {
  return real_estimate(EstimatorKind::InaSine, deltas, m);
}

double ina(std::span<const double> deltas, std::size_t m) {
  return SpectralEstimator(EstimatorKind::InaSine, deltas.size(), m).evaluate(deltas);
}

EstimateResult mm_fourier_real_zero(std::span<const std::vector<double>> deltas, std::size_t m) {
  return real_estimate(EstimatorKind::MmFourierRealZero, deltas, m);
}

double mm_fourier_real_zero(std::span<const double> deltas, std::size_t m) {
  return SpectralEstimator(EstimatorKind::MmFourierRealZero, deltas.size(), m).evaluate(deltas);
}

EstimateResult mm_fourier_complex(std::span<const ObservationSeries> obs, long q, std::size_t m) {
  if (obs.empty()) fail(ErrorCode::EmptyInput, "no assets");
  const std::size_t assets = obs.size();
  const long lm = static_cast<long>(m);

  // F_j(f) = sum_k exp(2 pi i f t_{k-1}) dY_k for f in [-m, m + |q|] range
  // needed by both factors; index f + offset.
  const long lo = std::min(-lm, -lm + q);
  const long hi = std::max(lm, lm + q);
  std::vector<std::vector<std::complex<double>>> transforms(assets);

  EstimateResult res;
  res.kind = EstimatorKind::MmFourierComplex;
  res.q = q;
  res.m = m;
  for (std::size_t j = 0; j < assets; ++j) {
    const auto& s = obs[j];
    if (s.values.size() < 2) fail(ErrorCode::EmptyInput, "asset needs at least two observations");
    if (s.times.size() != s.values.size())
      fail(ErrorCode::DimensionMismatch, "times and values differ in length");
    for (double t : s.times)
      if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::InvalidParameter, "observation times must lie in [0, 1]");
    const auto d = increments(s.values);
    res.n_per_asset.push_back(d.size());
    auto& tr = transforms[j];
    tr.assign(static_cast<std::size_t>(hi - lo + 1), {0.0, 0.0});
    for (long f = lo; f <= hi; ++f) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t k = 0; k < d.size(); ++k) {
        // reduce f * t modulo 1 before scaling by 2 pi
        double phase = static_cast<double>(f) * s.times[k];
        phase -= std::floor(phase);
        const double angle = 2.0 * std::numbers::pi * phase;
        acc += d[k] * std::complex<double>(std::cos(angle), std::sin(angle));
      }
      tr[static_cast<std::size_t>(f - lo)] = acc;
    }
  }

  res.values.assign(assets * assets, {0.0, 0.0});
  const double norm = 1.0 / static_cast<double>(2 * m + 1);
  for (std::size_t j = 0; j < assets; ++j) {
    for (std::size_t jp = 0; jp < assets; ++jp) {
      std::complex<double> acc{0.0, 0.0};
      for (long l = -lm; l <= lm; ++l)
        acc += transforms[j][static_cast<std::size_t>(l + q - lo)] *
               transforms[jp][static_cast<std::size_t>(-l - lo)];
      res.values[j * assets + jp] = norm * acc;
    }
  }
  return res;
}

double noise_functional(EstimatorKind kind, std::span<const double> noise, std::size_t m) {
  const auto dv = increments(noise);
  return SpectralEstimator(kind, dv.size(), m).evaluate(dv);
}

double noise_expectation_exact(EstimatorKind kind, std::size_t n, std::size_t m, double nu,
                               bool include_initial, bool include_terminal) {
  if (!(nu >= 0.0) || !std::isfinite(nu))
    fail(ErrorCode::InvalidParameter, "noise variance must be finite and >= 0");
  validate_cutoff(kind, n, m);

  // Variance of v_i, i = 0..n; Cov(dv) is tridiagonal with
  // C(k, k) = s_{k-1} + s_k and C(k, k+1) = -s_k (k one-based).
  std::vector<double> s(n + 1, nu);
  if (!include_initial) s[0] = 0.0;
  if (!include_terminal) s[n] = 0.0;

  const SpectralBasis basis(basis_for(kind), n);
  const std::size_t modes = modes_for(kind, m);
  std::vector<double> col(n);
  double trace = 0.0;
  for (std::size_t l = 0; l < modes; ++l) {
    basis.column(l, col);
    double q = 0.0;
    for (std::size_t k = 0; k < n; ++k) q += (s[k] + s[k + 1]) * col[k] * col[k];
    for (std::size_t k = 0; k + 1 < n; ++k) q -= 2.0 * s[k + 1] * col[k] * col[k + 1];
    trace += q;
  }
  return length_scale(kind, n) / static_cast<double>(modes) * trace;
}

}  // namespace volspec
