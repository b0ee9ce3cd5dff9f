#include "volspec/ks_likelihood.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>

#include "volspec/error.hpp"
#include "volspec/spectral_basis.hpp"

namespace volspec {

namespace {

// Search box for log c and log nu.
constexpr double kLogLower = -60.0;
constexpr double kLogUpper = 60.0;

void check_partition(std::size_t n, std::size_t count, const char* what) {
  if (count < 1 || count > n)
    fail(ErrorCode::InvalidParameter,
         std::string(what) + " must lie in [1, " + std::to_string(n) + "], got " +
             std::to_string(count));
}

struct Gradient {
  double log_c = 0.0;
  double log_nu = 0.0;
};

Gradient log_gradient(const SpectralCoefficients& z, double c, double nu) {
  Gradient g;
  for (std::size_t k = 0; k < z.n(); ++k) {
    const double w = z.a[k] * nu + c;
    const double r = (z.z[k] * z.z[k] - w) / (w * w);
    g.log_c += r;
    g.log_nu += z.a[k] * r;
  }
  g.log_c *= 0.5 * c;
  g.log_nu *= 0.5 * nu;
  return g;
}

// One coordinate step: move x uphill until the derivative changes sign,
// then solve for the root inside the bracket.
template <class Deriv>
double line_search(Deriv&& deriv, double x0) {
  const double g0 = deriv(x0);
  if (g0 == 0.0) return x0;
  const double dir = g0 > 0.0 ? 1.0 : -1.0;
  const double limit = g0 > 0.0 ? kLogUpper : kLogLower;

  double inner = x0;
  double g_inner = g0;
  double h = 0.5;
  while (true) {
    double outer = inner + dir * h;
    if ((dir > 0.0 && outer >= limit) || (dir < 0.0 && outer <= limit)) outer = limit;
    const double g_outer = deriv(outer);
    if (g_outer * dir <= 0.0) {
      if (g_outer == 0.0) return outer;
      double a = inner, b = outer, fa = g_inner, fb = g_outer;
      if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
      }
      std::uintmax_t iters = 200;
      const auto root = boost::math::tools::toms748_solve(
          deriv, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), iters);
      return 0.5 * (root.first + root.second);
    }
    if (outer == limit) return limit;
    inner = outer;
    g_inner = g_outer;
    h *= 2.0;
  }
}

}  // namespace

std::vector<double> a_coefficients(std::size_t n) {
  if (n < 1) fail(ErrorCode::InvalidDimension, "a_coefficients needs n >= 1");
  std::vector<double> a(n);
  const double denom = 2.0 * (2.0 * static_cast<double>(n) + 1.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(2 * k - 1) / denom);
    a[k - 1] = 4.0 * static_cast<double>(n) * s * s;
  }
  return a;
}

SpectralCoefficients spectral_transform(std::span<const double> deltas) {
  if (deltas.empty()) fail(ErrorCode::EmptyInput, "spectral_transform needs at least one increment");
  const std::size_t n = deltas.size();
  const SpectralBasis basis(BasisKind::SimlCosine, n);
  SpectralCoefficients out;
  out.z = project(basis, deltas, n);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (double& v : out.z) v *= root_n;
  out.a = a_coefficients(n);
  return out;
}

double log_likelihood(const SpectralCoefficients& z, const LikelihoodParams& params) {
  double log_sum = 0.0;
  double quad = 0.0;
  for (std::size_t k = 0; k < z.n(); ++k) {
    const double w = z.a[k] * params.nu + params.c;
    if (!(w > 0.0))
      fail(ErrorCode::DegenerateVariance,
           "a_k nu + c <= 0 at k = " + std::to_string(k + 1));
    log_sum += std::log(w);
    quad += z.z[k] * z.z[k] / w;
  }
  return -0.5 * log_sum - 0.5 * quad;
}

double low_frequency_likelihood(const SpectralCoefficients& z, std::size_t m, double c) {
  check_partition(z.n(), m, "m");
  if (!(c > 0.0)) fail(ErrorCode::DegenerateVariance, "L1 needs c > 0");
  double ss = 0.0;
  for (std::size_t k = 0; k < m; ++k) ss += z.z[k] * z.z[k];
  return -static_cast<double>(m) * std::log(c) - ss / c;
}

double high_frequency_likelihood(const SpectralCoefficients& z, std::size_t l, double nu) {
  check_partition(z.n(), l, "l");
  if (!(nu > 0.0)) fail(ErrorCode::DegenerateVariance, "L2 needs nu > 0");
  double log_sum = 0.0;
  double quad = 0.0;
  for (std::size_t k = z.n() - l; k < z.n(); ++k) {
    log_sum += std::log(z.a[k] * nu);
    quad += z.z[k] * z.z[k] / z.a[k];
  }
  return -log_sum - quad / nu;
}

LikelihoodDecomposition decompose(const SpectralCoefficients& z, const LikelihoodParams& params,
                                  const PartitionChoice& partition) {
  check_partition(z.n(), partition.m, "m");
  check_partition(z.n(), partition.l, "l");
  if (partition.m + partition.l > z.n())
    fail(ErrorCode::InvalidParameter, "partition needs m + l <= n");
  LikelihoodDecomposition d;
  d.params = params;
  d.partition = partition;
  d.total = log_likelihood(z, params);
  d.low = low_frequency_likelihood(z, partition.m, params.c);
  d.high = high_frequency_likelihood(z, partition.l, params.nu);
  d.remainder = 2.0 * d.total - d.low - d.high;
  return d;
}

double maximize_low_frequency(const SpectralCoefficients& z, std::size_t m) {
  check_partition(z.n(), m, "m");
  double ss = 0.0;
  for (std::size_t k = 0; k < m; ++k) ss += z.z[k] * z.z[k];
  if (ss == 0.0) fail(ErrorCode::DegenerateData, "low-frequency coefficients are all zero");
  return ss / static_cast<double>(m);
}

double noise_variance_estimate(const SpectralCoefficients& z, std::size_t l) {
  check_partition(z.n(), l, "l");
  double acc = 0.0;
  for (std::size_t k = z.n() - l; k < z.n(); ++k) acc += z.z[k] * z.z[k] / z.a[k];
  if (acc == 0.0) fail(ErrorCode::DegenerateData, "high-frequency coefficients are all zero");
  return acc / static_cast<double>(l);
}

MleResult joint_mle(const SpectralCoefficients& z, const LikelihoodParams& init,
                    const MleOptions& options) {
  if (!(init.c > 0.0) || !(init.nu > 0.0))
    fail(ErrorCode::InvalidParameter, "joint_mle needs a strictly positive starting point");
  if (z.n() == 0) fail(ErrorCode::EmptyInput, "no coefficients");

  double log_c = std::clamp(std::log(init.c), kLogLower, kLogUpper);
  double log_nu = std::clamp(std::log(init.nu), kLogLower, kLogUpper);
  double best = log_likelihood(z, {std::exp(log_c), std::exp(log_nu)});

  MleResult res;
  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    res.sweeps = sweep;
    const double prev_c = log_c;
    const double prev_nu = log_nu;

    const double nu_now = std::exp(log_nu);
    double cand = line_search(
        [&](double x) { return log_gradient(z, std::exp(x), nu_now).log_c; }, log_c);
    double value = log_likelihood(z, {std::exp(cand), nu_now});
    if (value >= best) {
      log_c = cand;
      best = value;
    }

    const double c_now = std::exp(log_c);
    cand = line_search(
        [&](double x) { return log_gradient(z, c_now, std::exp(x)).log_nu; }, log_nu);
    value = log_likelihood(z, {c_now, std::exp(cand)});
    if (value >= best) {
      log_nu = cand;
      best = value;
    }

    const double move_c = std::abs(std::expm1(log_c - prev_c));
    const double move_nu = std::abs(std::expm1(log_nu - prev_nu));
    if (move_c < options.relative_tolerance && move_nu < options.relative_tolerance) {
      res.converged = true;
      break;
    }
  }
  res.params = {std::exp(log_c), std::exp(log_nu)};
  res.log_likelihood = best;
  return res;
}

}  // namespace volspec
