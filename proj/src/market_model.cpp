#include "volspec/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "volspec/error.hpp"
#include "volspec/rng.hpp"

namespace volspec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double piecewise_level(const PiecewiseVol& pw, double t) {
  std::size_t i = 0;
  while (i < pw.breakpoints.size() && t >= pw.breakpoints[i]) ++i;
  return pw.levels[i];
}

}  // namespace

SamplingScheme SamplingScheme::equidistant(std::size_t n) {
  if (n < 1) fail(ErrorCode::InvalidParameter, "sampling scheme needs n >= 1");
  return SamplingScheme(n);
}

std::vector<double> SamplingScheme::times() const {
  std::vector<double> t(n_ + 1);
  for (std::size_t k = 0; k <= n_; ++k)
    t[k] = static_cast<double>(k) / static_cast<double>(n_);
  return t;
}

void validate(const VolModel& vol) {
  std::visit(overloaded{
                 [](const ConstantVol& c) {
                   if (!(c.variance >= 0.0) || !std::isfinite(c.variance))
                     fail(ErrorCode::InvalidParameter, "constant variance must be finite and >= 0");
                 },
                 [](const PiecewiseVol& pw) {
                   if (pw.levels.size() != pw.breakpoints.size() + 1)
                     fail(ErrorCode::InvalidParameter,
                          "piecewise volatility needs one more level than breakpoints");
                   double prev = 0.0;
                   for (double b : pw.breakpoints) {
                     if (!(b > prev) || !(b < 1.0))
                       fail(ErrorCode::InvalidParameter,
                            "breakpoints must be strictly increasing inside (0, 1)");
                     prev = b;
                   }
                   for (double l : pw.levels)
                     if (!(l >= 0.0) || !std::isfinite(l))
                       fail(ErrorCode::InvalidParameter, "variance levels must be finite and >= 0");
                 },
                 [](const OuDrivenVol& ou) {
                   if (!(ou.reversion_rate >= 0.0) || !(ou.vol_of_vol >= 0.0) ||
                       !std::isfinite(ou.mean_level) || !std::isfinite(ou.initial_level))
                     fail(ErrorCode::InvalidParameter,
                          "OU driver needs finite levels and non-negative rates");
                 },
             },
             vol);
}

double deterministic_integrated_variance(const VolModel& vol) {
  validate(vol);
  return std::visit(
      overloaded{
          [](const ConstantVol& c) { return c.variance; },
          [](const PiecewiseVol& pw) {
            double total = 0.0;
            double left = 0.0;
            for (std::size_t i = 0; i < pw.levels.size(); ++i) {
              const double right = i < pw.breakpoints.size() ? pw.breakpoints[i] : 1.0;
              total += pw.levels[i] * (right - left);
              left = right;
            }
            return total;
          },
          [](const OuDrivenVol&) -> double {
            fail(ErrorCode::InvalidParameter, "OU-driven volatility has no deterministic integral");
          },
      },
      vol);
}

double deterministic_integrated_quarticity(const VolModel& vol) {
  validate(vol);
  return std::visit(
      overloaded{
          [](const ConstantVol& c) { return c.variance * c.variance; },
          [](const PiecewiseVol& pw) {
            double total = 0.0;
            double left = 0.0;
            for (std::size_t i = 0; i < pw.levels.size(); ++i) {
              const double right = i < pw.breakpoints.size() ? pw.breakpoints[i] : 1.0;
              total += pw.levels[i] * pw.levels[i] * (right - left);
              left = right;
            }
            return total;
          },
          [](const OuDrivenVol&) -> double {
            fail(ErrorCode::InvalidParameter, "OU-driven volatility has no deterministic quarticity");
          },
      },
      vol);
}

LatentPath simulate_latent(const VolModel& vol, const DriftModel& drift,
                           const SamplingScheme& scheme, std::size_t refinement,
                           std::uint64_t rng_seed) {
  validate(vol);
  if (refinement < 1) fail(ErrorCode::InvalidParameter, "refinement must be >= 1");
  if (!std::isfinite(drift.rate)) fail(ErrorCode::InvalidParameter, "drift must be finite");

  const std::size_t steps = refinement * scheme.n();
  const double dt = 1.0 / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);

  LatentPath path;
  path.refinement = refinement;
  path.fine_times.resize(steps + 1);
  path.values.resize(steps + 1);
  path.spot_variance.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    path.fine_times[i] = static_cast<double>(i) / static_cast<double>(steps);

  NormalSource wiener(derive_seed(rng_seed, 0, Stream::Path));

  if (const auto* ou = std::get_if<OuDrivenVol>(&vol)) {
    NormalSource driver(derive_seed(rng_seed, 0, Stream::VolDriver));
    double y = ou->initial_level;
    for (std::size_t i = 0; i <= steps; ++i) {
      path.spot_variance[i] = y * y;
      if (i == steps) break;
      y += ou->reversion_rate * (ou->mean_level - y) * dt + ou->vol_of_vol * sqrt_dt * driver();
    }
    double trap = 0.0;
    for (std::size_t i = 0; i < steps; ++i)
      trap += 0.5 * (path.spot_variance[i] + path.spot_variance[i + 1]) * dt;
    path.true_integrated_vol = trap;
  } else if (const auto* pw = std::get_if<PiecewiseVol>(&vol)) {
    for (std::size_t i = 0; i <= steps; ++i)
      path.spot_variance[i] = piecewise_level(*pw, path.fine_times[i]);
    path.true_integrated_vol = deterministic_integrated_variance(vol);
  } else {
    const double c = std::get<ConstantVol>(vol).variance;
    std::fill(path.spot_variance.begin(), path.spot_variance.end(), c);
    path.true_integrated_vol = c;
  }

  double x = 0.0;
  path.values[0] = x;
  for (std::size_t i = 0; i < steps; ++i) {
    x += drift.rate * dt + std::sqrt(path.spot_variance[i]) * sqrt_dt * wiener();
    path.values[i + 1] = x;
  }
  return path;
}

MultiAssetPaths simulate_latent_multi(const DenseMatrix& loading,
                                      std::span<const double> drift_rates,
                                      const SamplingScheme& scheme, std::size_t refinement,
                                      std::uint64_t rng_seed) {
  const std::size_t assets = loading.rows();
  const std::size_t factors = loading.cols();
  if (assets < 1 || factors < 1) fail(ErrorCode::InvalidParameter, "loading matrix is empty");
  if (drift_rates.size() != assets)
    fail(ErrorCode::DimensionMismatch, "one drift rate per asset is required");
  if (refinement < 1) fail(ErrorCode::InvalidParameter, "refinement must be >= 1");

  MultiAssetPaths out;
  out.true_integrated_covariance = DenseMatrix(assets, assets);
  for (std::size_t a = 0; a < assets; ++a)
    for (std::size_t b = 0; b < assets; ++b)
      for (std::size_t r = 0; r < factors; ++r)
        out.true_integrated_covariance(a, b) += loading(a, r) * loading(b, r);

  const std::size_t steps = refinement * scheme.n();
  const double dt = 1.0 / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);

  out.assets.resize(assets);
  for (std::size_t a = 0; a < assets; ++a) {
    LatentPath& p = out.assets[a];
    p.refinement = refinement;
    p.fine_times.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
      p.fine_times[i] = static_cast<double>(i) / static_cast<double>(steps);
    p.values.assign(steps + 1, 0.0);
    p.spot_variance.assign(steps + 1, out.true_integrated_covariance(a, a));
    p.true_integrated_vol = out.true_integrated_covariance(a, a);
  }

  NormalSource wiener(derive_seed(rng_seed, 0, Stream::Path));
  std::vector<double> dw(factors);
  for (std::size_t i = 0; i < steps; ++i) {
    for (auto& w : dw) w = sqrt_dt * wiener();
    for (std::size_t a = 0; a < assets; ++a) {
      double dx = drift_rates[a] * dt;
      for (std::size_t r = 0; r < factors; ++r) dx += loading(a, r) * dw[r];
      out.assets[a].values[i + 1] = out.assets[a].values[i] + dx;
    }
  }
  return out;
}

ObservationSeries observe(const LatentPath& path, const NoiseModel& noise,
                          const SamplingScheme& scheme, std::uint64_t rng_seed) {
  if (!(noise.variance >= 0.0) || !std::isfinite(noise.variance))
    fail(ErrorCode::InvalidParameter, "noise variance must be finite and >= 0");
  const std::size_t n = scheme.n();
  if (path.values.size() < 2 || (path.values.size() - 1) % n != 0)
    fail(ErrorCode::GridMismatch, "observation grid with n = " + std::to_string(n) +
                                      " is not a subset of the fine grid");
  const std::size_t stride = (path.values.size() - 1) / n;

  ObservationSeries obs;
  obs.times = scheme.times();
  obs.latent.resize(n + 1);
  obs.noise.resize(n + 1);
  obs.values.resize(n + 1);

  NormalSource gen(derive_seed(rng_seed, 0, Stream::Noise));
  const double sd = std::sqrt(noise.variance);
  for (std::size_t k = 0; k <= n; ++k) {
    // Draw unconditionally so the stream stays aligned whatever the flags.
    double v = sd * gen();
    if ((k == 0 && !noise.include_initial) || (k == n && !noise.include_terminal)) v = 0.0;
    obs.latent[k] = path.values[k * stride];
    obs.noise[k] = v;
    obs.values[k] = obs.latent[k] + v;
  }
  return obs;
}

std::vector<double> increments(std::span<const double> values) {
  if (values.size() < 2) fail(ErrorCode::TooShort, "increments need at least two observations");
  std::vector<double> d(values.size() - 1);
  for (std::size_t k = 1; k < values.size(); ++k) d[k - 1] = values[k] - values[k - 1];
  return d;
}

std::vector<double> increments(const ObservationSeries& obs) { return increments(obs.values); }

}  // namespace volspec
