#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "volspec/spectral_basis.hpp"

namespace volspec {

struct ConstantVol {
  double variance = 0.0;  // per unit time
};

// Spot variance levels[i] on [breakpoints[i-1], breakpoints[i]), with
// breakpoints strictly inside (0, 1); levels.size() == breakpoints.size() + 1.
struct PiecewiseVol {
  std::vector<double> breakpoints;
  std::vector<double> levels;
};

// Spot variance is the square of an Ornstein-Uhlenbeck state driven by a
// Brownian motion independent of the price driver.
struct OuDrivenVol {
  double mean_level = 1.0;
  double reversion_rate = 1.0;
  double vol_of_vol = 0.0;
  double initial_level = 1.0;
};

using VolModel = std::variant<ConstantVol, PiecewiseVol, OuDrivenVol>;

// Zero drift is rate == 0.
struct DriftModel {
  double rate = 0.0;
};

struct NoiseModel {
  double variance = 0.0;
  bool include_initial = true;
  bool include_terminal = true;
};

class SamplingScheme {
 public:
  static SamplingScheme equidistant(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  double mesh() const noexcept { return 1.0 / static_cast<double>(n_); }
  std::vector<double> times() const;

 private:
  explicit SamplingScheme(std::size_t n) : n_(n) {}
  std::size_t n_;
};

struct LatentPath {
  std::size_t refinement = 1;
  std::vector<double> fine_times;
  std::vector<double> values;
  std::vector<double> spot_variance;
  double true_integrated_vol = 0.0;
};

struct ObservationSeries {
  std::vector<double> times;
  std::vector<double> values;
  // Oracle decomposition values = latent + noise; empty when read from data
  // that does not carry it.
  std::vector<double> latent;
  std::vector<double> noise;

  std::size_t size() const noexcept { return values.size(); }
  bool has_oracle() const noexcept {
    return latent.size() == values.size() && noise.size() == values.size();
  }
};

// Exact integral of the spot variance over [0, 1]; throws for OU-driven
// models, whose integral is path dependent.
double deterministic_integrated_variance(const VolModel& vol);
// Integral of the squared spot variance, used by the normality limit.
double deterministic_integrated_quarticity(const VolModel& vol);
void validate(const VolModel& vol);

// Euler-Maruyama on a grid of refinement * n steps, started at X_0 = 0.
LatentPath simulate_latent(const VolModel& vol, const DriftModel& drift,
                           const SamplingScheme& scheme, std::size_t refinement,
                           std::uint64_t rng_seed);

struct MultiAssetPaths {
  std::vector<LatentPath> assets;
  DenseMatrix true_integrated_covariance;  // loading * loading^T
};

// J assets driven by one d-dimensional Wiener process through a constant
// J x d loading matrix.
MultiAssetPaths simulate_latent_multi(const DenseMatrix& loading,
                                      std::span<const double> drift_rates,
                                      const SamplingScheme& scheme, std::size_t refinement,
                                      std::uint64_t rng_seed);

ObservationSeries observe(const LatentPath& path, const NoiseModel& noise,
                          const SamplingScheme& scheme, std::uint64_t rng_seed);

// Y_k - Y_{k-1}, k = 1..n.
std::vector<double> increments(std::span<const double> values);
std::vector<double> increments(const ObservationSeries& obs);

void write_series_csv(std::ostream& out, const ObservationSeries& obs);
ObservationSeries read_series_csv(std::istream& in);

}  // namespace volspec
