#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace volspec {

// z_k = sqrt(n) * sum_j p^n_{j,k} dY_j, together with the a_{k,n} weights so
// that Var(z_k) = c + a_{k,n} nu under the Gaussian working model.
struct SpectralCoefficients {
  std::vector<double> z;
  std::vector<double> a;

  std::size_t n() const noexcept { return z.size(); }
};

struct LikelihoodParams {
  double c = 0.0;   // signal variance
  double nu = 0.0;  // noise variance
};

struct PartitionChoice {
  std::size_t m = 1;  // low-frequency modes
  std::size_t l = 1;  // high-frequency modes
};

struct LikelihoodDecomposition {
  double total = 0.0;      // L_n
  double low = 0.0;        // L1(c)
  double high = 0.0;       // L2(nu)
  double remainder = 0.0;  // 2 L_n - L1 - L2
  LikelihoodParams params;
  PartitionChoice partition;
};

SpectralCoefficients spectral_transform(std::span<const double> deltas);

// a_{k,n} = 4n sin^2((2k - 1) pi / (2(2n + 1))), k = 1..n.
std::vector<double> a_coefficients(std::size_t n);

double log_likelihood(const SpectralCoefficients& z, const LikelihoodParams& params);

double low_frequency_likelihood(const SpectralCoefficients& z, std::size_t m, double c);
double high_frequency_likelihood(const SpectralCoefficients& z, std::size_t l, double nu);

LikelihoodDecomposition decompose(const SpectralCoefficients& z, const LikelihoodParams& params,
                                  const PartitionChoice& partition);

// argmax of L1: mean of the first m squared coefficients. Coincides with the
// SIML estimate at the same cutoff.
double maximize_low_frequency(const SpectralCoefficients& z, std::size_t m);

// argmax of L2: mean of z_k^2 / a_{k,n} over the top l modes.
double noise_variance_estimate(const SpectralCoefficients& z, std::size_t l);

struct MleResult {
  LikelihoodParams params;
  double log_likelihood = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;
};

struct MleOptions {
  std::size_t max_sweeps = 500;
  double relative_tolerance = 1e-8;
};

/// Coordinate ascent on L_n over (log c, log nu). Each coordinate step finds
/// a sign change of the analytic partial derivative by doubling steps, then
/// solves inside that bracket. Never returns a point with lower L_n than the
/// start; `converged` is false when max_sweeps ran out.
MleResult joint_mle(const SpectralCoefficients& z, const LikelihoodParams& init,
                    const MleOptions& options = {});

}  // namespace volspec
