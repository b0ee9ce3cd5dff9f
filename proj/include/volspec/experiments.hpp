#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "volspec/estimators.hpp"
#include "volspec/market_model.hpp"

namespace volspec {

enum class ExperimentType {
  Consistency,           // bias / RMSE along the n schedule
  Normality,             // moments of sqrt(m)(V - IV) / sqrt(2 int Sigma^2)
  NoiseBounds,           // pure-noise functionals against their bounds
  InitialNoiseContrast,  // SIML vs INA under a noisy first observation
};

const char* to_string(ExperimentType type) noexcept;
ExperimentType parse_experiment_type(std::string_view name);

// Pass/fail thresholds. Defaults are the desk-scale tolerances used by the
// shipped configurations.
struct Thresholds {
  double bias_se_multiple = 2.0;
  double normality_mean_tol = 0.15;
  double normality_var_low = 0.75;
  double normality_var_high = 1.30;
  double normality_skew_tol = 0.35;
  double normality_kurt_tol = 0.8;  // on |kurtosis - 3|
  double mc_se_multiple = 4.0;
  double cross_se_multiple = 3.0;
  double monotone_slack = 0.10;
  std::optional<double> ina_target_ratio;  // exact INA noise term <= ratio * nu at the last n
  std::optional<double> siml_bias_floor;   // default 0.4 * nu
};

struct ExperimentConfig {
  std::string name;
  ExperimentType type = ExperimentType::Consistency;
  std::vector<EstimatorKind> kinds{EstimatorKind::Siml};
  std::vector<std::size_t> n_schedule;
  double m_exponent = 0.4;
  VolModel vol = ConstantVol{1.0};
  DriftModel drift;
  NoiseModel noise;
  std::size_t refinement = 10;
  std::size_t replications = 100;
  std::uint64_t base_seed = 1;
  unsigned threads = 1;
  Thresholds thresholds;
};

struct McRow {
  EstimatorKind kind = EstimatorKind::Siml;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t replications = 0;
  double true_value = 0.0;  // mean integrated variance over replications
  double mean = 0.0;
  double bias = 0.0;
  double error_variance = 0.0;  // population variance of V - IV
  double rmse = 0.0;
  double se_mean = 0.0;
  // standardized errors
  double std_err_mean = 0.0;
  double std_err_var = 0.0;
  double std_err_skew = 0.0;
  double std_err_kurt = 0.0;
  double se_std_err_mean = 0.0;
  double se_std_err_var = 0.0;
  double se_std_err_skew = 0.0;
  double se_std_err_kurt = 0.0;
  // noise term
  double noise_mc_mean = 0.0;
  double noise_mc_se = 0.0;
  double noise_exact = 0.0;
  // signal x noise cross term
  double cross_mean = 0.0;
  double cross_se = 0.0;
  double bound_value = 0.0;
  bool bound_satisfied = true;
};

struct McSummary {
  std::string name;
  ExperimentType type = ExperimentType::Consistency;
  std::vector<McRow> rows;
  bool passed = true;

  const McRow* find(EstimatorKind kind, std::size_t n) const;
};

// floor(n^alpha), guarded against pow() landing just below an exact integer.
std::size_t cutoff_for(std::size_t n, double exponent);

void validate(const ExperimentConfig& config);

McSummary run_consistency(const ExperimentConfig& config);
McSummary run_normality(const ExperimentConfig& config);
McSummary run_noise_bounds(const ExperimentConfig& config);
McSummary run_initial_noise_contrast(const ExperimentConfig& config);
McSummary run_experiment(const ExperimentConfig& config);

// experiment,kind,n,m,replications,true_value,mean,bias,rmse,se_mean,
// std_err_mean,std_err_var,noise_mc_mean,noise_exact,bound_value,bound_satisfied
void write_summary_csv(std::ostream& out, const McSummary& summary);
std::string summary_line(const McSummary& summary);

}  // namespace volspec
