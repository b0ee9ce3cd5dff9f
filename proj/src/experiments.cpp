#include "volspec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "volspec/error.hpp"
#include "volspec/rng.hpp"

namespace volspec {

namespace {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
// writes only its own output slot, so results do not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next = count;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Moments {
  double mean = 0.0;
  double var_sample = 0.0;  // divisor R - 1
  double var_pop = 0.0;     // divisor R
  double skew = 0.0;
  double kurt = 0.0;
  double m4 = 0.0;
};

Moments moments(const std::vector<double>& x) {
  Moments mo;
  const double r = static_cast<double>(x.size());
  if (x.empty()) return mo;
  for (double v : x) mo.mean += v;
  mo.mean /= r;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mo.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= r;
  m3 /= r;
  m4 /= r;
  mo.var_pop = m2;
  mo.var_sample = x.size() > 1 ? m2 * r / (r - 1.0) : 0.0;
  mo.skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  mo.kurt = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
  mo.m4 = m4;
  return mo;
}

double std_error(const Moments& mo, std::size_t r) {
  return std::sqrt(mo.var_sample / static_cast<double>(r));
}

struct KindRecords {
  std::vector<double> estimate;
  std::vector<double> target;
  std::vector<double> quarticity;
  std::vector<double> noise;
  std::vector<double> cross;

  explicit KindRecords(std::size_t r)
      : estimate(r), target(r), quarticity(r), noise(r), cross(r) {}
};

double trapezoid_quarticity(const LatentPath& path) {
  const std::size_t steps = path.spot_variance.size() - 1;
  const double dt = 1.0 / static_cast<double>(steps);
  double acc = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double a = path.spot_variance[i], b = path.spot_variance[i + 1];
    acc += 0.5 * (a * a + b * b) * dt;
  }
  return acc;
}

// Simulate -> observe -> estimate for every replication at one n. The
// estimate is assembled from the projections of the latent and noise
// increments separately, which also yields the cross term.
std::vector<KindRecords> simulate_block(const ExperimentConfig& cfg, std::size_t n,
                                        std::size_t m) {
  const auto scheme = SamplingScheme::equidistant(n);
  const std::size_t reps = cfg.replications;
  std::vector<SpectralEstimator> estimators;
  for (auto kind : cfg.kinds) estimators.emplace_back(kind, n, m);
  std::vector<KindRecords> out(cfg.kinds.size(), KindRecords(reps));

  std::optional<double> fixed_quarticity;
  if (!std::holds_alternative<OuDrivenVol>(cfg.vol))
    fixed_quarticity = deterministic_integrated_quarticity(cfg.vol);

  parallel_for(reps, cfg.threads, [&](std::size_t i) {
    const auto path = simulate_latent(cfg.vol, cfg.drift, scheme, cfg.refinement,
                                      derive_seed(cfg.base_seed, i, Stream::Path));
    const auto obs = observe(path, cfg.noise, scheme, derive_seed(cfg.base_seed, i, Stream::Noise));
    const auto dx = increments(obs.latent);
    const auto dv = increments(obs.noise);
    const double quarticity = fixed_quarticity ? *fixed_quarticity : trapezoid_quarticity(path);
    for (std::size_t j = 0; j < estimators.size(); ++j) {
      const auto& est = estimators[j];
      const auto cx = est.coefficients(dx);
      const auto cv = est.coefficients(dv);
      double sxx = 0.0, svv = 0.0, sxv = 0.0;
      for (std::size_t l = 0; l < cx.size(); ++l) {
        const double y = cx[l] + cv[l];
        sxx += y * y;
        svv += cv[l] * cv[l];
        sxv += cx[l] * cv[l];
      }
      out[j].estimate[i] = est.prefactor() * sxx;
      out[j].noise[i] = est.prefactor() * svv;
      out[j].cross[i] = 2.0 * est.prefactor() * sxv;
      out[j].target[i] = path.true_integrated_vol;
      out[j].quarticity[i] = quarticity;
    }
  });
  return out;
}

McRow summarize(EstimatorKind kind, std::size_t n, std::size_t m, const KindRecords& rec,
                const NoiseModel& noise) {
  const std::size_t reps = rec.estimate.size();
  McRow row;
  row.kind = kind;
  row.n = n;
  row.m = m;
  row.replications = reps;

  std::vector<double> err(reps), standardized(reps);
  double target = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    err[i] = rec.estimate[i] - rec.target[i];
    target += rec.target[i];
    sq += err[i] * err[i];
    const double limit_sd = std::sqrt(2.0 * rec.quarticity[i]);
    standardized[i] = limit_sd > 0.0 ? std::sqrt(static_cast<double>(m)) * err[i] / limit_sd : 0.0;
  }
  const double r = static_cast<double>(reps);
  const Moments me = moments(err);
  const Moments est = moments(rec.estimate);
  const Moments st = moments(standardized);
  const Moments nz = moments(rec.noise);
  const Moments cr = moments(rec.cross);

  row.true_value = target / r;
  row.mean = est.mean;
  row.bias = me.mean;
  row.error_variance = me.var_pop;
  row.rmse = std::sqrt(sq / r);
  row.se_mean = std_error(me, reps);
  row.std_err_mean = st.mean;
  row.std_err_var = st.var_sample;
  row.std_err_skew = st.skew;
  row.std_err_kurt = st.kurt;
  row.se_std_err_mean = std_error(st, reps);
  row.se_std_err_var = std::sqrt(std::max(0.0, st.m4 - st.var_pop * st.var_pop) / r);
  row.se_std_err_skew = std::sqrt(6.0 / r);
  row.se_std_err_kurt = std::sqrt(24.0 / r);
  row.noise_mc_mean = nz.mean;
  row.noise_mc_se = std_error(nz, reps);
  row.noise_exact = noise_expectation_exact(kind, n, m, noise.variance, noise.include_initial,
                                            noise.include_terminal);
  row.cross_mean = cr.mean;
  row.cross_se = std_error(cr, reps);
  return row;
}

double ina_noise_bound(std::size_t n, std::size_t m, double nu) {
  const double np1 = static_cast<double>(n) + 1.0;
  double sum_sq = 0.0;
  for (std::size_t l = 1; l <= m; ++l) sum_sq += static_cast<double>(l * l);
  return 2.0 * nu * std::numbers::pi * std::numbers::pi * (1.0 / np1 + 1.0 / (np1 * np1)) *
         sum_sq / static_cast<double>(m);
}

bool has_kind(const ExperimentConfig& cfg, EstimatorKind kind) {
  return std::find(cfg.kinds.begin(), cfg.kinds.end(), kind) != cfg.kinds.end();
}

void finish(McSummary& s) {
  s.passed = !s.rows.empty() &&
             std::all_of(s.rows.begin(), s.rows.end(), [](const McRow& r) { return r.bound_satisfied; });
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidParameter, what);
}

}  // namespace

const char* to_string(ExperimentType type) noexcept {
  switch (type) {
    case ExperimentType::Consistency: return "consistency";
    case ExperimentType::Normality: return "normality";
    case ExperimentType::NoiseBounds: return "noise_bounds";
    case ExperimentType::InitialNoiseContrast: return "contrast";
  }
  return "?";
}

ExperimentType parse_experiment_type(std::string_view name) {
  if (name == "consistency") return ExperimentType::Consistency;
  if (name == "normality") return ExperimentType::Normality;
  if (name == "noise_bounds") return ExperimentType::NoiseBounds;
  if (name == "contrast") return ExperimentType::InitialNoiseContrast;
  fail(ErrorCode::Config, "unknown experiment type '" + std::string(name) +
                              "' (expected consistency, normality, noise_bounds or contrast)");
}

const McRow* McSummary::find(EstimatorKind kind, std::size_t n) const {
  for (const auto& r : rows)
    if (r.kind == kind && r.n == n) return &r;
  return nullptr;
}

std::size_t cutoff_for(std::size_t n, double exponent) {
  return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), exponent) + 1e-9));
}

void validate(const ExperimentConfig& cfg) {
  require(cfg.replications >= 1, "replications must be >= 1");
  require(!cfg.n_schedule.empty(), "n_schedule is empty");
  require(std::is_sorted(cfg.n_schedule.begin(), cfg.n_schedule.end()) &&
              std::adjacent_find(cfg.n_schedule.begin(), cfg.n_schedule.end()) ==
                  cfg.n_schedule.end(),
          "n_schedule must be strictly ascending");
  require(cfg.m_exponent > 0.0 && cfg.m_exponent < 1.0, "m exponent must lie in (0, 1)");
  require(cfg.refinement >= 1, "refinement must be >= 1");
  require(!cfg.kinds.empty(), "no estimator kinds configured");
  require(!has_kind(cfg, EstimatorKind::MmFourierComplex),
          "experiments run real estimators only (siml, mm_real, ina)");
  require(cfg.noise.variance >= 0.0 && std::isfinite(cfg.noise.variance),
          "noise variance must be finite and >= 0");
  validate(cfg.vol);
  for (std::size_t n : cfg.n_schedule) {
    const std::size_t m = cutoff_for(n, cfg.m_exponent);
    require(m >= 1, "floor(n^alpha) is zero for n = " + std::to_string(n));
    if (has_kind(cfg, EstimatorKind::MmFourierRealZero)) {
      require(n % 2 == 1, "mm_real needs odd n, got " + std::to_string(n));
      require(2 * m + 1 <= n, "2m + 1 exceeds n = " + std::to_string(n));
    }
    require(m < n, "cutoff must stay below n");
  }
  switch (cfg.type) {
    case ExperimentType::Consistency:
      require(!cfg.noise.include_initial || (!has_kind(cfg, EstimatorKind::Siml) &&
                                             !has_kind(cfg, EstimatorKind::MmFourierRealZero)),
              "consistency runs of siml / mm_real require include_initial = false");
      break;
    case ExperimentType::Normality:
      require(!std::holds_alternative<OuDrivenVol>(cfg.vol),
              "normality runs need deterministic volatility");
      break;
    case ExperimentType::NoiseBounds: {
      const auto* c = std::get_if<ConstantVol>(&cfg.vol);
      require(c && c->variance == 0.0, "noise bound runs use the pure-noise design (constant vol 0)");
      break;
    }
    case ExperimentType::InitialNoiseContrast:
      require(cfg.noise.include_initial, "contrast runs need include_initial = true");
      break;
  }
}

McSummary run_consistency(const ExperimentConfig& cfg) {
  validate(cfg);
  require(cfg.type == ExperimentType::Consistency, "config is not a consistency experiment");
  McSummary s;
  s.name = cfg.name;
  s.type = cfg.type;
  for (std::size_t idx = 0; idx < cfg.n_schedule.size(); ++idx) {
    const std::size_t n = cfg.n_schedule[idx];
    const std::size_t m = cutoff_for(n, cfg.m_exponent);
    const auto recs = simulate_block(cfg, n, m);
    for (std::size_t j = 0; j < cfg.kinds.size(); ++j) {
      McRow row = summarize(cfg.kinds[j], n, m, recs[j], cfg.noise);
      row.bound_value = cfg.thresholds.bias_se_multiple * row.se_mean;
      // RMSE must fall along the schedule; the bias check applies at the largest n.
      if (const McRow* prev = idx > 0 ? s.find(cfg.kinds[j], cfg.n_schedule[idx - 1]) : nullptr)
        row.bound_satisfied = row.rmse < prev->rmse;
      if (idx + 1 == cfg.n_schedule.size())
        row.bound_satisfied = row.bound_satisfied && std::abs(row.bias) <= row.bound_value;
      s.rows.push_back(row);
    }
  }
  finish(s);
  return s;
}

McSummary run_normality(const ExperimentConfig& cfg) {
  validate(cfg);
  require(cfg.type == ExperimentType::Normality, "config is not a normality experiment");
  const auto& t = cfg.thresholds;
  McSummary s;
  s.name = cfg.name;
  s.type = cfg.type;
  for (std::size_t n : cfg.n_schedule) {
    const std::size_t m = cutoff_for(n, cfg.m_exponent);
    const auto recs = simulate_block(cfg, n, m);
    for (std::size_t j = 0; j < cfg.kinds.size(); ++j) {
      McRow row = summarize(cfg.kinds[j], n, m, recs[j], cfg.noise);
      row.bound_value = t.normality_mean_tol;
      row.bound_satisfied = std::abs(row.std_err_mean) <= t.normality_mean_tol &&
                            row.std_err_var >= t.normality_var_low &&
                            row.std_err_var <= t.normality_var_high &&
                            std::abs(row.std_err_skew) <= t.normality_skew_tol &&
                            std::abs(row.std_err_kurt - 3.0) <= t.normality_kurt_tol;
      s.rows.push_back(row);
    }
  }
  finish(s);
  return s;
}

McSummary run_noise_bounds(const ExperimentConfig& cfg) {
  validate(cfg);
  require(cfg.type == ExperimentType::NoiseBounds, "config is not a noise-bound experiment");
  const auto& t = cfg.thresholds;
  const double nu = cfg.noise.variance;
  McSummary s;
  s.name = cfg.name;
  s.type = cfg.type;
  for (std::size_t n : cfg.n_schedule) {
    const std::size_t m = cutoff_for(n, cfg.m_exponent);
    const auto scheme = SamplingScheme::equidistant(n);
    LatentPath zero;
    zero.values.assign(n + 1, 0.0);
    zero.spot_variance.assign(n + 1, 0.0);
    zero.fine_times = scheme.times();

    std::vector<SpectralEstimator> estimators;
    for (auto kind : cfg.kinds) estimators.emplace_back(kind, n, m);
    std::vector<KindRecords> recs(cfg.kinds.size(), KindRecords(cfg.replications));
    parallel_for(cfg.replications, cfg.threads, [&](std::size_t i) {
      const auto obs = observe(zero, cfg.noise, scheme, derive_seed(cfg.base_seed, i, Stream::Noise));
      const auto dv = increments(obs.noise);
      for (std::size_t j = 0; j < estimators.size(); ++j) {
        const double v = estimators[j].evaluate(dv);
        recs[j].estimate[i] = v;
        recs[j].noise[i] = v;
      }
    });

    for (std::size_t j = 0; j < cfg.kinds.size(); ++j) {
      const EstimatorKind kind = cfg.kinds[j];
      McRow row = summarize(kind, n, m, recs[j], cfg.noise);
      const double rel_se = row.noise_mc_mean > 0.0 ? row.noise_mc_se / row.noise_mc_mean : 0.0;
      switch (kind) {
        case EstimatorKind::Siml:
          row.bound_value = cfg.noise.include_initial ? 0.5 * nu : 0.0;
          row.bound_satisfied = row.noise_exact >= row.bound_value &&
                                row.noise_mc_mean >= row.bound_value * (1.0 - t.mc_se_multiple * rel_se);
          break;
        case EstimatorKind::MmFourierRealZero:
          row.bound_value = nu * ((cfg.noise.include_initial ? 1.0 : 0.0) +
                                  (cfg.noise.include_terminal ? 1.0 : 0.0));
          row.bound_satisfied = row.noise_exact >= row.bound_value &&
                                row.noise_mc_mean >= row.bound_value * (1.0 - t.mc_se_multiple * rel_se);
          break;
        case EstimatorKind::InaSine: {
          row.bound_value = ina_noise_bound(n, m, nu);
          bool ok = row.noise_exact <= row.bound_value &&
                    row.noise_mc_mean <= row.bound_value + t.mc_se_multiple * row.noise_mc_se;
          // the target is a statement about the end of the schedule only
          if (t.ina_target_ratio && n == cfg.n_schedule.back())
            ok = ok && row.noise_exact <= *t.ina_target_ratio * nu;
          // the exact term should keep shrinking along the schedule, up to slack
          for (auto it = s.rows.rbegin(); it != s.rows.rend(); ++it)
            if (it->kind == kind) {
              ok = ok && row.noise_exact <= (1.0 + t.monotone_slack) * it->noise_exact;
              break;
            }
          row.bound_satisfied = ok;
          break;
        }
        case EstimatorKind::MmFourierComplex:
          break;
      }
      s.rows.push_back(row);
    }
  }
  finish(s);
  return s;
}

McSummary run_initial_noise_contrast(const ExperimentConfig& cfg) {
  validate(cfg);
  require(cfg.type == ExperimentType::InitialNoiseContrast, "config is not a contrast experiment");
  const auto& t = cfg.thresholds;
  const double floor = t.siml_bias_floor.value_or(0.4 * cfg.noise.variance);
  McSummary s;
  s.name = cfg.name;
  s.type = cfg.type;
  for (std::size_t idx = 0; idx < cfg.n_schedule.size(); ++idx) {
    const std::size_t n = cfg.n_schedule[idx];
    const std::size_t m = cutoff_for(n, cfg.m_exponent);
    const auto recs = simulate_block(cfg, n, m);
    const bool last = idx + 1 == cfg.n_schedule.size();
    for (std::size_t j = 0; j < cfg.kinds.size(); ++j) {
      McRow row = summarize(cfg.kinds[j], n, m, recs[j], cfg.noise);
      const bool cross_ok = std::abs(row.cross_mean) <= t.cross_se_multiple * row.cross_se;
      if (row.kind == EstimatorKind::InaSine) {
        row.bound_value = t.bias_se_multiple * row.se_mean;
        row.bound_satisfied = cross_ok && (!last || std::abs(row.bias) <= row.bound_value);
      } else {
        // Inconsistent estimators: the bias stays above the floor at every n.
        row.bound_value = floor;
        row.bound_satisfied = cross_ok && row.bias >= floor;
      }
      s.rows.push_back(row);
    }
  }
  finish(s);
  return s;
}

McSummary run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.type) {
    case ExperimentType::Consistency: return run_consistency(cfg);
    case ExperimentType::Normality: return run_normality(cfg);
    case ExperimentType::NoiseBounds: return run_noise_bounds(cfg);
    case ExperimentType::InitialNoiseContrast: return run_initial_noise_contrast(cfg);
  }
  fail(ErrorCode::InvalidParameter, "unknown experiment type");
}

void write_summary_csv(std::ostream& out, const McSummary& s) {
  out << "experiment,kind,n,m,replications,true_value,mean,bias,rmse,se_mean,std_err_mean,"
         "std_err_var,noise_mc_mean,noise_exact,bound_value,bound_satisfied\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  };
  for (const auto& r : s.rows) {
    out << to_string(s.type) << ',' << to_string(r.kind) << ',' << r.n << ',' << r.m << ','
        << r.replications;
    num(r.true_value);
    num(r.mean);
    num(r.bias);
    num(r.rmse);
    num(r.se_mean);
    num(r.std_err_mean);
    num(r.std_err_var);
    num(r.noise_mc_mean);
    num(r.noise_exact);
    num(r.bound_value);
    out << ',' << (r.bound_satisfied ? "true" : "false") << '\n';
  }
}

std::string summary_line(const McSummary& s) {
  std::ostringstream os;
  os << s.name << " [" << to_string(s.type) << "] " << (s.passed ? "PASS" : "FAIL") << ":";
  char buf[160];
  for (const auto& r : s.rows) {
    switch (s.type) {
      case ExperimentType::Normality:
        std::snprintf(buf, sizeof buf, " %s n=%zu mean=%.3f var=%.3f skew=%.3f kurt=%.3f%s",
                      to_string(r.kind), r.n, r.std_err_mean, r.std_err_var, r.std_err_skew,
                      r.std_err_kurt, r.bound_satisfied ? "" : "!");
        break;
      case ExperimentType::NoiseBounds:
        std::snprintf(buf, sizeof buf, " %s n=%zu exact=%.4g mc=%.4g bound=%.4g%s", to_string(r.kind),
                      r.n, r.noise_exact, r.noise_mc_mean, r.bound_value, r.bound_satisfied ? "" : "!");
        break;
      default:
        std::snprintf(buf, sizeof buf, " %s n=%zu bias=%.4g se=%.2g rmse=%.4g%s", to_string(r.kind), r.n,
                      r.bias, r.se_mean, r.rmse, r.bound_satisfied ? "" : "!");
        break;
    }
    os << buf;
  }
  return os.str();
}

}  // namespace volspec
