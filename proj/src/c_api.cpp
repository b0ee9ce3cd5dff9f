#include "volspec/volspec.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "volspec/config.hpp"
#include "volspec/error.hpp"
#include "volspec/estimators.hpp"
#include "volspec/experiments.hpp"
#include "volspec/ks_likelihood.hpp"
#include "volspec/market_model.hpp"
#include "volspec/spectral_basis.hpp"

struct vs_basis {
  volspec::SpectralBasis basis;
};

struct vs_series {
  volspec::ObservationSeries series;
};

struct vs_experiment {
  std::vector<volspec::ExperimentConfig> configs;
  std::vector<std::string> summaries;
};

namespace {

thread_local std::string g_last_error;

vs_status map_code(volspec::ErrorCode code) {
  using volspec::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidDimension: return VS_ERR_INVALID_DIMENSION;
    case ErrorCode::DimensionMismatch: return VS_ERR_DIMENSION_MISMATCH;
    case ErrorCode::InvalidParameter: return VS_ERR_INVALID_ARGUMENT;
    case ErrorCode::GridMismatch: return VS_ERR_GRID_MISMATCH;
    case ErrorCode::TooShort: return VS_ERR_TOO_SHORT;
    case ErrorCode::CutoffTooLarge: return VS_ERR_CUTOFF_TOO_LARGE;
    case ErrorCode::EmptyInput: return VS_ERR_EMPTY_INPUT;
    case ErrorCode::EvenLength: return VS_ERR_EVEN_LENGTH;
    case ErrorCode::DegenerateVariance:
    case ErrorCode::DegenerateData: return VS_ERR_DEGENERATE;
    case ErrorCode::NonConvergence: return VS_ERR_NON_CONVERGENCE;
    case ErrorCode::Io: return VS_ERR_IO;
    case ErrorCode::MalformedData: return VS_ERR_MALFORMED_DATA;
    case ErrorCode::Config: return VS_ERR_CONFIG;
  }
  return VS_ERR_INTERNAL;
}

vs_status set_error(vs_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
vs_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const volspec::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(VS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(VS_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(VS_ERR_INTERNAL, "unknown error");
  }
}

volspec::BasisKind to_basis_kind(vs_basis_kind kind) {
  switch (kind) {
    case VS_BASIS_SIML_COSINE: return volspec::BasisKind::SimlCosine;
    case VS_BASIS_FOURIER_REAL: return volspec::BasisKind::FourierReal;
    case VS_BASIS_DST_SINE: return volspec::BasisKind::DstSine;
  }
  volspec::fail(volspec::ErrorCode::InvalidParameter, "unknown basis kind");
}

volspec::EstimatorKind to_estimator_kind(vs_estimator_kind kind) {
  switch (kind) {
    case VS_EST_SIML: return volspec::EstimatorKind::Siml;
    case VS_EST_MM_COMPLEX: return volspec::EstimatorKind::MmFourierComplex;
    case VS_EST_MM_REAL: return volspec::EstimatorKind::MmFourierRealZero;
    case VS_EST_INA: return volspec::EstimatorKind::InaSine;
  }
  volspec::fail(volspec::ErrorCode::InvalidParameter, "unknown estimator kind");
}

#define VS_REQUIRE(cond, msg) \
  if (!(cond)) return set_error(VS_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* vs_status_string(vs_status status) {
  switch (status) {
    case VS_OK: return "ok";
    case VS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case VS_ERR_INVALID_DIMENSION: return "invalid dimension";
    case VS_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case VS_ERR_CUTOFF_TOO_LARGE: return "cutoff too large";
    case VS_ERR_EVEN_LENGTH: return "even length";
    case VS_ERR_EMPTY_INPUT: return "empty input";
    case VS_ERR_TOO_SHORT: return "too short";
    case VS_ERR_GRID_MISMATCH: return "grid mismatch";
    case VS_ERR_DEGENERATE: return "degenerate data or variance";
    case VS_ERR_NON_CONVERGENCE: return "non-convergence";
    case VS_ERR_IO: return "i/o error";
    case VS_ERR_MALFORMED_DATA: return "malformed data";
    case VS_ERR_CONFIG: return "configuration error";
    case VS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* vs_last_error(void) { return g_last_error.c_str(); }

vs_status vs_basis_create(vs_basis_kind kind, size_t dim, vs_basis** out) {
  VS_REQUIRE(out, "out is null");
  return guarded([&] {
    *out = new vs_basis{volspec::build_basis(to_basis_kind(kind), dim)};
    return VS_OK;
  });
}

void vs_basis_destroy(vs_basis* basis) { delete basis; }

size_t vs_basis_dim(const vs_basis* basis) { return basis ? basis->basis.dim() : 0; }

vs_status vs_basis_entry(const vs_basis* basis, size_t row, size_t col, double* out) {
  VS_REQUIRE(basis && out, "null argument");
  if (row >= basis->basis.dim() || col >= basis->basis.dim())
    return set_error(VS_ERR_DIMENSION_MISMATCH, "entry index out of range");
  *out = basis->basis.entry(row, col);
  return VS_OK;
}

vs_status vs_basis_project(const vs_basis* basis, const double* x, size_t len, size_t num_modes,
                           double* out) {
  VS_REQUIRE(basis && (x || len == 0) && (out || num_modes == 0), "null argument");
  return guarded([&] {
    const auto r = volspec::project(basis->basis, {x, len}, num_modes);
    std::copy(r.begin(), r.end(), out);
    return VS_OK;
  });
}

vs_status vs_basis_check(vs_basis_kind kind, size_t dim, double* orthogonality_error,
                         double* diagonalization_error) {
  VS_REQUIRE(orthogonality_error && diagonalization_error, "null argument");
  return guarded([&] {
    const auto c = volspec::check_basis(to_basis_kind(kind), dim);
    *orthogonality_error = c.orthogonality_error;
    *diagonalization_error = c.diagonalization_error;
    return VS_OK;
  });
}

vs_status vs_series_create(const double* times, const double* values, size_t len, vs_series** out) {
  VS_REQUIRE(out && ((times && values) || len == 0), "null argument");
  return guarded([&] {
    auto s = std::make_unique<vs_series>();
    s->series.times.assign(times, times + len);
    s->series.values.assign(values, values + len);
    *out = s.release();
    return VS_OK;
  });
}

vs_status vs_series_read_csv(const char* path, vs_series** out) {
  VS_REQUIRE(path && out, "null argument");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) return set_error(VS_ERR_IO, std::string("cannot open ") + path);
    auto s = std::make_unique<vs_series>();
    s->series = volspec::read_series_csv(in);
    *out = s.release();
    return VS_OK;
  });
}

vs_status vs_series_write_csv(const vs_series* series, const char* path) {
  VS_REQUIRE(series && path, "null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) return set_error(VS_ERR_IO, std::string("cannot write ") + path);
    volspec::write_series_csv(out, series->series);
    out.flush();
    if (!out) return set_error(VS_ERR_IO, std::string("write failed for ") + path);
    return VS_OK;
  });
}

void vs_series_destroy(vs_series* series) { delete series; }

size_t vs_series_size(const vs_series* series) { return series ? series->series.size() : 0; }

vs_status vs_estimate_series(const vs_series* series, vs_estimator_kind kind, size_t m, long q,
                             vs_estimate* out) {
  VS_REQUIRE(series && out, "null argument");
  return guarded([&] {
    const auto k = to_estimator_kind(kind);
    const auto& s = series->series;
    if (s.size() < 2) return set_error(VS_ERR_TOO_SHORT, "series needs at least two rows");
    vs_estimate e{kind, s.size() - 1, m, 0, 0.0, 0.0};
    if (k == volspec::EstimatorKind::MmFourierComplex) {
      const auto r = volspec::mm_fourier_complex({&s, 1}, q, m);
      e.q = q;
      e.value_re = r.at(0, 0).real();
      e.value_im = r.at(0, 0).imag();
    } else {
      const std::vector<std::vector<double>> d{volspec::increments(s)};
      volspec::EstimateResult r;
      switch (k) {
        case volspec::EstimatorKind::Siml: r = volspec::siml(d, m); break;
        case volspec::EstimatorKind::InaSine: r = volspec::ina(d, m); break;
        default: r = volspec::mm_fourier_real_zero(d, m); break;
      }
      e.value_re = r.real(0, 0);
    }
    *out = e;
    return VS_OK;
  });
}

vs_status vs_estimate_increments(vs_estimator_kind kind, const double* deltas, size_t n, size_t m,
                                 double* out) {
  VS_REQUIRE(out && (deltas || n == 0), "null argument");
  return guarded([&] {
    const auto k = to_estimator_kind(kind);
    if (k == volspec::EstimatorKind::MmFourierComplex)
      return set_error(VS_ERR_INVALID_ARGUMENT, "mm_complex needs observation times; use vs_estimate_series");
    if (n == 0) return set_error(VS_ERR_EMPTY_INPUT, "no increments");
    *out = volspec::SpectralEstimator(k, n, m).evaluate({deltas, n});
    return VS_OK;
  });
}

vs_status vs_estimate_format_csv(const vs_estimate* e, char* buffer, size_t capacity) {
  VS_REQUIRE(e && buffer, "null argument");
  return guarded([&] {
    const int written = std::snprintf(
        buffer, capacity, "%s,%zu,%zu,%ld,0,0,%.17g,%.17g",
        volspec::to_string(to_estimator_kind(e->kind)), e->n, e->m, e->q, e->value_re, e->value_im);
    if (written < 0 || static_cast<size_t>(written) >= capacity)
      return set_error(VS_ERR_INVALID_ARGUMENT, "buffer too small");
    return VS_OK;
  });
}

vs_status vs_noise_expectation_exact(vs_estimator_kind kind, size_t n, size_t m, double nu,
                                     int include_initial, int include_terminal, double* out) {
  VS_REQUIRE(out, "null argument");
  return guarded([&] {
    *out = volspec::noise_expectation_exact(to_estimator_kind(kind), n, m, nu, include_initial != 0,
                                            include_terminal != 0);
    return VS_OK;
  });
}

vs_status vs_joint_mle(const double* deltas, size_t n, double init_c, double init_nu,
                       vs_mle_result* out) {
  VS_REQUIRE(out && (deltas || n == 0), "null argument");
  return guarded([&] {
    const auto z = volspec::spectral_transform({deltas, n});
    const auto r = volspec::joint_mle(z, {init_c, init_nu});
    *out = {r.params.c, r.params.nu, r.log_likelihood, r.sweeps, r.converged ? 1 : 0};
    if (!r.converged)
      return set_error(VS_ERR_NON_CONVERGENCE, "joint_mle hit the sweep limit; best point returned");
    return VS_OK;
  });
}

vs_status vs_experiment_load(const char* config_path, vs_experiment** out) {
  VS_REQUIRE(config_path && out, "null argument");
  return guarded([&] {
    auto e = std::make_unique<vs_experiment>();
    e->configs = volspec::load_config(config_path);
    *out = e.release();
    return VS_OK;
  });
}

void vs_experiment_destroy(vs_experiment* experiment) { delete experiment; }

vs_status vs_experiment_set_seed(vs_experiment* experiment, uint64_t seed) {
  VS_REQUIRE(experiment, "null argument");
  for (auto& c : experiment->configs) c.base_seed = seed;
  return VS_OK;
}

vs_status vs_experiment_set_threads(vs_experiment* experiment, unsigned threads) {
  VS_REQUIRE(experiment && threads >= 1, "threads must be >= 1");
  for (auto& c : experiment->configs) c.threads = threads;
  return VS_OK;
}

vs_status vs_experiment_run(vs_experiment* experiment, const char* out_dir, int* all_passed) {
  VS_REQUIRE(experiment && out_dir && all_passed, "null argument");
  return guarded([&] {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
      return set_error(VS_ERR_IO, std::string("cannot create output directory ") + out_dir);
    experiment->summaries.clear();
    bool ok = true;
    for (const auto& cfg : experiment->configs) {
      const auto summary = volspec::run_experiment(cfg);
      const fs::path file =
          fs::path(out_dir) / (cfg.name + "_" + volspec::to_string(cfg.type) + ".csv");
      std::ofstream out(file, std::ios::binary);
      if (!out) return set_error(VS_ERR_IO, "cannot write " + file.string());
      volspec::write_summary_csv(out, summary);
      out.flush();
      if (!out) return set_error(VS_ERR_IO, "write failed for " + file.string());
      experiment->summaries.push_back(volspec::summary_line(summary));
      ok = ok && summary.passed;
    }
    *all_passed = ok ? 1 : 0;
    return VS_OK;
  });
}

size_t vs_experiment_count(const vs_experiment* experiment) {
  return experiment ? experiment->configs.size() : 0;
}

const char* vs_experiment_summary(const vs_experiment* experiment, size_t i) {
  if (!experiment || i >= experiment->summaries.size()) return nullptr;
  return experiment->summaries[i].c_str();
}

}  // extern "C"
