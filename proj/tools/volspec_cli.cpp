// volspec command-line front end. Talks to the library only through the C API.
//
// Exit codes (sysexits-style):
//   0  success            1  assertion / invariant failure   2  output I/O failure
//   64 usage error        65 malformed input data            66 input not readable
//   78 configuration error
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "volspec/volspec.h"

namespace {

enum Exit : int {
  kOk = 0,
  kAssertion = 1,
  kIo = 2,
  kUsage = 64,
  kData = 65,
  kNoInput = 66,
  kConfig = 78,
};

int report(vs_status status, int code) {
  std::cerr << "volspec: " << vs_status_string(status) << ": " << vs_last_error() << "\n";
  return code;
}

int cmd_basis_check(int max_dim, const std::string& out_path) {
  if (max_dim < 3) {
    std::cerr << "volspec: --max-dim must be >= 3\n";
    return kUsage;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "volspec: cannot write " << out_path << "\n";
    return kIo;
  }
  out << "kind,dim,orthogonality_error,diagonalization_error\n";

  struct Kind {
    vs_basis_kind kind;
    const char* name;
    int first;
    int step;
  };
  const Kind kinds[] = {{VS_BASIS_SIML_COSINE, "SimlCosine", 1, 1},
                        {VS_BASIS_FOURIER_REAL, "FourierReal", 3, 2},
                        {VS_BASIS_DST_SINE, "DstSine", 1, 1}};
  bool ok = true;
  double worst = 0.0;
  char line[128];
  for (const auto& k : kinds) {
    for (int dim = k.first; dim <= max_dim; dim += k.step) {
      double orth = 0.0, diag = 0.0;
      if (const vs_status st = vs_basis_check(k.kind, static_cast<size_t>(dim), &orth, &diag); st != VS_OK)
        return report(st, kAssertion);
      std::snprintf(line, sizeof line, "%s,%d,%.17g,%.17g\n", k.name, dim, orth, diag);
      out << line;
      ok = ok && orth < 1e-9 && diag < 1e-9;
      worst = std::max({worst, orth, diag});
    }
  }
  out.flush();
  if (!out) {
    std::cerr << "volspec: write failed for " << out_path << "\n";
    return kIo;
  }
  std::cout << "basis-check max_dim=" << max_dim << " worst_error=" << worst
            << (ok ? " PASS" : " FAIL") << "\n";
  return ok ? kOk : kAssertion;
}

int cmd_estimate(const std::string& input, const std::string& kind_name, int m, long q) {
  vs_estimator_kind kind;
  if (kind_name == "siml") kind = VS_EST_SIML;
  else if (kind_name == "mm_complex") kind = VS_EST_MM_COMPLEX;
  else if (kind_name == "mm_real") kind = VS_EST_MM_REAL;
  else if (kind_name == "ina") kind = VS_EST_INA;
  else {
    std::cerr << "volspec: unknown --kind '" << kind_name << "' (siml, mm_complex, mm_real, ina)\n";
    return kUsage;
  }
  if (m < 0) {
    std::cerr << "volspec: --m must be >= 0\n";
    return kUsage;
  }

  vs_series* series = nullptr;
  if (const vs_status st = vs_series_read_csv(input.c_str(), &series); st != VS_OK)
    return report(st, st == VS_ERR_IO ? kNoInput : kData);

  vs_estimate est{};
  const vs_status st = vs_estimate_series(series, kind, static_cast<size_t>(m), q, &est);
  vs_series_destroy(series);
  switch (st) {
    case VS_OK: break;
    case VS_ERR_TOO_SHORT:
    case VS_ERR_MALFORMED_DATA:
    case VS_ERR_EMPTY_INPUT: return report(st, kData);
    default: return report(st, kUsage);
  }
  char row[256];
  if (const vs_status fs = vs_estimate_format_csv(&est, row, sizeof row); fs != VS_OK)
    return report(fs, kIo);
  std::cout << row << "\n";
  return kOk;
}

int cmd_experiment(const std::string& config, const std::string& out_dir, const long long* seed,
                   int threads) {
  vs_experiment* exp = nullptr;
  if (const vs_status st = vs_experiment_load(config.c_str(), &exp); st != VS_OK)
    return report(st, kConfig);
  if (seed) vs_experiment_set_seed(exp, static_cast<uint64_t>(*seed));
  if (threads < 1) {
    vs_experiment_destroy(exp);
    std::cerr << "volspec: --threads must be >= 1\n";
    return kUsage;
  }
  vs_experiment_set_threads(exp, static_cast<unsigned>(threads));

  int passed = 0;
  const vs_status st = vs_experiment_run(exp, out_dir.c_str(), &passed);
  if (st != VS_OK) {
    vs_experiment_destroy(exp);
    return report(st, st == VS_ERR_IO ? kIo : kConfig);
  }
  for (size_t i = 0; i < vs_experiment_count(exp); ++i)
    if (const char* line = vs_experiment_summary(exp, i)) std::cout << line << "\n";
  vs_experiment_destroy(exp);
  return passed ? kOk : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral integrated-volatility estimators under microstructure noise"};
  app.require_subcommand(1);

  int max_dim = 0;
  std::string basis_out;
  auto* basis = app.add_subcommand("basis-check", "Check orthogonality and diagonalization of all bases");
  basis->add_option("--max-dim", max_dim, "Largest dimension to check (>= 3)")->required();
  basis->add_option("--out", basis_out, "Output CSV path")->required();

  std::string input, kind;
  int m = 0;
  long q = 0;
  auto* estimate = app.add_subcommand("estimate", "Estimate integrated volatility from a time,value CSV");
  estimate->add_option("--input", input, "Input CSV with header time,value")->required();
  estimate->add_option("--kind", kind, "siml | mm_complex | mm_real | ina")->required();
  estimate->add_option("--m", m, "Cutoff")->required();
  estimate->add_option("--q", q, "Fourier coefficient index (mm_complex only)");

  std::string config, out_dir;
  long long seed = 0;
  int threads = 1;
  auto* experiment = app.add_subcommand("experiment", "Run Monte Carlo experiments from a config file");
  experiment->add_option("--config", config, "INI experiment description")->required();
  experiment->add_option("--out-dir", out_dir, "Directory for result CSVs")->required();
  auto* seed_opt = experiment->add_option("--seed", seed, "Override the configured base seed");
  experiment->add_option("--threads", threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*basis) return cmd_basis_check(max_dim, basis_out);
  if (*estimate) return cmd_estimate(input, kind, m, q);
  return cmd_experiment(config, out_dir, *seed_opt ? &seed : nullptr, threads);
}
