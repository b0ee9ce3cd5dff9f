#include "volspec/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string_view>

#include "volspec/error.hpp"

namespace volspec {

namespace {

using Section = std::map<std::string, std::pair<std::string, std::size_t>>;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment",
       {"name", "types", "n_schedule", "m_exponent", "replications", "seed", "threads",
        "bias_se_multiple", "normality_mean_tol", "normality_var_low", "normality_var_high",
        "normality_skew_tol", "normality_kurt_tol", "mc_se_multiple", "cross_se_multiple",
        "monotone_slack", "ina_target_ratio", "siml_bias_floor"}},
      {"simulation",
       {"vol", "variance", "breakpoints", "levels", "ou_mean", "ou_rate", "ou_vol_of_vol",
        "ou_initial", "drift", "refinement"}},
      {"noise", {"variance", "include_initial", "include_terminal"}},
      {"estimators", {"kinds"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_error(std::size_t line, const std::string& what) {
  fail(ErrorCode::Config, (line ? "line " + std::to_string(line) + ": " : std::string()) + what);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto pos = v.find(',', start);
    auto item = trim(std::string_view(v).substr(start, pos == std::string::npos ? std::string::npos
                                                                                : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Section> sections) : sections_(std::move(sections)) {}

  bool has(const std::string& sec, const std::string& key) const {
    auto it = sections_.find(sec);
    return it != sections_.end() && it->second.count(key) > 0;
  }

  const std::pair<std::string, std::size_t>& raw(const std::string& sec, const std::string& key) const {
    if (!has(sec, key)) config_error(0, "missing required key [" + sec + "] " + key);
    return sections_.at(sec).at(key);
  }

  double number(const std::string& sec, const std::string& key) const {
    const auto& [text, line] = raw(sec, key);
    return parse_double(text, line, key);
  }

  double number_or(const std::string& sec, const std::string& key, double fallback) const {
    return has(sec, key) ? number(sec, key) : fallback;
  }

  std::uint64_t integer(const std::string& sec, const std::string& key) const {
    const auto& [text, line] = raw(sec, key);
    return parse_uint(text, line, key);
  }

  std::uint64_t integer_or(const std::string& sec, const std::string& key, std::uint64_t fallback) const {
    return has(sec, key) ? integer(sec, key) : fallback;
  }

  bool boolean_or(const std::string& sec, const std::string& key, bool fallback) const {
    if (!has(sec, key)) return fallback;
    const auto& [text, line] = raw(sec, key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    config_error(line, key + ": expected true or false, got '" + text + "'");
  }

  std::string text_or(const std::string& sec, const std::string& key, const std::string& fallback) const {
    return has(sec, key) ? raw(sec, key).first : fallback;
  }

  std::vector<double> numbers(const std::string& sec, const std::string& key) const {
    const auto& [text, line] = raw(sec, key);
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_double(item, line, key));
    return out;
  }

  std::vector<std::size_t> integers(const std::string& sec, const std::string& key) const {
    const auto& [text, line] = raw(sec, key);
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) out.push_back(parse_uint(item, line, key));
    if (out.empty()) config_error(line, key + ": empty list");
    return out;
  }

  std::size_t line_of(const std::string& sec, const std::string& key) const {
    return has(sec, key) ? raw(sec, key).second : 0;
  }

 private:
  static double parse_double(const std::string& text, std::size_t line, const std::string& key) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
      config_error(line, key + ": not a finite number: '" + text + "'");
    return v;
  }

  static std::uint64_t parse_uint(const std::string& text, std::size_t line, const std::string& key) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      config_error(line, key + ": not a non-negative integer: '" + text + "'");
    return v;
  }

  std::map<std::string, Section> sections_;
};

std::map<std::string, Section> tokenize(std::istream& in) {
  std::map<std::string, Section> sections;
  std::string current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') config_error(line_no, "malformed section header");
      current = trim(std::string_view(body).substr(1, body.size() - 2));
      if (!allowed_keys().count(current)) config_error(line_no, "unknown section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) config_error(line_no, "expected key = value");
    if (current.empty()) config_error(line_no, "key outside of any section");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!allowed_keys().at(current).count(key))
      config_error(line_no, "unknown key '" + key + "' in [" + current + "]");
    if (sections[current].count(key)) config_error(line_no, "duplicate key '" + key + "'");
    sections[current][key] = {value, line_no};
  }
  return sections;
}

}  // namespace

std::vector<ExperimentConfig> parse_config(std::istream& in, const std::string& default_name) {
  const Reader r(tokenize(in));

  ExperimentConfig base;
  base.name = r.text_or("experiment", "name", default_name);
  base.n_schedule = r.integers("experiment", "n_schedule");
  base.m_exponent = r.number_or("experiment", "m_exponent", 0.4);
  base.replications = r.integer_or("experiment", "replications", 100);
  base.base_seed = r.integer_or("experiment", "seed", 1);
  base.threads = static_cast<unsigned>(r.integer_or("experiment", "threads", 1));
  if (base.threads < 1) config_error(r.line_of("experiment", "threads"), "threads must be >= 1");

  auto& t = base.thresholds;
  t.bias_se_multiple = r.number_or("experiment", "bias_se_multiple", t.bias_se_multiple);
  t.normality_mean_tol = r.number_or("experiment", "normality_mean_tol", t.normality_mean_tol);
  t.normality_var_low = r.number_or("experiment", "normality_var_low", t.normality_var_low);
  t.normality_var_high = r.number_or("experiment", "normality_var_high", t.normality_var_high);
  t.normality_skew_tol = r.number_or("experiment", "normality_skew_tol", t.normality_skew_tol);
  t.normality_kurt_tol = r.number_or("experiment", "normality_kurt_tol", t.normality_kurt_tol);
  t.mc_se_multiple = r.number_or("experiment", "mc_se_multiple", t.mc_se_multiple);
  t.cross_se_multiple = r.number_or("experiment", "cross_se_multiple", t.cross_se_multiple);
  t.monotone_slack = r.number_or("experiment", "monotone_slack", t.monotone_slack);
  if (r.has("experiment", "ina_target_ratio"))
    t.ina_target_ratio = r.number("experiment", "ina_target_ratio");
  if (r.has("experiment", "siml_bias_floor"))
    t.siml_bias_floor = r.number("experiment", "siml_bias_floor");

  const std::string vol = r.text_or("simulation", "vol", "constant");
  if (vol == "constant") {
    base.vol = ConstantVol{r.number_or("simulation", "variance", 1.0)};
  } else if (vol == "piecewise") {
    base.vol = PiecewiseVol{r.numbers("simulation", "breakpoints"), r.numbers("simulation", "levels")};
  } else if (vol == "ou") {
    base.vol = OuDrivenVol{r.number("simulation", "ou_mean"), r.number("simulation", "ou_rate"),
                           r.number("simulation", "ou_vol_of_vol"), r.number("simulation", "ou_initial")};
  } else {
    config_error(r.line_of("simulation", "vol"), "vol must be constant, piecewise or ou");
  }
  base.drift.rate = r.number_or("simulation", "drift", 0.0);
  base.refinement = r.integer_or("simulation", "refinement", 10);

  base.noise.variance = r.number_or("noise", "variance", 0.0);
  base.noise.include_initial = r.boolean_or("noise", "include_initial", false);
  base.noise.include_terminal = r.boolean_or("noise", "include_terminal", true);

  base.kinds.clear();
  for (const auto& k : split_list(r.text_or("estimators", "kinds", "siml"))) {
    try {
      base.kinds.push_back(parse_estimator_kind(k));
    } catch (const Error& e) {
      config_error(r.line_of("estimators", "kinds"), e.what());
    }
  }

  const auto types = split_list(r.raw("experiment", "types").first);
  if (types.empty()) config_error(r.line_of("experiment", "types"), "types: empty list");
  std::vector<ExperimentConfig> out;
  for (const auto& name : types) {
    ExperimentConfig cfg = base;
    cfg.type = parse_experiment_type(name);
    try {
      validate(cfg);
    } catch (const Error& e) {
      fail(ErrorCode::Config, std::string("invalid ") + name + " experiment: " + e.what());
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<ExperimentConfig> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, "cannot open config file " + path.string());
  return parse_config(in, path.stem().string());
}

}  // namespace volspec
