#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "volspec/error.hpp"
#include "volspec/market_model.hpp"

namespace volspec {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

double parse_number(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(ErrorCode::MalformedData,
         "line " + std::to_string(line_no) + ": not a finite number: '" + std::string(s) + "'");
  return v;
}

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_series_csv(std::ostream& out, const ObservationSeries& obs) {
  const bool oracle = obs.has_oracle();
  out << (oracle ? "time,value,latent,noise\n" : "time,value\n");
  for (std::size_t k = 0; k < obs.size(); ++k) {
    put(out, obs.times[k]);
    out << ',';
    put(out, obs.values[k]);
    if (oracle) {
      out << ',';
      put(out, obs.latent[k]);
      out << ',';
      put(out, obs.noise[k]);
    }
    out << '\n';
  }
}

ObservationSeries read_series_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  // Skip a UTF-8 byte-order mark and blank leading lines.
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) fail(ErrorCode::MalformedData, "empty CSV input");

  const auto header = split(line);
  int time_col = -1, value_col = -1, latent_col = -1, noise_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "time") time_col = static_cast<int>(i);
    else if (header[i] == "value") value_col = static_cast<int>(i);
    else if (header[i] == "latent") latent_col = static_cast<int>(i);
    else if (header[i] == "noise") noise_col = static_cast<int>(i);
  }
  if (time_col < 0 || value_col < 0)
    fail(ErrorCode::MalformedData, "header must contain 'time' and 'value' columns");
  const bool oracle = latent_col >= 0 && noise_col >= 0;

  ObservationSeries obs;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size())
      fail(ErrorCode::MalformedData, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " fields");
    obs.times.push_back(parse_number(fields[time_col], line_no));
    obs.values.push_back(parse_number(fields[value_col], line_no));
    if (oracle) {
      obs.latent.push_back(parse_number(fields[latent_col], line_no));
      obs.noise.push_back(parse_number(fields[noise_col], line_no));
    }
  }
  for (std::size_t k = 1; k < obs.times.size(); ++k)
    if (!(obs.times[k] > obs.times[k - 1]))
      fail(ErrorCode::MalformedData, "times must be strictly increasing");
  return obs;
}

}  // namespace volspec
