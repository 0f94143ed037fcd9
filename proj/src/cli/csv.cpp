#include "dged/cli/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dged::cli {

std::string format_double(double value) {
  char buffer[32];
  const auto rc = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, rc.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto rc = std::from_chars(begin, end, value);
  if (rc.ec != std::errc() || rc.ptr != end)
    throw std::runtime_error("csv: bad floating-point field \"" + text + "\"");
  return value;
}

void write_series_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  if (trajectory.samples.empty()) throw std::invalid_argument("series csv: empty trajectory");

  const int n = trajectory.samples.front().state.truncation();
  out << "t";
  for (int i = 0; i <= n; ++i) out << ",c_" << i;
  out << "\n";
  for (const auto& sample : trajectory.samples) {
    out << format_double(sample.state.time);
    for (double v : sample.state.values) out << "," << format_double(v);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<ConcentrationState> read_series_csv(const std::filesystem::path& path,
                                                Variant variant) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());

  std::string line;
  if (!std::getline(in, line) || line.rfind("t,c_0", 0) != 0)
    throw std::runtime_error("series csv " + path.string() + ": expected header t,c_0,...");

  std::vector<ConcentrationState> states;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream ss(line);
    std::string field;
    ConcentrationState state;
    state.variant = variant;
    bool first = true;
    while (std::getline(ss, field, ',')) {
      const double v = parse_double(field);
      if (first) {
        state.time = v;
        first = false;
      } else {
        state.values.push_back(v);
      }
    }
    if (state.values.empty())
      throw std::runtime_error("series csv " + path.string() + ": row without concentrations");
    states.push_back(std::move(state));
  }
  return states;
}

void write_sweep_csv(const std::filesystem::path& path, const TruncationTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "i,t,N,c,delta_prev\n";
  for (const auto& row : table.rows) {
    out << row.size << "," << format_double(row.t) << "," << row.truncation << ","
        << format_double(row.value) << ",";
    if (row.delta_prev) out << format_double(*row.delta_prev);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace dged::cli
