#include "moldopt/trainlog.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace moldopt {

namespace {
// shortest exact decimal form so logs round-trip bitwise
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  double back = std::strtod(buf, nullptr);
  if (back == x) {
    for (int prec = 1; prec < 17; ++prec) {
      char s[32];
      std::snprintf(s, sizeof(s), "%.*g", prec, x);
      if (std::strtod(s, nullptr) == x) return s;
    }
  }
  return buf;
}
}  // namespace

void TrainLog::add(std::vector<double> row) {
  if (row.size() != header.size()) throw std::invalid_argument("log row width != header width");
  rows.push_back(std::move(row));
}

std::string TrainLog::to_csv_text() const {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << num(r[i]);
    out << "\n";
  }
  return out.str();
}

void TrainLog::save_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << to_csv_text();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  TrainLog log;
  log.header = header;
  for (const auto& r : rows) log.add(r);
  log.save_csv(path);
}

}  // namespace moldopt
