#include "lumped_pid/trace.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "lumped_pid/error.hpp"

namespace lumped_pid {

SimTrace::SimTrace(std::vector<std::string> columns) : names_(std::move(columns)), data_(names_.size()) {
  if (names_.empty() || names_.front() != "t")
    throw Error(ErrorKind::kInvalidConfig, "trace must start with a 't' column");
}

void SimTrace::append(std::span<const double> row) {
  if (row.size() != names_.size())
    throw Error(ErrorKind::kDimensionMismatch, "trace row has " + std::to_string(row.size()) +
                                                   " values, expected " + std::to_string(names_.size()));
  for (std::size_t i = 0; i < row.size(); ++i) data_[i].push_back(row[i]);
}

std::optional<std::size_t> SimTrace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::span<const double> SimTrace::column(std::string_view name) const {
  const auto i = index_of(name);
  if (!i) throw Error(ErrorKind::kDimensionMismatch, "no trace column '" + std::string(name) + "'");
  return data_[*i];
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void SimTrace::write_csv(std::ostream& os) const {
  for (std::size_t c = 0; c < names_.size(); ++c) os << (c ? "," : "") << names_[c];
  os << '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < names_.size(); ++c) os << (c ? "," : "") << format_double(data_[c][r]);
    os << '\n';
  }
}

std::string SimTrace::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

}  // namespace lumped_pid
