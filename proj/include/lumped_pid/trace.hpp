#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lumped_pid {

/// Columnar, time-indexed simulation record. Column 0 is always "t".
class SimTrace {
 public:
  SimTrace() = default;
  explicit SimTrace(std::vector<std::string> columns);

  void append(std::span<const double> row);

  std::size_t rows() const { return data_.empty() ? 0 : data_.front().size(); }
  std::size_t cols() const { return names_.size(); }
  bool empty() const { return rows() == 0; }

  const std::vector<std::string>& columns() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool has(std::string_view name) const { return index_of(name).has_value(); }

  /// Throws kDimensionMismatch for unknown names.
  std::span<const double> column(std::string_view name) const;
  std::span<const double> column(std::size_t i) const { return data_.at(i); }
  std::span<const double> time() const { return column(0); }

  /// Header row plus one row per sample, floats at 17 significant digits.
  void write_csv(std::ostream& os) const;
  std::string to_csv() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> data_;
};

/// "%.17g", with "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double v);

}  // namespace lumped_pid
