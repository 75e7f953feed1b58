#pragma once

// Minimal CSV emission: comma separated, '.' decimal point, LF line
// endings, doubles printed with 17 significant digits so they round-trip.

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace d3::csv {

std::string format(double v);
std::string format(std::int64_t v);
std::string format(std::uint64_t v);
inline std::string format(int v) { return format(static_cast<std::int64_t>(v)); }
inline std::string format(std::string_view s) { return std::string(s); }
inline std::string format(const char* s) { return std::string(s); }
inline std::string format(const std::string& s) { return s; }

class Writer {
 public:
  Writer(std::ostream& out, std::initializer_list<std::string_view> header);

  template <typename... Ts>
  void row(const Ts&... fields) {
    std::vector<std::string> cells{format(fields)...};
    write_cells(cells);
  }

  void write_cells(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace d3::csv
