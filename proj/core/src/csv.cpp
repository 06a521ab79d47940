#include "gred/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <system_error>

namespace gred {

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (result.ec != std::errc()) return {};
  return std::string(buf, result.ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_bif_csv(std::ostream& os, SweepParam param, const std::vector<BifRow>& rows,
                   std::size_t samples) {
  os << "param,value,theta_l,theta_r,x_star,lyapunov,diameter";
  for (std::size_t k = 0; k < samples; ++k) os << ",orbit_" << k;
  os << '\n';
  const std::string name(to_string(param));
  for (const BifRow& row : rows) {
    os << name << ',' << format_number(row.value);
    if (row.skipped) {
      for (std::size_t k = 0; k < 5 + samples; ++k) os << ',';
      os << '\n';
      continue;
    }
    os << ',' << format_number(row.theta_l) << ',' << format_number(row.theta_r) << ','
       << (row.x_star ? format_number(*row.x_star) : std::string()) << ','
       << format_number(row.lyapunov) << ',' << format_number(row.diameter);
    for (std::size_t k = 0; k < samples; ++k) {
      os << ',' << (k < row.orbit.size() ? format_number(row.orbit[k]) : std::string());
    }
    os << '\n';
  }
}

void write_grid_csv(std::ostream& os, const std::vector<GridCell>& cells) {
  os << "alpha,beta,w_bif,status\n";
  for (const GridCell& cell : cells) {
    os << format_number(cell.alpha) << ',' << format_number(cell.beta) << ','
       << (cell.result.w_bif ? format_number(*cell.result.w_bif) : std::string()) << ','
       << csv_field(cell.result.status_text()) << '\n';
  }
}

}  // namespace gred
