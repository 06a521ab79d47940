#pragma once

// CSV output for sweeps: header row, '.' decimal separator, 17 significant
// digits, RFC-4180 quoting. Missing values are written as empty fields.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gred/sweep.hpp"

namespace gred {

/// 17 significant digits; NaN becomes an empty string.
std::string format_number(double v);

/// Quotes a field if it contains a comma, quote or line break.
std::string csv_field(std::string_view text);

/// Columns: param,value,theta_l,theta_r,x_star,lyapunov,diameter,orbit_0..orbit_{k-1}
void write_bif_csv(std::ostream& os, SweepParam param, const std::vector<BifRow>& rows,
                   std::size_t samples);

/// Columns: alpha,beta,w_bif,status
void write_grid_csv(std::ostream& os, const std::vector<GridCell>& cells);

}  // namespace gred
