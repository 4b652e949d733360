#pragma once

#include <string>

#include "laborcast/series.hpp"

namespace laborcast {

/// Loads a monthly panel: UTF-8 CSV, header row of column identifiers, first
/// column M/D/YYYY dates, remaining cells numeric or empty (= missing).
/// The day of month is ignored; dates must be strictly increasing with no
/// month gaps. `date_column` must name the first header cell.
FeatureMatrix load_panel_csv(const std::string& path, const std::string& date_column);

/// Inverse of load_panel_csv: month-end dates, %.17g values, empty cells for
/// missing. load(save(m)) reproduces dates and present values exactly.
void save_panel_csv(const FeatureMatrix& matrix, const std::string& path,
                    const std::string& date_column);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

} // namespace laborcast
