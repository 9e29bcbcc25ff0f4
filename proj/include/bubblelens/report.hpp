#pragma once

#include "bubblelens/bubble_start.hpp"
#include "bubblelens/diagnostics.hpp"
#include "bubblelens/fit.hpp"
#include "bubblelens/surrogates.hpp"
#include "bubblelens/timeseries.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace bubblelens {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

Json grid_to_json(const GridSpec& grid);
/// Overrides the fields of `grid` present in `j`.
void grid_from_json(const Json& j, GridSpec& grid);

/// FitResult with calendar dates resolved against the series the window indexes.
Json fit_to_json(const FitResult& fit, const PriceSeries& series);

/// Window-local critical time and window dates read back from a fit JSON.
struct FitReference {
  Date t1_date;
  Date t2_date;
  double tc_days_from_start = 0.0;
};
FitReference fit_reference_from_json(const Json& j);

/// Header: window_start,window_end,A,B,C,beta,omega,phi,tc_date,tc_days_from_start,rmse
std::string fit_table_header();
std::string fit_table_row(const FitResult& fit, const PriceSeries& series);

Json scan_to_json(const ScanResult& scan, const PriceSeries& series, bool include_fits = true);
/// Columns t1_date,window_size,chi2_np,chi2_lambda.
std::string scan_csv(const ScanResult& scan, const PriceSeries& series);
Json sweep_to_json(const SweepResult& sweep, const PriceSeries& series);

/// Columns date,t_index,x,r.
std::string residuals_csv(const Residuals& residuals, const PriceSeries& local);
Residuals read_residuals_csv(const std::filesystem::path& path);
/// Columns omega,power.
std::string periodogram_csv(const PeriodogramResult& periodogram);
/// Columns log_tc_minus_t,D.
std::string hq_csv(const HqDerivative& hq);

Json significance_to_json(const SignificanceResult& result);

}  // namespace bubblelens
