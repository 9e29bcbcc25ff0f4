#pragma once

#include <Eigen/Core>

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bubblelens {

using Index = Eigen::Index;
using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws Error(Usage) otherwise.
Date parse_date(std::string_view text);
bool try_parse_date(std::string_view text, Date& out) noexcept;
std::string format_date(Date d);

/// Inclusive trading-day window [t1, t2].
struct Window {
  Index t1 = 0;
  Index t2 = 0;

  Index length() const noexcept { return t2 - t1 + 1; }
  friend bool operator==(const Window&, const Window&) = default;
};

inline constexpr Index kMinWindowLength = 30;

/// Daily price observations on a trading-day axis. Index i is trading day i;
/// calendar gaps (weekends, holidays) carry no index. Immutable once built.
class PriceSeries {
 public:
  PriceSeries() = default;

  /// Validates ordering and positivity. Input must already be sorted.
  static PriceSeries from_observations(std::vector<Date> dates, Eigen::VectorXd prices,
                                       std::size_t dropped_rows = 0);

  Index size() const noexcept { return prices_.size(); }
  bool empty() const noexcept { return prices_.size() == 0; }

  const std::vector<Date>& dates() const noexcept { return dates_; }
  const Eigen::VectorXd& prices() const noexcept { return prices_; }
  const Eigen::VectorXd& log_prices() const noexcept { return log_prices_; }
  /// Trading-day index 0..N-1.
  Eigen::VectorXi t_index() const { return Eigen::VectorXi::LinSpaced(size(), 0, int(size()) - 1); }
  /// Trading-day index as a real-valued time axis.
  Eigen::VectorXd time_axis() const {
    return Eigen::VectorXd::LinSpaced(size(), 0.0, double(size() - 1));
  }
  std::size_t dropped_rows() const noexcept { return dropped_rows_; }

  /// First index whose date is >= d.
  Index index_on_or_after(Date d) const;
  /// Last index whose date is <= d.
  Index index_on_or_before(Date d) const;

  friend bool operator==(const PriceSeries& a, const PriceSeries& b) {
    return a.dates_ == b.dates_ && a.prices_ == b.prices_ && a.log_prices_ == b.log_prices_;
  }

 private:
  std::vector<Date> dates_;
  Eigen::VectorXd prices_;
  Eigen::VectorXd log_prices_;
  std::size_t dropped_rows_ = 0;
};

struct CsvOptions {
  std::string date_col = "date";
  std::string price_col = "adj_close";
  Index min_rows = kMinWindowLength;
};

PriceSeries read_csv(std::istream& in, const CsvOptions& options = {});
PriceSeries load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes date,adj_close,t_index,log_price with round-trip precision.
void write_csv(const PriceSeries& series, std::ostream& out);

/// Sub-series over [t1, t2] with the trading-day index restarting at 0.
PriceSeries slice(const PriceSeries& series, const Window& window);

/// Window covering the trading days whose dates fall inside [from, to].
Window window_from_dates(const PriceSeries& series, Date from, Date to);

/// Weekdays (Sunday = 0) that the series treats as trading days: a weekday is
/// counted when it occurs at least half as often as the most common weekday.
std::array<bool, 7> trading_weekdays(const PriceSeries& series);
std::string describe_trading_weekdays(const std::array<bool, 7>& mask);

/// Calendar date of (possibly fractional, possibly future) trading-day index t,
/// rounded to the nearest trading day. Beyond the last observation the calendar
/// is extended using trading_weekdays().
Date trading_date_at(const PriceSeries& series, double t);

}  // namespace bubblelens
