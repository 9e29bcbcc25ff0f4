#include "bubblelens/timeseries.hpp"

#include "bubblelens/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace bubblelens {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool is_missing(std::string_view s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null" || s == "N/A";
}

bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

bool try_parse_date(std::string_view text, Date& out) noexcept {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [&](std::size_t pos, std::size_t len, auto& v) {
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
    return ec == std::errc() && p == text.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return false;
  out = Date{ymd};
  return true;
}

Date parse_date(std::string_view text) {
  Date d;
  if (!try_parse_date(text, d)) throw Error(Errc::Usage, "not an ISO-8601 date: '" + std::string(text) + "'");
  return d;
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

PriceSeries PriceSeries::from_observations(std::vector<Date> dates, Eigen::VectorXd prices,
                                           std::size_t dropped_rows) {
  if (Index(dates.size()) != prices.size())
    throw Error(Errc::Usage, "dates and prices differ in length");
  for (Index i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0) || !std::isfinite(prices[i]))
      throw Error(Errc::NonPositivePrice, "price " + std::to_string(prices[i]) + " at index " + std::to_string(i));
    if (i > 0 && !(dates[std::size_t(i - 1)] < dates[std::size_t(i)])) {
      if (dates[std::size_t(i - 1)] == dates[std::size_t(i)])
        throw Error(Errc::DuplicateDate, format_date(dates[std::size_t(i)]));
      throw Error(Errc::Usage, "dates not ascending at index " + std::to_string(i));
    }
  }
  PriceSeries s;
  s.dates_ = std::move(dates);
  s.prices_ = std::move(prices);
  s.log_prices_ = s.prices_.unaryExpr([](double p) { return std::log(p); });
  s.dropped_rows_ = dropped_rows;
  return s;
}

Index PriceSeries::index_on_or_after(Date d) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.end()) throw Error(Errc::WindowOutOfRange, "no observation on or after " + format_date(d));
  return Index(it - dates_.begin());
}

Index PriceSeries::index_on_or_before(Date d) const {
  auto it = std::upper_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.begin()) throw Error(Errc::WindowOutOfRange, "no observation on or before " + format_date(d));
  return Index(it - dates_.begin()) - 1;
}

PriceSeries read_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw Error(Errc::EmptySeries, "missing header row");
  ++line_no;
  std::string_view header = line;
  if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  const auto columns = split_fields(header);
  const auto find_col = [&](const std::string& name) {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(Errc::MalformedRow, "column '" + name + "' not found in header", 1);
    return std::size_t(it - columns.begin());
  };
  const std::size_t date_col = find_col(options.date_col);
  const std::size_t price_col = find_col(options.price_col);

  struct Row {
    Date date;
    double price;
    long line;
  };
  std::vector<Row> rows;
  std::size_t dropped = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() <= std::max(date_col, price_col))
      throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": too few fields", line_no);
    Date d;
    if (!try_parse_date(fields[date_col], d))
      throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad date '" +
                                          std::string(fields[date_col]) + "'", line_no);
    if (is_missing(fields[price_col])) {
      ++dropped;
      continue;
    }
    double p = 0.0;
    if (!parse_double(fields[price_col], p))
      throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad price '" +
                                          std::string(fields[price_col]) + "'", line_no);
    if (!(p > 0.0))
      throw Error(Errc::NonPositivePrice,
                  "line " + std::to_string(line_no) + ": price " + std::string(fields[price_col]), line_no);
    rows.push_back({d, p, line_no});
  }

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date)
      throw Error(Errc::DuplicateDate, format_date(rows[i].date) + " (line " + std::to_string(rows[i].line) + ")",
                  rows[i].line);
  }
  if (Index(rows.size()) < options.min_rows)
    throw Error(Errc::EmptySeries, std::to_string(rows.size()) + " valid rows, need " +
                                       std::to_string(options.min_rows));

  std::vector<Date> dates;
  dates.reserve(rows.size());
  Eigen::VectorXd prices(Index(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    dates.push_back(rows[i].date);
    prices[Index(i)] = rows[i].price;
  }
  return PriceSeries::from_observations(std::move(dates), std::move(prices), dropped);
}

PriceSeries load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return read_csv(in, options);
}

void write_csv(const PriceSeries& series, std::ostream& out) {
  out << "date,adj_close,t_index,log_price\n";
  char buf[96];
  for (Index i = 0; i < series.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%.17g,%ld,%.17g\n", series.prices()[i], long(i), series.log_prices()[i]);
    out << format_date(series.dates()[std::size_t(i)]) << buf;
  }
}

PriceSeries slice(const PriceSeries& series, const Window& window) {
  if (window.t1 < 0 || window.t2 >= series.size() || window.t1 >= window.t2)
    throw Error(Errc::WindowOutOfRange, "window [" + std::to_string(window.t1) + ", " +
                                            std::to_string(window.t2) + "] for series of length " +
                                            std::to_string(series.size()));
  std::vector<Date> dates(series.dates().begin() + window.t1, series.dates().begin() + window.t2 + 1);
  Eigen::VectorXd prices = series.prices().segment(window.t1, window.length());
  return PriceSeries::from_observations(std::move(dates), std::move(prices));
}

Window window_from_dates(const PriceSeries& series, Date from, Date to) {
  if (!(from < to)) throw Error(Errc::WindowOutOfRange, format_date(from) + " is not before " + format_date(to));
  Window w{series.index_on_or_after(from), series.index_on_or_before(to)};
  if (w.t1 >= w.t2) throw Error(Errc::WindowOutOfRange, "window " + format_date(from) + ":" + format_date(to) +
                                                            " holds fewer than two observations");
  return w;
}

std::array<bool, 7> trading_weekdays(const PriceSeries& series) {
  std::array<std::size_t, 7> counts{};
  for (const Date d : series.dates()) ++counts[std::chrono::weekday{d}.c_encoding()];
  const std::size_t peak = *std::max_element(counts.begin(), counts.end());
  std::array<bool, 7> mask{};
  for (std::size_t i = 0; i < 7; ++i) mask[i] = peak > 0 && 2 * counts[i] >= peak;
  if (peak == 0) mask = {false, true, true, true, true, true, false};
  return mask;
}

std::string describe_trading_weekdays(const std::array<bool, 7>& mask) {
  static constexpr const char* kNames[7] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
  std::string out;
  for (std::size_t i = 0; i < 7; ++i) {
    if (!mask[i]) continue;
    if (!out.empty()) out += ',';
    out += kNames[i];
  }
  return out;
}

Date trading_date_at(const PriceSeries& series, double t) {
  if (series.empty()) throw Error(Errc::EmptySeries, "empty series");
  const long target = std::lround(t);
  const long last = long(series.size()) - 1;
  if (target >= 0 && target <= last) return series.dates()[std::size_t(target)];

  const auto mask = trading_weekdays(series);
  const int dir = target > last ? 1 : -1;
  long steps = target > last ? target - last : -target;
  Date d = target > last ? series.dates().back() : series.dates().front();
  while (steps > 0) {
    d += std::chrono::days{dir};
    if (mask[std::chrono::weekday{d}.c_encoding()]) --steps;
  }
  return d;
}

}  // namespace bubblelens
