#include "bubblelens/report.hpp"

#include "bubblelens/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace bubblelens {

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

Json grid_to_json(const GridSpec& g) {
  return Json{{"tc_offset_min", g.tc_offset_min}, {"tc_offset_max", g.tc_offset_max}, {"tc_step", g.tc_step},
              {"beta_min", g.beta_min},           {"beta_max", g.beta_max},           {"beta_count", g.beta_count},
              {"omega_min", g.omega_min},         {"omega_max", g.omega_max},         {"omega_count", g.omega_count},
              {"refine", g.refine}};
}

void grid_from_json(const Json& j, GridSpec& g) {
  g.tc_offset_min = j.value("tc_offset_min", g.tc_offset_min);
  g.tc_offset_max = j.value("tc_offset_max", g.tc_offset_max);
  g.tc_step = j.value("tc_step", g.tc_step);
  g.beta_min = j.value("beta_min", g.beta_min);
  g.beta_max = j.value("beta_max", g.beta_max);
  g.beta_count = j.value("beta_count", g.beta_count);
  g.omega_min = j.value("omega_min", g.omega_min);
  g.omega_max = j.value("omega_max", g.omega_max);
  g.omega_count = j.value("omega_count", g.omega_count);
  g.refine = j.value("refine", g.refine);
}

namespace {

Date tc_date_of(const FitResult& fit, const PriceSeries& series) {
  return trading_date_at(series, double(fit.window.t1) + fit.params.tc);
}

std::string tc_convention(const PriceSeries& series) {
  return "trading calendar extended past the last observation on weekdays {" +
         describe_trading_weekdays(trading_weekdays(series)) + "}, rounded to the nearest trading day";
}

}  // namespace

Json fit_to_json(const FitResult& fit, const PriceSeries& series) {
  const auto canonical = fit.params.canonical();
  Json j;
  j["window"] = {{"t1_date", format_date(series.dates().at(std::size_t(fit.window.t1)))},
                 {"t2_date", format_date(series.dates().at(std::size_t(fit.window.t2)))},
                 {"t1_index", fit.window.t1},
                 {"t2_index", fit.window.t2}};
  j["tc_date"] = format_date(tc_date_of(fit, series));
  j["tc_date_convention"] = tc_convention(series);
  j["tc_days_from_start"] = fit.params.tc;
  j["beta"] = fit.params.beta;
  j["omega"] = fit.params.omega;
  j["A"] = fit.params.A;
  j["B"] = fit.params.B;
  j["C1"] = fit.params.C1;
  j["C2"] = fit.params.C2;
  j["C"] = canonical.C;
  j["phi"] = canonical.phi;
  j["tau"] = canonical.tau;
  j["tau_exceeds_one"] = canonical.tau > 1.0;
  j["rmse"] = fit.rmse;
  j["n_obs"] = fit.n_obs;
  j["boundary_flags"] = {{"tc", fit.boundary.tc}, {"beta", fit.boundary.beta}, {"omega", fit.boundary.omega}};
  j["degenerate_grid_points"] = fit.degenerate_points;
  j["grid_spec"] = grid_to_json(fit.grid);
  return j;
}

FitReference fit_reference_from_json(const Json& j) {
  try {
    return {parse_date(j.at("window").at("t1_date").get<std::string>()),
            parse_date(j.at("window").at("t2_date").get<std::string>()), j.at("tc_days_from_start").get<double>()};
  } catch (const Json::exception& e) {
    throw Error(Errc::Usage, std::string("not a fit result: ") + e.what());
  }
}

std::string fit_table_header() {
  return "window_start,window_end,A,B,C,beta,omega,phi,tc_date,tc_days_from_start,rmse";
}

std::string fit_table_row(const FitResult& fit, const PriceSeries& series) {
  const auto canonical = fit.params.canonical();
  std::string row = format_date(series.dates().at(std::size_t(fit.window.t1))) + ',' +
                    format_date(series.dates().at(std::size_t(fit.window.t2)));
  for (double v : {fit.params.A, fit.params.B, canonical.C, fit.params.beta, fit.params.omega, canonical.phi})
    row += ',' + format_number(v);
  row += ',' + format_date(tc_date_of(fit, series)) + ',' + format_number(fit.params.tc) + ',' +
         format_number(fit.rmse);
  return row;
}

Json scan_to_json(const ScanResult& scan, const PriceSeries& series, bool include_fits) {
  Json j;
  j["t2_date"] = format_date(series.dates().at(std::size_t(scan.t2)));
  j["t2_index"] = scan.t2;
  j["lambda"] = scan.lambda;
  j["t1_star"] = scan.t1_star;
  j["t1_star_date"] = format_date(scan.t1_star_date);
  Json candidates = Json::array();
  for (const auto& c : scan.candidates) {
    Json cj{{"t1_date", format_date(series.dates().at(std::size_t(c.t1)))},
            {"t1_index", c.t1},
            {"window_size", c.window_size},
            {"chi2_np", c.chi2_np},
            {"chi2_lambda", c.chi2_lambda}};
    if (include_fits) cj["fit"] = fit_to_json(c.fit, series);
    candidates.push_back(std::move(cj));
  }
  j["candidates"] = std::move(candidates);
  Json failures = Json::array();
  for (const auto& f : scan.failures)
    failures.push_back({{"t1_date", format_date(series.dates().at(std::size_t(f.t1)))}, {"reason", f.reason}});
  j["failures"] = std::move(failures);
  return j;
}

std::string scan_csv(const ScanResult& scan, const PriceSeries& series) {
  std::string out = "t1_date,window_size,chi2_np,chi2_lambda\n";
  for (const auto& c : scan.candidates) {
    out += format_date(series.dates().at(std::size_t(c.t1))) + ',' + std::to_string(c.window_size) + ',' +
           format_number(c.chi2_np) + ',' + format_number(c.chi2_lambda) + '\n';
  }
  return out;
}

Json sweep_to_json(const SweepResult& sweep, const PriceSeries& series) {
  Json entries = Json::array();
  for (const auto& e : sweep.entries) {
    Json ej{{"shift", e.shift}};
    if (e.t2 >= 0 && e.t2 < series.size()) ej["t2_date"] = format_date(series.dates()[std::size_t(e.t2)]);
    if (e.scan) {
      ej["lambda"] = e.scan->lambda;
      ej["t1_star"] = e.scan->t1_star;
      ej["t1_star_date"] = format_date(e.scan->t1_star_date);
    } else {
      ej["error"] = e.error;
    }
    entries.push_back(std::move(ej));
  }
  return Json{{"entries", std::move(entries)}, {"t1_star_spread_days", sweep.t1_star_spread}};
}

std::string residuals_csv(const Residuals& residuals, const PriceSeries& local) {
  std::string out = "date,t_index,x,r\n";
  for (Index i = 0; i < residuals.r.size(); ++i) {
    out += format_date(local.dates().at(std::size_t(i))) + ',' + std::to_string(i) + ',' +
           format_number(residuals.x[i]) + ',' + format_number(residuals.r[i]) + '\n';
  }
  return out;
}

Residuals read_residuals_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::MalformedRow, "empty residuals file", 1);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      header.push_back(cell);
    }
  }
  const auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error(Errc::MalformedRow, "residuals file lacks column '" + name + "'", 1);
  };
  const std::size_t cx = col("x"), cr = col("r");
  std::vector<double> xs, rs;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    double x = 0.0, r = 0.0;
    const auto parse = [&](std::size_t c, double& v) {
      if (c >= cells.size()) return false;
      std::string s = cells[c];
      if (!s.empty() && s.back() == '\r') s.pop_back();
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc() && p == s.data() + s.size();
    };
    if (!parse(cx, x) || !parse(cr, r))
      throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad residual row", line_no);
    xs.push_back(x);
    rs.push_back(r);
  }
  Residuals out;
  out.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), Index(xs.size()));
  out.r = Eigen::Map<const Eigen::VectorXd>(rs.data(), Index(rs.size()));
  return out;
}

std::string periodogram_csv(const PeriodogramResult& p) {
  std::string out = "omega,power\n";
  for (Index i = 0; i < p.omegas.size(); ++i) out += format_number(p.omegas[i]) + ',' + format_number(p.power[i]) + '\n';
  return out;
}

std::string hq_csv(const HqDerivative& hq) {
  std::string out = "log_tc_minus_t,D\n";
  for (Index i = 0; i < hq.value.size(); ++i)
    out += format_number(hq.log_tc_minus_t[i]) + ',' + format_number(hq.value[i]) + '\n';
  return out;
}

Json significance_to_json(const SignificanceResult& result) {
  Json j{{"model", std::string(null_model_name(result.model))},
         {"n", result.surrogate_peak_powers.size()},
         {"observed_peak_power", result.observed_peak_power},
         {"p_value", result.p_value},
         {"surrogate_peak_powers", result.surrogate_peak_powers}};
  if (result.ar1_phi) j["ar1_phi"] = *result.ar1_phi;
  return j;
}

}  // namespace bubblelens
