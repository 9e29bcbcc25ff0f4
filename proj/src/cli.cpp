#include "bubblelens/cli.hpp"

#include "bubblelens/error.hpp"
#include "bubblelens/report.hpp"
#include "bubblelens/synth.hpp"

#include "CLI11.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#ifndef BUBBLELENS_VERSION
#define BUBBLELENS_VERSION "0.0.0"
#endif

namespace bubblelens {

namespace fs = std::filesystem;

std::string tool_version() { return BUBBLELENS_VERSION; }

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error(Errc::Io, "sha256 unavailable");
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, std::size_t(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

struct GlobalOptions {
  std::string input;
  std::string out_dir = ".";
  std::uint64_t seed = 42;
  int threads = 0;
  std::string config;
};

// Files are collected in memory and written in order once every computation succeeded.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) {
    if (std::any_of(files_.begin(), files_.end(), [&](const auto& f) { return f.first == name; }))
      throw Error(Errc::Usage, "output name '" + name + "' used twice");
    files_.emplace_back(name, std::move(content));
  }
  Json names() const {
    Json j = Json::array();
    for (const auto& f : files_) j.push_back(f.first);
    return j;
  }

  void commit() {
    std::error_code ec;
    const bool created = !fs::exists(dir_) && fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::Io, "cannot create " + dir_.string() + ": " + ec.message());
    std::vector<fs::path> written;
    try {
      for (const auto& [name, content] : files_) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::Io, "cannot write " + path.string());
        written.push_back(path);
        out << content;
        out.close();
        if (!out) throw Error(Errc::Io, "cannot write " + path.string());
      }
    } catch (...) {
      for (const auto& p : written) fs::remove(p, ec);
      if (created) fs::remove(dir_, ec);
      throw;
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string dump(const Json& j) { return j.dump(2) + '\n'; }

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(Errc::Usage, path + ": " + e.what());
  }
}

// A manifest replays through its config block; any other object is taken as the config itself.
void apply_config_file(const GlobalOptions& g, Json& cfg) {
  if (g.config.empty()) return;
  Json file = load_json_file(g.config);
  if (!file.is_object()) throw Error(Errc::Usage, g.config + ": config must be a JSON object");
  if (file.contains("config") && file.contains("command")) file = file["config"];
  cfg.merge_patch(file);
}

template <typename T>
T cfg_get(const Json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(Errc::Usage, std::string("config key '") + key + "': " + e.what());
  }
}

Json manifest(const std::string& command, const std::string& input_hash, const Json& cfg, const OutputSet& outputs) {
  Json j;
  j["command"] = command;
  j["input_hash"] = input_hash.empty() ? Json(nullptr) : Json("sha256:" + input_hash);
  j["config"] = cfg;
  j["tool_version"] = tool_version();
  Json names = outputs.names();
  names.push_back(command + ".manifest.json");
  j["outputs"] = std::move(names);
  return j;
}

void finish(const GlobalOptions& g, const std::string& command, const std::string& input_hash, const Json& cfg,
            OutputSet& outputs, std::ostream& out) {
  outputs.add(command + ".manifest.json", dump(manifest(command, input_hash, cfg, outputs)));
  outputs.commit();
  for (const auto& name : outputs.names()) out << (fs::path(g.out_dir) / name.get<std::string>()).string() << '\n';
}

std::string require_input(const GlobalOptions& g) {
  if (g.input.empty()) throw Error(Errc::Usage, "--input is required");
  if (!fs::is_regular_file(g.input)) throw Error(Errc::Io, "input file not found: " + g.input);
  return g.input;
}

std::pair<Date, Date> parse_window_text(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(Errc::Usage, "window '" + text + "' is not FROM:TO");
  Date a{}, b{};
  if (!try_parse_date(text.substr(0, colon), a) || !try_parse_date(text.substr(colon + 1), b))
    throw Error(Errc::Usage, "window '" + text + "' has a malformed date");
  return {a, b};
}

Date cfg_date(const Json& cfg, const char* key) {
  const auto text = cfg_get<std::string>(cfg, key);
  Date d{};
  if (!try_parse_date(text, d)) throw Error(Errc::Usage, std::string(key) + ": malformed date '" + text + "'");
  return d;
}

GridSpec grid_of(const Json& cfg) {
  GridSpec grid;
  if (cfg.contains("grid")) {
    try {
      grid_from_json(cfg["grid"], grid);
    } catch (const Json::exception& e) {
      throw Error(Errc::Usage, std::string("grid: ") + e.what());
    }
  }
  grid.validate();
  return grid;
}

// fit

struct FitArgs {
  std::vector<std::string> windows;
  bool refine = false;
};

void cmd_fit(const GlobalOptions& g, const FitArgs& a, std::ostream& out) {
  GridSpec grid;
  grid.refine = a.refine;
  Json cfg{{"windows", a.windows}, {"grid", grid_to_json(grid)}};
  apply_config_file(g, cfg);
  const auto windows = cfg_get<std::vector<std::string>>(cfg, "windows");
  if (windows.empty()) throw Error(Errc::Usage, "fit needs at least one --window");
  grid = grid_of(cfg);
  cfg["grid"] = grid_to_json(grid);

  const auto input = require_input(g);
  const auto series = load_csv(input);
  OutputSet outputs(g.out_dir);
  std::string table = fit_table_header() + '\n';
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto [from, to] = parse_window_text(windows[i]);
    const auto fit = fit_window(series, window_from_dates(series, from, to), grid, g.threads);
    outputs.add("fit_" + std::to_string(i + 1) + ".json", dump(fit_to_json(fit, series)));
    table += fit_table_row(fit, series) + '\n';
  }
  outputs.add("fits.csv", table);
  finish(g, "fit", sha256_file(input), cfg, outputs, out);
}

// scan

struct ScanArgs {
  std::string t2, t1_from, t1_to;
  Index step = 5;
  std::vector<Index> shifts = kDefaultShifts;
  std::string out = "scan.json";
  bool refine = false;
};

void cmd_scan(const GlobalOptions& g, const ScanArgs& a, std::ostream& out) {
  GridSpec grid;
  grid.refine = a.refine;
  Json cfg{{"t2", a.t2},       {"t1_from", a.t1_from},     {"t1_to", a.t1_to}, {"step", a.step},
           {"k", 7},           {"shifts", a.shifts},       {"out", a.out},     {"grid", grid_to_json(grid)}};
  apply_config_file(g, cfg);
  grid = grid_of(cfg);
  cfg["grid"] = grid_to_json(grid);
  const auto out_name = cfg_get<std::string>(cfg, "out");
  const auto shifts = cfg_get<std::vector<Index>>(cfg, "shifts");

  const auto input = require_input(g);
  const auto series = load_csv(input);
  ScanConfig sc;
  sc.t2 = series.index_on_or_before(cfg_date(cfg, "t2"));
  sc.t1_earliest = series.index_on_or_after(cfg_date(cfg, "t1_from"));
  sc.t1_latest = series.index_on_or_before(cfg_date(cfg, "t1_to"));
  sc.t1_step = cfg_get<Index>(cfg, "step");
  sc.k = cfg_get<int>(cfg, "k");
  sc.grid = grid;
  const auto scan = scan_bubble_start(series, sc, g.threads);

  const std::string stem = fs::path(out_name).stem().string();
  Json j = scan_to_json(scan, series);
  OutputSet outputs(g.out_dir);
  std::vector<std::pair<std::string, std::string>> shift_csvs;
  if (!shifts.empty()) {
    const auto sweep = robustness_sweep(series, sc, shifts, g.threads);
    j["sweep"] = sweep_to_json(sweep, series);
    for (const auto& e : sweep.entries)
      if (e.scan) shift_csvs.emplace_back(stem + "_shift" + std::to_string(e.shift) + ".csv", scan_csv(*e.scan, series));
  }
  outputs.add(out_name, dump(j));
  outputs.add(stem + ".csv", scan_csv(scan, series));
  for (auto& [name, content] : shift_csvs) outputs.add(name, std::move(content));
  finish(g, "scan", sha256_file(input), cfg, outputs, out);
}

// diagnose

struct DiagnoseArgs {
  std::string window;
  std::string tc_from_fit;
  std::optional<double> tc;
  std::vector<double> H{0.5};
  std::vector<double> q{0.7};
  bool hq_sweep = false;
  double omega_min = 0.2, omega_max = 20.0;
  Index omega_count = 1000;
};

void cmd_diagnose(const GlobalOptions& g, const DiagnoseArgs& a, std::ostream& out) {
  const auto input = require_input(g);
  const auto series = load_csv(input);
  if (a.window.empty()) throw Error(Errc::Usage, "diagnose needs --window");
  const auto [from, to] = parse_window_text(a.window);
  const Window window = window_from_dates(series, from, to);

  // The critical time is stored in the config as trading days from this window's start.
  std::optional<double> tc = a.tc;
  if (!a.tc_from_fit.empty()) {
    const auto ref = fit_reference_from_json(load_json_file(a.tc_from_fit));
    tc = double(series.index_on_or_after(ref.t1_date) - window.t1) + ref.tc_days_from_start;
  }
  std::vector<double> Hs = a.H, qs = a.q;
  if (a.hq_sweep) {
    Hs = {0.0, 0.25, 0.5, 0.75, 1.0};
    qs = {0.5, 0.6, 0.7, 0.8, 0.9};
  }
  DetrendOptions detrend;
  Json cfg{{"window", a.window},
           {"tc_days_from_start", tc ? Json(*tc) : Json(nullptr)},
           {"H", Hs},
           {"q", qs},
           {"omega_grid", {{"min", a.omega_min}, {"max", a.omega_max}, {"count", a.omega_count}, {"spacing", "log"}}},
           {"detrend", {{"beta_min", detrend.beta_min}, {"beta_max", detrend.beta_max},
                        {"beta_count", detrend.beta_count}, {"polish", detrend.polish}}}};
  apply_config_file(g, cfg);
  if (cfg_get<std::string>(cfg, "window") != a.window) throw Error(Errc::Usage, "window must be given by --window");
  if (cfg["tc_days_from_start"].is_null()) throw Error(Errc::Usage, "diagnose needs --tc-from-fit or --tc");
  const double tc_local = cfg_get<double>(cfg, "tc_days_from_start");
  Hs = cfg_get<std::vector<double>>(cfg, "H");
  qs = cfg_get<std::vector<double>>(cfg, "q");
  const auto& og = cfg["omega_grid"];
  const auto omegas = log_spaced(cfg_get<double>(og, "min"), cfg_get<double>(og, "max"), cfg_get<Index>(og, "count"));
  const auto& dj = cfg["detrend"];
  detrend.beta_min = cfg_get<double>(dj, "beta_min");
  detrend.beta_max = cfg_get<double>(dj, "beta_max");
  detrend.beta_count = cfg_get<int>(dj, "beta_count");
  detrend.polish = cfg_get<bool>(dj, "polish");

  const auto local = slice(series, window);
  const auto residuals = detrend_power_law(local, tc_local, detrend);
  const auto periodogram = lomb_periodogram(residuals, omegas, true, g.threads);

  OutputSet outputs(g.out_dir);
  outputs.add("residuals.csv", residuals_csv(residuals, local));
  outputs.add("periodogram.csv", periodogram_csv(periodogram));
  Json hq_files = Json::array();
  const bool single = Hs.size() == 1 && qs.size() == 1;
  for (const double H : Hs) {
    for (const double q : qs) {
      const auto hq = hq_derivative(local, tc_local, H, q);
      const std::string name = single ? "hq.csv" : "hq_H" + format_number(H) + "_q" + format_number(q) + ".csv";
      outputs.add(name, hq_csv(hq));
      hq_files.push_back({{"H", H}, {"q", q}, {"file", name}});
    }
  }
  Json summary{{"window", {{"t1_date", format_date(local.dates().front())}, {"t2_date", format_date(local.dates().back())}}},
               {"tc_days_from_start", tc_local},
               {"trend", {{"A", residuals.trend.A}, {"B", residuals.trend.B}, {"beta", residuals.trend.beta}}},
               {"peak_omega", periodogram.peak_omega},
               {"peak_power", periodogram.peak_power},
               {"hq", hq_files}};
  outputs.add("diagnose.json", dump(summary));
  finish(g, "diagnose", sha256_file(input), cfg, outputs, out);
}

// sigtest

struct SigtestArgs {
  std::string residuals;
  std::vector<std::string> models{"white_gaussian", "ar1", "fgn", "levy_stable"};
  int n = 100;
  std::optional<double> ar1_phi;
  double hurst = 0.7, alpha = 1.7;
  double omega_min = 0.2, omega_max = 20.0;
  Index omega_count = 1000;
};

void cmd_sigtest(const GlobalOptions& g, const SigtestArgs& a, std::ostream& out) {
  const std::string path = a.residuals.empty() ? g.input : a.residuals;
  if (path.empty()) throw Error(Errc::Usage, "sigtest needs --residuals");
  if (!fs::is_regular_file(path)) throw Error(Errc::Io, "residuals file not found: " + path);
  std::vector<std::string> models;
  for (const auto& m : a.models) models.emplace_back(null_model_name(parse_null_model(m)));
  Json cfg{{"models", models},
           {"n", a.n},
           {"seed", g.seed},
           {"ar1_phi", a.ar1_phi ? Json(*a.ar1_phi) : Json("estimated")},
           {"hurst", a.hurst},
           {"alpha", a.alpha},
           {"omega_grid", {{"min", a.omega_min}, {"max", a.omega_max}, {"count", a.omega_count}, {"spacing", "log"}}}};
  apply_config_file(g, cfg);

  SurrogateConfig sc;
  sc.n_surrogates = cfg_get<int>(cfg, "n");
  sc.seed = cfg_get<std::uint64_t>(cfg, "seed");
  if (cfg["ar1_phi"].is_number()) sc.ar1_phi = cfg_get<double>(cfg, "ar1_phi");
  sc.hurst = cfg_get<double>(cfg, "hurst");
  sc.alpha = cfg_get<double>(cfg, "alpha");
  const auto& og = cfg["omega_grid"];
  const auto omegas = log_spaced(cfg_get<double>(og, "min"), cfg_get<double>(og, "max"), cfg_get<Index>(og, "count"));
  const auto residuals = read_residuals_csv(path);

  OutputSet outputs(g.out_dir);
  for (const auto& name : cfg_get<std::vector<std::string>>(cfg, "models")) {
    sc.model = parse_null_model(name);
    const auto result = significance_test(residuals, omegas, sc, g.threads);
    outputs.add("sigtest_" + std::string(null_model_name(sc.model)) + ".json", dump(significance_to_json(result)));
  }
  finish(g, "sigtest", sha256_file(path), cfg, outputs, out);
}

// synth

struct SynthArgs {
  SynthSpec spec;
  std::string noise_model = "white_gaussian";
  std::string start_date = "2019-01-01";
  std::string out = "synth.csv";
};

void cmd_synth(const GlobalOptions& g, const SynthArgs& a, std::ostream& out) {
  const auto& s = a.spec;
  Json cfg{{"planted", {{"tc", s.params.tc}, {"beta", s.params.beta}, {"omega", s.params.omega}, {"A", s.params.A},
                        {"B", s.params.B}, {"C1", s.params.C1}, {"C2", s.params.C2}}},
           {"length", s.length},
           {"noise_sd", s.noise_sd},
           {"noise_model", std::string(null_model_name(parse_null_model(a.noise_model)))},
           {"ar1_phi", s.ar1_phi},
           {"hurst", s.hurst},
           {"alpha", s.alpha},
           {"pre_bubble_length", s.pre_bubble_length},
           {"pre_bubble_vol", s.pre_bubble_vol},
           {"start_date", a.start_date},
           {"seed", g.seed},
           {"out", a.out}};
  apply_config_file(g, cfg);

  SynthSpec spec;
  const auto& p = cfg["planted"];
  spec.params = {cfg_get<double>(p, "tc"), cfg_get<double>(p, "beta"), cfg_get<double>(p, "omega"),
                 cfg_get<double>(p, "A"),  cfg_get<double>(p, "B"),    cfg_get<double>(p, "C1"),
                 cfg_get<double>(p, "C2")};
  spec.length = cfg_get<Index>(cfg, "length");
  spec.noise_sd = cfg_get<double>(cfg, "noise_sd");
  spec.noise_model = parse_null_model(cfg_get<std::string>(cfg, "noise_model"));
  spec.ar1_phi = cfg_get<double>(cfg, "ar1_phi");
  spec.hurst = cfg_get<double>(cfg, "hurst");
  spec.alpha = cfg_get<double>(cfg, "alpha");
  spec.pre_bubble_length = cfg_get<Index>(cfg, "pre_bubble_length");
  spec.pre_bubble_vol = cfg_get<double>(cfg, "pre_bubble_vol");
  spec.start_date = cfg_date(cfg, "start_date");
  spec.seed = cfg_get<std::uint64_t>(cfg, "seed");

  const auto series = synthesize(spec);
  std::ostringstream csv;
  write_csv(series, csv);
  OutputSet outputs(g.out_dir);
  outputs.add(cfg_get<std::string>(cfg, "out"), csv.str());
  finish(g, "synth", "", cfg, outputs, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LPPLS bubble detection and diagnostics", "bubble-lens"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--input", g.input, "input price CSV (date, adj_close)");
  app.add_option("--out-dir", g.out_dir, "directory for outputs")->capture_default_str();
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--config", g.config, "JSON config or manifest; its values override flags");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit LPPLS on one or more windows");
  fit->add_option("--window", fit_args.windows, "FROM:TO in ISO dates; repeatable")->delimiter(',');
  fit->add_flag("--refine", fit_args.refine, "polish the grid optimum with Nelder-Mead");

  ScanArgs scan_args;
  auto* scan = app.add_subcommand("scan", "date the bubble start with the Lagrange-regularised scan");
  scan->add_option("--t2", scan_args.t2, "fixed window end")->required();
  scan->add_option("--t1-from", scan_args.t1_from, "earliest candidate start")->required();
  scan->add_option("--t1-to", scan_args.t1_to, "latest candidate start")->required();
  scan->add_option("--step", scan_args.step, "candidate step in trading days")->capture_default_str();
  scan->add_option("--shifts", scan_args.shifts, "t2 shifts for the robustness sweep")->delimiter(',');
  scan->add_option("--out", scan_args.out, "scan JSON file name")->capture_default_str();
  scan->add_flag("--refine", scan_args.refine, "polish each fit with Nelder-Mead");

  DiagnoseArgs diag_args;
  auto* diagnose = app.add_subcommand("diagnose", "detrend, Lomb periodogram and (H,q)-derivative");
  diagnose->add_option("--window", diag_args.window, "FROM:TO in ISO dates")->required();
  auto* tc_fit = diagnose->add_option("--tc-from-fit", diag_args.tc_from_fit, "fit JSON supplying tc");
  diagnose->add_option("--tc", diag_args.tc, "tc in trading days from the window start")->excludes(tc_fit);
  diagnose->add_option("--H", diag_args.H, "(H,q) exponent(s)")->delimiter(',');
  diagnose->add_option("--q", diag_args.q, "(H,q) ratio(s)")->delimiter(',');
  diagnose->add_flag("--hq-sweep", diag_args.hq_sweep, "H in {0,.25,.5,.75,1} x q in {.5,...,.9}");
  diagnose->add_option("--omega-min", diag_args.omega_min)->capture_default_str();
  diagnose->add_option("--omega-max", diag_args.omega_max)->capture_default_str();
  diagnose->add_option("--omega-count", diag_args.omega_count)->capture_default_str();

  SigtestArgs sig_args;
  auto* sigtest = app.add_subcommand("sigtest", "surrogate significance of the Lomb peak");
  sigtest->add_option("--residuals", sig_args.residuals, "residuals.csv from diagnose");
  sigtest->add_option("--models", sig_args.models, "white, ar1, fgn, levy")->delimiter(',');
  sigtest->add_option("--n", sig_args.n, "surrogates per model")->capture_default_str();
  sigtest->add_option("--ar1-phi", sig_args.ar1_phi, "AR(1) coefficient; estimated when omitted");
  sigtest->add_option("--hurst", sig_args.hurst)->capture_default_str();
  sigtest->add_option("--alpha", sig_args.alpha)->capture_default_str();
  sigtest->add_option("--omega-min", sig_args.omega_min)->capture_default_str();
  sigtest->add_option("--omega-max", sig_args.omega_max)->capture_default_str();
  sigtest->add_option("--omega-count", sig_args.omega_count)->capture_default_str();

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "generate a synthetic LPPLS price series");
  auto& sp = syn.spec;
  synth->add_option("--tc", sp.params.tc)->capture_default_str();
  synth->add_option("--beta", sp.params.beta)->capture_default_str();
  synth->add_option("--omega", sp.params.omega)->capture_default_str();
  synth->add_option("--A", sp.params.A)->capture_default_str();
  synth->add_option("--B", sp.params.B)->capture_default_str();
  synth->add_option("--C1", sp.params.C1)->capture_default_str();
  synth->add_option("--C2", sp.params.C2)->capture_default_str();
  synth->add_option("--length", sp.length)->capture_default_str();
  synth->add_option("--noise-sd", sp.noise_sd)->capture_default_str();
  synth->add_option("--noise-model", syn.noise_model)->capture_default_str();
  synth->add_option("--ar1-phi", sp.ar1_phi)->capture_default_str();
  synth->add_option("--hurst", sp.hurst)->capture_default_str();
  synth->add_option("--alpha", sp.alpha)->capture_default_str();
  synth->add_option("--pre-bubble-length", sp.pre_bubble_length)->capture_default_str();
  synth->add_option("--pre-bubble-vol", sp.pre_bubble_vol)->capture_default_str();
  synth->add_option("--start-date", syn.start_date)->capture_default_str();
  synth->add_option("--out", syn.out, "CSV file name")->capture_default_str();

  auto* version = app.add_subcommand("version", "print the tool version");
  app.fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "bubble-lens: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*version) {
      out << "bubble-lens " << tool_version() << '\n';
    } else if (*fit) {
      cmd_fit(g, fit_args, out);
    } else if (*scan) {
      cmd_scan(g, scan_args, out);
    } else if (*diagnose) {
      cmd_diagnose(g, diag_args, out);
    } else if (*sigtest) {
      cmd_sigtest(g, sig_args, out);
    } else if (*synth) {
      cmd_synth(g, syn, out);
    }
  } catch (const Error& e) {
    err << "bubble-lens: " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "bubble-lens: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace bubblelens
