#include "jgreedy/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "jgreedy/errors.hpp"

namespace jgreedy::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kCommands = {"norms",   "block-sum",    "average-block", "near-one",
                                            "witness", "darboux-check", "identity-check"};

std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt3(double v) {
  if (std::abs(v) < 5e-4) v = 0.0;
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

NormalizationMode parse_mode(const std::string& name, double p) {
  if (name == "orthonormal") return NormalizationMode::orthonormal();
  if (name == "sqrt-scaled") return NormalizationMode::sqrt_scaled();
  if (name == "lp") return NormalizationMode::lp_normalized(p);
  throw ConfigError("unknown mode '" + name + "'");
}

json config_to_json(const RunConfig& rc) {
  const ExperimentConfig& e = rc.experiment;
  json j;
  j["alpha"] = e.params.alpha();
  j["beta"] = e.params.beta();
  j["p"] = e.p;
  j["mode"] = e.mode.name();
  j["grid"] = e.grid;
  j["seed"] = e.seed;
  j["samples"] = e.samples;
  j["fit_tolerance"] = e.fit_tolerance;
  j["mesh"] = {{"panels_per_unit", e.mesh.panels_per_unit},
               {"points_per_panel", e.mesh.points_per_panel},
               {"endpoint_grading", e.mesh.endpoint_grading},
               {"tolerance", e.mesh.tolerance},
               {"max_refinements", e.mesh.max_refinements},
               {"threads", e.mesh.threads}};
  j["d_sweep"] = rc.d_sweep;
  j["theta_lo"] = rc.theta_lo;
  j["theta_hi"] = rc.theta_hi;
  j["points"] = rc.points;
  j["trials"] = rc.trials;
  return j;
}

// Fields absent from `j` keep their current values.
void apply_json(const json& j, RunConfig& rc) {
  ExperimentConfig& e = rc.experiment;
  const double alpha = j.value("alpha", e.params.alpha());
  const double beta = j.value("beta", e.params.beta());
  e.params = JacobiParams(alpha, beta);
  e.p = j.value("p", e.p);
  if (j.contains("mode")) e.mode = parse_mode(j.at("mode").get<std::string>(), e.p);
  if (j.contains("grid")) e.grid = j.at("grid").get<std::vector<std::size_t>>();
  e.seed = j.value("seed", e.seed);
  e.samples = j.value("samples", e.samples);
  e.fit_tolerance = j.value("fit_tolerance", e.fit_tolerance);
  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    e.mesh.panels_per_unit = m.value("panels_per_unit", e.mesh.panels_per_unit);
    e.mesh.points_per_panel = m.value("points_per_panel", e.mesh.points_per_panel);
    e.mesh.endpoint_grading = m.value("endpoint_grading", e.mesh.endpoint_grading);
    e.mesh.tolerance = m.value("tolerance", e.mesh.tolerance);
    e.mesh.max_refinements = m.value("max_refinements", e.mesh.max_refinements);
    e.mesh.threads = m.value("threads", e.mesh.threads);
  }
  if (j.contains("d_sweep")) rc.d_sweep = j.at("d_sweep").get<std::vector<double>>();
  rc.theta_lo = j.value("theta_lo", rc.theta_lo);
  rc.theta_hi = j.value("theta_hi", rc.theta_hi);
  rc.points = j.value("points", rc.points);
  rc.trials = j.value("trials", rc.trials);
}

json fit_to_json(const SlopeFit& f, double tolerance) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"max_residual", f.max_residual},
          {"high_residual", f.max_residual > 2.0 * tolerance},
          {"dropped_first", f.dropped_first},
          {"dropped_x", f.dropped_x},
          {"points", f.xs.size()}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::ios_base::failure("cannot write " + path.string());
  os << text;
  if (!os) throw std::ios_base::failure("write failed for " + path.string());
}

struct CommandOutput {
  std::string csv;  // rows only, header added by the caller
  json summary;
  std::string line;
  const SlopeFit* plot = nullptr;
};

// Rows of the CSV, one per grid point.
class Csv {
 public:
  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  static std::string cell(double v) { return fmt17(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  std::ostringstream os_;
};

struct Storage {
  NormRegimeResult norms;
  BlockSumResult block;
  AverageBlockResult average;
  NearOneResult near_one;
  DarbouxCheckResult darboux;
  SlopeFit darboux_fit;
  WitnessReport witness;
};

CommandOutput execute(const std::string& command, const RunConfig& rc, Storage& st) {
  const ExperimentConfig& cfg = rc.experiment;
  CommandOutput o;
  Csv csv;
  if (command == "norms") {
    st.norms = norm_regimes_experiment(cfg);
    const auto& r = st.norms;
    for (std::size_t i = 0; i < r.sizes.size(); ++i) {
      csv.row(static_cast<std::size_t>(r.sizes[i]), r.norms[i], std::pow(r.norms[i], cfg.p));
    }
    o.summary = {{"regime", to_string(r.regime)},
                 {"expected_slope", r.expected_slope},
                 {"fit", fit_to_json(r.fit, cfg.fit_tolerance)}};
    if (r.regime == NormRegime::Critical) {
      o.summary["critical_fit"] = {{"slope_vs_log_n", r.critical_fit.slope},
                                   {"intercept", r.critical_fit.intercept},
                                   {"max_relative_residual", r.critical_fit.max_relative_residual}};
    }
    o.line = "norms: regime=" + to_string(r.regime) + " slope=" + fmt3(r.fit.slope) +
             " (expected " + fmt3(r.expected_slope) + ") residual=" + fmt3(r.fit.max_residual);
    o.plot = &r.fit;
  } else if (command == "block-sum") {
    st.block = block_sum_experiment(cfg);
    const auto& r = st.block;
    for (std::size_t i = 0; i < r.sizes.size(); ++i) {
      csv.row(static_cast<std::size_t>(r.sizes[i]), r.norms[i]);
    }
    o.summary = {{"omega", r.expected_slope}, {"fit", fit_to_json(r.fit, cfg.fit_tolerance)}};
    o.line = "block-sum: slope=" + fmt3(r.fit.slope) + " (omega " + fmt3(r.expected_slope) +
             ") residual=" + fmt3(r.fit.max_residual);
    o.plot = &r.fit;
  } else if (command == "average-block") {
    st.average = average_block_experiment(cfg);
    const auto& r = st.average;
    for (std::size_t i = 0; i < r.sizes.size(); ++i) {
      csv.row(static_cast<std::size_t>(r.sizes[i]), r.square_function[i], r.rademacher_mean[i],
              r.rademacher_stderr[i], r.sqrt_square_function[i], r.sqrt_rademacher_mean[i],
              r.sqrt_rademacher_stderr[i], r.samples_used[i]);
    }
    o.summary = {{"square_fit", fit_to_json(r.square_fit, cfg.fit_tolerance)},
                 {"rademacher_fit", fit_to_json(r.rademacher_fit, cfg.fit_tolerance)},
                 {"sqrt_square_fit", fit_to_json(r.sqrt_square_fit, cfg.fit_tolerance)},
                 {"sqrt_rademacher_fit", fit_to_json(r.sqrt_rademacher_fit, cfg.fit_tolerance)},
                 {"ratio_min", r.ratio_min},
                 {"ratio_max", r.ratio_max}};
    o.line = "average-block: square-function slope=" + fmt3(r.square_fit.slope) +
             " rademacher slope=" + fmt3(r.rademacher_fit.slope) + " ratio in [" +
             fmt3(r.ratio_min) + ", " + fmt3(r.ratio_max) + "]";
    o.plot = &r.rademacher_fit;
  } else if (command == "near-one") {
    st.near_one = near_one_experiment(cfg.params, cfg.grid, rc.d_sweep);
    const auto& r = st.near_one;
    for (const auto& row : r.rows) {
      const auto it = std::find(cfg.grid.begin(), cfg.grid.end(), row.n);
      const double root = r.one_minus_roots[static_cast<std::size_t>(it - cfg.grid.begin())];
      csv.row(row.n, row.d, row.min_ratio, row.max_ratio, root);
    }
    json envs = json::array();
    for (const auto& e : r.envelopes) {
      envs.push_back({{"d", e.d}, {"min_ratio", e.min_ratio}, {"max_ratio", e.max_ratio},
                      {"bounded", e.bounded}});
    }
    o.summary = {{"envelopes", envs},
                 {"selected_d", r.selected_d},
                 {"root_fit", fit_to_json(r.root_fit, cfg.fit_tolerance)}};
    o.line = "near-one: selected d=" + fmt3(r.selected_d) +
             " root slope=" + fmt3(r.root_fit.slope) + " (expected -2)";
    o.plot = &r.root_fit;
  } else if (command == "darboux-check") {
    st.darboux = darboux_check(cfg.params, cfg.grid, rc.theta_lo, rc.theta_hi, rc.points);
    const auto& r = st.darboux;
    for (std::size_t i = 0; i < r.sizes.size(); ++i) {
      csv.row(r.sizes[i], r.max_scaled_error[i], r.max_abs_error[i]);
    }
    st.darboux_fit = fit_loglog(std::vector<double>(r.sizes.begin(), r.sizes.end()), r.max_scaled_error);
    o.summary = {{"max_scaled_error", r.max_scaled_error}, {"growth", r.growth},
                 {"fit", fit_to_json(st.darboux_fit, cfg.fit_tolerance)}};
    o.line = "darboux-check: scaled error growth last/first=" + fmt3(r.growth);
    o.plot = &st.darboux_fit;
  } else if (command == "identity-check") {
    std::vector<double> thetas;
    for (int i = 1; i < 1024; ++i) thetas.push_back(std::numbers::pi * i / 1024.0);
    double worst = 0.0;
    for (std::size_t N : cfg.grid) {
      const double dev = geometric_sum_identity_check(cfg.params, N, thetas);
      worst = std::max(worst, dev);
      csv.row(N, dev);
    }
    const std::size_t max_N = *std::max_element(cfg.grid.begin(), cfg.grid.end());
    const double fuzz = geometric_sum_fuzz(cfg.params, rc.trials, max_N, cfg.seed);
    o.summary = {{"grid_max_deviation", worst}, {"fuzz_trials", rc.trials},
                 {"fuzz_max_deviation", fuzz}};
    std::ostringstream line;
    line << "identity-check: max deviation grid=" << std::scientific << std::setprecision(2)
         << worst << " fuzz=" << fuzz;
    o.line = line.str();
  } else if (command == "witness") {
    st.witness = main_theorem_witness(cfg);
    const auto& r = st.witness;
    const bool ortho = cfg.mode.kind == NormalizationMode::Kind::Orthonormal;
    const auto& avg = ortho ? r.average.rademacher_mean : r.average.sqrt_rademacher_mean;
    const auto& avg_err = ortho ? r.average.rademacher_stderr : r.average.sqrt_rademacher_stderr;
    const auto& avg_fit = ortho ? r.average.rademacher_fit : r.average.sqrt_rademacher_fit;
    for (std::size_t i = 0; i < r.block.sizes.size(); ++i) {
      csv.row(static_cast<std::size_t>(r.block.sizes[i]), r.block.norms[i], avg[i], avg_err[i],
              r.sign_ratios[i]);
    }
    o.summary = {{"omega", r.omega},
                 {"block_fit", fit_to_json(r.block.fit, cfg.fit_tolerance)},
                 {"average_fit", fit_to_json(avg_fit, cfg.fit_tolerance)},
                 {"sign_ratio_fit", fit_to_json(r.sign_fit, cfg.fit_tolerance)},
                 {"gap", r.gap},
                 {"gap_residual", r.gap_residual},
                 {"verdict", r.verdict}};
    o.line = "witness: block slope=" + fmt3(r.block.fit.slope) + " (omega " + fmt3(r.omega) +
             ") average slope=" + fmt3(avg_fit.slope) + " gap ≈ " + fmt3(r.gap) +
             " residual=" + fmt3(r.gap_residual) + " verdict=" + r.verdict;
    o.plot = &r.block.fit;
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  o.csv = csv.str();
  return o;
}

}  // namespace

std::string csv_header(const std::string& command) {
  if (command == "norms") return "n,norm,norm_pow_p";
  if (command == "block-sum") return "N,norm";
  if (command == "average-block") {
    return "N,square_function,rademacher_mean,rademacher_stderr,sqrt_square_function,"
           "sqrt_rademacher_mean,sqrt_rademacher_stderr,samples";
  }
  if (command == "near-one") return "n,d,min_ratio,max_ratio,one_minus_largest_root";
  if (command == "witness") return "N,block_norm,average_norm,average_stderr,sign_ratio";
  if (command == "darboux-check") return "n,max_scaled_error,max_abs_error";
  if (command == "identity-check") return "N,max_deviation";
  throw ConfigError("unknown command '" + command + "'");
}

void emit_plot_data(const SlopeFit& fit, const fs::path& path) {
  if (fit.xs.empty() || fit.xs.size() != fit.ys.size()) {
    throw EvaluationError("cannot emit plot data for an empty fit");
  }
  std::ostringstream data;
  data << std::setprecision(17);
  for (std::size_t i = 0; i < fit.xs.size(); ++i) {
    data << std::log10(fit.xs[i]) << ' ' << std::log10(fit.ys[i]) << '\n';
  }
  std::ostringstream side;
  side << std::setprecision(17) << "slope " << fit.slope << '\n'
       << "intercept_log10 " << fit.intercept / std::log(10.0) << '\n'
       << "intercept_ln " << fit.intercept << '\n'
       << "max_residual " << fit.max_residual << '\n'
       << "dropped_first " << (fit.dropped_first ? 1 : 0) << '\n';
  write_text(path, data.str());
  write_text(fs::path(path.string() + ".fit"), side.str());
}

std::vector<std::pair<double, double>> read_plot_data(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::ios_base::failure("cannot read " + path.string());
  std::vector<std::pair<double, double>> pts;
  double lx, ly;
  while (is >> lx >> ly) pts.emplace_back(std::pow(10.0, lx), std::pow(10.0, ly));
  return pts;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thresholding greedy algorithm and Jacobi polynomial norm asymptotics"};
  app.require_subcommand(1);

  double alpha = 0.0, beta = 0.0, p = 2.0, tol = 1e-8;
  std::string mode, out_dir = "jgreedy-out", config_path;
  std::size_t n_min = 0, n_max = 0, N_min = 0, N_max = 0, samples = 64, threads = 0;
  std::uint64_t seed = 0;
  std::vector<double> d_sweep;
  double theta_lo = 0.0, theta_hi = 0.0;
  std::size_t points = 0, trials = 0;

  auto* o_alpha = app.add_option("--alpha", alpha, "Jacobi index alpha (> -1)");
  auto* o_beta = app.add_option("--beta", beta, "Jacobi index beta (> -1)");
  auto* o_p = app.add_option("--p", p, "Lebesgue exponent p >= 1");
  auto* o_mode = app.add_option("--mode", mode, "orthonormal | sqrt-scaled | lp")
                     ->check(CLI::IsMember({"orthonormal", "sqrt-scaled", "lp"}));
  auto* o_nmin = app.add_option("--n-min", n_min, "smallest degree n (geometric grid, ratio 2)");
  auto* o_nmax = app.add_option("--n-max", n_max, "largest degree n");
  auto* o_Nmin = app.add_option("--N-min", N_min, "smallest block size N (geometric grid, ratio 2)");
  auto* o_Nmax = app.add_option("--N-max", N_max, "largest block size N");
  auto* o_samples = app.add_option("--samples", samples, "random sign samples");
  auto* o_seed = app.add_option("--seed", seed, "RNG seed");
  auto* o_tol = app.add_option("--tol", tol, "relative quadrature tolerance");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (0: all logical processors)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--config", config_path, "JSON config or manifest; flags override it");

  std::map<std::string, CLI::App*> subs;
  for (const auto& c : kCommands) {
    subs[c] = app.add_subcommand(c)->fallthrough();
  }
  subs["norms"]->description("L_p norms of single basis elements over an n grid");
  subs["block-sum"]->description("growth of the constant-coefficient block sum over A_N");
  subs["average-block"]->description("square-function and random-sign norms over A_N");
  subs["near-one"]->description("P_n(x)/n^alpha envelope near x = 1 and largest-root scaling");
  subs["witness"]->description("exponent gap between block-sum and random-sign growth");
  subs["darboux-check"]->description("Darboux asymptotic error envelope");
  subs["identity-check"]->description("closed form of the cosine sum over A_N");
  auto* o_d = subs["near-one"]->add_option("--d", d_sweep, "window widths d to sweep");
  auto* o_tlo = subs["darboux-check"]->add_option("--theta-lo", theta_lo, "lower angle");
  auto* o_thi = subs["darboux-check"]->add_option("--theta-hi", theta_hi, "upper angle");
  auto* o_pts = subs["darboux-check"]->add_option("--points", points, "angles per n");
  auto* o_trials = subs["identity-check"]->add_option("--trials", trials, "random fuzz trials");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }

  RunManifest manifest;
  manifest.command = command;
  RunConfig& rc = manifest.config;
  try {
    ExperimentConfig& e = rc.experiment;
    // command defaults
    if (command == "norms") {
      e.grid = default_n_grid();
    } else if (command == "near-one") {
      e.grid = geometric_grid(10, 1000);
    } else if (command == "darboux-check") {
      e.grid = geometric_grid(16, 512);
    } else if (command == "identity-check") {
      e.grid = geometric_grid(1, 64);
    } else {
      e.grid = default_N_grid();
    }
    if (command == "block-sum" || command == "witness") e.mode = NormalizationMode::sqrt_scaled();

    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigError("cannot read config file " + config_path);
      const json j = json::parse(is);
      apply_json(j.contains("config") ? j.at("config") : j, rc);
    }

    const double a = o_alpha->count() ? alpha : e.params.alpha();
    const double b = o_beta->count() ? beta : e.params.beta();
    e.params = JacobiParams(a, b);
    if (o_p->count()) e.p = p;
    if (o_mode->count()) {
      e.mode = parse_mode(mode, e.p);
    } else if (e.mode.kind == NormalizationMode::Kind::LpNormalized && o_p->count()) {
      e.mode = NormalizationMode::lp_normalized(e.p);
    }
    const bool uses_n = command == "norms" || command == "near-one" || command == "darboux-check";
    if (uses_n && (o_nmin->count() || o_nmax->count())) {
      e.grid = geometric_grid(o_nmin->count() ? n_min : e.grid.front(),
                              o_nmax->count() ? n_max : e.grid.back());
    }
    if (!uses_n && (o_Nmin->count() || o_Nmax->count())) {
      e.grid = geometric_grid(o_Nmin->count() ? N_min : e.grid.front(),
                              o_Nmax->count() ? N_max : e.grid.back());
    }
    if (o_samples->count()) e.samples = samples;
    if (o_seed->count()) e.seed = seed;
    if (o_tol->count()) e.mesh.tolerance = tol;
    if (o_threads->count()) e.mesh.threads = threads;
    if (o_d->count()) rc.d_sweep = d_sweep;
    if (o_tlo->count()) rc.theta_lo = theta_lo;
    if (o_thi->count()) rc.theta_hi = theta_hi;
    if (o_pts->count()) rc.points = points;
    if (o_trials->count()) rc.trials = trials;

    if (e.grid.empty()) throw ConfigError("empty size grid");
    if (command != "identity-check" && command != "near-one" && command != "darboux-check") {
      e.validate();
    } else {
      e.mesh.validate();
    }
  } catch (const ConfigError& ex) {
    err << "configuration error: " << ex.what() << '\n';
    return kConfigError;
  } catch (const json::exception& ex) {
    err << "configuration error: " << ex.what() << '\n';
    return kConfigError;
  }

  const fs::path dir(out_dir);
  manifest.output_dir = out_dir;
  manifest.timestamp = utc_timestamp();
  {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      err << "configuration error: cannot create output directory " << out_dir << '\n';
      return kConfigError;
    }
  }

  Storage storage;
  CommandOutput result;
  try {
    result = execute(command, rc, storage);
  } catch (const ConfigError& ex) {
    err << "configuration error: " << ex.what() << '\n';
    return kConfigError;
  } catch (const NonConvergence& ex) {
    err << "numerical error: " << ex.what() << '\n';
    return kNumericalError;
  } catch (const EvaluationError& ex) {
    err << "numerical error: " << ex.what() << '\n';
    return kNumericalError;
  } catch (const OverflowError& ex) {
    err << "numerical error: " << ex.what() << '\n';
    return kNumericalError;
  } catch (const DomainError& ex) {
    err << "configuration error: " << ex.what() << '\n';
    return kConfigError;
  }

  try {
    json summary;
    summary["command"] = command;
    summary["config"] = config_to_json(rc);
    summary["result"] = result.summary;
    json mj;
    mj["command"] = manifest.command;
    mj["config"] = config_to_json(rc);
    mj["output_dir"] = manifest.output_dir;
    mj["tool_version"] = manifest.tool_version;
    mj["timestamp"] = manifest.timestamp;

    write_text(dir / (command + ".csv"), csv_header(command) + "\n" + result.csv);
    write_text(dir / (command + ".json"), summary.dump(2) + "\n");
    write_text(dir / "manifest.json", mj.dump(2) + "\n");
    if (result.plot != nullptr) emit_plot_data(*result.plot, dir / (command + ".dat"));
  } catch (const EvaluationError& ex) {
    err << "numerical error: " << ex.what() << '\n';
    return kNumericalError;
  } catch (const std::ios_base::failure& ex) {
    err << "configuration error: " << ex.what() << '\n';
    return kConfigError;
  }

  out << result.line << '\n';
  return kOk;
}

}  // namespace jgreedy::cli
