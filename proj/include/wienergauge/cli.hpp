#pragma once

// Batch front end: argument and config-file parsing, the command pipelines
// and artifact writing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wienergauge/calibration.hpp"
#include "wienergauge/capacity.hpp"
#include "wienergauge/errors.hpp"
#include "wienergauge/estimates.hpp"
#include "wienergauge/format.hpp"
#include "wienergauge/geometry.hpp"
#include "wienergauge/solver.hpp"
#include "wienergauge/svg.hpp"
#include "wienergauge/wiener.hpp"

namespace wienergauge {

/// Invalid command line, config file or option value.
class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"capacity", "delta", "wiener", "modulus", "solve", "verify", "gallery"};
  return names;
}

struct RunConfig {
  std::string command;
  std::string domain = "half_space";
  int dim = 0;  ///< 0: the domain's default dimension
  double p = 2.0;
  std::vector<double> eps;     ///< empty: calibrated effective exponent
  double rho = 0.25;
  std::vector<double> radii;   ///< empty: 2^-1 ... 2^-6
  int grid = 0;                ///< nodes per axis; 0: command default
  double half_width = 1.0;
  int levels = 1;
  double tol = 1e-8;
  int max_iters = 500;
  int nodes_per_radius = 4;
  double gamma0 = 1.0;
  double gamma = 0.0;          ///< 0: max(2, C_harnack)
  double eps_harnack = kDefaultEpsHarnack;
  double C_harnack = 2.0;
  double osc0 = 1.0;
  double osc_g = 0.0;
  int steps = 8;
  std::string datum = "cutoff";
  std::string out = ".";
  bool svg = false;

  int resolved_dim() const { return dim > 0 ? dim : gallery_default_dim(domain); }

  SolverOptions solver() const {
    SolverOptions o;
    o.tol = tol;
    o.max_iters = max_iters;
    o.levels = levels;
    return o;
  }

  std::vector<double> resolved_radii() const {
    if (!radii.empty()) return radii;
    std::vector<double> r;
    for (int k = 1; k <= 6; ++k) r.push_back(std::ldexp(1.0, -k));
    return r;
  }

  /// Every field except the output directory, in a fixed order.
  std::string canonical() const {
    std::ostringstream os;
    auto list = [](const std::vector<double>& v) {
      std::string s;
      for (double x : v) s += (s.empty() ? "" : ",") + format_real(x);
      return s;
    };
    os << "command=" << command << " domain=" << domain << " dim=" << resolved_dim() << " p=" << format_real(p)
       << " eps=" << list(eps) << " rho=" << format_real(rho) << " radii=" << list(resolved_radii())
       << " grid=" << grid << " half_width=" << format_real(half_width) << " levels=" << levels
       << " tol=" << format_real(tol) << " max_iters=" << max_iters << " nodes_per_radius=" << nodes_per_radius
       << " gamma0=" << format_real(gamma0) << " gamma=" << format_real(gamma)
       << " eps_harnack=" << format_real(eps_harnack) << " C_harnack=" << format_real(C_harnack)
       << " osc0=" << format_real(osc0) << " osc_g=" << format_real(osc_g) << " steps=" << steps
       << " datum=" << datum << " svg=" << svg;
    return os.str();
  }

  /// FNV-1a of canonical(), hex.
  std::string hash() const {
    std::uint64_t hsh = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
      hsh ^= c;
      hsh *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hsh));
    return buf;
  }
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

inline void validate(const RunConfig& c) {
  require(std::find(command_names().begin(), command_names().end(), c.command) != command_names().end(),
          "unknown command '" + c.command + "'");
  const int dim = c.dim;
  require(dim == 0 || dim == 2 || dim == 3, "dim must be 2 or 3");
  try {
    (void)gallery(c.domain, dim);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  require(c.p > 1.0 && c.p <= c.resolved_dim(), "p must lie in (1, N]");
  require(c.rho > 0.0 && c.rho < 1.0, "rho must lie in (0,1)");
  for (double e : c.eps) require(e > 0.0 && e <= 1.0, "eps values must lie in (0,1]");
  const auto r = c.resolved_radii();
  for (std::size_t i = 0; i < r.size(); ++i) {
    require(r[i] > 0.0 && r[i] < 1.0, "radii must lie in (0,1)");
    require(i == 0 || r[i] < r[i - 1], "radii must be strictly decreasing");
  }
  require(c.grid == 0 || (c.grid >= 5 && c.grid % 2 == 1), "grid must be an odd node count of at least 5");
  require(c.half_width > 0.0, "half_width must be positive");
  require(c.levels >= 1 && c.levels <= 6, "levels must lie in [1,6]");
  require(c.tol > 0.0 && c.tol < 1.0, "tol must lie in (0,1)");
  require(c.max_iters >= 1, "max_iters must be positive");
  require(c.nodes_per_radius >= 2, "nodes_per_radius must be at least 2");
  require(c.gamma0 > 0.0, "gamma0 must be positive");
  require(c.gamma == 0.0 || c.gamma > 1.0, "gamma must exceed 1");
  require(c.eps_harnack > 0.0 && c.eps_harnack < 1.0, "eps_harnack must lie in (0,1)");
  require(c.C_harnack > 1.0, "C_harnack must exceed 1");
  require(c.osc0 >= 0.0 && c.osc_g >= 0.0, "oscillations must be non-negative");
  require(c.steps >= 1 && c.steps <= 64, "steps must lie in [1,64]");
  require(c.datum == "cutoff" || c.datum == "x1", "datum must be cutoff or x1");
}

}  // namespace detail

/// Parses `<command> [--key value]... [--config path]`.  Config files hold
/// flat `key = value` lines with `#` comments; flags override them.
/// Returns nullopt after printing help.
inline std::optional<RunConfig> parse_config(const std::vector<std::string>& args, std::ostream& out = std::cout) {
  RunConfig c;
  CLI::App app{"Wiener-type boundary regularity gauges for p-Laplace problems", "wienergauge"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "flat key = value file");
  app.add_option("command", c.command, "capacity|delta|wiener|modulus|solve|verify|gallery")->required();
  app.add_option("--domain", c.domain, "gallery token, name or name:param");
  app.add_option("--dim", c.dim);
  app.add_option("--p", c.p);
  app.add_option("--eps", c.eps)->delimiter(',');
  app.add_option("--rho", c.rho);
  app.add_option("--radii", c.radii)->delimiter(',');
  app.add_option("--grid", c.grid, "nodes per axis");
  app.add_option("--half_width", c.half_width);
  app.add_option("--levels", c.levels, "refinement levels for capacities");
  app.add_option("--tol", c.tol);
  app.add_option("--max_iters", c.max_iters);
  app.add_option("--nodes_per_radius", c.nodes_per_radius);
  app.add_option("--gamma0", c.gamma0);
  app.add_option("--gamma", c.gamma);
  app.add_option("--eps_harnack", c.eps_harnack);
  app.add_option("--C_harnack", c.C_harnack);
  app.add_option("--osc0", c.osc0);
  app.add_option("--osc_g", c.osc_g);
  app.add_option("--steps", c.steps, "dyadic levels for modulus");
  app.add_option("--datum", c.datum, "cutoff|x1");
  app.add_option("--out", c.out, "output directory");
  app.add_flag("--svg", c.svg);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  detail::validate(c);
  return c;
}

namespace detail {

/// Collects artifacts and removes them all if the run fails.
class Artifacts {
 public:
  Artifacts(std::filesystem::path dir, std::string provenance) : dir_(std::move(dir)), prov_(std::move(provenance)) {}
  ~Artifacts() {
    if (!committed_)
      for (const auto& p : written_) {
        std::error_code ec;
        std::filesystem::remove(p, ec);
      }
  }

  const std::string& provenance() const { return prov_; }

  void write(const std::string& name, const std::string& body) {
    std::filesystem::create_directories(dir_);
    const auto path = dir_ / name;
    written_.push_back(path);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << body;
    if (!f) throw Error("write to " + path.string() + " failed");
  }

  void csv(const std::string& name, const std::string& body, const std::string& extra = "") {
    write(name, "# " + prov_ + (extra.empty() ? "" : " " + extra) + "\n" + body);
  }

  void svg(const std::string& name, const std::vector<Series>& series, bool log_x, const std::string& title) {
    write(name, "<!-- " + prov_ + " -->\n" + render_svg(series, log_x, title));
  }

  void commit() { committed_ = true; }

 private:
  std::filesystem::path dir_;
  std::string prov_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

inline Grid solve_grid(const RunConfig& c, int dim) {
  const int n = c.grid > 0 ? c.grid : (dim == 2 ? 129 : 33);
  return make_grid(dim, Point{0.0, 0.0, 0.0}, c.half_width, 2.0 * c.half_width / (n - 1));
}

inline GridPolicy policy(const RunConfig& c) {
  GridPolicy gp;
  gp.nodes_per_radius = c.nodes_per_radius;
  gp.max_nodes_per_axis = c.grid;
  return gp;
}

inline Datum make_datum(const RunConfig& c) {
  const int dim = c.resolved_dim();
  if (c.datum == "x1") return [](const Point& x) { return x[0]; };
  const double rho = c.rho;
  return [dim, rho](const Point& x) {
    return std::clamp(distance(x, Point{0.0, 0.0, 0.0}, dim) / rho - 1.0, 0.0, 1.0);
  };
}

template <class Fn>
std::string to_text(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

inline std::vector<double> profile_radii(const DeltaProfile& prof) {
  std::vector<double> r;
  for (const auto& e : prof.entries) r.push_back(e.t);
  return r;
}

inline Calibration calibration_for(const RunConfig& c) {
  return calibrate(c.gamma0, c.p, c.C_harnack, c.eps_harnack, c.gamma);
}

inline std::vector<double> eps_list(const RunConfig& c) {
  if (!c.eps.empty()) return c.eps;
  return {calibration_for(c).eps_eff};
}

inline std::vector<Series> profile_series(const DeltaProfile& prof) {
  Series s{"delta", {}};
  for (const auto& e : prof.entries) s.points.emplace_back(e.t, e.delta);
  return {s};
}

struct GalleryEntry {
  const char* domain;
  double p;
  std::vector<double> eps;
};

/// Fixed manifest: planar entries use radii 2^-1..2^-6, spatial ones
/// 2^-1..2^-5 on grids of at most 33 nodes per axis.
inline const std::vector<GalleryEntry>& gallery_manifest() {
  static const std::vector<GalleryEntry> m{
      {"half_space", 2.0, {1.0, 0.5}},
      {"half_space", 1.5, {1.0}},
      {"slit", 2.0, {1.0, 0.5}},
      {"square_minus_segment", 2.0, {1.0}},
      {"full_ball", 2.0, {1.0}},
      {"point", 2.0, {1.0}},
      {"cone", 2.0, {1.0}},
      {"spine", 2.0, {1.0, 0.5}},
  };
  return m;
}

inline void run_command(const RunConfig& c, Artifacts& art) {
  const int dim = c.resolved_dim();
  const DomainSpec dom = gallery(c.domain, dim);
  const BoundaryPoint y{Point{0.0, 0.0, 0.0}, dim};
  const SolverOptions opts = c.solver();

  if (c.command == "capacity") {
    const Grid g = solve_grid(c, dim);
    const RelativeCapacity rc = relative_capacity(dom, y, c.rho, c.p, g, opts);
    const std::string extra = "outer_radius=" + format_real(rc.outer_radius) +
                              " capacity_B2=" + format_real(rc.capacity) + " delta=" + format_real(rc.delta);
    art.csv("capacity.csv", to_text([&](std::ostream& os) { write_record(os, rc.detail); }), extra);
    return;
  }

  if (c.command == "delta" || c.command == "wiener") {
    const DeltaProfile prof = delta_profile(dom, y, c.p, c.resolved_radii(), policy(c), opts);
    if (c.command == "delta") {
      art.csv("delta.csv", to_text([&](std::ostream& os) { write_csv(os, prof); }));
      if (c.svg) art.svg("delta.svg", profile_series(prof), true, "delta " + c.domain);
      return;
    }
    const auto rhos = profile_radii(prof);
    std::string body;
    nlohmann::ordered_json j;
    j["provenance"] = art.provenance();
    j["records"] = nlohmann::ordered_json::array();
    std::vector<Series> series;
    bool header = true;
    for (double e : eps_list(c)) {
      const WienerReport rep = wiener_report(prof, e, rhos);
      body += to_text([&](std::ostream& os) { write_csv(os, rep, header); });
      header = false;
      j["records"].push_back(to_json(rep));
      Series s{"eps=" + format_real(e), {}};
      for (double r : rhos) s.points.emplace_back(r, wiener_integral(prof, e, r));
      series.push_back(std::move(s));
    }
    art.csv("wiener.csv", body);
    art.write("wiener.json", j.dump(2) + "\n");
    if (c.svg) art.svg("wiener.svg", series, true, "Wiener integral " + c.domain);
    return;
  }

  if (c.command == "modulus") {
    const Calibration cal = calibration_for(c);
    const double rho_0 = c.resolved_radii().front();
    std::vector<double> radii;
    for (int n = 0; n < c.steps; ++n) radii.push_back(std::ldexp(rho_0, -n));
    const DeltaProfile prof = delta_profile(dom, y, c.p, radii, policy(c), opts);
    std::vector<double> deltas;
    for (const auto& e : prof.entries) deltas.push_back(e.delta);
    const double e = c.eps.empty() ? cal.eps_eff : c.eps.front();
    const ModulusSequence seq = oscillation_recursion(deltas, cal.gamma, e, c.osc0, c.osc_g, rho_0);
    art.csv("modulus.csv", to_text([&](std::ostream& os) { write_csv(os, seq); }),
            "gamma=" + format_real(cal.gamma) + " eps=" + format_real(e));
    art.write("calibration.txt", "# " + art.provenance() + "\n" + to_text([&](std::ostream& os) {
                                   write_text(os, cal);
                                 }));
    if (c.svg) {
      Series a{"osc_bound", {}}, b{"eq18_bound", {}};
      for (const auto& en : seq.entries) {
        a.points.emplace_back(en.rho, en.osc);
        b.points.emplace_back(en.rho, en.closed_form);
      }
      art.svg("modulus.svg", {a, b}, true, "oscillation bounds " + c.domain);
    }
    return;
  }

  if (c.command == "solve" || c.command == "verify") {
    DirichletProblem prob{dom, make_datum(c), c.p, solve_grid(c, dim), opts};
    const SolveResult res = solve_p_laplace(prob);
    if (c.command == "verify") {
      const Calibration cal = calibration_for(c);
      SuiteConfig sc;
      sc.domain = dom;
      sc.p = c.p;
      sc.rho = c.rho;
      sc.eps = c.eps.empty() ? cal.eps_eff : c.eps.front();
      sc.opts = opts;
      const auto reports = inequality_suite(res.u, prob.g, sc, cal.eps_cap, cal.p_0);
      art.csv("verify.csv", to_text([&](std::ostream& os) { write_csv(os, reports); }),
              "grid=" + prob.grid.describe());
      return;
    }
    const std::string extra = "grid=" + prob.grid.describe();
    art.csv("solve.csv", to_text([&](std::ostream& os) {
              os << "energy,iterations,residual,min,max\n"
                 << format_real(res.energy) << ',' << res.iterations << ',' << format_real(res.residual) << ','
                 << format_real(res.range.first) << ',' << format_real(res.range.second) << '\n';
            }),
            extra);
    const auto radii = c.resolved_radii();
    const auto osc = measure_boundary_oscillation(res.u, dom, y.y, radii);
    art.csv("oscillation.csv", to_text([&](std::ostream& os) {
              os << "rho,osc\n";
              for (std::size_t i = 0; i < radii.size(); ++i)
                os << format_real(radii[i]) << ',' << format_real(osc[i]) << '\n';
            }),
            extra);
    art.write("u.bin", to_text([&](std::ostream& os) { write_binary(os, res.u); }));
    if (res.u.size() <= 20000) art.csv("u.csv", to_text([&](std::ostream& os) { write_csv(os, res.u); }), extra);
    if (c.svg) {
      Series s{"osc", {}};
      for (std::size_t i = 0; i < radii.size(); ++i) s.points.emplace_back(radii[i], osc[i]);
      art.svg("oscillation.svg", {s}, true, "boundary oscillation " + c.domain);
    }
    return;
  }

  // gallery
  std::ostringstream os;
  os << "domain,p,eps,rho_min,I,ziemer,growth_class\n";
  for (const auto& entry : gallery_manifest()) {
    const DomainSpec d = gallery(entry.domain);
    const BoundaryPoint yy{Point{0.0, 0.0, 0.0}, d.dim};
    std::vector<double> radii;
    for (int k = 1; k <= (d.dim == 2 ? 6 : 5); ++k) radii.push_back(std::ldexp(1.0, -k));
    GridPolicy gp;
    gp.nodes_per_radius = c.nodes_per_radius;
    gp.max_nodes_per_axis = d.dim == 2 ? 129 : 33;
    const DeltaProfile prof = delta_profile(d, yy, entry.p, radii, gp, opts);
    for (double e : entry.eps) {
      const WienerReport rep = wiener_report(prof, e, radii);
      os << entry.domain << ',' << format_real(entry.p) << ',' << format_real(e) << ',' << format_real(rep.rho) << ','
         << format_real(rep.wiener) << ',' << format_real(rep.ziemer) << ',' << to_string(rep.growth) << '\n';
    }
  }
  art.csv("gallery.csv", os.str());
}

/// Caps workers from WIENERGAUGE_THREADS.  Every pipeline runs on one
/// thread, so the value only has to be well formed.
inline int thread_cap() {
  const char* env = std::getenv("WIENERGAUGE_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  double v = 0.0;
  if (!parse_real(env, v) || !(v >= 1.0) || v != std::floor(v)) throw ConfigError("WIENERGAUGE_THREADS must be a positive integer");
  return 1;
}

}  // namespace detail

/// Executes a parsed config.  Returns the process exit status:
/// 0 success, 1 numerical failure, 2 configuration error.
inline int run(const RunConfig& c, std::ostream& err = std::cerr) {
  try {
    detail::thread_cap();
    detail::validate(c);
  } catch (const Error& e) {
    err << "wienergauge: " << e.what() << '\n';
    return 2;
  }
  detail::Artifacts art(c.out, c.canonical() + " config_hash=" + c.hash());
  try {
    detail::run_command(c, art);
    art.commit();
    return 0;
  } catch (const NonConvergence& e) {
    err << "wienergauge: " << e.what() << '\n';
    return 1;
  } catch (const CalibrationFailure& e) {
    err << "wienergauge: " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    err << "wienergauge: " << e.what() << '\n';
    return 2;
  } catch (const BudgetError& e) {
    err << "wienergauge: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "wienergauge: " << e.what() << '\n';
    return 1;
  }
}

inline int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const auto cfg = parse_config(args);
    if (!cfg) return 0;
    return run(*cfg);
  } catch (const Error& e) {
    std::cerr << "wienergauge: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace wienergauge
