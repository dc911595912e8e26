#pragma once

// Command-line front end. Every subcommand validates its flags before computing anything
// (exit 2 with a one-line diagnostic), then runs and writes outputs atomically (exit 1 on a
// runtime failure, naming the subcommand).

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chaoscope/analysis.hpp"
#include "chaoscope/cipher.hpp"
#include "chaoscope/compression.hpp"
#include "chaoscope/fractals.hpp"
#include "chaoscope/integrate.hpp"
#include "chaoscope/io.hpp"
#include "chaoscope/iterate.hpp"
#include "chaoscope/systems.hpp"

namespace chaoscope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Flag-level validation failure.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<double> parse_list(const std::string& text, char sep, const std::string& flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = text.find(sep, start);
    const std::string part = text.substr(start, at == std::string::npos ? std::string::npos : at - start);
    try {
      out.push_back(io::parse_double(part));
    } catch (const FormatError&) {
      throw UsageError(flag + ": '" + part + "' is not a number");
    }
    if (!std::isfinite(out.back())) throw UsageError(flag + ": values must be finite");
    if (at == std::string::npos) break;
    start = at + 1;
  }
  return out;
}

inline ParamOverrides parse_params(const std::vector<std::string>& items) {
  ParamOverrides out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + item + "'");
    out[item.substr(0, eq)] = parse_list(item.substr(eq + 1), ',', "--param " + item.substr(0, eq)).at(0);
  }
  return out;
}

inline void require_writable(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  const std::filesystem::path parent = std::filesystem::absolute(path).parent_path();
  std::error_code ec;
  if (!std::filesystem::is_directory(parent, ec)) {
    throw UsageError(flag + ": directory '" + parent.string() + "' does not exist");
  }
}

inline void require_readable(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw UsageError(flag + ": no such file '" + path + "'");
}

inline SystemPreset resolve_preset(const std::string& name, const std::vector<std::string>& params,
                                   SystemKind kind) {
  std::optional<SystemPreset> preset;
  try {
    preset = make_preset(name, parse_params(params));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (!preset) throw UsageError("unknown system preset '" + name + "'");
  if (preset->kind != kind) {
    throw UsageError("preset '" + name + "' is a " + (kind == SystemKind::Flow ? "map" : "flow") +
                     "; use `" + (kind == SystemKind::Flow ? "iterate" : "simulate") + "`");
  }
  return *preset;
}

inline StateVector resolve_x0(const std::string& text, const SystemPreset& preset) {
  if (text.empty()) return preset.default_x0;
  const auto values = parse_list(text, ',', "--x0");
  if (values.size() != preset.dimension) {
    throw UsageError("--x0 needs " + std::to_string(preset.dimension) + " components for '" + preset.name + "'");
  }
  return StateVector(values);
}

struct FlowFlags {
  std::string system;
  std::vector<std::string> params;
  std::string x0;
  double rel_tol = 1e-4;
  double abs_tol = 1e-4;
  std::optional<double> initial_step;
  std::optional<double> min_step;
  std::size_t max_steps = 1'000'000;

  IntegratorConfig config() const {
    IntegratorConfig c;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    c.initial_step = initial_step;
    c.min_step = min_step;
    c.max_steps = max_steps;
    try {
      c.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

inline void add_flow_flags(CLI::App* cmd, FlowFlags& f) {
  cmd->add_option("--system", f.system, "Flow preset: lorenz, chua, chua-paper-code, linear1d")->required();
  cmd->add_option("--param", f.params, "Parameter override key=value (repeatable)");
  cmd->add_option("--x0", f.x0, "Initial state, comma separated (default: preset)");
  cmd->add_option("--rel-tol", f.rel_tol, "Relative tolerance")->capture_default_str();
  cmd->add_option("--abs-tol", f.abs_tol, "Absolute tolerance")->capture_default_str();
  cmd->add_option("--initial-step", f.initial_step, "Initial step (default: span/100)");
  cmd->add_option("--min-step", f.min_step, "Smallest allowed step (default: 1e-12 * span)");
  cmd->add_option("--max-steps", f.max_steps, "Step budget")->capture_default_str();
}

struct Key {
  std::optional<double> mu;
  std::optional<double> x0;
  std::uint32_t warmup = cipher::kDefaultWarmup;
};

inline cipher::ChaosKey resolve_key(const Key& flags, std::optional<std::uint32_t> stored_warmup = std::nullopt) {
  cipher::ChaosKey key;
  std::optional<double> mu = flags.mu, x0 = flags.x0;
  if (!mu || !x0) {
    if (const char* env = std::getenv("CHAOSCOPE_KEY")) {
      const auto parts = parse_list(env, ',', "CHAOSCOPE_KEY");
      if (parts.size() != 2) throw UsageError("CHAOSCOPE_KEY must be \"mu,x0\"");
      if (!mu) mu = parts[0];
      if (!x0) x0 = parts[1];
    }
  }
  if (!mu || !x0) throw UsageError("cipher key missing: pass --mu and --x0 or set CHAOSCOPE_KEY=\"mu,x0\"");
  key.mu = *mu;
  key.x0 = *x0;
  key.warmup = stored_warmup.value_or(flags.warmup);
  try {
    key.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return key;
}

inline void add_key_flags(CLI::App* cmd, Key& k) {
  cmd->add_option("--mu", k.mu, "Key: logistic parameter in (3.57, 4]");
  cmd->add_option("--x0", k.x0, "Key: initial condition in (0, 1)");
}

template <class F>
void wrap_usage(F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

}  // namespace detail

/// Parses argv and runs one subcommand. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"chaoscope: chaotic dynamics, fractals, fractal image coding and a logistic-map stream cipher"};
  app.name("chaoscope");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::function<void()> execute;
  std::string active;

  auto sub = [&](const char* name, const char* help) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->callback([&active, name] { active = name; });
    return cmd;
  };

  // simulate ---------------------------------------------------------------
  detail::FlowFlags sim;
  std::string sim_span = "0:100", sim_out;
  {
    auto* cmd = sub("simulate", "Integrate a flow preset and write its trajectory as CSV");
    detail::add_flow_flags(cmd, sim);
    cmd->add_option("--span", sim_span, "Time span t0:t1")->capture_default_str();
    cmd->add_option("--out", sim_out, "Output CSV path")->required();
  }
  // iterate ----------------------------------------------------------------
  std::string it_system, it_x0, it_out;
  std::vector<std::string> it_params;
  std::size_t it_n = 1000, it_discard = 0;
  {
    auto* cmd = sub("iterate", "Iterate a map preset and write the orbit as CSV");
    cmd->add_option("--system", it_system, "Map preset: logistic, henon")->required();
    cmd->add_option("--param", it_params, "Parameter override key=value (repeatable)");
    cmd->add_option("--x0", it_x0, "Initial state, comma separated (default: preset)");
    cmd->add_option("--n", it_n, "Points including x0")->capture_default_str();
    cmd->add_option("--discard", it_discard, "Leading points to drop")->capture_default_str();
    cmd->add_option("--out", it_out, "Output CSV path")->required();
  }
  // cobweb -----------------------------------------------------------------
  double cw_mu = kLogisticFigureMu, cw_x0 = 0.2;
  std::size_t cw_n = 50;
  std::string cw_out, cw_curve;
  {
    auto* cmd = sub("cobweb", "Graphical iteration of the logistic map (staircase vertices as CSV)");
    cmd->add_option("--mu", cw_mu, "Logistic parameter")->capture_default_str();
    cmd->add_option("--x0", cw_x0, "Start point in [0, 1]")->capture_default_str();
    cmd->add_option("--n", cw_n, "Iterations")->capture_default_str();
    cmd->add_option("--out", cw_out, "Vertex CSV path")->required();
    cmd->add_option("--curve-out", cw_curve, "Optional CSV of the map graph");
  }
  // bifurcate --------------------------------------------------------------
  double bf_lo = 2.5, bf_hi = 4.0, bf_x0 = 0.3;
  std::size_t bf_steps = 600, bf_discard = 500, bf_keep = 100;
  std::string bf_out;
  {
    auto* cmd = sub("bifurcate", "Logistic bifurcation diagram as CSV");
    cmd->add_option("--lo", bf_lo, "Lowest mu")->capture_default_str();
    cmd->add_option("--hi", bf_hi, "Highest mu")->capture_default_str();
    cmd->add_option("--steps", bf_steps, "Number of mu values")->capture_default_str();
    cmd->add_option("--x0", bf_x0, "Start point")->capture_default_str();
    cmd->add_option("--discard", bf_discard, "Transient iterates (>= 100)")->capture_default_str();
    cmd->add_option("--keep", bf_keep, "Samples kept per mu")->capture_default_str();
    cmd->add_option("--out", bf_out, "Output CSV path")->required();
  }
  // divergence -------------------------------------------------------------
  detail::FlowFlags dv;
  double dv_delta = 1e-8, dv_t1 = 40.0;
  std::string dv_out;
  {
    auto* cmd = sub("divergence", "Separation growth of two nearby orbits of a flow preset");
    detail::add_flow_flags(cmd, dv);
    cmd->add_option("--delta0", dv_delta, "Initial offset in the first coordinate")->capture_default_str();
    cmd->add_option("--t1", dv_t1, "End time")->capture_default_str();
    cmd->add_option("--out", dv_out, "CSV of t,log_separation");
  }
  // equilibria -------------------------------------------------------------
  std::string eq_system = "lorenz", eq_out;
  std::vector<std::string> eq_params;
  double eq_tol = 1e-9;
  {
    auto* cmd = sub("equilibria", "Equilibria of lorenz, or stability class of linear1d");
    cmd->add_option("--system", eq_system, "lorenz or linear1d")->capture_default_str();
    cmd->add_option("--param", eq_params, "Parameter override key=value (repeatable)");
    cmd->add_option("--tol", eq_tol, "Verification tolerance")->capture_default_str();
    cmd->add_option("--out", eq_out, "Optional CSV path");
  }
  // mandelbrot -------------------------------------------------------------
  std::string mb_window = "-2.4:1.2:-1.5:1.5", mb_out;
  double mb_scale = 0.005, mb_threshold = 4.0;
  std::uint32_t mb_nmax = 50;
  std::size_t mb_cap = kDefaultMaxPixels;
  unsigned mb_threads = 0;
  {
    auto* cmd = sub("mandelbrot", "Escape-time Mandelbrot render as PGM");
    cmd->add_option("--window", mb_window, "xmin:xmax:ymin:ymax")->capture_default_str();
    cmd->add_option("--scale", mb_scale, "Grid pitch")->capture_default_str();
    cmd->add_option("--nmax", mb_nmax, "Iteration limit")->capture_default_str();
    cmd->add_option("--threshold", mb_threshold, "Escape radius (>= 2)")->capture_default_str();
    cmd->add_option("--max-pixels", mb_cap, "Pixel cap")->capture_default_str();
    cmd->add_option("--threads", mb_threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("--out", mb_out, "Output PGM path")->required();
  }
  // ifs / boxdim shared raster settings --------------------------------------
  std::string ifs_preset = "sierpinski", ifs_start = "full", ifs_out;
  std::size_t ifs_size = 1024, ifs_depth = 7;
  {
    auto* cmd = sub("ifs", "Deterministic IFS iteration rendered as PGM");
    cmd->add_option("--preset", ifs_preset, "IFS preset")->capture_default_str();
    cmd->add_option("--size", ifs_size, "Raster side in pixels")->capture_default_str();
    cmd->add_option("--depth", ifs_depth, "Iterations")->capture_default_str();
    cmd->add_option("--start", ifs_start, "Start image: full or point")->capture_default_str();
    cmd->add_option("--out", ifs_out, "Output PGM path")->required();
  }
  std::string bd_in, bd_out, bd_preset = "sierpinski";
  std::size_t bd_size = 1024, bd_depth = 7;
  int bd_min = 2, bd_max = 7;
  {
    auto* cmd = sub("boxdim", "Box-counting dimension of a PGM (pixels > 127 set) or an IFS preset");
    cmd->add_option("--in", bd_in, "Input PGM (omit to rasterize --preset)");
    cmd->add_option("--preset", bd_preset, "IFS preset when no --in is given")->capture_default_str();
    cmd->add_option("--size", bd_size, "Raster side for the preset")->capture_default_str();
    cmd->add_option("--depth", bd_depth, "Preset iterations")->capture_default_str();
    cmd->add_option("--min-exp", bd_min, "Smallest exponent k")->capture_default_str();
    cmd->add_option("--max-exp", bd_max, "Largest exponent k")->capture_default_str();
    cmd->add_option("--out", bd_out, "Optional CSV of fit points");
  }
  std::size_t sd_copies = 3;
  double sd_ratio = 0.5;
  {
    auto* cmd = sub("simdim", "Similarity dimension of N copies scaled by r");
    cmd->add_option("--copies", sd_copies, "N")->capture_default_str();
    cmd->add_option("--ratio", sd_ratio, "r in (0, 1)")->capture_default_str();
  }
  // compress / decompress ----------------------------------------------------
  std::string cp_in, cp_out;
  EncoderOptions cp_opt;
  {
    auto* cmd = sub("compress", "PIFS-encode a PGM into a FIC1 file");
    cmd->add_option("--in", cp_in, "Input PGM")->required();
    cmd->add_option("--out", cp_out, "Output FIC1 path")->required();
    cmd->add_option("--range-size", cp_opt.range_size, "Range block side")->capture_default_str();
    cmd->add_option("--domain-step", cp_opt.domain_step, "Domain block stride")->capture_default_str();
    cmd->add_option("--s-max", cp_opt.s_max, "Contrast bound in [0, 1]")->capture_default_str();
    cmd->add_option("--threads", cp_opt.threads, "Worker threads (0 = all cores)")->capture_default_str();
  }
  std::string dc_in, dc_out, dc_start = "gray";
  std::size_t dc_iterations = 10;
  {
    auto* cmd = sub("decompress", "Decode a FIC1 file into a PGM");
    cmd->add_option("--in", dc_in, "Input FIC1")->required();
    cmd->add_option("--out", dc_out, "Output PGM")->required();
    cmd->add_option("--iterations", dc_iterations, "Decoding passes")->capture_default_str();
    cmd->add_option("--start", dc_start, "Start image: gray, black or white")->capture_default_str();
  }
  // cipher -------------------------------------------------------------------
  detail::Key enc_key, dec_key, av_key;
  std::string enc_in, enc_out, dec_in, dec_out;
  std::size_t av_bytes = 10240, av_trials = 16;
  {
    auto* cmd = sub("encrypt", "Encrypt a file into a CHX1 container (not secure; see docs)");
    detail::add_key_flags(cmd, enc_key);
    cmd->add_option("--warmup", enc_key.warmup, "Discarded iterates (>= 256)")->capture_default_str();
    cmd->add_option("--in", enc_in, "Plaintext file")->required();
    cmd->add_option("--out", enc_out, "Output container")->required();
  }
  {
    auto* cmd = sub("decrypt", "Decrypt a CHX1 container");
    detail::add_key_flags(cmd, dec_key);
    cmd->add_option("--in", dec_in, "Input container")->required();
    cmd->add_option("--out", dec_out, "Plaintext output")->required();
  }
  {
    auto* cmd = sub("avalanche", "Mean keystream bit difference under one-ulp x0 steps (equivalent keys skipped)");
    detail::add_key_flags(cmd, av_key);
    cmd->add_option("--warmup", av_key.warmup, "Discarded iterates (>= 256)")->capture_default_str();
    cmd->add_option("--bytes", av_bytes, "Keystream bytes per trial (>= 1024)")->capture_default_str();
    cmd->add_option("--trials", av_trials, "Trials (>= 8)")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "chaoscope: " << e.what() << "\n";
    return kExitUsage;
  }

  // Validation: every branch resolves its inputs and fails with UsageError before running.
  try {
    if (active == "simulate") {
      const SystemPreset preset = detail::resolve_preset(sim.system, sim.params, SystemKind::Flow);
      const StateVector x0 = detail::resolve_x0(sim.x0, preset);
      const auto span = detail::parse_list(sim_span, ':', "--span");
      if (span.size() != 2 || !(span[1] > span[0])) throw UsageError("--span must be t0:t1 with t1 > t0");
      const IntegratorConfig config = sim.config();
      detail::require_writable(sim_out, "--out");
      execute = [=] { io::write_csv(sim_out, integrate(preset.field, x0, span[0], span[1], config)); };
    } else if (active == "iterate") {
      const SystemPreset preset = detail::resolve_preset(it_system, it_params, SystemKind::Map);
      const StateVector x0 = detail::resolve_x0(it_x0, preset);
      if (it_n == 0) throw UsageError("--n must be positive");
      if (it_discard > 0 && it_n <= it_discard) throw UsageError("--n must exceed --discard");
      detail::require_writable(it_out, "--out");
      execute = [=] { io::write_csv(it_out, iterate_map(preset.map, x0, it_n, it_discard), preset.dimension); };
    } else if (active == "cobweb") {
      detail::wrap_usage([&] { LogisticParams{cw_mu}.validate(); });
      if (!(cw_x0 >= 0.0 && cw_x0 <= 1.0)) throw UsageError("--x0 must lie in [0, 1]");
      if (cw_n == 0) throw UsageError("--n must be positive");
      detail::require_writable(cw_out, "--out");
      if (!cw_curve.empty()) detail::require_writable(cw_curve, "--curve-out");
      execute = [=] {
        const CobwebTrace trace = cobweb_trace(LogisticParams{cw_mu}, cw_x0, cw_n);
        io::write_csv(cw_out, trace);
        if (!cw_curve.empty()) io::write_file_atomic(cw_curve, io::points_csv(trace.curve_samples));
      };
    } else if (active == "bifurcate") {
      if (!(bf_lo < bf_hi)) throw UsageError("--lo must be below --hi");
      if (!(bf_lo >= 0.0 && bf_hi <= 4.0)) throw UsageError("logistic mu range must lie in [0, 4]");
      if (bf_steps == 0 || bf_keep == 0) throw UsageError("--steps and --keep must be positive");
      if (bf_discard < 100) throw UsageError("--discard must be at least 100");
      if (!(bf_x0 >= 0.0 && bf_x0 <= 1.0)) throw UsageError("--x0 must lie in [0, 1]");
      detail::require_writable(bf_out, "--out");
      execute = [=] {
        io::write_csv(bf_out, bifurcation_scan(logistic_family(), bf_lo, bf_hi, bf_steps, bf_x0, bf_discard, bf_keep));
      };
    } else if (active == "divergence") {
      const SystemPreset preset = detail::resolve_preset(dv.system, dv.params, SystemKind::Flow);
      const StateVector x0 = detail::resolve_x0(dv.x0, preset);
      const IntegratorConfig config = dv.config();
      if (!(dv_delta > 0.0)) throw UsageError("--delta0 must be positive");
      if (!(dv_t1 > 0.0)) throw UsageError("--t1 must be positive");
      if (!dv_out.empty()) detail::require_writable(dv_out, "--out");
      execute = [=, &out] {
        const DivergenceReport r = divergence_rate(preset.field, x0, dv_delta, dv_t1, config);
        out << "fitted_rate " << io::format_double(r.fitted_rate) << "\nfit_window " << io::format_double(r.fit_lo)
            << ":" << io::format_double(r.fit_hi) << "\n";
        if (!dv_out.empty()) {
          std::string csv = "t,log_separation\n";
          for (std::size_t i = 0; i < r.times.size(); ++i) {
            csv += io::format_double(r.times[i]) + "," + io::format_double(r.log_separation[i]) + "\n";
          }
          io::write_file_atomic(dv_out, csv);
        }
      };
    } else if (active == "equilibria") {
      const ParamOverrides overrides = [&] {
        try {
          return detail::parse_params(eq_params);
        } catch (const DomainError& e) {
          throw UsageError(e.what());
        }
      }();
      if (!(eq_tol > 0.0)) throw UsageError("--tol must be positive");
      if (!eq_out.empty()) detail::require_writable(eq_out, "--out");
      if (eq_system == "lorenz") {
        LorenzParams p;
        detail::wrap_usage([&] {
          chaoscope::detail::assign_params(overrides, {{"sigma", &p.sigma}, {"r", &p.r}, {"b", &p.b}}, "lorenz");
          p.validate();
        });
        execute = [=, &out] {
          std::string csv = "x0,x1,x2,verified\n";
          auto field = [p](double, const StateVector& s) { return lorenz_field(p, s); };
          for (const auto& e : lorenz_equilibria(p)) {
            csv += io::format_double(e[0]) + "," + io::format_double(e[1]) + "," + io::format_double(e[2]) + "," +
                   (verify_equilibrium(field, e, eq_tol) ? "true" : "false") + "\n";
          }
          if (eq_out.empty()) {
            out << csv;
          } else {
            io::write_file_atomic(eq_out, csv);
          }
        };
      } else if (eq_system == "linear1d") {
        Linear1DParams p;
        detail::wrap_usage([&] { chaoscope::detail::assign_params(overrides, {{"a", &p.a}}, "linear1d"); });
        execute = [=, &out] {
          const std::string csv = "a,equilibrium,class\n" + io::format_double(p.a) + ",0," +
                                  to_string(classify_linear(p.a)) + "\n";
          if (eq_out.empty()) {
            out << csv;
          } else {
            io::write_file_atomic(eq_out, csv);
          }
        };
      } else {
        throw UsageError("equilibria supports --system lorenz or linear1d, not '" + eq_system + "'");
      }
    } else if (active == "mandelbrot") {
      const auto w = detail::parse_list(mb_window, ':', "--window");
      if (w.size() != 4) throw UsageError("--window must be xmin:xmax:ymin:ymax");
      const ComplexWindow window{w[0], w[1], w[2], w[3], mb_scale};
      detail::wrap_usage([&] { window.validate(); });
      if (mb_nmax == 0) throw UsageError("--nmax must be positive");
      if (!(mb_threshold >= 2.0)) throw UsageError("--threshold must be at least 2");
      detail::require_writable(mb_out, "--out");
      execute = [=] { io::write_pgm(mb_out, mandelbrot_grid(window, mb_nmax, mb_threshold, mb_cap, mb_threads)); };
    } else if (active == "ifs") {
      if (ifs_preset != "sierpinski") throw UsageError("unknown IFS preset '" + ifs_preset + "'");
      if (ifs_size == 0 || ifs_size > 16384) throw UsageError("--size must lie in [1, 16384]");
      if (ifs_start != "full" && ifs_start != "point") throw UsageError("--start must be full or point");
      detail::require_writable(ifs_out, "--out");
      execute = [=] {
        BinaryImage start(ifs_size, ifs_size, ifs_start == "full");
        if (ifs_start == "point") start.set(ifs_size / 2, ifs_size / 2);
        io::write_pgm(ifs_out, ifs_iterate(sierpinski_ifs(), start, ifs_depth));
      };
    } else if (active == "boxdim") {
      if (!bd_in.empty()) {
        detail::require_readable(bd_in, "--in");
      } else {
        if (bd_preset != "sierpinski") throw UsageError("unknown IFS preset '" + bd_preset + "'");
        if (bd_size == 0 || bd_size > 16384) throw UsageError("--size must lie in [1, 16384]");
      }
      if (!(1 <= bd_min && bd_min < bd_max)) throw UsageError("requires 1 <= --min-exp < --max-exp");
      if (bd_in.empty() && (bd_max >= 63 || (std::size_t{1} << bd_max) > bd_size)) {
        throw UsageError("2^--max-exp exceeds --size");
      }
      if (!bd_out.empty()) detail::require_writable(bd_out, "--out");
      execute = [=, &out] {
        BinaryImage image;
        if (!bd_in.empty()) {
          const GrayImage gray = io::read_pgm(bd_in);
          image = BinaryImage(gray.width, gray.height);
          for (std::size_t y = 0; y < gray.height; ++y) {
            for (std::size_t x = 0; x < gray.width; ++x) {
              if (gray.at(x, y) > 127) image.set(x, gray.height - 1 - y);
            }
          }
        } else {
          image = ifs_iterate(sierpinski_ifs(), BinaryImage(bd_size, bd_size, true), bd_depth);
        }
        const BoxCountResult r = box_count_dimension(image, bd_min, bd_max);
        out << "box_dimension " << io::format_double(r.estimate) << "\n";
        if (!bd_out.empty()) io::write_file_atomic(bd_out, io::points_csv(r.fit_points));
      };
    } else if (active == "simdim") {
      if (sd_copies == 0) throw UsageError("--copies must be at least 1");
      if (!(sd_ratio > 0.0 && sd_ratio < 1.0)) throw UsageError("--ratio must lie in (0, 1)");
      execute = [=, &out] {
        out << "similarity_dimension " << io::format_double(similarity_dimension(sd_copies, sd_ratio)) << "\n";
      };
    } else if (active == "compress") {
      detail::require_readable(cp_in, "--in");
      detail::require_writable(cp_out, "--out");
      if (cp_opt.range_size < 1 || cp_opt.range_size > 32) throw UsageError("--range-size must lie in [1, 32]");
      if (cp_opt.domain_step == 0) throw UsageError("--domain-step must be positive");
      if (!(cp_opt.s_max >= 0.0 && cp_opt.s_max <= 1.0)) throw UsageError("--s-max must lie in [0, 1]");
      execute = [=] { io::write_file_atomic(cp_out, serialize_pifs(pifs_encode(io::read_pgm(cp_in), cp_opt))); };
    } else if (active == "decompress") {
      detail::require_readable(dc_in, "--in");
      detail::require_writable(dc_out, "--out");
      if (dc_iterations == 0) throw UsageError("--iterations must be at least 1");
      if (dc_start != "gray" && dc_start != "black" && dc_start != "white") {
        throw UsageError("--start must be gray, black or white");
      }
      execute = [=] {
        const PifsCode code = parse_pifs(io::read_file(dc_in));
        const std::uint8_t fill = dc_start == "black" ? 0 : dc_start == "white" ? 255 : 128;
        io::write_pgm(dc_out, pifs_decode(code, dc_iterations, GrayImage(code.width, code.height, fill)));
      };
    } else if (active == "encrypt") {
      const cipher::ChaosKey key = detail::resolve_key(enc_key);
      detail::require_readable(enc_in, "--in");
      detail::require_writable(enc_out, "--out");
      execute = [=] {
        const auto plain = io::read_file(enc_in);
        io::write_file_atomic(enc_out, cipher::serialize_container({key.warmup, cipher::encrypt(key, plain)}));
      };
    } else if (active == "decrypt") {
      detail::require_readable(dec_in, "--in");
      detail::require_writable(dec_out, "--out");
      detail::resolve_key(dec_key);  // key presence and range; warmup comes from the container
      execute = [=] {
        const cipher::Container c = cipher::parse_container(io::read_file(dec_in));
        const cipher::ChaosKey key = [&] {
          try {
            return detail::resolve_key(dec_key, c.warmup);
          } catch (const UsageError& e) {
            throw FormatError(std::string("container key settings rejected: ") + e.what());
          }
        }();
        io::write_file_atomic(dec_out, cipher::decrypt(key, c.payload));
      };
    } else if (active == "avalanche") {
      const cipher::ChaosKey key = detail::resolve_key(av_key);
      if (av_bytes < 1024) throw UsageError("--bytes must be at least 1024");
      if (av_trials < 8) throw UsageError("--trials must be at least 8");
      execute = [=, &out] {
        out << "avalanche_fraction " << io::format_double(cipher::avalanche_test(key, av_bytes, av_trials)) << "\n";
      };
    } else {
      throw UsageError("no subcommand given");
    }
  } catch (const UsageError& e) {
    err << "chaoscope " << active << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "chaoscope " << active << ": " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    execute();
  } catch (const Error& e) {
    err << "chaoscope " << active << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "chaoscope " << active << ": unexpected failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace chaoscope::cli
