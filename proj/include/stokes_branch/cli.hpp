#pragma once

// Batch front end: config parsing, the four subcommands and their CSV/JSON
// writers. Kept in a header so the tests can drive commands in-process.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stokes_branch/dispersion.hpp"
#include "stokes_branch/error.hpp"
#include "stokes_branch/hodograph_expansion.hpp"
#include "stokes_branch/irrotational.hpp"
#include "stokes_branch/vorticity_stream.hpp"

namespace stokes_branch::cli {

enum class Format { Csv, Json };

struct TauScan {
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

struct RunConfig {
  std::vector<double> omega_poly{0.0};
  std::optional<double> s;
  std::optional<double> R;
  std::optional<TauScan> tau_scan;
  std::string output_path;
  std::optional<Format> format;
  Tolerances tol;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitNoRoot = 4;

inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument:
      return kExitInvalidConfig;
    case ErrorKind::NoRoot:
      return kExitNoRoot;
    default:
      return kExitNumerical;
  }
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw Error(ErrorKind::InvalidArgument, "unknown format '" + s + "' (csv or json)");
}

inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
  RunConfig c;
  auto number = [](const nlohmann::json& v, const char* what) {
    if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be finite");
    return x;
  };
  if (j.contains("omega_poly")) {
    const auto& w = j.at("omega_poly");
    if (!w.is_array() || w.empty()) {
      throw Error(ErrorKind::InvalidArgument, "omega_poly must be a non-empty list of numbers");
    }
    c.omega_poly.clear();
    for (const auto& v : w) c.omega_poly.push_back(number(v, "omega_poly entry"));
  }
  if (j.contains("s") && !j.at("s").is_null()) c.s = number(j.at("s"), "s");
  if (j.contains("R") && !j.at("R").is_null()) c.R = number(j.at("R"), "R");
  if (c.s && c.R) throw Error(ErrorKind::InvalidArgument, "give exactly one of s and R");
  if (j.contains("tau_scan")) {
    const auto& t = j.at("tau_scan");
    if (!t.is_object() || !t.contains("min") || !t.contains("max") || !t.contains("n")) {
      throw Error(ErrorKind::InvalidArgument, "tau_scan needs min, max and n");
    }
    TauScan ts;
    ts.min = number(t.at("min"), "tau_scan.min");
    ts.max = number(t.at("max"), "tau_scan.max");
    if (!t.at("n").is_number_integer() || t.at("n").get<long long>() < 2) {
      throw Error(ErrorKind::InvalidArgument, "tau_scan.n must be an integer >= 2");
    }
    ts.n = static_cast<std::size_t>(t.at("n").get<long long>());
    if (!(ts.min < ts.max)) throw Error(ErrorKind::InvalidArgument, "tau_scan needs min < max");
    c.tau_scan = ts;
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (!o.is_object()) throw Error(ErrorKind::InvalidArgument, "output must be an object");
    if (o.contains("path")) c.output_path = o.at("path").get<std::string>();
    if (o.contains("format")) c.format = parse_format(o.at("format").get<std::string>());
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (!t.is_object()) throw Error(ErrorKind::InvalidArgument, "tolerances must be an object");
    auto set = [&](const char* key, double& field) {
      if (!t.contains(key)) return;
      field = number(t.at(key), key);
      if (!(field > 0.0)) throw Error(ErrorKind::InvalidArgument, std::string(key) + " must be positive");
    };
    set("quad_abs", c.tol.quad_abs);
    set("quad_rel", c.tol.quad_rel);
    set("ode_rel", c.tol.ode_rel);
    set("ode_abs", c.tol.ode_abs);
    set("root", c.tol.root);
    set("radicand", c.tol.radicand);
    set("resonance", c.tol.resonance);
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad config: ") + e.what());
  }
}

/// Overall tolerance override: quadrature and root tolerances.
inline void apply_tolerance(RunConfig& c, double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw Error(ErrorKind::InvalidArgument, "--tol must be a positive number");
  }
  c.tol.quad_abs = tol;
  c.tol.quad_rel = tol;
  c.tol.root = tol;
}

inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// JSON numbers: non-finite values become null.
inline nlohmann::json jnum(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline VorticitySpec vorticity_of(const RunConfig& c) { return VorticitySpec(c.omega_poly); }

inline double resolve_s(const RunConfig& c) {
  if (c.s) return *c.s;
  if (c.R) return s_from_R(vorticity_of(c), *c.R, c.tol);
  throw Error(ErrorKind::InvalidArgument, "config needs one of s and R");
}

inline StreamSolution stream_of(const RunConfig& c) {
  return stream_profile(vorticity_of(c), resolve_s(c), 2001, c.tol);
}

inline void write_kv_csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
  out << "key,value\n";
  for (const auto& [k, v] : kv) out << k << ',' << v << '\n';
}

inline void write_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

inline nlohmann::json header(const char* command) {
  nlohmann::json j;
  j["schema"] = "v1";
  j["command"] = command;
  return j;
}

inline void cmd_stream(const RunConfig& c, std::ostream& out, Format f) {
  const auto st = stream_of(c);
  double s_c = std::numeric_limits<double>::quiet_NaN();
  double R_c = s_c;
  try {
    const auto cp = critical_point(st.vorticity, c.tol);
    s_c = cp.s_c;
    R_c = cp.R_c;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoInteriorMinimum) throw;
  }
  const char* verdict = to_string(froude_condition(st));
  if (f == Format::Csv) {
    write_kv_csv(out, {{"s", fmt(st.s)},
                       {"d", fmt(st.d)},
                       {"R", fmt(st.R)},
                       {"kappa", fmt(st.kappa)},
                       {"F", fmt(st.froude)},
                       {"s_c", fmt(s_c)},
                       {"R_c", fmt(R_c)},
                       {"verdict", verdict}});
    return;
  }
  auto j = header("stream");
  j["s"] = jnum(st.s);
  j["d"] = jnum(st.d);
  j["R"] = jnum(st.R);
  j["kappa"] = jnum(st.kappa);
  j["F"] = jnum(st.froude);
  j["s_c"] = jnum(s_c);
  j["R_c"] = jnum(R_c);
  j["verdict"] = verdict;
  write_json(out, j);
}

inline void cmd_dispersion(const RunConfig& c, std::ostream& out, Format f) {
  const auto st = stream_of(c);
  const auto disp = tau_star(st);
  std::vector<double> taus, sig;
  if (c.tau_scan) {
    taus = numerics::uniform_grid(c.tau_scan->min, c.tau_scan->max, c.tau_scan->n);
    for (double t : taus) sig.push_back(sigma(st, t));
  } else {
    taus = disp.tau_grid;
    sig = disp.sigma_values;
  }
  if (f == Format::Csv) {
    out << "tau,sigma\n";
    for (std::size_t i = 0; i < taus.size(); ++i) out << fmt(taus[i]) << ',' << fmt(sig[i]) << '\n';
    out << "tau_star," << fmt(disp.tau_star) << '\n';
    out << "lambda0," << fmt(disp.lambda0) << '\n';
    return;
  }
  auto j = header("dispersion");
  j["tau"] = nlohmann::json::array();
  j["sigma"] = nlohmann::json::array();
  for (std::size_t i = 0; i < taus.size(); ++i) {
    j["tau"].push_back(jnum(taus[i]));
    j["sigma"].push_back(jnum(sig[i]));
  }
  j["tau_star"] = jnum(disp.tau_star);
  j["lambda0"] = jnum(disp.lambda0);
  j["sigma0"] = jnum(disp.sigma0);
  write_json(out, j);
}

inline void cmd_mu2(const RunConfig& c, std::ostream& out, Format f) {
  const auto st = stream_of(c);
  const auto r = second_order_analysis(st).result;
  const std::vector<std::pair<std::string, double>> fields{
      {"s", st.s},
      {"F", st.froude},
      {"tau_star", r.tau_star},
      {"lambda0", r.lambda0},
      {"lambda2", r.lambda2},
      {"Lambda2", r.Lambda2},
      {"mu2", r.mu2},
      {"I1", r.I1},
      {"I2", r.I2},
      {"relation_residual", r.relation_residual},
      {"mu2_y_form", r.mu2_y_form},
      {"y_form_residual", r.y_form_residual},
      {"mu2_eigen", r.mu2_eigen}};
  if (f == Format::Csv) {
    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& [k, v] : fields) kv.emplace_back(k, fmt(v));
    write_kv_csv(out, kv);
    return;
  }
  auto j = header("mu2");
  for (const auto& [k, v] : fields) j[k] = jnum(v);
  write_json(out, j);
}

inline void cmd_irrotational_scan(const RunConfig& c, std::ostream& out, Format f) {
  const TauScan scan = c.tau_scan.value_or(TauScan{0.5, 3.0, 512});
  if (!(scan.min >= irrotational::kTauMin)) {
    throw Error(ErrorKind::InvalidArgument,
                "tau_scan.min must be at least " + fmt(irrotational::kTauMin));
  }
  const auto taus = numerics::uniform_grid(scan.min, scan.max, scan.n);
  const double tau0 = irrotational::tau0_root();
  const auto window = irrotational::assumption_window();
  struct Row {
    double tau, theta, F, f, lambda2;
    int mu2_sign;
  };
  std::vector<Row> rows;
  for (double t : taus) {
    const auto ch = irrotational::chain(t);
    // mu2 = -4 lambda2 I1 / I2 with I1, I2 > 0.
    const int sgn = ch.lambda2 < 0.0 ? 1 : (ch.lambda2 > 0.0 ? -1 : 0);
    rows.push_back({t, ch.theta, ch.froude, ch.f_value, ch.lambda2, sgn});
  }
  if (f == Format::Csv) {
    out << "tau,theta,F,f,lambda2,mu2_sign\n";
    for (const auto& r : rows) {
      out << fmt(r.tau) << ',' << fmt(r.theta) << ',' << fmt(r.F) << ',' << fmt(r.f) << ','
          << fmt(r.lambda2) << ',' << r.mu2_sign << '\n';
    }
    out << "tau0," << fmt(tau0) << '\n';
    out << "F0," << fmt(window.F_high) << '\n';
    out << "window_low," << fmt(window.F_low) << '\n';
    out << "window_high," << fmt(window.F_high) << '\n';
    return;
  }
  auto j = header("irrotational-scan");
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"tau", jnum(r.tau)},
                         {"theta", jnum(r.theta)},
                         {"F", jnum(r.F)},
                         {"f", jnum(r.f)},
                         {"lambda2", jnum(r.lambda2)},
                         {"mu2_sign", r.mu2_sign}});
  }
  j["tau0"] = jnum(tau0);
  j["F0"] = jnum(window.F_high);
  j["window_low"] = jnum(window.F_low);
  j["window_high"] = jnum(window.F_high);
  j["window_low_source"] = window.F_low_source;
  j["analytic_bound"] = jnum(window.analytic_bound);
  j["analytic_bound_sufficient"] = window.analytic_bound_sufficient;
  write_json(out, j);
}

/// Runs a subcommand; errors are reported on err and mapped to exit codes.
inline int run(const std::string& command, RunConfig config, std::ostream& out, std::ostream& err) {
  try {
    const bool needs_stream = command != "irrotational-scan";
    if (needs_stream && !config.s && !config.R) {
      throw Error(ErrorKind::InvalidArgument, "config needs one of s and R");
    }
    const Format f = config.format.value_or(command == "mu2" ? Format::Json : Format::Csv);
    std::ostringstream buf;
    if (command == "stream") {
      cmd_stream(config, buf, f);
    } else if (command == "dispersion") {
      cmd_dispersion(config, buf, f);
    } else if (command == "mu2") {
      cmd_mu2(config, buf, f);
    } else if (command == "irrotational-scan") {
      cmd_irrotational_scan(config, buf, f);
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown command '" + command + "'");
    }
    if (config.output_path.empty()) {
      out << buf.str();
    } else {
      std::ofstream file(config.output_path);
      if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write '" + config.output_path + "'");
      file << buf.str();
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
}

}  // namespace stokes_branch::cli
