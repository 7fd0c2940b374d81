#include "linamp/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "linamp/figures.hpp"
#include "linamp/gate.hpp"
#include "linamp/moments.hpp"
#include "linamp/phasespace.hpp"

namespace linamp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const T& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "' in " + where);
  }
}

// Exact value of the shortest decimal that round-trips x, so 0.1 means 1/10.
Rational decimal_value(double x) { return moments::parse_rational(json(x).dump()); }

cplx parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(where + " must be a number or [re, im]");
}

std::string num(double x, const char* fmt = "%+.3f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

// Run metadata that would break byte-for-byte reproducibility of the outputs.
void write_sidecar(const fs::path& dir, const std::string& command, const json& detail) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json meta{{"command", command}, {"generated_at", stamp}, {"detail", detail}};
  write_json(dir / (command + ".meta.json"), meta);
}

json certificate_json(const fock::TruncationCertificate& c) {
  return {{"dim", c.dim}, {"trace_defect", c.trace_defect}, {"top_population", c.top_population}};
}

}  // namespace

RunConfig parse_config(const json& j) {
  check_keys(j, {"gain", "ancilla", "input", "dim", "grid", "output", "tol"}, "config");
  RunConfig c;
  c.gain = get(j, "gain", c.gain, "config");
  c.dim = get(j, "dim", c.dim, "config");
  c.tol = get(j, "tol", c.tol, "config");
  if (!(c.gain > 1.0)) throw ConfigError("gain must exceed 1");
  if (c.dim < 2) throw ConfigError("dim must be at least 2");
  if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");

  if (j.contains("ancilla")) {
    const json& a = j["ancilla"];
    check_keys(a, {"type", "nbar", "lambda", "weights", "n"}, "ancilla");
    c.ancilla.type = get(a, "type", c.ancilla.type, "ancilla");
    const std::map<std::string, std::string> needs = {
        {"vacuum", ""}, {"thermal", "nbar"}, {"lambda_family", "lambda"}, {"weights", "weights"}, {"number", "n"}};
    const auto it = needs.find(c.ancilla.type);
    if (it == needs.end()) throw ConfigError("unknown ancilla type '" + c.ancilla.type + "'");
    for (const auto& [key, _] : a.items())
      if (key != "type" && key != it->second)
        throw ConfigError("key '" + key + "' does not apply to ancilla type '" + c.ancilla.type + "'");
    c.ancilla.nbar = get(a, "nbar", c.ancilla.nbar, "ancilla");
    c.ancilla.lambda = get(a, "lambda", c.ancilla.lambda, "ancilla");
    c.ancilla.weights = get(a, "weights", c.ancilla.weights, "ancilla");
    c.ancilla.n = get(a, "n", c.ancilla.n, "ancilla");
    if (c.ancilla.type == "weights" && c.ancilla.weights.empty()) throw ConfigError("ancilla weights are empty");
    if (c.ancilla.nbar < 0.0 || c.ancilla.n < 0) throw ConfigError("ancilla parameters must be nonnegative");
  }

  if (j.contains("input")) {
    const json& in = j["input"];
    check_keys(in, {"type", "beta", "nbar", "n"}, "input");
    c.input.type = get(in, "type", c.input.type, "input");
    const std::map<std::string, std::string> needs = {{"coherent", "beta"}, {"thermal", "nbar"}, {"number", "n"}};
    const auto it = needs.find(c.input.type);
    if (it == needs.end()) throw ConfigError("unknown input type '" + c.input.type + "'");
    for (const auto& [key, _] : in.items())
      if (key != "type" && key != it->second)
        throw ConfigError("key '" + key + "' does not apply to input type '" + c.input.type + "'");
    if (in.contains("beta")) c.input.beta = parse_complex(in["beta"], "input.beta");
    c.input.nbar = get(in, "nbar", c.input.nbar, "input");
    c.input.n = get(in, "n", c.input.n, "input");
    if (c.input.nbar < 0.0 || c.input.n < 0) throw ConfigError("input parameters must be nonnegative");
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, {"extent", "steps"}, "grid");
    c.grid_extent = get(g, "extent", c.grid_extent, "grid");
    c.grid_steps = get(g, "steps", c.grid_steps, "grid");
    if (!(c.grid_extent > 0.0) || c.grid_steps < 2 || c.grid_steps % 2)
      throw ConfigError("grid needs extent > 0 and an even number of steps");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, {"dir", "quasidist"}, "output");
    c.out_dir = get(o, "dir", c.out_dir, "output");
    c.quasidist = get(o, "quasidist", c.quasidist, "output");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json anc{{"type", c.ancilla.type}};
  if (c.ancilla.type == "thermal") anc["nbar"] = c.ancilla.nbar;
  if (c.ancilla.type == "lambda_family") anc["lambda"] = c.ancilla.lambda;
  if (c.ancilla.type == "weights") anc["weights"] = c.ancilla.weights;
  if (c.ancilla.type == "number") anc["n"] = c.ancilla.n;
  json in{{"type", c.input.type}};
  if (c.input.type == "coherent") in["beta"] = {c.input.beta.real(), c.input.beta.imag()};
  if (c.input.type == "thermal") in["nbar"] = c.input.nbar;
  if (c.input.type == "number") in["n"] = c.input.n;
  return {{"gain", c.gain},
          {"ancilla", anc},
          {"input", in},
          {"dim", c.dim},
          {"grid", {{"extent", c.grid_extent}, {"steps", c.grid_steps}}},
          {"output", {{"dir", c.out_dir}, {"quasidist", c.quasidist}}},
          {"tol", c.tol}};
}

fock::AncillaState make_ancilla(const RunConfig& c) {
  const auto& a = c.ancilla;
  try {
    if (a.type == "vacuum") return fock::AncillaState::vacuum();
    if (a.type == "thermal") return fock::AncillaState::thermal(a.nbar, c.dim);
    if (a.type == "lambda_family") return gate::lambda_family(decimal_value(a.lambda));
    if (a.type == "number") return fock::AncillaState::number(a.n);
    std::vector<Rational> exact;
    Rational sum = 0;
    for (double w : a.weights) {
      exact.push_back(decimal_value(w));
      sum += exact.back();
    }
    if (sum == 1) return fock::AncillaState::diagonal_exact(exact);
    return fock::AncillaState::diagonal(a.weights);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("ancilla: ") + e.what());
  }
}

fock::FockOperator make_input(const RunConfig& c) {
  if (c.input.type == "coherent") return fock::coherent_state(c.input.beta, c.dim);
  if (c.input.type == "thermal") return fock::thermal_state(c.input.nbar, c.dim);
  if (c.input.n >= c.dim) throw ConfigError("input number state outside the truncation");
  return fock::number_state(c.input.n, c.dim);
}

CommandResult cmd_amplify(const RunConfig& c) {
  const ampmap::AmplifierSpec spec(c.gain, make_ancilla(c));
  const fock::FockOperator rho = make_input(c);
  const fock::ChannelResult res = ampmap::parametric_run(rho, spec, {c.dim, 0});
  if (!res.cert.within(c.tol))
    throw fock::TruncationError("output trace defect " + std::to_string(res.cert.trace_defect) +
                                    " exceeds " + std::to_string(c.tol) + " at dim " +
                                    std::to_string(c.dim) + "; raise dim",
                                res.cert);
  const fs::path dir = prepare_dir(c.out_dir);
  CommandResult out;
  const cplx mean = moments::mean_field(res.state);
  json moms = json::array();
  for (int k = 1; k <= 4; ++k) moms.push_back({{"k", k}, {"value", moments::noise_moment(res.state, k)}});
  json j{{"config", to_json(c)},
         {"mean_field", {mean.real(), mean.imag()}},
         {"symmetric_variance", moms[0]["value"]},
         {"symmetric_moments", moms},
         {"certificate", certificate_json(res.cert)}};
  write_json(dir / "amplify.json", j);
  out.files.push_back((dir / "amplify.json").string());
  if (c.quasidist) {
    const phase::PhaseGrid grid(c.grid_extent, c.grid_steps);
    for (double s : {-1.0, 0.0, 1.0}) {
      const phase::PhaseFunction f = phase::quasidist(res.state, phase::SOrder(s), grid);
      const fs::path p = dir / ("amplify_quasidist_s" + num(s, "%+.0f") + ".csv");
      std::ofstream os(p);
      phase::write_csv(os, f);
      out.files.push_back(p.string());
    }
  }
  write_sidecar(dir, "amplify", {{"files", out.files}});
  out.message = "amplified state written";
  return out;
}

CommandResult cmd_figure(const std::string& which, const RunConfig& c) {
  const fs::path dir = prepare_dir(c.out_dir);
  CommandResult out;
  const double g = c.gain;
  const cplx beta = c.input.type == "coherent" ? c.input.beta : cplx(1.0);
  if (which == "fig5") {
    const phase::PhaseGrid grid(c.grid_extent, c.grid_steps);
    json summary = json::array();
    for (const auto& panel : figures::fig5_panels(g, beta, grid)) {
      const fs::path p = dir / ("fig5_" + panel.label + ".csv");
      std::ofstream os(p);
      phase::write_csv(os, panel.p, {"figure=fig5", "panel=" + panel.label, "gain=" + num(g, "%.17g"),
                                     "center=" + num(beta.real() * g, "%.17g") + "," + num(beta.imag() * g, "%.17g")});
      out.files.push_back(p.string());
      const double center = phase::added_noise_value(
          panel.lambda ? gate::lambda_family(*panel.lambda) : fock::AncillaState::vacuum(), g,
          phase::ANTINORMAL, 0.0);
      summary.push_back({{"panel", panel.label},
                         {"center_value", center},
                         {"min_value", panel.p.values.real().minCoeff()},
                         {"integral", panel.p.integral().real()}});
    }
    write_json(dir / "fig5.json", {{"gain", g}, {"beta", {beta.real(), beta.imag()}}, {"panels", summary}});
    out.files.push_back((dir / "fig5.json").string());
  } else if (which == "fig6") {
    const fs::path sub = dir / "fig6";
    fs::create_directories(sub);
    const int samples = 4 * c.grid_steps + 1;
    json curves = json::array();
    for (const auto& curve : figures::fig6_curves(g, c.grid_extent, samples)) {
      const std::string label = "lambda_" + num(curve.lambda);
      std::vector<cplx> pts, vals;
      for (size_t i = 0; i < curve.t.size(); ++i) {
        pts.push_back(g * beta + curve.t[i]);
        vals.push_back(curve.values[i]);
      }
      const fs::path p = sub / (label + ".csv");
      std::ofstream os(p);
      phase::write_csv_points(os, pts, vals,
                              {"kind=quasidistribution", "s=1", "figure=fig6", "lambda=" + num(curve.lambda, "%.17g"),
                               "normalization=sampled maximum", "scale=" + num(curve.scale, "%.17g")});
      out.files.push_back(p.string());
      curves.push_back({{"lambda", curve.lambda},
                        {"scale", curve.scale},
                        {"center_is_max", curve.center_is_max},
                        {"negative", curve.negative}});
    }
    json j{{"gain", g},
           {"beta", {beta.real(), beta.imag()}},
           {"center_max_transition", figures::center_max_transition(g, 0.15, 0.30, 1e-9)},
           {"negativity_threshold", figures::negativity_threshold(g, -1.6, -1.2, 1e-12)},
           {"curves", curves}};
    write_json(dir / "fig6.json", j);
    out.files.push_back((dir / "fig6.json").string());
  } else {
    throw ConfigError("unknown figure '" + which + "' (expected fig5 or fig6)");
  }
  write_sidecar(dir, "figure_" + which, {{"files", out.files.size()}});
  out.message = which + " data written";
  return out;
}

CommandResult cmd_gate(const std::string& moments_file, const std::string& kind, int K, double zero_tol,
                       const std::string& out_dir) {
  if (kind != "ak" && kind != "ml") throw ConfigError("gate kind must be 'ak' or 'ml'");
  std::ifstream is(moments_file);
  if (!is) throw ConfigError("cannot open moments file '" + moments_file + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("moments file is not valid JSON: " + std::string(e.what()));
  }
  const char* member = kind == "ak" ? "added_noise_numbers" : "number_moments";
  const json* seq_json = &j;
  if (j.is_object() && !j.contains("kind") && j.contains(member)) seq_json = &j[member];
  moments::MomentSequence seq;
  try {
    seq = moments::moment_sequence_from_json(*seq_json);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("malformed moments file: ") + e.what());
  }
  const moments::MomentKind want = kind == "ak" ? moments::MomentKind::added_noise : moments::MomentKind::number;
  if (seq.kind != want)
    throw ConfigError("moments file holds '" + moments::to_string(seq.kind) + "' but kind " + kind + " was requested");
  const moments::MomentSequence M = kind == "ak" ? moments::ml_from_ak(seq) : seq;
  const int kmax = (M.order() - 1) / 2;
  if (M.order() < 1) throw ConfigError("insufficient K: the file holds no moments");
  if (K < 0) K = kmax;
  if (K > kmax)
    throw ConfigError("insufficient K: order " + std::to_string(K) + " needs " + std::to_string(2 * K + 1) +
                      " moments, file holds " + std::to_string(M.order()));
  const gate::GateVerdict v = gate::stieltjes_classify(M, K, zero_tol);
  json outj{{"input_kind", kind}, {"K", K}, {"verdict", gate::to_json(v)}};
  if (kind == "ak") {
    outj["number_moments"] = moments::to_json(M);
    if (seq.order() >= 4) outj["closed_form_limits"] = gate::to_json(gate::closed_form_limits(seq));
  }
  const fs::path dir = prepare_dir(out_dir);
  write_json(dir / "gate_verdict.json", outj);
  write_sidecar(dir, "gate", {{"moments_file", moments_file}});
  CommandResult out;
  out.files.push_back((dir / "gate_verdict.json").string());
  out.message = gate::to_string(v.status);
  out.exit_code = v.status == gate::GateStatus::unphysical ? kExitUnphysical : kExitOk;
  return out;
}

CommandResult cmd_moments(const RunConfig& c, int K, bool allow_high_order) {
  if (K < 1) throw ConfigError("moment order must be at least 1");
  if (K > 8 && !allow_high_order) throw ConfigError("moment order above 8 needs --allow-high-order");
  const fock::AncillaState sigma = make_ancilla(c);
  const int dim = std::max(c.dim, sigma.levels());
  const moments::MomentSequence A_full = moments::added_noise_numbers(sigma, std::max(K, 4), dim);
  moments::MomentSequence A = A_full;
  A.values.resize(K);
  const moments::MomentSequence M = moments::number_moments(sigma, 2 * K + 1);
  const moments::MomentSequence F = moments::factorial_moments(sigma, K);
  const gate::GateVerdict v = gate::stieltjes_classify(M, K);
  json warnings = json::array();
  for (const auto& w : A_full.warnings) warnings.push_back(w);
  json j{{"ancilla", to_json(c)["ancilla"]},
         {"K", K},
         {"added_noise_numbers", moments::to_json(A)},
         {"number_moments", moments::to_json(M)},
         {"factorial_moments", moments::to_json(F)},
         {"closed_form_limits", gate::to_json(gate::closed_form_limits(A_full))},
         {"gate_verdict", gate::to_json(v)},
         {"warnings", warnings}};
  const fs::path dir = prepare_dir(c.out_dir);
  write_json(dir / "moments.json", j);
  write_sidecar(dir, "moments", {{"K", K}});
  CommandResult out;
  out.files.push_back((dir / "moments.json").string());
  out.message = "moments written";
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Phase-preserving linear amplifier simulator"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_path, out_dir;
  int dim = 0;
  double tol = 0.0;
  app.add_option("--config", config_path, "RunConfig JSON file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--dim", dim, "truncation dimension");
  app.add_option("--tol", tol, "truncation-certificate tolerance");

  auto* amplify = app.add_subcommand("amplify", "run the parametric channel on the configured input");
  auto* figure = app.add_subcommand("figure", "write figure data (fig5 or fig6)");
  std::string which;
  figure->add_option("which", which, "fig5 or fig6")->required();
  auto* gate_cmd = app.add_subcommand("gate", "physicality verdict for a moments file");
  std::string moments_file, kind = "ml";
  int gate_k = -1;
  double zero_tol = 1e-9;
  gate_cmd->add_option("moments_file", moments_file, "MomentSequence JSON")->required();
  gate_cmd->add_option("--kind", kind, "ak or ml");
  gate_cmd->add_option("--K", gate_k, "largest Hankel order");
  gate_cmd->add_option("--zero-tol", zero_tol, "relative zero threshold for measured moments");
  auto* moments_cmd = app.add_subcommand("moments", "added-noise numbers and number moments of the ancilla");
  int order = 4;
  bool high = false;
  moments_cmd->add_option("--order", order, "largest moment order K");
  moments_cmd->add_flag("--allow-high-order", high, "lift the K <= 8 guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) c.out_dir = out_dir;
    if (dim > 0) c.dim = dim;
    if (tol > 0.0) c.tol = tol;
    CommandResult r;
    if (*amplify) r = cmd_amplify(c);
    if (*figure) r = cmd_figure(which, c);
    if (*gate_cmd) r = cmd_gate(moments_file, kind, gate_k, zero_tol, c.out_dir);
    if (*moments_cmd) r = cmd_moments(c, order, high);
    std::cout << r.message << "\n";
    for (const auto& f : r.files) std::cout << "  " << f << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fock::TruncationError& e) {
    std::cerr << "truncation certificate failed: " << e.what() << "\n";
    return kExitTruncation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace linamp::cli
