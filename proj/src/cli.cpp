#include "cvls/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cvls/design.hpp"
#include "cvls/io.hpp"

namespace cvls::cli {

namespace {

using io::json;

struct Options {
  std::string system_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  double tol = 1e-8;
  std::string spectrum;
  bool normal = false;
  std::string q_path, r_path;
  std::string gain_path, observer_path;
  std::string x0, z0, u = "zero";
  double horizon = -1.0;
  double dt = 0.01;
};

std::uint64_t resolveSeed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("BIMATRIX_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError(std::string("BIMATRIX_SEED is not an unsigned integer: ") + env);
  }
  return kDefaultSeed;
}

/// Inline JSON when the text starts with '[' or '{', otherwise a file path.
json jsonArgument(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("malformed inline JSON: ") + e.what());
    }
  }
  return io::readJsonFile(text);
}

/// Bimatrix from a file holding either the bimatrix itself or a report
/// whose results carry it under `key`.
BimatrixD bimatrixArgument(const std::string& path, const char* key) {
  const json j = io::readJsonFile(path);
  if (j.is_object() && j.contains("results") && j["results"].contains(key)) {
    return io::bimatrixFromJson(j["results"][key]);
  }
  return io::bimatrixOrMatrixFromJson(j);
}

json fingerprint(const CxSystem& sys) {
  return json{{"domain", toString(sys.domain())},
              {"n", sys.states()},
              {"m", sys.inputs()},
              {"p", sys.outputs()},
              {"normal", sys.isNormal()},
              {"antilinear", sys.isAntilinear()}};
}

json report(const std::string& verb, const CxSystem& sys, std::uint64_t seed) {
  return json{{"verb", verb}, {"tool_version", kToolVersion}, {"seed", seed}, {"system", fingerprint(sys)}};
}

void emit(const Options& o, const json& j, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (o.out_path.empty()) {
    out << text;
  } else {
    io::writeTextFile(o.out_path, text);
  }
}

void requireVerified(bool ok, const std::string& what) {
  if (!ok) throw NumericalError(what + " failed verification against --tol");
}

json analyzeVerb(const Options& o, std::uint64_t seed) {
  const CxSystem sys = io::readSystemFile(o.system_path);
  const StructureReport r = analyze(sys);
  json j = report("analyze", sys, seed);
  j["results"] = {{"controllable", r.controllable}, {"observable", r.observable},
                  {"stabilizable", r.stabilizable}, {"detectable", r.detectable},
                  {"asymptotically_stable", r.stable},  {"spectrum", io::toJson(r.spectrum)}};
  // Margins are +inf (written as null) when no spectrum point was tested.
  j["diagnostics"] = {{"controllability_margin", r.controllability_margin},
                      {"observability_margin", r.observability_margin},
                      {"stabilizability_margin", r.stabilizability_margin},
                      {"detectability_margin", r.detectability_margin},
                      {"spectral_abscissa", r.spectrum.empty() ? 0.0 : r.spectrum.abscissa()},
                      {"spectral_radius", r.spectrum.empty() ? 0.0 : r.spectrum.radius()}};
  return j;
}

json placeVerb(const Options& o, std::uint64_t seed) {
  const CxSystem sys = io::readSystemFile(o.system_path);
  std::mt19937_64 rng(seed);
  const Spectrum requested = io::spectrumFromJson(jsonArgument(o.spectrum));
  json j = report("place", sys, seed);
  GainBimatrix k;
  Spectrum target;
  if (o.normal) {
    k = assignEigenvaluesNormal(sys, requested, rng);
    std::vector<cdouble> both(requested.begin(), requested.end());
    for (const cdouble v : requested) both.push_back(std::conj(v));
    target = Spectrum(std::move(both));
  } else {
    target = requested.conjugateCompleted();
    k = assignEigenvalues(sys, target, rng);
  }
  const Spectrum achieved = spectrum(closedLoop(sys, k));
  const double miss = matchingDistance(achieved, target);
  requireVerified(miss <= std::max(o.tol, 1e-6), "eigenvalue assignment");
  j["results"] = {{"gain", io::toJson(k)}, {"normal_feedback", o.normal}, {"target_spectrum", io::toJson(target)}};
  j["diagnostics"] = {{"achieved_spectrum", io::toJson(achieved)}, {"spectrum_match_distance", miss}};
  return j;
}

json stabilizeVerb(const Options& o, std::uint64_t seed) {
  const CxSystem sys = io::readSystemFile(o.system_path);
  std::mt19937_64 rng(seed);
  const GainBimatrix k = stabilize(sys, rng);
  const CxSystem cl = closedLoop(sys, k);
  const Spectrum achieved = spectrum(cl);
  requireVerified(isAsymptoticallyStable(cl), "stabilization");
  json j = report("stabilize", sys, seed);
  j["results"] = {{"gain", io::toJson(k)}};
  j["diagnostics"] = {{"closed_loop_spectrum", io::toJson(achieved)},
                      {"closed_loop_stable", true},
                      {"spectral_abscissa", achieved.empty() ? 0.0 : achieved.abscissa()},
                      {"spectral_radius", achieved.empty() ? 0.0 : achieved.radius()}};
  return j;
}

HermBimatrixD weightArgument(const std::string& path, Eigen::Index order) {
  if (path.empty()) return HermBimatrixD::identity(order);
  return HermBimatrixD(io::bimatrixOrMatrixFromJson(jsonArgument(path)));
}

json lqrVerb(const Options& o, std::uint64_t seed) {
  const CxSystem sys = io::readSystemFile(o.system_path);
  std::mt19937_64 rng(seed);
  const WeightPair w(weightArgument(o.q_path, sys.states()), weightArgument(o.r_path, sys.inputs()));
  const LqrSolution s = lqr(sys, w, rng);
  const Spectrum achieved = spectrum(closedLoop(sys, s.gain));
  requireVerified(s.residual_bimatrix <= o.tol && s.residual_lifted <= o.tol, "Riccati solution");
  json j = report("lqr", sys, seed);
  j["results"] = {{"gain", io::toJson(s.gain)}, {"p", io::toJson(s.p.bimatrix())}};
  j["diagnostics"] = {{"riccati_residual", s.residual},
                      {"riccati_residual_bimatrix", s.residual_bimatrix},
                      {"riccati_residual_lifted", s.residual_lifted},
                      {"iterations", s.iterations},
                      {"p_min_eigenvalue", minEigenvalue(s.p)},
                      {"closed_loop_spectrum", io::toJson(achieved)}};
  return j;
}

json observerVerb(const Options& o, std::uint64_t seed) {
  const CxSystem sys = io::readSystemFile(o.system_path);
  std::mt19937_64 rng(seed);
  const Spectrum target = io::spectrumFromJson(jsonArgument(o.spectrum)).conjugateCompleted();
  const BimatrixD l = designObserver(sys, target, rng);
  const Spectrum achieved = eigenvalues(sys.a() + l * sys.c());
  const double miss = matchingDistance(achieved, target);
  requireVerified(miss <= std::max(o.tol, 1e-6), "observer placement");
  json j = report("observer", sys, seed);
  j["results"] = {{"observer_gain", io::toJson(l)}, {"target_spectrum", io::toJson(target)}};
  j["diagnostics"] = {{"error_spectrum", io::toJson(achieved)}, {"spectrum_match_distance", miss}};
  return j;
}

std::vector<CVector> inputSamples(const std::string& source, Eigen::Index m, std::size_t count) {
  if (source.empty() || source == "zero") return {};
  const json j = jsonArgument(source);
  if (j.is_object() && j.contains("samples")) {
    std::vector<CVector> out;
    for (const json& v : j["samples"]) out.push_back(io::vectorFromJson(v));
    if (out.size() != count) {
      throw DimensionError("input file has " + std::to_string(out.size()) + " samples, the grid has " +
                           std::to_string(count));
    }
    return out;
  }
  const CVector u = io::vectorFromJson(j.is_object() && j.contains("constant") ? j["constant"] : j);
  if (u.size() != m) throw DimensionError("constant input has wrong length");
  return std::vector<CVector>(count, u);
}

json simulateVerb(const Options& o, std::uint64_t seed, std::ostream& out) {
  const CxSystem sys = io::readSystemFile(o.system_path);
  if (o.x0.empty()) throw InputError("simulate needs --x0");
  if (!(o.horizon >= 0)) throw InputError("simulate needs a non-negative --horizon");
  CVector x0 = io::vectorFromJson(jsonArgument(o.x0));
  if (x0.size() != sys.states()) throw DimensionError("--x0 has wrong length");

  std::optional<GainBimatrix> k;
  std::optional<BimatrixD> l;
  if (!o.gain_path.empty()) k = bimatrixArgument(o.gain_path, "gain");
  if (!o.observer_path.empty()) l = bimatrixArgument(o.observer_path, "observer_gain");

  std::string mode = "open_loop";
  CxSystem run = sys;
  CVector start = x0;
  if (l) {
    run = k ? observerBasedSystem(sys, *k, *l) : observerErrorSystem(sys, *l);
    mode = k ? "observer_feedback" : "observer";
    CVector z0 = o.z0.empty() ? CVector(CVector::Zero(sys.states())) : io::vectorFromJson(jsonArgument(o.z0));
    if (z0.size() != sys.states()) throw DimensionError("--z0 has wrong length");
    start.resize(2 * sys.states());
    start << x0, z0;
  } else if (k) {
    run = closedLoop(sys, *k);
    mode = "state_feedback";
  }

  const std::vector<double> times = timeGrid(sys.domain(), o.horizon, o.dt);
  const SimTrace trace = stateResponse(run, start, inputSamples(o.u, run.inputs(), times.size()), times);
  if (o.out_path.empty()) {
    io::writeTraceCsv(out, trace);
    return json();
  }
  std::ostringstream csv;
  io::writeTraceCsv(csv, trace);
  io::writeTextFile(o.out_path, csv.str());

  json j = report("simulate", sys, seed);
  j["results"] = {{"trace", o.out_path}, {"mode", mode}, {"samples", trace.size()}};
  j["diagnostics"] = {{"initial_state_norm", trace.states.front().norm()},
                      {"final_state_norm", trace.states.back().norm()},
                      {"asymptotically_stable", isAsymptoticallyStable(run)}};
  return j;
}

json convertVerb(const Options& o, std::uint64_t seed, std::ostream& out) {
  const json in = io::readJsonFile(o.system_path);
  const RealSystem real = in.contains("real_system") ? io::realSystemFromJson(in["real_system"])
                                                     : io::realSystemFromJson(in);
  const CxSystem sys = fromRealSystem(real);
  const double residual = conversionResidual(real);
  requireVerified(residual <= o.tol, "conversion");
  const std::string text = io::systemToJson(sys).dump(2) + "\n";
  if (o.out_path.empty()) {
    out << text;
    return json();
  }
  io::writeTextFile(o.out_path, text);
  json j = report("convert", sys, seed);
  j["results"] = {{"system", o.out_path}};
  j["diagnostics"] = {{"conversion_residual", residual}};
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analysis and design for complex-valued linear systems with conjugate-state coupling", "cvls"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  Options o;
  app.add_option("--seed", o.seed, "Random seed (default: BIMATRIX_SEED or a fixed value)");
  app.add_option("--out", o.out_path, "Output file");
  app.add_option("--tol", o.tol, "Verification tolerance for reported residuals")->check(CLI::PositiveNumber);

  auto withSystem = [&](CLI::App* sub, const char* what) {
    sub->add_option("system", o.system_path, what)->required();
  };
  auto* analyze_cmd = app.add_subcommand("analyze", "Structural properties and spectrum");
  withSystem(analyze_cmd, "System file");
  auto* place_cmd = app.add_subcommand("place", "Eigenvalue assignment by state feedback");
  withSystem(place_cmd, "System file");
  place_cmd->add_option("--spectrum", o.spectrum, "Target list [[re,im],...] or file")->required();
  place_cmd->add_flag("--normal", o.normal, "Restrict to normal feedback u = K1 x (n targets)");
  auto* stabilize_cmd = app.add_subcommand("stabilize", "Some stabilizing state feedback");
  withSystem(stabilize_cmd, "System file");
  auto* lqr_cmd = app.add_subcommand("lqr", "Linear quadratic regulator");
  withSystem(lqr_cmd, "System file");
  lqr_cmd->add_option("--q", o.q_path, "State weight (bimatrix or matrix; default identity)");
  lqr_cmd->add_option("--r", o.r_path, "Input weight (bimatrix or matrix; default identity)");
  auto* observer_cmd = app.add_subcommand("observer", "Full-order observer gain");
  withSystem(observer_cmd, "System file");
  observer_cmd->add_option("--spectrum", o.spectrum, "Error spectrum [[re,im],...] or file")->required();
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate to a CSV trace");
  withSystem(simulate_cmd, "System file");
  simulate_cmd->add_option("--gain", o.gain_path, "Feedback gain file (or a place/stabilize/lqr report)");
  simulate_cmd->add_option("--observer", o.observer_path, "Observer gain file (or an observer report)");
  simulate_cmd->add_option("--x0", o.x0, "Initial state [[re,im],...] or file")->required();
  simulate_cmd->add_option("--z0", o.z0, "Initial observer state (default zero)");
  simulate_cmd->add_option("--u", o.u, "Input file, or 'zero'");
  simulate_cmd->add_option("--horizon", o.horizon, "Final time")->required();
  simulate_cmd->add_option("--dt", o.dt, "Continuous-time grid step")->check(CLI::PositiveNumber);
  auto* convert_cmd = app.add_subcommand("convert", "Rewrite a real even-dimensional system in complex form");
  withSystem(convert_cmd, "Real system file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    const std::uint64_t seed = resolveSeed(o);
    json result;
    if (analyze_cmd->parsed()) {
      emit(o, analyzeVerb(o, seed), out);
    } else if (place_cmd->parsed()) {
      emit(o, placeVerb(o, seed), out);
    } else if (stabilize_cmd->parsed()) {
      emit(o, stabilizeVerb(o, seed), out);
    } else if (lqr_cmd->parsed()) {
      emit(o, lqrVerb(o, seed), out);
    } else if (observer_cmd->parsed()) {
      emit(o, observerVerb(o, seed), out);
    } else if (simulate_cmd->parsed()) {
      result = simulateVerb(o, seed, out);
    } else if (convert_cmd->parsed()) {
      result = convertVerb(o, seed, out);
    }
    // simulate and convert write their artifact to --out; the report goes to out.
    if (!result.is_null()) out << result.dump(2) << "\n";
    return kOk;
  } catch (const InfeasibleError& e) {
    err << "cvls: infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "cvls: error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace cvls::cli
