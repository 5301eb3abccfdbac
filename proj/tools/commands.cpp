#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <ostream>
#include <sstream>

#include "mg1/asymptotics.hpp"
#include "mg1/csv.hpp"
#include "mg1/errors.hpp"
#include "mg1/generators.hpp"
#include "mg1/kernels.hpp"
#include "mg1/model_io.hpp"
#include "mg1/oracle.hpp"
#include "mg1/truncation.hpp"

namespace mg1::cli {

namespace {

using nlohmann::json;

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "not a number: '" + item + "'");
    }
  }
  return out;
}

TailFamily parse_family(const std::string& name, const std::vector<double>& p) {
  auto need = [&](std::size_t n) {
    if (p.size() != n) throw Error(ErrorCode::ParseError, name + " takes " + std::to_string(n) + " parameters");
  };
  if (name == "pareto") {
    need(2);
    return Pareto{p[0], p[1]};
  }
  if (name == "weibull") {
    need(2);
    return Weibull{p[0], p[1]};
  }
  if (name == "geometric") {
    need(1);
    return Geometric{p[0]};
  }
  throw Error(ErrorCode::ParseError, "unknown family '" + name + "'");
}

// family:params, e.g. pareto:2,1 or integrated-weibull:1,0.5
TailDistribution parse_reference(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "reference must look like family:p1,p2");
  std::string name = spec.substr(0, colon);
  const auto params = split_numbers(spec.substr(colon + 1));
  const std::string prefix = "integrated-";
  if (name.rfind(prefix, 0) == 0) {
    const TailFamily base = parse_family(name.substr(prefix.size()), params);
    check_family(base);
    return Integrated{base};
  }
  const TailFamily fam = parse_family(name, params);
  check_family(fam);
  return std::visit([](const auto& f) { return TailDistribution(f); }, fam);
}

std::vector<long> parse_grid(const std::string& text) {
  std::vector<long> out;
  for (double v : split_numbers(text)) {
    if (v != std::floor(v) || v < 0) throw Error(ErrorCode::ParseError, "grid entries must be nonnegative integers");
    out.push_back(static_cast<long>(v));
  }
  return out;
}

json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_atomic(path, text);
  }
}

struct Options {
  std::string model_path;
  std::string output;
  long horizon = 20;
  long truncate = 0;
  std::string grid = "32,64,128,256";
  long kmax = 5;
  std::string ref = "pareto:2,1";
  long nref = 4096;
  int workers = 0;
  std::vector<long> lemma;
  std::vector<long> uk;
  bool thm41 = false;
  std::string thm_grid = "16,32,64,128";
  long thm_factor = 64;
  double tol = -1.0;
  std::string preset;
  std::vector<int> phased;
  std::uint64_t seed = 1;
  std::string tail = "none";
  double drift = -0.3;
  bool rank_one = false;
  long body = 2;
};

int cmd_validate(const Options& o, std::ostream& out) {
  const MG1Model model = load_model(o.model_path);
  const ValidationReport r = validate(model);
  json j;
  j["irreducible_P"] = r.irreducible_P;
  j["irreducible_A"] = r.irreducible_A;
  j["sigma"] = r.sigma;
  j["m_bar_A"] = vec_json(r.m_bar_A);
  j["m_bar_B"] = vec_json(r.m_bar_B);
  j["m_bar_A_plus"] = vec_json(r.m_bar_A_plus);
  j["varpi"] = vec_json(r.varpi.transpose());
  j["violations"] = json::array();
  for (const auto& v : r.violations) j["violations"].push_back({{"name", v.name}, {"magnitude", v.magnitude}});
  j["ok"] = r.ok();
  emit(o.output, j.dump(2) + "\n", out);
  return r.ok() ? kOk : kViolations;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const MG1Model base = load_model(o.model_path);
  const StationarySolution sol = o.truncate > 0 ? pi_truncated(base, o.truncate, o.horizon) : ramaswami_pi(base, o.horizon);
  CsvTable table({"k", "phase", "pi"});
  for (long k = 0; k <= sol.horizon; ++k) {
    for (Eigen::Index i = 0; i < sol.pi_blocks[k].size(); ++i) {
      table.add_row({std::to_string(k), std::to_string(i + 1), format_number(sol.pi_blocks[k](i))});
    }
  }
  table.add_row({"mass", "", format_number(sol.mass)});
  table.add_row({"residual", "", format_number(sol.balance_residual)});
  emit(o.output, table.str(), out);
  return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const MG1Model model = load_model(o.model_path);
  const TailDistribution f = parse_reference(o.ref);
  SweepOptions so;
  so.workers = o.workers;
  ConvergenceReport rep;
  try {
    rep = convergence_sweep(model, f, parse_grid(o.grid), o.kmax, o.nref, so);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Divergent) throw;
    err << "ReferenceMismatch: " << e.what() << "\n";
    return kComputationError;
  }
  if (rep.c.reference_mismatch) {
    err << "warning: reference mismatch, the double tails vanish relative to F; the limits are vacuous\n";
  }
  CsvTable table({"N", "k", "err_signed", "err_l1", "ratio_F", "ratio_DI", "ratio_pitail", "rel_tv_ratio",
                  "target_theta_pik", "target_thetaDI_pik", "target_pik"});
  for (const auto& r : rep.rows) {
    table.add_row({std::to_string(r.n), std::to_string(r.k), format_number(r.err_signed), format_number(r.err_l1),
                   format_number(r.ratio_F), format_number(r.ratio_DI), format_number(r.ratio_pitail),
                   format_number(r.rel_tv_ratio), format_number(r.target_theta_pik),
                   format_number(r.target_thetaDI_pik), format_number(r.target_pik)});
  }
  emit(o.output, table.str(), out);
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const MG1Model model = load_model(o.model_path);
  const int modes = (o.lemma.empty() ? 0 : 1) + (o.uk.empty() ? 0 : 1) + (o.thm41 ? 1 : 0);
  if (modes != 1) throw Error(ErrorCode::ParseError, "choose exactly one of --lemma41, --uk, --thm41");
  json j;
  bool pass = true;
  if (!o.lemma.empty()) {
    oracle::LemmaOptions lo;
    if (o.tol > 0) lo.tolerance = o.tol;
    const auto r = oracle::verify_difference_formula(model, o.lemma[0], o.lemma[1], o.lemma[2], lo);
    pass = r.pass;
    j = {{"check", "lemma41"}, {"N", r.n}, {"k", r.k}, {"L", r.level_cap}, {"residual", r.residual},
         {"oracle_bias", r.oracle_bias}, {"tolerance", lo.tolerance}, {"lhs", vec_json(r.lhs.transpose())},
         {"rhs", vec_json(r.rhs.transpose())}};
  } else if (!o.uk.empty()) {
    const double tol = o.tol > 0 ? o.tol : 1e-6;
    const auto r = oracle::verify_uk(model, {o.uk[0]}, o.uk[1]).front();
    pass = r.abs_error < tol;
    j = {{"check", "uk"}, {"m", r.m}, {"L", r.level_cap}, {"u_closed", vec_json(r.closed)},
         {"u_oracle", vec_json(r.oracle)}, {"abs_error", r.abs_error}, {"rel_error", r.rel_error},
         {"tolerance", tol}};
  } else {
    const auto grid = parse_grid(o.thm_grid);
    json rows = json::array();
    double previous = INFINITY;
    for (long n : grid) {
      const long n_ref = o.thm_factor * n;
      const StationarySolution ref = pi_truncated(model, n_ref, n_ref);
      const StationarySolution sol = pi_truncated(model, n, n_ref);
      const ErrorMetrics m = error_metrics(ref, sol, 0);
      const bool decreasing = m.tv_total < previous;
      pass = pass && decreasing;
      previous = m.tv_total;
      rows.push_back({{"N", n}, {"N_ref", n_ref}, {"tv_total", m.tv_total}, {"decreasing", decreasing}});
    }
    j = {{"check", "thm41"}, {"rows", rows}};
  }
  j["pass"] = pass;
  emit(o.output, j.dump(2) + "\n", out);
  return pass ? kOk : kViolations;
}

int cmd_generate(const Options& o, std::ostream& out) {
  if (o.preset.empty() == o.phased.empty()) {
    throw Error(ErrorCode::ParseError, "choose exactly one of --preset and --phased");
  }
  std::optional<MG1Model> model;
  if (!o.preset.empty()) {
    model = preset(o.preset);
  } else {
    PhasedSpec spec;
    spec.m0 = o.phased[0];
    spec.m1 = o.phased[1];
    spec.seed = o.seed;
    spec.drift_target = o.drift;
    spec.rank_one_down = o.rank_one;
    spec.body_support = o.body;
    if (o.tail != "none") {
      const auto colon = o.tail.find(':');
      if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "tail must look like family:p1,p2");
      spec.tail = parse_family(o.tail.substr(0, colon), split_numbers(o.tail.substr(colon + 1)));
    }
    model = make_phased(spec);
  }
  emit(o.output, model_to_json(*model), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stationary distributions of M/G/1-type Markov chains and their LI truncations"};
  app.require_subcommand(1);
  Options o;

  auto* validate_cmd = app.add_subcommand("validate", "check the standing assumptions on a model");
  validate_cmd->add_option("model", o.model_path, "model JSON file")->required();
  validate_cmd->add_option("-o,--output", o.output, "write the report here instead of stdout");

  auto* solve_cmd = app.add_subcommand("solve", "stationary distribution via Ramaswami's recursion");
  solve_cmd->add_option("model", o.model_path, "model JSON file")->required();
  solve_cmd->add_option("--horizon", o.horizon, "last level to report")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--truncate", o.truncate, "solve the LI truncation at this N instead")
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("-o,--output", o.output, "CSV output file");

  auto* sweep_cmd = app.add_subcommand("sweep", "truncation error ratios over a grid of N");
  sweep_cmd->add_option("model", o.model_path, "model JSON file")->required();
  sweep_cmd->add_option("--grid", o.grid, "comma-separated truncation levels");
  sweep_cmd->add_option("--kmax", o.kmax, "largest level k reported")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--ref", o.ref, "reference law, e.g. pareto:2,1 or integrated-weibull:1,0.5");
  sweep_cmd->add_option("--nref", o.nref, "truncation level of the reference solution (0: untruncated)")
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--workers", o.workers, "parallel jobs (default MG1_WORKERS or all cores)");
  sweep_cmd->add_option("-o,--output", o.output, "CSV output file");

  auto* verify_cmd = app.add_subcommand("verify", "oracle checks of the difference formula, u(m), convergence");
  verify_cmd->add_option("model", o.model_path, "model JSON file")->required();
  verify_cmd->add_option("--lemma41", o.lemma, "N k L")->expected(3);
  verify_cmd->add_option("--uk", o.uk, "m L")->expected(2);
  verify_cmd->add_flag("--thm41", o.thm41, "total-variation error decreases over --thm-grid");
  verify_cmd->add_option("--thm-grid", o.thm_grid, "grid for --thm41");
  verify_cmd->add_option("--thm-factor", o.thm_factor, "reference level is this multiple of N");
  verify_cmd->add_option("--tol", o.tol, "pass threshold (defaults: 1e-6 for --lemma41 and --uk)");
  verify_cmd->add_option("-o,--output", o.output, "JSON output file");

  auto* generate_cmd = app.add_subcommand("generate", "write a model JSON file");
  generate_cmd->add_option("--preset", o.preset, "named instance")->check(CLI::IsMember(preset_names()));
  generate_cmd->add_option("--phased", o.phased, "M0 M1")->expected(2);
  generate_cmd->add_option("--seed", o.seed, "generator seed");
  generate_cmd->add_option("--tail", o.tail, "tail family, e.g. pareto:3,1, or none");
  generate_cmd->add_option("--drift", o.drift, "target mean drift");
  generate_cmd->add_flag("--rank-one", o.rank_one, "rank-one A(-1)");
  generate_cmd->add_option("--body", o.body, "explicit up-jump support")->check(CLI::NonNegativeNumber);
  generate_cmd->add_option("-o,--output", o.output, "model output file");

  std::vector<std::string> argv_store{"mg1"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(o, out);
    if (solve_cmd->parsed()) return cmd_solve(o, out);
    if (sweep_cmd->parsed()) return cmd_sweep(o, out, err);
    if (verify_cmd->parsed()) return cmd_verify(o, out);
    if (generate_cmd->parsed()) return cmd_generate(o, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == ErrorCode::ParseError ? kParseError : kComputationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kComputationError;
  }
  return kParseError;
}

}  // namespace mg1::cli
