#include "ihoc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "ihoc/analysis.hpp"
#include "ihoc/errors.hpp"

namespace ihoc::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  UsageError(const std::string& flag, const std::string& msg)
      : std::runtime_error(flag + ": " + msg) {}
};

const std::vector<std::string> kSubcommands = {
    "grid", "matrices", "solve", "sweep", "lebesgue", "divergence"};

// ---------------------------------------------------------------------------
// Value parsing

double parse_real(const std::string& s, const std::string& flag) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError(flag, "expected a number, got '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& flag) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError(flag, "expected an integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

// "a,b,c" or an inclusive range "start:stop" / "start:step:stop".
std::vector<double> parse_real_list(const std::string& s,
                                    const std::string& flag) {
  std::vector<double> out;
  for (const std::string& item : split(s, ',')) {
    const auto range = split(item, ':');
    if (range.size() == 1) {
      out.push_back(parse_real(item, flag));
      continue;
    }
    if (range.size() != 2 && range.size() != 3) {
      throw UsageError(flag, "bad range '" + item + "'");
    }
    const double start = parse_real(range.front(), flag);
    const double stop = parse_real(range.back(), flag);
    const double step = range.size() == 3 ? parse_real(range[1], flag) : 1.0;
    if (!(step > 0.0) || stop < start) {
      throw UsageError(flag, "bad range '" + item + "'");
    }
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9));
    for (int k = 0; k <= count; ++k) {
      out.push_back(std::round((start + k * step) * 1e12) / 1e12);
    }
  }
  if (out.empty()) throw UsageError(flag, "empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& flag) {
  std::vector<int> out;
  for (double v : parse_real_list(s, flag)) {
    if (v != std::floor(v)) {
      throw UsageError(flag, "expected integers, got " + format_number(v));
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void check_alpha(double a) {
  if (!(a > -0.5)) throw UsageError("--alpha", "must exceed -1/2");
}

void check_n(int n, int min) {
  if (n < min) {
    throw UsageError("--n", "must be at least " + std::to_string(min));
  }
}

void check_L(double L) {
  if (!(L > 0.0)) throw UsageError("--L", "must be positive");
}

void check_epsilon(double e) {
  if (!(e > 0.0 && e < 1.0)) throw UsageError("--epsilon", "must lie in (0, 1)");
}

MapKind map_from_flag(const std::string& s) {
  try {
    return parse_map_kind(s);
  } catch (const std::invalid_argument&) {
    throw UsageError("--map", "expected algebraic or logarithmic, got '" + s + "'");
  }
}

GuessPreset guess_from_flag(const std::string& s) {
  try {
    return parse_guess_preset(s);
  } catch (const std::invalid_argument&) {
    throw UsageError("--guess", "expected ones or half, got '" + s + "'");
  }
}

IhocProblem problem_from_flag(const std::string& s) {
  try {
    return make_problem(s);
  } catch (const std::invalid_argument&) {
    std::string names;
    for (const auto& p : problem_names()) names += (names.empty() ? "" : ", ") + p;
    throw UsageError("--problem", "unknown problem '" + s + "' (known: " + names + ")");
  }
}

TranscriptionForm form_from_flag(const std::string& s) {
  if (s == "generic") return TranscriptionForm::Generic;
  if (s == "factored") return TranscriptionForm::Factored;
  throw UsageError("--form", "expected generic or factored, got '" + s + "'");
}

EvalGrid grid_from_flag(const std::string& s) {
  try {
    return parse_eval_grid(s);
  } catch (const std::invalid_argument&) {
    throw UsageError("--grid", "expected nodes or uniform, got '" + s + "'");
  }
}

// ---------------------------------------------------------------------------
// Config file: JSON object whose keys mirror the flag names. Values fill in
// flags absent from the command line.

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

std::optional<std::string> find_value(const std::vector<std::string>& args,
                                      const std::string& flag) {
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == flag && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind(flag + "=", 0) == 0) return args[i].substr(flag.size() + 1);
  }
  return std::nullopt;
}

std::string config_scalar(const json& v, const std::string& flag) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  throw UsageError(flag, "unsupported config value " + v.dump());
}

std::vector<std::string> apply_config(std::vector<std::string> args) {
  const auto path = find_value(args, "--config");
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw UsageError("--config", "cannot open '" + *path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("--config", std::string("invalid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw UsageError("--config", "expected a JSON object");

  const bool has_sub = std::any_of(args.begin(), args.end(), [](const auto& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) !=
           kSubcommands.end();
  });
  if (!has_sub && cfg.contains("command")) {
    args.insert(args.begin(), cfg["command"].get<std::string>());
  }
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    const std::string flag = "--" + name;
    if (has_flag(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (const auto& item : value) {
        text += (text.empty() ? "" : ",") + config_scalar(item, flag);
      }
    } else {
      text = config_scalar(value, flag);
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

// ---------------------------------------------------------------------------

struct SolverFlags {
  SolverConfig cfg;

  void attach(CLI::App* sub) {
    sub->add_option("--outer-tol", cfg.outer_tol, "Augmented Lagrangian change tolerance");
    sub->add_option("--inner-grad-tol", cfg.inner_grad_tol, "Inner gradient tolerance");
    sub->add_option("--max-outer", cfg.max_outer, "Outer iteration limit");
    sub->add_option("--max-inner", cfg.max_inner, "Inner iteration limit");
    sub->add_option("--penalty-init", cfg.penalty_init, "Initial penalty");
    sub->add_option("--penalty-growth", cfg.penalty_growth, "Penalty growth factor");
    sub->add_option("--constraint-tol", cfg.constraint_tol, "Constraint violation tolerance");
    sub->add_option("--kkt-tol", cfg.kkt_tol, "Lagrangian gradient tolerance");
  }

  void validate() const {
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      std::string msg = e.what();
      std::string field = msg.substr(0, msg.find(' '));
      std::replace(field.begin(), field.end(), '_', '-');
      throw UsageError("--" + field, msg.substr(msg.find(' ') + 1));
    }
  }
};

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Vec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json record_json(const SweepRecord& r) {
  return {{"n", r.n},           {"alpha", r.alpha},
          {"L", r.L},           {"map", to_string(r.map)},
          {"guess", to_string(r.guess)}, {"status", r.status},
          {"iters", r.iters},   {"mae_xu", number_json(r.mae_xu)},
          {"ae_j", number_json(r.ae_j)}, {"J_n", number_json(r.J_n)}};
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : stdout_(out), err_(err) {}

  int run(std::vector<std::string> args);

 private:
  std::ostream& data() { return file_ ? *file_ : stdout_; }
  bool csv(const std::string& fallback = "csv") const {
    return (format_.empty() ? fallback : format_) == "csv";
  }

  int cmd_grid();
  int cmd_matrices();
  int cmd_solve();
  int cmd_sweep();
  int cmd_lebesgue();
  int cmd_divergence();

  std::ostream& stdout_;
  std::ostream& err_;
  std::unique_ptr<std::ofstream> file_;

  std::string format_, out_path_, config_path_;
  int jobs_ = 0;

  // Shared flag storage.
  std::string n_ = "", alpha_ = "0.5", L_ = "1", map_ = "logarithmic",
              guess_ = "ones", problem_, form_ = "generic", grid_ = "uniform",
              emit_ = "report", variant_ = "B2", which_ = "all",
              summarize_;
  double epsilon_ = kDefaultSwitchEpsilon;
  int density_ = 50;
  bool weight_errors_ = false;
  SolverFlags solver_;
};

int Runner::run(std::vector<std::string> args) {
  args = apply_config(std::move(args));

  CLI::App app{"Gegenbauer-Radau integral pseudospectral solver for "
               "infinite-horizon optimal control",
               "ihoc"};
  app.require_subcommand(1);
  app.add_option("--format", format_, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path_, "Write data to this file");
  app.add_option("--jobs", jobs_, "Concurrent sweep points (0: all cores)");
  app.add_option("--config", config_path_, "JSON file mirroring flag names");

  auto* grid = app.add_subcommand("grid", "GGR nodes, Christoffel numbers, weights");
  grid->add_option("--n", n_, "Number of nodes minus one");
  grid->add_option("--alpha", alpha_, "Gegenbauer index");
  grid->add_option("--epsilon", epsilon_, "Switching parameter");
  grid->add_option("--variant", variant_, "Switching formula")
      ->check(CLI::IsMember({"B1", "B2"}));
  grid->add_flag("--weight-errors", weight_errors_,
                 "Compare weight formulas against the product formula");

  auto* matrices = app.add_subcommand("matrices", "Integration and differentiation matrices");
  matrices->add_option("--n", n_, "Number of nodes minus one")->required();
  matrices->add_option("--alpha", alpha_, "Gegenbauer index");
  matrices->add_option("--epsilon", epsilon_, "Switching parameter");
  matrices->add_option("--which", which_, "Q, D or all")
      ->check(CLI::IsMember({"Q", "D", "all"}));

  auto* solve = app.add_subcommand("solve", "Solve one problem instance");
  auto* sweep = app.add_subcommand("sweep", "Cartesian-product parameter sweep");
  auto* divergence = app.add_subcommand("divergence", "Error profile over n");
  for (CLI::App* sub : {solve, sweep, divergence}) {
    sub->add_option("--problem", problem_, "example1-a, example1-b or example2");
    sub->add_option("--alpha", alpha_, "Gegenbauer index (list for sweep)");
    sub->add_option("--L", L_, "Map scale (list for sweep)");
    sub->add_option("--map", map_, "algebraic or logarithmic");
    sub->add_option("--grid", grid_, "Error grid: nodes or uniform");
    solver_.attach(sub);
  }
  for (CLI::App* sub : {solve, sweep}) {
    sub->add_option("--guess", guess_, "Initial guess: ones or half");
    sub->add_option("--form", form_, "generic or factored");
  }
  solve->add_option("--n", n_, "Number of nodes minus one")->required();
  solve->add_option("--epsilon", epsilon_, "Switching parameter");
  sweep->add_option("--n", n_, "List or range of n");
  sweep->add_option("--summarize", summarize_, "Summarize an existing sweep CSV");
  divergence->add_option("--n", n_, "Ascending list or range of n")->required();

  auto* lebesgue = app.add_subcommand("lebesgue", "Lebesgue constants and log fit");
  lebesgue->add_option("--alpha", alpha_, "List of Gegenbauer indices");
  lebesgue->add_option("--n", n_, "List or range of n");
  lebesgue->add_option("--density", density_, "Samples per node");

  for (CLI::App* sub : {solve, lebesgue, divergence}) {
    sub->add_option("--emit", emit_, "report or plotdata")
        ->check(CLI::IsMember({"report", "plotdata"}));
  }
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    stdout_ << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (jobs_ < 0) throw UsageError("--jobs", "must be nonnegative");
    if (!out_path_.empty()) {
      file_ = std::make_unique<std::ofstream>(out_path_);
      if (!*file_) throw UsageError("--out", "cannot open '" + out_path_ + "'");
    }
    if (grid->parsed()) return cmd_grid();
    if (matrices->parsed()) return cmd_matrices();
    if (solve->parsed()) return cmd_solve();
    if (sweep->parsed()) return cmd_sweep();
    if (lebesgue->parsed()) return cmd_lebesgue();
    return cmd_divergence();
  } catch (const UsageError& e) {
    err_ << "error: " << e.what() << '\n';
    return kUsage;
  }
}

int Runner::cmd_grid() {
  const double alpha = parse_real(alpha_, "--alpha");
  check_alpha(alpha);
  if (n_.empty()) throw UsageError("--n", "is required");
  const int n = parse_int(n_, "--n");
  check_n(n, 0);
  check_epsilon(epsilon_);
  std::ostream& out = data();

  if (weight_errors_) {
    const WeightErrorRow r = weight_errors(alpha, n, epsilon_);
    if (csv()) {
      out << "n,alpha,epsilon,e1,e2,e3\n"
          << r.n << ',' << format_number(r.alpha) << ','
          << format_number(r.epsilon) << ',' << format_number(r.e1) << ','
          << format_number(r.e2) << ',' << format_number(r.e3) << '\n';
    } else {
      write_json(out, {{"n", r.n}, {"alpha", r.alpha}, {"epsilon", r.epsilon},
                       {"e1", r.e1}, {"e2", r.e2}, {"e3", r.e3}});
    }
    return kOk;
  }

  auto grid = std::make_shared<const RadauGrid>(ggr_nodes(GegenbauerBasis(alpha), n));
  const BarycentricWeights w = weights_switch(
      grid, epsilon_, variant_ == "B1" ? SwitchVariant::B1 : SwitchVariant::B2);
  if (csv()) {
    out << "node,christoffel,xi\n";
    for (int j = 0; j < grid->size(); ++j) {
      out << format_number(grid->nodes[j]) << ','
          << format_number(grid->christoffel[j]) << ','
          << format_number(w.xi[j]) << '\n';
    }
  } else {
    write_json(out, {{"n", n},
                     {"alpha", alpha},
                     {"nodes", vector_json(grid->nodes)},
                     {"christoffel", vector_json(grid->christoffel)},
                     {"xi", vector_json(w.xi)}});
  }
  return kOk;
}

int Runner::cmd_matrices() {
  const int n = parse_int(n_, "--n");
  const double alpha = parse_real(alpha_, "--alpha");
  check_n(n, 1);
  check_alpha(alpha);
  check_epsilon(epsilon_);
  auto grid = std::make_shared<const RadauGrid>(ggr_nodes(GegenbauerBasis(alpha), n));
  const BarycentricWeights w = weights_switch(grid, epsilon_);
  const bool want_q = which_ != "D", want_d = which_ != "Q";
  std::ostream& out = data();

  std::optional<IntegrationMatrix> q;
  std::optional<DifferentiationMatrix> d;
  if (want_q) q = build_grim(w);
  if (want_d) d = build_grdm(w);

  if (csv()) {
    out << "matrix,row,col,value\n";
    auto dump = [&](const char* name, const Mat& m) {
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          out << name << ',' << i << ',' << j << ',' << format_number(m(i, j)) << '\n';
    };
    if (q) {
      dump("Q", q->Q);
      dump("cost", q->cost_row.transpose());
    }
    if (d) dump("D", d->D);
  } else {
    json j = {{"n", n}, {"alpha", alpha}, {"nodes", vector_json(grid->nodes)}};
    if (q) {
      j["Q"] = matrix_json(q->Q);
      j["cost_row"] = vector_json(q->cost_row);
    }
    if (d) j["D"] = matrix_json(d->D);
    write_json(out, j);
  }
  return kOk;
}

int Runner::cmd_solve() {
  if (problem_.empty()) throw UsageError("--problem", "is required");
  const IhocProblem problem = problem_from_flag(problem_);
  RunSpec spec;
  spec.n = parse_int(n_, "--n");
  spec.alpha = parse_real(alpha_, "--alpha");
  spec.L = parse_real(L_, "--L");
  spec.map = map_from_flag(map_);
  spec.guess = guess_from_flag(guess_);
  spec.form = form_from_flag(form_);
  spec.epsilon = epsilon_;
  check_n(spec.n, 1);
  check_alpha(spec.alpha);
  check_L(spec.L);
  check_epsilon(spec.epsilon);
  const EvalGrid grid = grid_from_flag(grid_);
  solver_.validate();

  RunResult r;
  try {
    r = run_point(problem, spec, solver_.cfg, grid);
  } catch (const std::exception& e) {
    err_ << "error: solve failed: " << e.what() << '\n';
    return kNotConverged;
  }
  const bool converged = r.report.status == SolveStatus::Converged;
  std::ostream& out = data();

  if (emit_ == "plotdata") {
    out << 't';
    for (int k = 0; k < problem.nx; ++k) out << ",x" << k + 1;
    for (int k = 0; k < problem.nu; ++k) out << ",u" << k + 1;
    if (problem.exact) {
      for (int k = 0; k < problem.nx; ++k) out << ",x" << k + 1 << "_exact";
      for (int k = 0; k < problem.nu; ++k) out << ",u" << k + 1 << "_exact";
    }
    out << '\n';
    for (double t : uniform_times()) {
      out << format_number(t);
      const Vec x = r.trajectory.state_at(t), u = r.trajectory.control_at(t);
      for (int k = 0; k < x.size(); ++k) out << ',' << format_number(x[k]);
      for (int k = 0; k < u.size(); ++k) out << ',' << format_number(u[k]);
      if (problem.exact) {
        const Vec xe = problem.exact->state(t), ue = problem.exact->control(t);
        for (int k = 0; k < xe.size(); ++k) out << ',' << format_number(xe[k]);
        for (int k = 0; k < ue.size(); ++k) out << ',' << format_number(ue[k]);
      }
      out << '\n';
    }
  } else if (csv("json")) {
    SweepRecord rec;
    rec.n = spec.n;
    rec.alpha = spec.alpha;
    rec.L = spec.L;
    rec.map = spec.map;
    rec.guess = spec.guess;
    rec.status = to_string(r.report.status);
    rec.iters = r.report.outer_iters;
    rec.J_n = r.report.cost;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.mae_xu = r.errors ? r.errors->mae_xu : nan;
    rec.ae_j = r.errors ? r.errors->ae_j : nan;
    write_sweep_header(out);
    write_sweep_row(out, rec);
  } else {
    json j = {{"problem", problem.name},
              {"n", spec.n},
              {"alpha", spec.alpha},
              {"L", spec.L},
              {"map", to_string(spec.map)},
              {"guess", to_string(spec.guess)},
              {"form", to_string(spec.form)},
              {"status", to_string(r.report.status)},
              {"degenerate", r.report.degenerate},
              {"J_n", number_json(r.report.cost)},
              {"outer_iters", r.report.outer_iters},
              {"inner_iters_total", r.report.inner_iters_total},
              {"max_constraint_violation", number_json(r.report.max_constraint_violation)},
              {"kkt_residual", number_json(r.kkt_norm)},
              {"penalty", r.report.penalty},
              {"domain_violations", r.domain_violations},
              {"tau_nodes", vector_json(r.trajectory.tau_nodes)},
              {"t_nodes", vector_json(r.trajectory.t_nodes)},
              {"states", matrix_json(r.trajectory.states)},
              {"controls", matrix_json(r.trajectory.controls)},
              {"multipliers", vector_json(r.report.multipliers)}};
    if (r.errors) {
      j["errors"] = {{"grid", to_string(r.errors->grid)},
                     {"points", r.errors->points},
                     {"mae_xu", number_json(r.errors->mae_xu)},
                     {"ae_j", number_json(r.errors->ae_j)}};
    }
    write_json(out, j);
  }
  if (r.domain_violations > 0) {
    err_ << "warning: " << r.domain_violations
         << " nodal states outside the problem domain\n";
  }
  if (r.report.degenerate) err_ << "warning: penalty reached its cap\n";
  if (!converged) {
    err_ << "error: solver stopped with status " << to_string(r.report.status)
         << '\n';
    return kNotConverged;
  }
  return kOk;
}

int Runner::cmd_sweep() {
  std::ostream& out = data();
  std::ostream& summary = file_ ? stdout_ : err_;
  auto print_best = [&](const std::vector<SweepRecord>& records) {
    summary << "best per n (by mae_xu)\n";
    write_sweep_header(summary);
    for (const SweepRecord& r : best_per_n(records)) write_sweep_row(summary, r);
  };

  if (!summarize_.empty()) {
    std::ifstream in(summarize_);
    if (!in) throw UsageError("--summarize", "cannot open '" + summarize_ + "'");
    std::vector<SweepRecord> records;
    try {
      records = read_sweep_csv(in);
    } catch (const std::runtime_error& e) {
      throw UsageError("--summarize", e.what());
    }
    if (csv()) {
      write_sweep_header(out);
      for (const SweepRecord& r : best_per_n(records)) write_sweep_row(out, r);
    } else {
      json arr = json::array();
      for (const SweepRecord& r : best_per_n(records)) arr.push_back(record_json(r));
      write_json(out, {{"best", arr}, {"records", records.size()}});
    }
    return kOk;
  }

  if (problem_.empty()) throw UsageError("--problem", "is required");
  if (n_.empty()) throw UsageError("--n", "is required");
  const IhocProblem problem = problem_from_flag(problem_);
  SweepAxes axes;
  axes.n = parse_int_list(n_, "--n");
  axes.alpha = parse_real_list(alpha_, "--alpha");
  axes.L = parse_real_list(L_, "--L");
  axes.maps.clear();
  for (const auto& m : split(map_, ',')) axes.maps.push_back(map_from_flag(m));
  axes.guesses.clear();
  for (const auto& g : split(guess_, ',')) axes.guesses.push_back(guess_from_flag(g));
  if (axes.maps.empty()) throw UsageError("--map", "empty list");
  if (axes.guesses.empty()) throw UsageError("--guess", "empty list");
  for (int n : axes.n) check_n(n, 1);
  for (double a : axes.alpha) check_alpha(a);
  for (double l : axes.L) check_L(l);
  solver_.validate();

  SweepOptions opts;
  opts.solver = solver_.cfg;
  opts.grid = grid_from_flag(grid_);
  opts.form = form_from_flag(form_);
  opts.jobs = jobs_;
  const bool as_csv = csv();
  if (as_csv) {
    write_sweep_header(out);
    out.flush();
    opts.on_record = [&](const SweepRecord& r) {
      write_sweep_row(out, r);
      out.flush();
    };
  }
  const std::vector<SweepRecord> records = sweep(problem, axes, opts);
  if (as_csv) {
    print_best(records);
  } else {
    json arr = json::array(), best = json::array();
    for (const SweepRecord& r : records) arr.push_back(record_json(r));
    for (const SweepRecord& r : best_per_n(records)) best.push_back(record_json(r));
    write_json(out, {{"problem", problem.name}, {"records", arr}, {"best", best}});
  }
  const bool any = std::any_of(records.begin(), records.end(),
                               [](const SweepRecord& r) { return r.converged(); });
  if (!any) {
    err_ << "error: no sweep point converged\n";
    return kSweepFailed;
  }
  return kOk;
}

int Runner::cmd_lebesgue() {
  const std::vector<double> alphas = parse_real_list(alpha_, "--alpha");
  const std::vector<int> ns = parse_int_list(n_.empty() ? "5:60" : n_, "--n");
  for (double a : alphas) check_alpha(a);
  for (int n : ns) check_n(n, 0);
  if (density_ < 10) throw UsageError("--density", "must be at least 10");
  std::ostream& out = data();
  json all = json::array();
  if (csv() && emit_ == "plotdata") out << "n,alpha,lambda\n";
  else if (csv()) out << "n,alpha,lambda,c1,c2,r2\n";
  for (double a : alphas) {
    const LebesgueStudy st = lebesgue_study(a, ns, density_);
    if (csv()) {
      for (const LebesgueRow& r : st.rows) {
        out << r.n << ',' << format_number(r.alpha) << ',' << format_number(r.lambda);
        if (emit_ != "plotdata") {
          out << ',' << format_number(st.fit.c1) << ',' << format_number(st.fit.c2)
              << ',' << format_number(st.fit.r2);
        }
        out << '\n';
      }
    } else {
      json rows = json::array();
      for (const LebesgueRow& r : st.rows) rows.push_back({{"n", r.n}, {"lambda", r.lambda}});
      all.push_back({{"alpha", a},
                     {"rows", rows},
                     {"fit", {{"c1", st.fit.c1}, {"c2", st.fit.c2}, {"r2", st.fit.r2}}}});
    }
  }
  if (!csv()) write_json(out, all);
  return kOk;
}

int Runner::cmd_divergence() {
  if (problem_.empty()) throw UsageError("--problem", "is required");
  const IhocProblem problem = problem_from_flag(problem_);
  const std::vector<int> ns = parse_int_list(n_, "--n");
  const double alpha = parse_real(alpha_, "--alpha");
  const double L = parse_real(L_, "--L");
  const MapKind map = map_from_flag(map_);
  for (int n : ns) check_n(n, 1);
  if (!std::is_sorted(ns.begin(), ns.end())) {
    throw UsageError("--n", "must be ascending");
  }
  check_alpha(alpha);
  check_L(L);
  solver_.validate();
  const auto rows =
      divergence_profile(problem, map, alpha, L, ns, solver_.cfg, grid_from_flag(grid_));
  std::ostream& out = data();
  if (csv()) {
    if (emit_ == "plotdata") {
      out << "n,mae_xu,ae_j\n";
      for (const auto& r : rows) {
        out << r.n << ',' << format_number(r.mae_xu) << ','
            << format_number(r.ae_j) << '\n';
      }
    } else {
      out << "n,status,mae_xu,ae_j,max_tprime,min_gap\n";
      for (const auto& r : rows) {
        out << r.n << ',' << r.status << ',' << format_number(r.mae_xu) << ','
            << format_number(r.ae_j) << ',' << format_number(r.max_tprime)
            << ',' << format_number(r.min_gap) << '\n';
      }
    }
  } else {
    json arr = json::array();
    for (const auto& r : rows) {
      json row = {{"n", r.n},
                  {"status", r.status},
                  {"mae_xu", number_json(r.mae_xu)},
                  {"ae_j", number_json(r.ae_j)},
                  {"max_tprime", number_json(r.max_tprime)},
                  {"min_gap", number_json(r.min_gap)}};
      if (!r.error.empty()) row["error"] = r.error;
      arr.push_back(row);
    }
    write_json(out, {{"problem", problem.name},
                     {"map", to_string(map)},
                     {"alpha", alpha},
                     {"L", L},
                     {"rows", arr}});
  }
  for (const auto& r : rows) {
    if (!r.error.empty()) err_ << "warning: n=" << r.n << ": " << r.error << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  try {
    return Runner(out, err).run(args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace ihoc::cli
