#include "ihoc/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ihoc/errors.hpp"
#include "ihoc/special.hpp"

namespace ihoc {

using special::log_gamma;

std::string to_string(EvalGrid g) {
  return g == EvalGrid::Nodes ? "nodes" : "uniform";
}

EvalGrid parse_eval_grid(std::string_view name) {
  if (name == "nodes") return EvalGrid::Nodes;
  if (name == "uniform") return EvalGrid::Uniform;
  throw std::invalid_argument("unknown evaluation grid: " + std::string(name));
}

std::vector<double> uniform_times(double t0, double t1, int count) {
  if (count < 2) throw std::invalid_argument("uniform_times needs count >= 2");
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) {
    t[i] = t0 + (t1 - t0) * i / (count - 1);
  }
  return t;
}

ErrorReport error_report(const Trajectory& traj, const ExactSolution& exact,
                         EvalGrid grid) {
  ErrorReport rep;
  rep.grid = grid;
  rep.ae_j = std::abs(traj.J_n - exact.cost);
  auto accumulate = [&](const Vec& x, const Vec& u, double t) {
    rep.mae_xu = std::max(rep.mae_xu, (x - exact.state(t)).cwiseAbs().maxCoeff());
    rep.mae_xu =
        std::max(rep.mae_xu, (u - exact.control(t)).cwiseAbs().maxCoeff());
    if (!std::isfinite(x.sum() + u.sum())) {
      rep.mae_xu = std::numeric_limits<double>::infinity();
    }
  };
  if (grid == EvalGrid::Nodes) {
    for (int j = 0; j < traj.t_nodes.size(); ++j) {
      accumulate(traj.states.col(j), traj.controls.col(j), traj.t_nodes[j]);
    }
    rep.points = static_cast<int>(traj.t_nodes.size());
  } else {
    const std::vector<double> times = uniform_times();
    for (double t : times) accumulate(traj.state_at(t), traj.control_at(t), t);
    rep.points = static_cast<int>(times.size());
  }
  return rep;
}

// ---------------------------------------------------------------------------

double radau_poly_norm(int n, double alpha) {
  if (!(alpha > -0.5)) throw DomainError("alpha must exceed -1/2");
  if (n < 0) throw DomainError("n must be nonnegative");
  if (alpha >= 0.0) return 2.0;
  const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
  if (n % 2 == 0) {
    const double log_ratio = log_gamma(alpha + 0.5) + log_gamma(0.5 * (n + 1)) -
                             log_sqrt_pi - log_gamma(alpha + 0.5 * (n + 1));
    return std::exp(log_ratio) *
           (1.0 + std::sqrt((n + 1.0) / (2.0 * alpha + n + 1.0)));
  }
  const double log_ratio = log_gamma(alpha + 0.5) + log_gamma(0.5 * n) -
                           log_sqrt_pi - log_gamma(0.5 * n + alpha + 1.0);
  return std::exp(log_ratio) * (std::sqrt(n * (2.0 * alpha + n)) + n) / 2.0;
}

namespace {

// log of Gamma(n+2a+1) Gamma(a+1) / ((n+1)! Gamma(n+a+1) Gamma(2a+1)).
double log_bound_prefactor(int n, double alpha) {
  return log_gamma(n + 2.0 * alpha + 1.0) + log_gamma(alpha + 1.0) -
         special::log_factorial(n + 1) - log_gamma(n + alpha + 1.0) -
         log_gamma(2.0 * alpha + 1.0);
}

void check_bound_inputs(int n, double alpha, double A_sup) {
  if (!(alpha > -0.5)) throw DomainError("alpha must exceed -1/2");
  if (n < 0) throw DomainError("n must be nonnegative");
  if (!(A_sup > 0.0)) throw DomainError("A_sup must be positive");
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw RangeError(std::string(what) + " overflows");
  return v;
}

}  // namespace

double truncation_bound(int n, double alpha, double A_sup, double tau_j) {
  check_bound_inputs(n, alpha, A_sup);
  const double log_b =
      std::log(A_sup) + log_bound_prefactor(n, alpha) - n * std::numbers::ln2;
  return finite_or_throw(
      std::exp(log_b) * (tau_j + 1.0) * radau_poly_norm(n, alpha),
      "truncation bound");
}

double cost_truncation_bound(int n, double alpha, double A_sup) {
  check_bound_inputs(n, alpha, A_sup);
  const double log_b = std::log(A_sup) + log_bound_prefactor(n, alpha) -
                       (n - 1) * std::numbers::ln2;
  return finite_or_throw(std::exp(log_b) * radau_poly_norm(n, alpha),
                         "cost truncation bound");
}

BoundEvaluation evaluate_bounds(const RadauGrid& grid, double A_sup) {
  BoundEvaluation ev;
  ev.n = grid.n;
  ev.alpha = grid.alpha();
  ev.K = grid.basis.leading_coefficient(grid.n + 1);
  ev.gnorm = radau_poly_norm(grid.n, grid.alpha());
  ev.bound_at_node.resize(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    ev.bound_at_node[j] =
        truncation_bound(grid.n, grid.alpha(), A_sup, grid.nodes[j]);
  }
  return ev;
}

// ---------------------------------------------------------------------------

RunResult run_point(const IhocProblem& problem, const RunSpec& spec,
                    const SolverConfig& cfg, EvalGrid grid) {
  auto tr = std::make_shared<const Transcription>(
      problem, discretize(spec.alpha, spec.n, spec.epsilon),
      DomainMap(spec.map, spec.L), spec.form);
  RunResult res;
  res.spec = spec;
  res.report = solve(make_nlp(tr), tr->initial_guess(spec.guess), cfg);
  res.trajectory = tr->recover(res.report.z, {});
  res.domain_violations = tr->domain_violations(res.report.z);
  res.kkt_norm = tr->lagrangian_gradient(res.report.z, res.report.multipliers)
                     .lpNorm<Eigen::Infinity>();
  res.max_tprime = tr->node_scale().maxCoeff();
  res.min_gap = (1.0 - tr->tau_nodes().array()).minCoeff();
  if (problem.exact) res.errors = error_report(res.trajectory, *problem.exact, grid);
  return res;
}

// ---------------------------------------------------------------------------

std::vector<RunSpec> SweepAxes::points() const {
  if (n.empty() || alpha.empty() || L.empty() || maps.empty() ||
      guesses.empty()) {
    throw std::invalid_argument("sweep axes must all be non-empty");
  }
  std::vector<RunSpec> out;
  for (int nv : n)
    for (double a : alpha)
      for (double l : L)
        for (MapKind m : maps)
          for (GuessPreset g : guesses) {
            RunSpec s;
            s.n = nv;
            s.alpha = a;
            s.L = l;
            s.map = m;
            s.guess = g;
            out.push_back(s);
          }
  return out;
}

namespace {

SweepRecord run_record(const IhocProblem& problem, RunSpec spec,
                       const SweepOptions& opts) {
  spec.form = opts.form;
  SweepRecord rec;
  rec.n = spec.n;
  rec.alpha = spec.alpha;
  rec.L = spec.L;
  rec.map = spec.map;
  rec.guess = spec.guess;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const RunResult r = run_point(problem, spec, opts.solver, opts.grid);
    rec.status = to_string(r.report.status);
    rec.iters = r.report.outer_iters;
    rec.J_n = r.report.cost;
    rec.mae_xu = r.errors ? r.errors->mae_xu : nan;
    rec.ae_j = r.errors ? r.errors->ae_j : nan;
  } catch (const std::exception&) {
    rec.status = "error";
    rec.mae_xu = rec.ae_j = rec.J_n = nan;
  }
  return rec;
}

}  // namespace

std::vector<SweepRecord> sweep(const IhocProblem& problem,
                               const SweepAxes& axes,
                               const SweepOptions& opts) {
  const std::vector<RunSpec> specs = axes.points();
  const int count = static_cast<int>(specs.size());
  std::vector<SweepRecord> records(count);
  std::vector<char> done(count, 0);
  int flushed = 0;
  std::mutex mu;
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      SweepRecord rec = run_record(problem, specs[i], opts);
      std::lock_guard<std::mutex> lock(mu);
      records[i] = std::move(rec);
      done[i] = 1;
      while (flushed < count && done[flushed]) {
        if (opts.on_record) opts.on_record(records[flushed]);
        ++flushed;
      }
    }
  };

  int jobs = opts.jobs > 0 ? opts.jobs
                           : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, std::max(1, count));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

std::vector<SweepRecord> best_per_n(const std::vector<SweepRecord>& records) {
  std::map<int, SweepRecord> best;
  for (const SweepRecord& r : records) {
    if (!std::isfinite(r.mae_xu)) continue;
    auto it = best.find(r.n);
    if (it == best.end() || r.mae_xu < it->second.mae_xu) best[r.n] = r;
  }
  std::vector<SweepRecord> out;
  for (auto& [n, r] : best) out.push_back(r);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_header(std::ostream& out) {
  out << "n,alpha,L,map,guess,status,iters,mae_xu,ae_j,J_n\n";
}

void write_sweep_row(std::ostream& out, const SweepRecord& r) {
  out << r.n << ',' << format_number(r.alpha) << ',' << format_number(r.L)
      << ',' << to_string(r.map) << ',' << to_string(r.guess) << ','
      << r.status << ',' << r.iters << ',' << format_number(r.mae_xu) << ','
      << format_number(r.ae_j) << ',' << format_number(r.J_n) << '\n';
}

namespace {

double parse_double(const std::string& s, int line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("line " + std::to_string(line) +
                             ": bad number '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("line " + std::to_string(line) +
                             ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "n,alpha,L,map,guess,status,iters,mae_xu,ae_j,J_n") {
    throw std::runtime_error("line 1: missing or unexpected sweep header");
  }
  std::vector<SweepRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": expected 10 fields");
    }
    SweepRecord r;
    try {
      r.n = parse_int(f[0], lineno);
      r.alpha = parse_double(f[1], lineno);
      r.L = parse_double(f[2], lineno);
      r.map = parse_map_kind(f[3]);
      r.guess = parse_guess_preset(f[4]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " +
                               e.what());
    }
    r.status = f[5];
    r.iters = parse_int(f[6], lineno);
    r.mae_xu = parse_double(f[7], lineno);
    r.ae_j = parse_double(f[8], lineno);
    r.J_n = parse_double(f[9], lineno);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<DivergenceRow> divergence_profile(const IhocProblem& problem,
                                              MapKind map, double alpha,
                                              double L,
                                              const std::vector<int>& n_list,
                                              const SolverConfig& cfg,
                                              EvalGrid grid) {
  if (!std::is_sorted(n_list.begin(), n_list.end())) {
    throw std::invalid_argument("divergence_profile: n_list must be ascending");
  }
  std::vector<DivergenceRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int n : n_list) {
    DivergenceRow row;
    row.n = n;
    try {
      RunSpec spec;
      spec.n = n;
      spec.alpha = alpha;
      spec.L = L;
      spec.map = map;
      const RunResult r = run_point(problem, spec, cfg, grid);
      row.status = to_string(r.report.status);
      row.mae_xu = r.errors ? r.errors->mae_xu : nan;
      row.ae_j = r.errors ? r.errors->ae_j : nan;
      row.max_tprime = r.max_tprime;
      row.min_gap = r.min_gap;
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
      row.mae_xu = row.ae_j = row.max_tprime = row.min_gap = nan;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------

LogFit fit_log(const std::vector<int>& n, const std::vector<double>& y) {
  if (n.size() != y.size() || n.size() < 2) {
    throw std::invalid_argument("fit_log needs matching inputs of length >= 2");
  }
  const int m = static_cast<int>(n.size());
  Mat A(m, 2);
  Vec b(m);
  for (int i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(static_cast<double>(n[i]));
    b[i] = y[i];
  }
  const Vec c = A.colPivHouseholderQr().solve(b);
  const double mean = b.mean();
  const double ss_res = (A * c - b).squaredNorm();
  const double ss_tot = (b.array() - mean).square().sum();
  return {c[0], c[1], ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0};
}

LebesgueStudy lebesgue_study(double alpha, const std::vector<int>& n_list,
                             int density_per_node) {
  LebesgueStudy study;
  GegenbauerBasis basis(alpha);
  std::vector<double> lambdas;
  for (int n : n_list) {
    auto grid = std::make_shared<const RadauGrid>(ggr_nodes(basis, n));
    const double lam =
        lebesgue_constant(weights_switch(grid), density_per_node * (n + 1));
    study.rows.push_back({n, alpha, lam});
    lambdas.push_back(lam);
  }
  if (n_list.size() >= 2) study.fit = fit_log(n_list, lambdas);
  return study;
}

WeightErrorRow weight_errors(double alpha, int n, double epsilon) {
  auto grid =
      std::make_shared<const RadauGrid>(ggr_nodes(GegenbauerBasis(alpha), n));
  const auto ref = direct_weights_normalized(grid->nodes);
  auto max_rel = [&](const BarycentricWeights& w) {
    long double worst = 0.0L;
    const long double scale = -static_cast<long double>(w.xi[0]);
    for (int i = 0; i < w.size(); ++i) {
      const long double v = static_cast<long double>(w.xi[i]) / scale;
      worst = std::max(worst, std::abs(v / ref[i] - 1.0L));
    }
    return static_cast<double>(worst);
  };
  WeightErrorRow row;
  row.n = n;
  row.alpha = alpha;
  row.epsilon = epsilon;
  row.e1 = max_rel(weights_thm(grid));
  row.e2 = max_rel(weights_switch(grid, epsilon, SwitchVariant::B1));
  row.e3 = max_rel(weights_switch(grid, epsilon, SwitchVariant::B2));
  return row;
}

}  // namespace ihoc
