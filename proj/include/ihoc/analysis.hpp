#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ihoc/transcription.hpp"

namespace ihoc {

// ---------------------------------------------------------------------------
// Error metrics

enum class EvalGrid {
  Nodes,    // collocation points
  Uniform,  // 101 equispaced times on [0, 10]
};

std::string to_string(EvalGrid g);
EvalGrid parse_eval_grid(std::string_view name);

struct ErrorReport {
  double mae_xu = 0.0;
  double ae_j = 0.0;
  EvalGrid grid = EvalGrid::Uniform;
  int points = 0;
};

std::vector<double> uniform_times(double t0 = 0.0, double t1 = 10.0,
                                  int count = 101);

ErrorReport error_report(const Trajectory& traj, const ExactSolution& exact,
                         EvalGrid grid = EvalGrid::Uniform);

// ---------------------------------------------------------------------------
// Truncation bounds

/// Sup norm of G_n + G_{n+1} on [-1, 1) as used by the bounds: 2 for
/// alpha >= 0, a Gamma-function expression for -1/2 < alpha < 0.
double radau_poly_norm(int n, double alpha);

/// Bound on the collocated integral truncation error at tau_j given
/// A_sup = sup |psi^(n+1)|. Throws RangeError on overflow.
double truncation_bound(int n, double alpha, double A_sup, double tau_j);

/// Bound on the cost quadrature truncation error given A_sup = sup |eta^(n+1)|.
double cost_truncation_bound(int n, double alpha, double A_sup);

struct BoundEvaluation {
  int n = 0;
  double alpha = 0.0;
  double K = 0.0;      // leading coefficient of G_{n+1}
  double gnorm = 0.0;  // radau_poly_norm
  Vec bound_at_node;
};

BoundEvaluation evaluate_bounds(const RadauGrid& grid, double A_sup);

// ---------------------------------------------------------------------------
// Single solves

struct RunSpec {
  int n = 10;
  double alpha = 0.5;
  double L = 1.0;
  MapKind map = MapKind::Logarithmic;
  GuessPreset guess = GuessPreset::Ones;
  TranscriptionForm form = TranscriptionForm::Generic;
  double epsilon = kDefaultSwitchEpsilon;
};

struct RunResult {
  RunSpec spec;
  SolveReport report;
  Trajectory trajectory;
  std::optional<ErrorReport> errors;
  int domain_violations = 0;
  double kkt_norm = 0.0;  // sup norm of the Lagrangian gradient at the optimum
  double max_tprime = 0.0;
  double min_gap = 0.0;  // min_j (1 - tau_j)
};

RunResult run_point(const IhocProblem& problem, const RunSpec& spec,
                    const SolverConfig& cfg = {},
                    EvalGrid grid = EvalGrid::Uniform);

// ---------------------------------------------------------------------------
// Sweeps

struct SweepAxes {
  std::vector<int> n;
  std::vector<double> alpha;
  std::vector<double> L;
  std::vector<MapKind> maps{MapKind::Logarithmic};
  std::vector<GuessPreset> guesses{GuessPreset::Ones};

  /// Cartesian product in n, alpha, L, map, guess order (last varies
  /// fastest). Throws std::invalid_argument if any axis is empty.
  std::vector<RunSpec> points() const;
};

struct SweepRecord {
  int n = 0;
  double alpha = 0.0;
  double L = 0.0;
  MapKind map = MapKind::Logarithmic;
  GuessPreset guess = GuessPreset::Ones;
  std::string status;  // SolveStatus name, or "error"
  int iters = 0;
  double mae_xu = 0.0;
  double ae_j = 0.0;
  double J_n = 0.0;

  bool converged() const { return status == "converged"; }
};

struct SweepOptions {
  SolverConfig solver;
  EvalGrid grid = EvalGrid::Uniform;
  TranscriptionForm form = TranscriptionForm::Generic;
  int jobs = 1;
  /// Receives every record in axis order as soon as it and all earlier
  /// records are complete. Called from one thread at a time.
  std::function<void(const SweepRecord&)> on_record;
};

std::vector<SweepRecord> sweep(const IhocProblem& problem,
                               const SweepAxes& axes,
                               const SweepOptions& opts = {});

/// Record with the smallest finite mae_xu for each n, ascending in n.
std::vector<SweepRecord> best_per_n(const std::vector<SweepRecord>& records);

/// 17 significant digits, round-trip exact for binary64.
std::string format_number(double v);

void write_sweep_header(std::ostream& out);
void write_sweep_row(std::ostream& out, const SweepRecord& r);

/// Parses CSV written by write_sweep_header/row. Throws std::runtime_error
/// naming the line on malformed input.
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Divergence profile

struct DivergenceRow {
  int n = 0;
  std::string status;
  double mae_xu = 0.0;
  double ae_j = 0.0;
  double max_tprime = 0.0;
  double min_gap = 0.0;
  std::string error;  // set when the solve threw
};

/// Solves at each n (ascending). Per-row failures are recorded, not thrown.
std::vector<DivergenceRow> divergence_profile(
    const IhocProblem& problem, MapKind map, double alpha, double L,
    const std::vector<int>& n_list, const SolverConfig& cfg = {},
    EvalGrid grid = EvalGrid::Uniform);

// ---------------------------------------------------------------------------
// Stability studies

struct LogFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double r2 = 0.0;
};

/// Least-squares fit y ~ c1 + c2 ln n.
LogFit fit_log(const std::vector<int>& n, const std::vector<double>& y);

struct LebesgueRow {
  int n = 0;
  double alpha = 0.0;
  double lambda = 0.0;
};

struct LebesgueStudy {
  std::vector<LebesgueRow> rows;
  LogFit fit;
};

/// Lebesgue constants of the switched weights at one alpha over n_list,
/// sampling density_per_node * (n + 1) points.
LebesgueStudy lebesgue_study(double alpha, const std::vector<int>& n_list,
                             int density_per_node = 50);

/// Max relative errors of the closed-form (E1), first-switch (E2) and
/// second-switch (E3) weights against the normalized product formula.
struct WeightErrorRow {
  int n = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
};

WeightErrorRow weight_errors(double alpha, int n, double epsilon);

}  // namespace ihoc
