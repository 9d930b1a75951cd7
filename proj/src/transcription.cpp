#include "ihoc/transcription.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ihoc/errors.hpp"

namespace ihoc {

Discretization discretize(double alpha, int n, double epsilon,
                          SwitchVariant variant) {
  if (n < 1) throw DomainError("transcription needs n >= 1");
  GegenbauerBasis basis(alpha);
  auto grid = std::make_shared<const RadauGrid>(ggr_nodes(basis, n));
  Discretization d{grid, weights_switch(grid, epsilon, variant), {}};
  d.grim = build_grim(d.weights);
  return d;
}

GuessPreset parse_guess_preset(std::string_view name) {
  if (name == "ones") return GuessPreset::Ones;
  if (name == "half") return GuessPreset::Half;
  throw std::invalid_argument("unknown guess preset: " + std::string(name));
}

std::string to_string(GuessPreset g) {
  return g == GuessPreset::Ones ? "ones" : "half";
}

std::string to_string(TranscriptionForm f) {
  return f == TranscriptionForm::Generic ? "generic" : "factored";
}

namespace {

Vec interpolate_columns(const BarycentricWeights& w, const Mat& values,
                        double tau) {
  return values * lagrange_basis(w, tau);
}

}  // namespace

Vec Trajectory::state_at(double t) const {
  for (int j = 0; j < t_nodes.size(); ++j) {
    if (t == t_nodes[j]) return states.col(j);
  }
  return interpolate_columns(weights, states, map.inverse(t));
}

Vec Trajectory::control_at(double t) const {
  for (int j = 0; j < t_nodes.size(); ++j) {
    if (t == t_nodes[j]) return controls.col(j);
  }
  return interpolate_columns(weights, controls, map.inverse(t));
}

Transcription::Transcription(IhocProblem problem, Discretization disc,
                             DomainMap map, TranscriptionForm form)
    : problem_(std::move(problem)),
      disc_(std::move(disc)),
      map_(map),
      form_(form) {
  validate_problem(problem_);
  const Vec& tau = disc_.grid->nodes;
  const int m = static_cast<int>(tau.size());
  scale_.resize(m);
  divisor_.resize(m);
  if (form_ == TranscriptionForm::Factored) {
    const bool algebraic = map_.kind() == MapKind::Algebraic;
    prefactor_ = algebraic ? 2.0 * map_.scale() : map_.scale();
    for (int j = 0; j < m; ++j) {
      const double gap = 1.0 - tau[j];
      divisor_[j] = algebraic ? gap * gap : gap;
      scale_[j] = prefactor_ / divisor_[j];
    }
  } else {
    for (int j = 0; j < m; ++j) scale_[j] = map_.derivative(1, tau[j]);
    divisor_.setOnes();
  }
  Q_inner_ = disc_.grim.Q.bottomRows(m - 1);
}

int Transcription::num_variables() const {
  return nx() * n() + nu() * (n() + 1);
}

int Transcription::num_constraints() const { return nx() * n(); }

int Transcription::x_index(int k, int j) const {
  if (k < 0 || k >= nx() || j < 1 || j > n()) {
    throw std::out_of_range("x_index out of range");
  }
  return k * n() + j - 1;
}

int Transcription::u_index(int k, int j) const {
  if (k < 0 || k >= nu() || j < 0 || j > n()) {
    throw std::out_of_range("u_index out of range");
  }
  return nx() * n() + k * (n() + 1) + j;
}

Vec Transcription::t_nodes() const {
  const Vec& tau = tau_nodes();
  Vec t(tau.size());
  for (int j = 0; j < tau.size(); ++j) t[j] = map_.forward(tau[j]);
  return t;
}

void Transcription::check_length(const Vec& z) const {
  if (z.size() != num_variables()) {
    std::ostringstream msg;
    msg << "decision vector has length " << z.size() << ", expected "
        << num_variables();
    throw DimensionError(msg.str());
  }
}

Mat Transcription::states(const Vec& z) const {
  check_length(z);
  Mat X(nx(), n() + 1);
  X.col(0) = problem_.x0;
  for (int k = 0; k < nx(); ++k) {
    X.row(k).tail(n()) = z.segment(k * n(), n()).transpose();
  }
  return X;
}

Mat Transcription::controls(const Vec& z) const {
  check_length(z);
  Mat U(nu(), n() + 1);
  for (int k = 0; k < nu(); ++k) {
    U.row(k) = z.segment(nx() * n() + k * (n() + 1), n() + 1).transpose();
  }
  return U;
}

Vec Transcription::pack(const Mat& X, const Mat& U) const {
  if (X.rows() != nx() || X.cols() != n() + 1 || U.rows() != nu() ||
      U.cols() != n() + 1) {
    throw DimensionError("pack: state/control matrix shape mismatch");
  }
  Vec z(num_variables());
  for (int k = 0; k < nx(); ++k) {
    z.segment(k * n(), n()) = X.row(k).tail(n()).transpose();
  }
  for (int k = 0; k < nu(); ++k) {
    z.segment(nx() * n() + k * (n() + 1), n() + 1) = U.row(k).transpose();
  }
  return z;
}

Vec Transcription::initial_guess(GuessPreset preset) const {
  return Vec::Constant(num_variables(),
                       preset == GuessPreset::Ones ? 1.0 : 0.5);
}

Mat Transcription::dynamics_values(const Mat& X, const Mat& U) const {
  Mat F(nx(), n() + 1);
  for (int j = 0; j <= n(); ++j) {
    F.col(j) = problem_.dynamics(X.col(j), U.col(j));
  }
  return F;
}

Vec Transcription::cost_values(const Mat& X, const Mat& U) const {
  Vec g(n() + 1);
  for (int j = 0; j <= n(); ++j) {
    g[j] = problem_.running_cost(X.col(j), U.col(j));
    if (!std::isfinite(g[j])) {
      std::ostringstream msg;
      msg << problem_.name << ": running cost is not finite at node " << j;
      throw RangeError(msg.str());
    }
  }
  return g;
}

// Rows 1..n of the integral operator applied to every state component.
Vec Transcription::apply_integral(const Mat& F) const {
  Mat scaled(F.rows(), F.cols());
  if (form_ == TranscriptionForm::Factored) {
    scaled = F.array().rowwise() / divisor_.transpose().array();
    return prefactor_ * (scaled * Q_inner_.transpose()).reshaped<Eigen::RowMajor>();
  }
  scaled = F.array().rowwise() * scale_.transpose().array();
  return (scaled * Q_inner_.transpose()).reshaped<Eigen::RowMajor>();
}

double Transcription::cost(const Vec& z) const {
  const Vec g = cost_values(states(z), controls(z));
  const Vec& row = disc_.grim.cost_row;
  if (form_ == TranscriptionForm::Factored) {
    return prefactor_ * row.dot(g.cwiseQuotient(divisor_));
  }
  return row.dot(scale_.cwiseProduct(g));
}

Vec Transcription::constraints(const Vec& z) const {
  const Mat X = states(z);
  const Mat F = dynamics_values(X, controls(z));
  Vec c = apply_integral(F);
  for (int k = 0; k < nx(); ++k) {
    for (int j = 1; j <= n(); ++j) {
      c[k * n() + j - 1] += problem_.x0[k] - X(k, j);
    }
  }
  return c;
}

Transcription::NodeDerivatives Transcription::derivatives(const Mat& X,
                                                          const Mat& U) const {
  NodeDerivatives d;
  const int m = n() + 1;
  d.fx.resize(m);
  d.fu.resize(m);
  d.gx.resize(nx(), m);
  d.gu.resize(nu(), m);
  if (problem_.has_jacobians()) {
    for (int j = 0; j < m; ++j) {
      Vec gx, gu;
      problem_.jac_dynamics(X.col(j), U.col(j), d.fx[j], d.fu[j]);
      problem_.grad_cost(X.col(j), U.col(j), gx, gu);
      d.gx.col(j) = gx;
      d.gu.col(j) = gu;
    }
    return d;
  }
  const double root = std::cbrt(std::numeric_limits<double>::epsilon());
  for (int j = 0; j < m; ++j) {
    const Vec x = X.col(j), u = U.col(j);
    d.fx[j].resize(nx(), nx());
    d.fu[j].resize(nx(), nu());
    for (int c = 0; c < nx(); ++c) {
      const double h = root * std::max(1.0, std::abs(x[c]));
      Vec xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      d.fx[j].col(c) =
          (problem_.dynamics(xp, u) - problem_.dynamics(xm, u)) / (2 * h);
      d.gx(c, j) =
          (problem_.running_cost(xp, u) - problem_.running_cost(xm, u)) /
          (2 * h);
    }
    for (int c = 0; c < nu(); ++c) {
      const double h = root * std::max(1.0, std::abs(u[c]));
      Vec up = u, um = u;
      up[c] += h;
      um[c] -= h;
      d.fu[j].col(c) =
          (problem_.dynamics(x, up) - problem_.dynamics(x, um)) / (2 * h);
      d.gu(c, j) =
          (problem_.running_cost(x, up) - problem_.running_cost(x, um)) /
          (2 * h);
    }
  }
  return d;
}

Vec Transcription::cost_gradient(const Vec& z) const {
  return lagrangian_gradient(z, Vec::Zero(num_constraints()));
}

Mat Transcription::constraint_jacobian(const Vec& z) const {
  const Mat X = states(z), U = controls(z);
  const NodeDerivatives d = derivatives(X, U);
  Mat J = Mat::Zero(num_constraints(), num_variables());
  for (int k = 0; k < nx(); ++k) {
    for (int j = 1; j <= n(); ++j) {
      const int row = k * n() + j - 1;
      for (int i = 0; i <= n(); ++i) {
        const double qw = Q_inner_(j - 1, i) * scale_[i];
        if (i >= 1) {
          for (int m = 0; m < nx(); ++m) J(row, m * n() + i - 1) += qw * d.fx[i](k, m);
        }
        for (int m = 0; m < nu(); ++m) J(row, u_index(m, i)) += qw * d.fu[i](k, m);
      }
      J(row, x_index(k, j)) -= 1.0;
    }
  }
  return J;
}

double Transcription::lagrangian(const Vec& z, const Vec& r) const {
  if (r.size() != num_constraints()) {
    throw DimensionError("multiplier vector must have length nx * n");
  }
  return cost(z) + r.dot(constraints(z));
}

Vec Transcription::lagrangian_gradient(const Vec& z, const Vec& r) const {
  if (r.size() != num_constraints()) {
    throw DimensionError("multiplier vector must have length nx * n");
  }
  const Mat X = states(z), U = controls(z);
  const NodeDerivatives d = derivatives(X, U);
  const int m = n() + 1;
  const Vec e = disc_.grim.cost_row.cwiseProduct(scale_);
  // V(k, i) = T'_i sum_j r(k, j) Q(j, i).
  const Mat R = r.reshaped(n(), nx()).transpose();
  const Mat V = (R * Q_inner_).array().rowwise() * scale_.transpose().array();

  Vec grad(num_variables());
  for (int i = 0; i < m; ++i) {
    const Vec vx = d.fx[i].transpose() * V.col(i);
    const Vec vu = d.fu[i].transpose() * V.col(i);
    if (i >= 1) {
      for (int k = 0; k < nx(); ++k) {
        grad[k * n() + i - 1] = e[i] * d.gx(k, i) + vx[k] - R(k, i - 1);
      }
    }
    for (int k = 0; k < nu(); ++k) {
      grad[u_index(k, i)] = e[i] * d.gu(k, i) + vu[k];
    }
  }
  return grad;
}

int Transcription::domain_violations(const Vec& z) const {
  if (!problem_.in_domain) return 0;
  const Mat X = states(z);
  int count = 0;
  for (int j = 0; j < X.cols(); ++j) {
    if (!problem_.in_domain(X.col(j))) ++count;
  }
  return count;
}

Trajectory Transcription::recover(const Vec& z,
                                  const std::vector<double>& t_eval) const {
  Trajectory tr;
  tr.tau_nodes = tau_nodes();
  tr.t_nodes = t_nodes();
  tr.states = states(z);
  tr.controls = controls(z);
  tr.J_n = cost(z);
  tr.t_eval = t_eval;
  tr.weights = disc_.weights;
  tr.map = map_;
  const int count = static_cast<int>(t_eval.size());
  tr.states_eval.resize(nx(), count);
  tr.controls_eval.resize(nu(), count);
  for (int c = 0; c < count; ++c) {
    if (!(t_eval[c] >= 0.0)) {
      throw DomainError("recover: evaluation times must be nonnegative");
    }
    tr.states_eval.col(c) = tr.state_at(t_eval[c]);
    tr.controls_eval.col(c) = tr.control_at(t_eval[c]);
  }
  return tr;
}

NlpFunctions make_nlp(std::shared_ptr<const Transcription> t) {
  NlpFunctions nlp;
  nlp.num_variables = t->num_variables();
  nlp.num_constraints = t->num_constraints();
  nlp.cost = [t](const Vec& z) { return t->cost(z); };
  nlp.constraints = [t](const Vec& z) { return t->constraints(z); };
  nlp.lagrangian_gradient = [t](const Vec& z, const Vec& r) {
    return t->lagrangian_gradient(z, r);
  };
  return nlp;
}

}  // namespace ihoc
