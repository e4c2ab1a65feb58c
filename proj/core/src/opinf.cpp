#include "gasrom/opinf.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gasrom/error.hpp"
#include "gasrom/tikhonov.hpp"

namespace gasrom {

Eigen::Index OperatorSet::width(Eigen::Index r, Eigen::Index q) const {
  Eigen::Index d = 0;
  if (constant) d += 1;
  if (linear) d += r;
  if (quadratic) d += r * (r + 1) / 2;
  if (cubic) d += r * (r + 1) * (r + 2) / 6;
  if (input) d += q;
  return d;
}

std::uint8_t OperatorSet::bits() const noexcept {
  return static_cast<std::uint8_t>((constant ? 1 : 0) | (linear ? 2 : 0) | (quadratic ? 4 : 0) | (cubic ? 8 : 0) |
                                   (input ? 16 : 0));
}

OperatorSet OperatorSet::from_bits(std::uint8_t bits) {
  if (bits & ~0x1Fu) throw FormatError("operator flags byte has unknown bits set");
  return {(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0, (bits & 8) != 0, (bits & 16) != 0};
}

OperatorSet OperatorSet::parse(std::string_view letters) {
  OperatorSet s{false, false, false, false, false};
  for (char ch : letters) {
    switch (ch) {
      case 'c': s.constant = true; break;
      case 'A': s.linear = true; break;
      case 'H': s.quadratic = true; break;
      case 'G': s.cubic = true; break;
      case 'B': s.input = true; break;
      default:
        throw ConfigError(std::string("unknown operator letter '") + ch + "' (expected c, A, H, G, B)");
    }
  }
  if (!s.any()) throw ConfigError("operator set must include at least one term");
  return s;
}

std::string OperatorSet::letters() const {
  std::string s;
  if (constant) s += 'c';
  if (linear) s += 'A';
  if (quadratic) s += 'H';
  if (cubic) s += 'G';
  if (input) s += 'B';
  return s;
}

Eigen::MatrixXd estimate_derivatives(const Eigen::MatrixXd& reduced, double dt) {
  const Eigen::Index m = reduced.cols();
  if (m < 3) throw DimensionError("estimate_derivatives needs at least 3 columns, got " + std::to_string(m));
  if (!(dt > 0.0)) throw DomainError("estimate_derivatives: dt must be positive");
  Eigen::MatrixXd d(reduced.rows(), m);
  const double inv2dt = 1.0 / (2.0 * dt);
  d.col(0) = (-3.0 * reduced.col(0) + 4.0 * reduced.col(1) - reduced.col(2)) * inv2dt;
  for (Eigen::Index k = 1; k + 1 < m; ++k) d.col(k) = (reduced.col(k + 1) - reduced.col(k - 1)) * inv2dt;
  d.col(m - 1) = (3.0 * reduced.col(m - 1) - 4.0 * reduced.col(m - 2) + reduced.col(m - 3)) * inv2dt;
  return d;
}

Eigen::VectorXd kron_compressed(const Eigen::VectorXd& x) {
  const Eigen::Index r = x.size();
  Eigen::VectorXd out(r * (r + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = i; j < r; ++j) out[k++] = x[i] * x[j];
  }
  return out;
}

Eigen::VectorXd kron3_compressed(const Eigen::VectorXd& x) {
  const Eigen::Index r = x.size();
  Eigen::VectorXd out(r * (r + 1) * (r + 2) / 6);
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = i; j < r; ++j) {
      const double xij = x[i] * x[j];
      for (Eigen::Index k = j; k < r; ++k) out[n++] = xij * x[k];
    }
  }
  return out;
}

namespace {

/// Position of the monomial x_i x_j (i <= j) in kron_compressed order.
Eigen::Index quad_index(Eigen::Index r, Eigen::Index i, Eigen::Index j) {
  return i * r - i * (i - 1) / 2 + (j - i);
}

}  // namespace

Eigen::MatrixXd quadratic_duplication(Eigen::Index r) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(r * r, r * (r + 1) / 2);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) e(i * r + j, quad_index(r, std::min(i, j), std::max(i, j))) = 1.0;
  }
  return e;
}

Eigen::MatrixXd expand_quadratic_operator(const Eigen::MatrixXd& h_compressed) {
  const Eigen::Index rows = h_compressed.rows();
  const Eigen::Index s = h_compressed.cols();
  const auto r = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * static_cast<double>(s) + 1.0) - 1.0) / 2.0));
  if (r * (r + 1) / 2 != s) throw DimensionError("expand_quadratic_operator: column count is not triangular");
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(rows, r * r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      const double w = i == j ? 1.0 : 0.5;
      full.col(i * r + j) = w * h_compressed.col(quad_index(r, std::min(i, j), std::max(i, j)));
    }
  }
  return full;
}

Eigen::MatrixXd build_data_matrix(const Eigen::MatrixXd& reduced, const Eigen::MatrixXd* inputs,
                                  const OperatorSet& ops) {
  if (!ops.any()) throw ConfigError("build_data_matrix: no terms selected");
  if (ops.input && inputs == nullptr) throw ConfigError("build_data_matrix: input term selected but no inputs given");
  if (!ops.input && inputs != nullptr) throw ConfigError("build_data_matrix: inputs given but input term not selected");
  if (inputs != nullptr && inputs->cols() != reduced.cols()) {
    throw DimensionError("build_data_matrix: inputs have " + std::to_string(inputs->cols()) + " columns, states have " +
                         std::to_string(reduced.cols()));
  }
  const Eigen::Index r = reduced.rows();
  const Eigen::Index m = reduced.cols();
  const Eigen::Index q = inputs != nullptr ? inputs->rows() : 0;
  Eigen::MatrixXd d(m, ops.width(r, q));
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::Index col = 0;
    const Eigen::VectorXd x = reduced.col(k);
    if (ops.constant) d(k, col++) = 1.0;
    if (ops.linear) {
      d.row(k).segment(col, r) = x.transpose();
      col += r;
    }
    if (ops.quadratic) {
      const auto x2 = kron_compressed(x);
      d.row(k).segment(col, x2.size()) = x2.transpose();
      col += x2.size();
    }
    if (ops.cubic) {
      const auto x3 = kron3_compressed(x);
      d.row(k).segment(col, x3.size()) = x3.transpose();
      col += x3.size();
    }
    if (ops.input) d.row(k).segment(col, q) = inputs->col(k).transpose();
  }
  return d;
}

Eigen::VectorXd ReducedOperators::rhs(const Eigen::VectorXd& x, const Eigen::VectorXd* u) const {
  Eigen::VectorXd dx = ops.constant ? c : Eigen::VectorXd(Eigen::VectorXd::Zero(rank));
  if (ops.linear) dx.noalias() += A * x;
  if (ops.quadratic) dx.noalias() += H * kron_compressed(x);
  if (ops.cubic) dx.noalias() += G * kron3_compressed(x);
  if (ops.input) {
    if (u == nullptr) throw ConfigError("model has an input operator but no input signal was supplied");
    dx.noalias() += B * (*u);
  }
  return dx;
}

bool ReducedOperators::all_finite() const {
  return c.allFinite() && A.allFinite() && H.allFinite() && G.allFinite() && B.allFinite();
}

ReducedOperators zero_operators(Eigen::Index r, Eigen::Index q, const OperatorSet& ops, double dt) {
  return operators_from_solution(Eigen::MatrixXd::Zero(ops.width(r, q), r), r, q, ops, 0.0, dt);
}

ReducedOperators operators_from_solution(const Eigen::MatrixXd& solution, Eigen::Index r, Eigen::Index q,
                                         const OperatorSet& ops, double lambda, double dt) {
  if (solution.rows() != ops.width(r, q) || solution.cols() != r) {
    throw DimensionError("operators_from_solution: solution shape does not match operator set");
  }
  ReducedOperators out;
  out.rank = r;
  out.input_width = ops.input ? q : 0;
  out.ops = ops;
  out.lambda = lambda;
  out.dt = dt;
  const Eigen::MatrixXd ot = solution.transpose();
  Eigen::Index col = 0;
  auto take = [&](bool on, Eigen::Index width) -> Eigen::MatrixXd {
    if (!on) return Eigen::MatrixXd(r, 0);
    Eigen::MatrixXd block = ot.middleCols(col, width);
    col += width;
    return block;
  };
  const Eigen::MatrixXd c = take(ops.constant, 1);
  out.c = ops.constant ? Eigen::VectorXd(c.col(0)) : Eigen::VectorXd();
  out.A = take(ops.linear, r);
  out.H = take(ops.quadratic, r * (r + 1) / 2);
  out.G = take(ops.cubic, r * (r + 1) * (r + 2) / 6);
  out.B = take(ops.input, q);
  return out;
}

TabulatedInput::TabulatedInput(Eigen::MatrixXd values, double t0, double dt, std::optional<double> period)
    : values_(std::move(values)), t0_(t0), dt_(dt), period_(period) {
  if (values_.cols() < 1) throw DimensionError("TabulatedInput needs at least one sample");
  if (!(dt_ > 0.0)) throw DomainError("TabulatedInput: dt must be positive");
  if (period_ && !(*period_ > 0.0)) throw DomainError("TabulatedInput: period must be positive");
}

Eigen::VectorXd TabulatedInput::operator()(double t) const {
  const double t_end = t0_ + static_cast<double>(values_.cols() - 1) * dt_;
  if (t > t_end && period_) {
    const double shift = std::ceil((t - t_end) / *period_) * *period_;
    t -= shift;
  }
  const double s = (t - t0_) / dt_;
  if (s <= 0.0) return values_.col(0);
  const double last = static_cast<double>(values_.cols() - 1);
  if (s >= last) return values_.col(values_.cols() - 1);
  const auto k = static_cast<Eigen::Index>(std::floor(s));
  const double w = s - static_cast<double>(k);
  return (1.0 - w) * values_.col(k) + w * values_.col(k + 1);
}

ReducedOperators fit_operators(const Eigen::MatrixXd& states, const Eigen::MatrixXd& derivatives,
                               const Eigen::MatrixXd* inputs, const OperatorSet& ops, double lambda, double dt) {
  if (states.rows() != derivatives.rows() || states.cols() != derivatives.cols()) {
    throw DimensionError("fit_operators: states and derivatives differ in shape");
  }
  const auto d = build_data_matrix(states, inputs, ops);
  const auto solution = solve_tikhonov(d, derivatives.transpose(), lambda);
  return operators_from_solution(solution, states.rows(), inputs ? inputs->rows() : 0, ops, lambda, dt);
}

std::vector<double> RegularizationConfig::default_grid() {
  std::vector<double> grid;
  for (int e = -6; e <= 3; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

void RegularizationConfig::validate() const {
  if (grid.empty()) throw ConfigError("regularization grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) throw ConfigError("regularization values must be finite and >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("regularization grid must be sorted ascending");
  }
}

namespace {

Eigen::MatrixXd sample_inputs(const InputFunction& input, double t0, double dt, Eigen::Index m) {
  Eigen::VectorXd first = input(t0);
  Eigen::MatrixXd out(first.size(), m);
  out.col(0) = first;
  for (Eigen::Index k = 1; k < m; ++k) out.col(k) = input(t0 + static_cast<double>(k) * dt);
  return out;
}

double rms(const Eigen::MatrixXd& diff) {
  return diff.size() == 0 ? 0.0 : std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
}

}  // namespace

OpInfFit fit_opinf(const OpInfProblem& problem, const OperatorSet& ops, const RegularizationConfig& reg) {
  reg.validate();
  const auto& train = problem.train;
  const Eigen::Index m = train.cols();
  if (m < 3) throw DimensionError("fit_opinf: training window needs at least 3 columns");
  if (problem.validation.cols() < 1) throw DimensionError("fit_opinf: validation window is empty");
  if (problem.validation.rows() != train.rows()) throw DimensionError("fit_opinf: train/validation rank mismatch");
  if (ops.input != static_cast<bool>(problem.input)) {
    throw ConfigError(ops.input ? "fit_opinf: input operator requested without an input signal"
                                : "fit_opinf: input signal given but input operator not selected");
  }

  const Eigen::MatrixXd derivs = problem.derivatives ? *problem.derivatives : estimate_derivatives(train, problem.dt);
  std::optional<Eigen::MatrixXd> inputs;
  if (ops.input) inputs = sample_inputs(problem.input, problem.t0, problem.dt, m);
  const Eigen::Index q = inputs ? inputs->rows() : 0;

  const auto data = build_data_matrix(train, inputs ? &*inputs : nullptr, ops);
  const TikhonovSolver solver(data, derivs.transpose());

  const Eigen::VectorXd x_last = train.col(m - 1);
  const double t_last = problem.t0 + static_cast<double>(m - 1) * problem.dt;

  OpInfFit fit;
  double best = std::numeric_limits<double>::infinity();
  std::optional<ReducedOperators> best_ops;
  for (double lambda : reg.grid) {
    auto candidate = operators_from_solution(solver.solve(lambda), train.rows(), q, ops, lambda, problem.dt);
    LambdaScore score{lambda, std::numeric_limits<double>::infinity(), true};
    if (candidate.all_finite()) {
      try {
        const auto pred = rollout(candidate, x_last, problem.validation.cols(), problem.input, t_last);
        score.score = rms(pred - problem.validation);
        score.diverged = !std::isfinite(score.score);
        if (score.diverged) score.score = std::numeric_limits<double>::infinity();
      } catch (const RolloutDivergenceError&) {
      }
    }
    fit.sweep.push_back(score);
    if (!score.diverged && score.score < best - 1e-12) {
      best = score.score;
      best_ops = std::move(candidate);
    }
  }
  if (!best_ops) {
    std::string detail;
    for (const auto& s : fit.sweep) detail += " lambda=" + std::to_string(s.lambda) + ":diverged";
    throw FitError("fit_opinf: every regularization value diverged on validation;" + detail);
  }
  fit.operators = std::move(*best_ops);
  return fit;
}

Eigen::MatrixXd rollout(const ReducedOperators& ops, const Eigen::VectorXd& x0, Eigen::Index n_steps,
                        const InputFunction& input, double t0, Eigen::Index block) {
  if (n_steps < 0) throw DimensionError("rollout: negative step count");
  if (block < 1) throw ConfigError("rollout: block size must be >= 1");
  if (x0.size() != ops.rank) throw DimensionError("rollout: initial state length does not match model rank");
  if (ops.ops.input && !input) throw ConfigError("rollout: model has an input operator but no input signal");
  if (!(ops.dt > 0.0)) throw DomainError("rollout: model time step must be positive");

  const double h = ops.dt;
  auto f = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (ops.ops.input) {
      const Eigen::VectorXd u = input(t);
      return ops.rhs(x, &u);
    }
    return ops.rhs(x);
  };

  Eigen::MatrixXd out(ops.rank, n_steps);
  Eigen::VectorXd block_start = x0;
  for (Eigen::Index first = 0; first < n_steps; first += block) {
    const Eigen::Index last = std::min(first + block, n_steps);
    Eigen::VectorXd x = block_start;
    for (Eigen::Index k = first; k < last; ++k) {
      const double t = t0 + static_cast<double>(k) * h;
      const Eigen::VectorXd k1 = f(t, x);
      const Eigen::VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
      const Eigen::VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
      const Eigen::VectorXd k4 = f(t + h, x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite()) {
        throw RolloutDivergenceError("rollout diverged at step " + std::to_string(k + 1), k + 1);
      }
      out.col(k) = x;
    }
    block_start = out.col(last - 1);
  }
  return out;
}

SnapshotMatrix forecast_full(const ReducedOperators& ops, const PodBasis& basis, const SnapshotMatrix& history,
                             Eigen::Index n_steps, const InputFunction& input, Eigen::Index block) {
  if (basis.modes.cols() != ops.rank) throw DimensionError("forecast_full: basis rank does not match model rank");
  if (history.n_times() < 1) throw DimensionError("forecast_full: history is empty");
  if (std::abs(history.dt() - ops.dt) > 1e-9 * ops.dt) {
    throw DimensionError("forecast_full: history time step differs from the model time step");
  }
  const Eigen::VectorXd x0 = project(basis, Eigen::VectorXd(history.values().col(history.n_times() - 1)));
  const double t_last = history.time(history.n_times() - 1);
  const auto reduced = rollout(ops, x0, n_steps, input, t_last, block);
  return reconstruct(basis, reduced, history.time(history.n_times()), history.dt());
}

namespace {

void write_block(io::ByteWriter& w, bool present, const Eigen::MatrixXd& m) {
  w.u8(present ? 1 : 0);
  if (!present) return;
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  w.f64s(std::span(m.data(), static_cast<std::size_t>(m.size())));
}

Eigen::MatrixXd read_block(io::ByteReader& r, bool expected, Eigen::Index rows, Eigen::Index cols, const char* name) {
  const bool present = r.u8() != 0;
  if (present != expected) throw FormatError(std::string("OPI1 block ") + name + " presence contradicts flags");
  if (!present) return Eigen::MatrixXd(rows, 0);
  const auto nr = r.u32();
  const auto nc = r.u32();
  if (nr != rows || nc != cols) throw FormatError(std::string("OPI1 block ") + name + " has unexpected shape");
  Eigen::MatrixXd m(nr, nc);
  r.f64s(std::span(m.data(), static_cast<std::size_t>(m.size())));
  return m;
}

}  // namespace

void write_operators(io::ByteWriter& w, const ReducedOperators& ops) {
  w.magic(kOperatorMagic);
  w.u32(static_cast<std::uint32_t>(ops.rank));
  w.u32(static_cast<std::uint32_t>(ops.input_width));
  w.u8(ops.ops.bits());
  w.f64(ops.lambda);
  w.f64(ops.dt);
  write_block(w, ops.ops.constant, ops.c);
  write_block(w, ops.ops.linear, ops.A);
  write_block(w, ops.ops.quadratic, ops.H);
  write_block(w, ops.ops.cubic, ops.G);
  write_block(w, ops.ops.input, ops.B);
}

ReducedOperators read_operators(io::ByteReader& r) {
  r.expect_magic(kOperatorMagic);
  ReducedOperators ops;
  ops.rank = r.u32();
  ops.input_width = r.u32();
  ops.ops = OperatorSet::from_bits(r.u8());
  ops.lambda = r.f64();
  ops.dt = r.f64();
  const Eigen::Index n = ops.rank;
  const Eigen::MatrixXd c = read_block(r, ops.ops.constant, n, 1, "c");
  if (ops.ops.constant) ops.c = c.col(0);
  ops.A = read_block(r, ops.ops.linear, n, n, "A");
  ops.H = read_block(r, ops.ops.quadratic, n, n * (n + 1) / 2, "H");
  ops.G = read_block(r, ops.ops.cubic, n, n * (n + 1) * (n + 2) / 6, "G");
  ops.B = read_block(r, ops.ops.input, n, ops.input_width, "B");
  return ops;
}

}  // namespace gasrom
