#pragma once

// Operator Inference: non-intrusive fitting of polynomial latent dynamics
//
//   dx/dt = c + A x + H (x (x) x) + G (x (x) x (x) x) + B u
//
// by Tikhonov-regularized least squares on projected snapshot data, with
// quadratic and cubic products stored as unique monomials.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasrom/binary_io.hpp"
#include "gasrom/pod.hpp"
#include "gasrom/tikhonov.hpp"

namespace gasrom {

/// Which polynomial terms enter the model.
struct OperatorSet {
  bool constant = true;
  bool linear = true;
  bool quadratic = true;
  bool cubic = false;
  bool input = false;

  /// Column count of the data matrix for state dimension r and input width q.
  Eigen::Index width(Eigen::Index r, Eigen::Index q) const;
  bool any() const noexcept { return constant || linear || quadratic || cubic || input; }

  std::uint8_t bits() const noexcept;
  static OperatorSet from_bits(std::uint8_t bits);
  /// Letters from "cAHGB", e.g. "cAH".
  static OperatorSet parse(std::string_view letters);
  std::string letters() const;

  bool operator==(const OperatorSet&) const = default;
};

/// Central differences inside, second-order one-sided stencils at both ends.
Eigen::MatrixXd estimate_derivatives(const Eigen::MatrixXd& reduced, double dt);

/// x_i x_j for i <= j, lexicographic; length r(r+1)/2.
Eigen::VectorXd kron_compressed(const Eigen::VectorXd& x);
/// x_i x_j x_k for i <= j <= k, lexicographic; length r(r+1)(r+2)/6.
Eigen::VectorXd kron3_compressed(const Eigen::VectorXd& x);

/// r^2 x r(r+1)/2 duplication map E with x (x) x = E kron_compressed(x).
Eigen::MatrixXd quadratic_duplication(Eigen::Index r);
/// Full r x r^2 quadratic operator acting on x (x) x, splitting each
/// off-diagonal coefficient evenly between (i, j) and (j, i).
Eigen::MatrixXd expand_quadratic_operator(const Eigen::MatrixXd& h_compressed);

/// One row per time step: [1 | x^T | kron(x)^T | kron3(x)^T | u^T], only the
/// selected blocks. `inputs` must be given iff ops.input is set.
Eigen::MatrixXd build_data_matrix(const Eigen::MatrixXd& reduced, const Eigen::MatrixXd* inputs,
                                  const OperatorSet& ops);

struct ReducedOperators {
  Eigen::Index rank = 0;
  Eigen::Index input_width = 0;
  OperatorSet ops;
  Eigen::VectorXd c;  // r
  Eigen::MatrixXd A;  // r x r
  Eigen::MatrixXd H;  // r x r(r+1)/2
  Eigen::MatrixXd G;  // r x r(r+1)(r+2)/6
  Eigen::MatrixXd B;  // r x q
  double lambda = 0.0;
  double dt = 0.0;

  /// Right-hand side of the latent ODE.
  Eigen::VectorXd rhs(const Eigen::VectorXd& x, const Eigen::VectorXd* u = nullptr) const;
  bool all_finite() const;
};

/// Zero operators of the given shape.
ReducedOperators zero_operators(Eigen::Index r, Eigen::Index q, const OperatorSet& ops, double dt);

/// Splits a d x r least-squares solution into operator blocks.
ReducedOperators operators_from_solution(const Eigen::MatrixXd& solution, Eigen::Index r, Eigen::Index q,
                                         const OperatorSet& ops, double lambda, double dt);

/// Input signal u(t); empty when the model has no input term.
using InputFunction = std::function<Eigen::VectorXd(double)>;

/// Linear interpolation in a table sampled at t0 + k dt. Past the end the
/// table continues periodically when a period is given, otherwise it holds
/// the last sample.
class TabulatedInput {
 public:
  TabulatedInput(Eigen::MatrixXd values, double t0, double dt, std::optional<double> period = std::nullopt);
  Eigen::VectorXd operator()(double t) const;
  Eigen::Index width() const noexcept { return values_.rows(); }

 private:
  Eigen::MatrixXd values_;
  double t0_;
  double dt_;
  std::optional<double> period_;
};

/// Single solve on given states/derivatives (columns may concatenate several
/// trajectories). `inputs` is q x M when ops.input is set.
ReducedOperators fit_operators(const Eigen::MatrixXd& states, const Eigen::MatrixXd& derivatives,
                               const Eigen::MatrixXd* inputs, const OperatorSet& ops, double lambda, double dt);

struct RegularizationConfig {
  std::vector<double> grid = default_grid();

  /// 1e-6 ... 1e3, ten logarithmically spaced values.
  static std::vector<double> default_grid();
  void validate() const;
};

struct LambdaScore {
  double lambda = 0.0;
  double score = 0.0;  // validation RMSE in reduced coordinates, +inf when diverged
  bool diverged = false;
};

struct OpInfFit {
  ReducedOperators operators;
  std::vector<LambdaScore> sweep;
};

struct OpInfProblem {
  Eigen::MatrixXd train;                      // r x m, m >= 3
  Eigen::MatrixXd validation;                 // r x n_val, n_val >= 1
  std::optional<Eigen::MatrixXd> derivatives; // exact train derivatives when known
  InputFunction input;                        // required iff ops.input
  double t0 = 0.0;                            // time of the first training column
  double dt = 0.0;
};

/// Sweeps the regularization grid: fit on train, roll out across the
/// validation window from the last training state, keep the lambda with the
/// smallest validation RMSE (ties within 1e-12 go to the smaller lambda).
/// Throws FitError when every rollout diverges.
OpInfFit fit_opinf(const OpInfProblem& problem, const OperatorSet& ops, const RegularizationConfig& reg);

/// Fourth-order Runge-Kutta at the model's dt. Returns r x n_steps states at
/// t0 + k dt for k = 1..n_steps. Emission proceeds in blocks of `block`
/// steps, each restarting from the previous block's last emitted state.
/// Throws RolloutDivergenceError with the first non-finite step index.
Eigen::MatrixXd rollout(const ReducedOperators& ops, const Eigen::VectorXd& x0, Eigen::Index n_steps,
                        const InputFunction& input = {}, double t0 = 0.0, Eigen::Index block = 10);

/// Projects the last history column, rolls out n_steps, and reconstructs the
/// full state on the continuing time grid.
SnapshotMatrix forecast_full(const ReducedOperators& ops, const PodBasis& basis, const SnapshotMatrix& history,
                             Eigen::Index n_steps, const InputFunction& input = {}, Eigen::Index block = 10);

inline constexpr std::string_view kOperatorMagic = "OPI1";

// OPI1: "OPI1" | u32 r | u32 q | u8 flags | f64 lambda | f64 dt |
//       for c, A, H, G, B: u8 present [| u32 rows | u32 cols | f64 column-major]
void write_operators(io::ByteWriter& w, const ReducedOperators& ops);
ReducedOperators read_operators(io::ByteReader& r);

}  // namespace gasrom
