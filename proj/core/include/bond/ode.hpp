#ifndef BOND_ODE_HPP
#define BOND_ODE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bond/expr.hpp"
#include "bond/reactions.hpp"

namespace bond {

struct OdeSystem {
  std::vector<std::string> labels;
  std::vector<std::string> keys;  ///< canonical prime serializations
  std::vector<std::string> param_names;
  std::vector<double> param_values;
  std::vector<double> initial;
  std::vector<Expr> derivatives;  ///< d x_i / dt

  /// Reaction rates, kept for diagnostics and conservation analysis.
  std::vector<Expr> rates;
  std::vector<std::vector<std::pair<std::size_t, int>>> stoichiometry;

  std::size_t size() const { return derivatives.size(); }
};

/// Symbolic ODEs: for every prime, sum over reactions of net change times
/// rate. Fluxes of one affinity entry with equal net change are summed
/// over any slot whose matches they cover completely, which removes the
/// residual `mu*x/a` quotients of that slot.
OdeSystem build_odes(const ReactionSystem& rs);

/// The vector field at `x`. Throws BondError(Domain) naming the offending
/// reaction if a derivative is not finite.
std::vector<double> eval_field(const OdeSystem& sys, const std::vector<double>& x);

struct IntegrateOptions {
  double rtol = 1e-6;
  double atol = 1e-9;
  double max_step = 0.0;   ///< 0 means t_end / 50
  std::size_t grid = 100;  ///< output intervals; grid + 1 rows
};

struct SolverStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  SolverStats stats;
};

using VectorField = std::function<void(double t, const std::vector<double>& x, std::vector<double>& dx)>;

/// Dormand-Prince 5(4) with adaptive steps, dense output on a uniform grid
/// over [0, t_end] and negative components clipped to 0 after each step.
/// Throws BondError(Stiff) when the step size underflows 1e-14 * t_end.
Trajectory integrate(const VectorField& field, const std::vector<double>& x0, double t_end,
                     const IntegrateOptions& options = {});
Trajectory integrate(const OdeSystem& sys, const std::vector<double>& x0, double t_end,
                     const IntegrateOptions& options = {});

enum class OdeFormat { Text, Latex, Json };

std::string render_odes(const OdeSystem& sys, OdeFormat format);

/// Integer basis of the left null space of the stoichiometric matrix: each
/// vector c satisfies sum_i c_i dx_i/dt = 0 for every reaction.
std::vector<std::vector<std::int64_t>> conservation_laws(const OdeSystem& sys);

/// CSV with header `t,<key>,...`, fields quoted per RFC 4180 when needed.
std::string trajectory_csv(const std::vector<std::string>& columns, const Trajectory& traj);

}  // namespace bond

#endif  // BOND_ODE_HPP
