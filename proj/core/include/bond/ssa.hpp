#ifndef BOND_SSA_HPP
#define BOND_SSA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bond/expr.hpp"
#include "bond/reactions.hpp"

namespace bond {

struct DiscreteEvent {
  std::size_t reaction = 0;
  Expr rate;                                       ///< concentration-level rate of the reaction
  std::vector<std::pair<std::size_t, int>> jumps;  ///< level change per prime
};

/// Level-based view of a reaction system: concentration c = N * h.
struct DiscreteSystem {
  double h = 1.0;
  std::vector<std::string> labels;
  std::vector<std::string> keys;
  std::vector<double> param_values;
  std::vector<DiscreteEvent> events;
  std::vector<std::int64_t> initial;  ///< initial concentrations rounded to levels

  std::size_t species() const { return keys.size(); }

  /// rate(N * h) / h, or 0 when a jump would drive a level negative. The raw
  /// value is returned unclamped; callers clamp negatives.
  double propensity(std::size_t event, const std::vector<std::int64_t>& levels,
                    std::vector<double>& scratch) const;
};

/// Throws BondError(Domain) unless h > 0.
DiscreteSystem discretize(const ReactionSystem& rs, double h);

struct SsaOptions {
  double t_end = 1.0;
  double sample_dt = 0.0;  ///< 0 means t_end / 100
  std::uint64_t seed = 0;
  bool record_events = false;
};

struct SsaRun {
  std::size_t run = 0;
  std::uint64_t seed = 0;  ///< derived stream seed
  std::vector<double> times;
  std::vector<std::vector<std::int64_t>> levels;
  std::size_t event_count = 0;
  std::vector<double> event_times;         ///< only with record_events
  std::vector<std::size_t> event_indices;  ///< only with record_events
  bool absorbed = false;
  std::vector<std::string> warnings;
};

/// Stream seed of run `run`: splitmix64(seed + golden_gamma * (run + 1)).
std::uint64_t run_seed(std::uint64_t seed, std::size_t run);

/// Gillespie direct method with a std::mt19937_64 stream seeded by
/// run_seed(options.seed, run). Samples the state on a uniform grid with the
/// last event holding.
SsaRun gillespie(const DiscreteSystem& sys, const std::vector<std::int64_t>& x0, const SsaOptions& options,
                 std::size_t run = 0);

/// `runs` independent runs on up to `threads` workers (0 = hardware
/// concurrency), returned in run order.
std::vector<SsaRun> run_ensemble(const DiscreteSystem& sys, const std::vector<std::int64_t>& x0,
                                 const SsaOptions& options, std::size_t runs, unsigned threads = 0);

struct EnsembleStats {
  std::vector<double> times;
  std::vector<std::vector<double>> mean;    ///< concentration units
  std::vector<std::vector<double>> stddev;  ///< sample standard deviation
  std::size_t runs = 0;
};

EnsembleStats aggregate(const DiscreteSystem& sys, const std::vector<SsaRun>& runs);

/// Header `run,t,<key>,...`, concentrations N * h.
std::string runs_csv(const DiscreteSystem& sys, const std::vector<SsaRun>& runs);

/// Header `t,mean(<key>),...,std(<key>),...`.
std::string stats_csv(const DiscreteSystem& sys, const EnsembleStats& stats);

}  // namespace bond

#endif  // BOND_SSA_HPP
