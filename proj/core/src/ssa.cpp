#include "bond/ssa.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "bond/csv.hpp"
#include "bond/error.hpp"

namespace bond {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGoldenGamma;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform on [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> sample_grid(double t_end, double sample_dt) {
  double dt = sample_dt > 0.0 ? sample_dt : t_end / 100.0;
  auto n = static_cast<std::size_t>(std::max(1.0, std::round(t_end / dt)));
  std::vector<double> grid(n + 1);
  for (std::size_t k = 0; k <= n; ++k) grid[k] = t_end * static_cast<double>(k) / static_cast<double>(n);
  return grid;
}

}  // namespace

double DiscreteSystem::propensity(std::size_t event, const std::vector<std::int64_t>& levels,
                                  std::vector<double>& scratch) const {
  const DiscreteEvent& e = events[event];
  for (const auto& [p, d] : e.jumps) {
    if (levels[p] + d < 0) return 0.0;
  }
  scratch.resize(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) scratch[i] = static_cast<double>(levels[i]) * h;
  EvalEnv env;
  env.params = param_values;
  env.species = scratch;
  return evaluate(e.rate, env) / h;
}

DiscreteSystem discretize(const ReactionSystem& rs, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw BondError(ErrorCode::Domain, "level size h must be positive");
  DiscreteSystem sys;
  sys.h = h;
  sys.labels = rs.labels;
  for (const auto& p : rs.index.primes()) sys.keys.push_back(p.key);
  sys.param_values = rs.param_values;
  for (std::size_t r = 0; r < rs.reactions.size(); ++r) {
    sys.events.push_back(DiscreteEvent{r, rs.reactions[r].rate, rs.reactions[r].net()});
  }
  for (double c : rs.initial) sys.initial.push_back(static_cast<std::int64_t>(std::llround(c / h)));
  return sys;
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t run) {
  return splitmix64(seed + kGoldenGamma * (static_cast<std::uint64_t>(run) + 1));
}

SsaRun gillespie(const DiscreteSystem& sys, const std::vector<std::int64_t>& x0, const SsaOptions& options,
                 std::size_t run) {
  if (!(options.t_end > 0.0)) throw BondError(ErrorCode::Domain, "t_end must be positive");
  if (x0.size() != sys.species()) throw BondError(ErrorCode::Domain, "initial state has the wrong dimension");

  SsaRun out;
  out.run = run;
  out.seed = run_seed(options.seed, run);
  std::mt19937_64 rng(out.seed);

  std::vector<std::int64_t> x = x0;
  for (auto& v : x) v = std::max<std::int64_t>(v, 0);
  const std::vector<double> grid = sample_grid(options.t_end, options.sample_dt);
  out.times = grid;
  out.levels.reserve(grid.size());
  std::size_t next = 0;

  std::vector<double> a(sys.events.size());
  std::vector<double> scratch;
  bool warned = false;
  double t = 0.0;
  while (true) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double v = sys.propensity(i, x, scratch);
      if (!std::isfinite(v)) {
        throw BondError(ErrorCode::Domain, "non-finite propensity for reaction " +
                                               std::to_string(sys.events[i].reaction) + " at t = " +
                                               format_number(t));
      }
      if (v < 0.0) {
        if (!warned) {
          out.warnings.push_back("negative propensity for reaction " + std::to_string(sys.events[i].reaction) +
                                 " at t = " + format_number(t) + " clamped to 0");
          warned = true;
        }
        v = 0.0;
      }
      a[i] = v;
      total += v;
    }
    if (total <= 0.0) {
      out.absorbed = true;
      break;
    }
    double tau = -std::log(1.0 - unit(rng)) / total;
    double t_next = t + tau;
    while (next < grid.size() && grid[next] < t_next) {
      out.levels.push_back(x);
      ++next;
    }
    if (t_next > options.t_end) break;

    double target = unit(rng) * total;
    std::size_t chosen = a.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      acc += a[i];
      if (target < acc) {
        chosen = i;
        break;
      }
    }
    while (a[chosen] == 0.0 && chosen > 0) --chosen;
    for (const auto& [p, d] : sys.events[chosen].jumps) x[p] += d;
    t = t_next;
    ++out.event_count;
    if (options.record_events) {
      out.event_times.push_back(t);
      out.event_indices.push_back(chosen);
    }
  }
  while (next < grid.size()) {
    out.levels.push_back(x);
    ++next;
  }
  return out;
}

std::vector<SsaRun> run_ensemble(const DiscreteSystem& sys, const std::vector<std::int64_t>& x0,
                                 const SsaOptions& options, std::size_t runs, unsigned threads) {
  std::vector<SsaRun> out(runs);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(runs, 1)));

  std::atomic<std::size_t> cursor{0};
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t r = cursor++; r < runs; r = cursor++) out[r] = gillespie(sys, x0, options, r);
    } catch (...) {
      errors[w] = std::current_exception();
      cursor = runs;
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

EnsembleStats aggregate(const DiscreteSystem& sys, const std::vector<SsaRun>& runs) {
  EnsembleStats stats;
  stats.runs = runs.size();
  if (runs.empty()) return stats;
  stats.times = runs.front().times;
  const std::size_t n = sys.species();
  const double count = static_cast<double>(runs.size());
  for (std::size_t k = 0; k < stats.times.size(); ++k) {
    std::vector<double> mean(n, 0.0), sq(n, 0.0);
    for (const auto& r : runs) {
      for (std::size_t i = 0; i < n; ++i) mean[i] += static_cast<double>(r.levels[k][i]) * sys.h;
    }
    for (auto& m : mean) m /= count;
    for (const auto& r : runs) {
      for (std::size_t i = 0; i < n; ++i) {
        double d = static_cast<double>(r.levels[k][i]) * sys.h - mean[i];
        sq[i] += d * d;
      }
    }
    for (auto& s : sq) s = runs.size() > 1 ? std::sqrt(s / (count - 1.0)) : 0.0;
    stats.mean.push_back(std::move(mean));
    stats.stddev.push_back(std::move(sq));
  }
  return stats;
}

std::string runs_csv(const DiscreteSystem& sys, const std::vector<SsaRun>& runs) {
  std::vector<std::string> header{"run", "t"};
  header.insert(header.end(), sys.keys.begin(), sys.keys.end());
  std::string out = csv_row(header);
  for (const auto& r : runs) {
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      std::vector<std::string> fields{std::to_string(r.run), format_number(r.times[k])};
      for (auto v : r.levels[k]) fields.push_back(format_number(static_cast<double>(v) * sys.h));
      out += csv_row(fields);
    }
  }
  return out;
}

std::string stats_csv(const DiscreteSystem& sys, const EnsembleStats& stats) {
  std::vector<std::string> header{"t"};
  for (const auto& k : sys.keys) header.push_back("mean(" + k + ")");
  for (const auto& k : sys.keys) header.push_back("std(" + k + ")");
  std::string out = csv_row(header);
  for (std::size_t k = 0; k < stats.times.size(); ++k) {
    std::vector<std::string> fields{format_number(stats.times[k])};
    for (double v : stats.mean[k]) fields.push_back(format_number(v));
    for (double v : stats.stddev[k]) fields.push_back(format_number(v));
    out += csv_row(fields);
  }
  return out;
}

}  // namespace bond
