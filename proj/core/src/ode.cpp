#include "bond/ode.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "bond/csv.hpp"
#include "bond/error.hpp"
#include "json_tree.hpp"

namespace bond {

namespace {

using Choices = std::vector<std::size_t>;

// Replaces, for each quotient slot, every complete set of alternatives that
// differ only in that slot by a single wildcard choice.
std::vector<Choices> marginalize(std::vector<Choices> terms, const EntryMatch& match) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j = 0; j < match.slots.size(); ++j) {
      if (match.slots[j].mode != SlotMode::Quotient) continue;
      const std::size_t n = match.slots[j].options.size();
      std::map<Choices, std::vector<std::size_t>> buckets;
      std::vector<Choices> order;
      for (const auto& c : terms) {
        if (c[j] == kAnyOption) {
          order.push_back(c);
          continue;
        }
        Choices rest = c;
        rest[j] = kAnyOption;
        auto [it, inserted] = buckets.try_emplace(rest);
        if (inserted) order.push_back(rest);
        it->second.push_back(c[j]);
      }
      std::vector<Choices> next;
      for (const auto& key : order) {
        auto it = buckets.find(key);
        if (it == buckets.end() || key[j] != kAnyOption) {
          next.push_back(key);
          continue;
        }
        std::vector<std::size_t> values = it->second;
        std::sort(values.begin(), values.end());
        bool complete = values.size() == n;
        for (std::size_t v = 0; complete && v < n; ++v) complete = values[v] == v;
        if (complete) {
          next.push_back(key);
          changed = true;
        } else {
          for (auto v : it->second) {
            Choices c = key;
            c[j] = v;
            next.push_back(c);
          }
        }
        buckets.erase(it);
      }
      terms = std::move(next);
    }
  }
  return terms;
}

double rms_norm(const std::vector<double>& v, const std::vector<double>& scale) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double r = v[i] / scale[i];
    s += r * r;
  }
  return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

std::string latex_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '_': out += "\\_"; break;
      case '#': out += "\\#"; break;
      case '&': out += "\\&"; break;
      case '%': out += "\\%"; break;
      case '{': out += "\\{"; break;
      case '}': out += "\\}"; break;
      case '$': out += "\\$"; break;
      case '\'': out += "'"; break;
      default: out += c;
    }
  }
  return out;
}

std::string latex_symbol(const std::string& name) {
  if (name.size() == 1) return name;
  return "\\mathit{" + latex_escape(name) + "}";
}

std::string latex_species(const std::string& label) {
  bool plain = std::all_of(label.begin(), label.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
  if (plain) return "[\\mathrm{" + latex_escape(label) + "}]";
  return "[\\texttt{" + latex_escape(label) + "}]";
}

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction make(std::int64_t n, std::int64_t d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    return Fraction{n, d};
  }
  Fraction operator-(const Fraction& o) const { return make(num * o.den - o.num * den, den * o.den); }
  Fraction operator*(const Fraction& o) const { return make(num * o.num, den * o.den); }
  Fraction operator/(const Fraction& o) const { return make(num * o.den, den * o.num); }
  bool zero() const { return num == 0; }
};

}  // namespace

OdeSystem build_odes(const ReactionSystem& rs) {
  OdeSystem sys;
  const std::size_t n = rs.index.size();
  sys.labels = rs.labels;
  for (const auto& p : rs.index.primes()) sys.keys.push_back(p.key);
  sys.param_names = rs.param_names;
  sys.param_values = rs.param_values;
  sys.initial = rs.initial;
  for (const auto& r : rs.reactions) {
    sys.rates.push_back(r.rate);
    sys.stoichiometry.push_back(r.net());
  }

  using GroupKey = std::pair<std::size_t, std::vector<std::pair<std::size_t, int>>>;
  std::map<GroupKey, std::vector<Choices>> groups;
  std::vector<GroupKey> order;
  for (const auto& flux : rs.fluxes) {
    auto net = rs.reactions[flux.reaction].net();
    if (net.empty()) continue;
    GroupKey key{flux.match, std::move(net)};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(flux.choices);
  }

  std::vector<std::vector<Expr>> terms(n);
  for (const auto& key : order) {
    const EntryMatch& match = rs.matches[key.first];
    for (const auto& choices : marginalize(groups[key], match)) {
      Expr rate = rs.flux_rate(Flux{key.first, choices, 0});
      for (const auto& [p, nu] : key.second) {
        terms[p].push_back(nu == 1 ? rate : Expr::mul({Expr::constant(nu), rate}));
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    sys.derivatives.push_back(terms[i].empty() ? Expr::constant(0.0) : simplify(Expr::add(terms[i])));
  }
  return sys;
}

std::vector<double> eval_field(const OdeSystem& sys, const std::vector<double>& x) {
  EvalEnv env;
  env.params = sys.param_values;
  env.species = x;
  std::vector<double> dx(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    dx[i] = evaluate(sys.derivatives[i], env);
    if (std::isfinite(dx[i])) continue;
    std::string where = "d[" + sys.labels[i] + "]/dt";
    for (std::size_t r = 0; r < sys.rates.size(); ++r) {
      if (std::isfinite(evaluate(sys.rates[r], env))) continue;
      where = "rate of reaction " + std::to_string(r) + " (" +
              render_text(sys.rates[r], [&](const Expr& leaf) {
                return leaf.var_kind() == VarKind::Species ? "[" + sys.labels[leaf.var_index()] + "]"
                                                          : leaf.var_name();
              }) +
              ")";
      break;
    }
    throw BondError(ErrorCode::Domain, "non-finite value in " + where);
  }
  return dx;
}

Trajectory integrate(const VectorField& field, const std::vector<double>& x0, double t_end,
                     const IntegrateOptions& options) {
  if (!(t_end > 0.0)) throw BondError(ErrorCode::Domain, "t_end must be positive");
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) {
    throw BondError(ErrorCode::Domain, "tolerances must be positive");
  }
  if (options.grid == 0) throw BondError(ErrorCode::Domain, "output grid needs at least one interval");

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  const std::size_t n = x0.size();
  const double h_max = options.max_step > 0.0 ? options.max_step : t_end / 50.0;
  const double h_min = 1e-14 * t_end;

  Trajectory traj;
  auto f = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
    ++traj.stats.rhs_evals;
    field(t, x, dx);
  };

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(0.0, x0[i]);

  std::vector<double> grid(options.grid + 1);
  for (std::size_t k = 0; k <= options.grid; ++k) {
    grid[k] = t_end * static_cast<double>(k) / static_cast<double>(options.grid);
  }
  traj.times.push_back(0.0);
  traj.rows.push_back(x);
  std::size_t next_out = 1;

  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y(n), ynew(n), err(n), scale(n);
  f(0.0, x, k1);

  // Initial step size.
  double h;
  {
    for (std::size_t i = 0; i < n; ++i) scale[i] = options.atol + options.rtol * std::abs(x[i]);
    double dn0 = rms_norm(x, scale);
    double dn1 = rms_norm(k1, scale);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 * t_end : 0.01 * dn0 / dn1;
    h0 = std::min(h0, h_max);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h0 * k1[i];
    f(h0, y, k2);
    for (std::size_t i = 0; i < n; ++i) err[i] = (k2[i] - k1[i]) / h0;
    double dn2 = rms_norm(err, scale);
    double m = std::max(dn1, dn2);
    double h1 = m <= 1e-15 ? std::max(1e-6 * t_end, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    h = std::min({100.0 * h0, h1, h_max});
  }

  double t = 0.0;
  bool last_rejected = false;
  while (t < t_end) {
    bool final_step = false;
    if (t + h >= t_end || t + 1.01 * h >= t_end) {
      h = t_end - t;
      final_step = true;
    }
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * a21 * k1[i];
    f(t + c2 * h, y, k2);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, y, k3);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, y, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    f(t + c5 * h, y, k5);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    f(t + h, y, k6);
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = x[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    f(t + h, ynew, k7);
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      scale[i] = options.atol + options.rtol * std::max(std::abs(x[i]), std::abs(ynew[i]));
    }
    double e = rms_norm(err, scale);
    if (!std::isfinite(e)) e = 1e10;

    if (e <= 1.0) {
      ++traj.stats.steps;
      double t_new = final_step ? t_end : t + h;
      while (next_out < grid.size() && grid[next_out] <= t_new) {
        double theta = (grid[next_out] - t) / h;
        double theta1 = 1.0 - theta;
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) {
          double ydiff = ynew[i] - x[i];
          double bspl = h * k1[i] - ydiff;
          double r5 = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
          double v = x[i] + theta * (ydiff + theta1 * (bspl + theta * ((ydiff - h * k7[i] - bspl) + theta1 * r5)));
          row[i] = std::max(0.0, v);
        }
        traj.times.push_back(grid[next_out]);
        traj.rows.push_back(std::move(row));
        ++next_out;
      }
      bool clipped = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (ynew[i] < 0.0) {
          ynew[i] = 0.0;
          clipped = true;
        }
      }
      x.swap(ynew);
      t = t_new;
      if (clipped) {
        f(t, x, k1);
      } else {
        k1.swap(k7);
      }
      double fac = e == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h = std::min(h * fac, h_max);
      last_rejected = false;
    } else {
      ++traj.stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(e, -0.2));
      last_rejected = true;
    }
    if (t < t_end && h < h_min) {
      throw BondError(ErrorCode::Stiff, "step size underflow at t = " + format_number(t) +
                                            " (h = " + format_number(h) + "); the system looks stiff");
    }
  }
  while (next_out < grid.size()) {
    traj.times.push_back(grid[next_out]);
    traj.rows.push_back(x);
    ++next_out;
  }
  return traj;
}

Trajectory integrate(const OdeSystem& sys, const std::vector<double>& x0, double t_end,
                     const IntegrateOptions& options) {
  if (x0.size() != sys.size()) throw BondError(ErrorCode::Domain, "initial state has the wrong dimension");
  return integrate(
      [&](double, const std::vector<double>& x, std::vector<double>& dx) { dx = eval_field(sys, x); }, x0, t_end,
      options);
}

std::string render_odes(const OdeSystem& sys, OdeFormat format) {
  if (format == OdeFormat::Json) {
    using nlohmann::ordered_json;
    ordered_json doc;
    ordered_json species = ordered_json::array();
    ordered_json odes = ordered_json::array();
    for (std::size_t i = 0; i < sys.size(); ++i) {
      species.push_back({{"index", i}, {"key", sys.keys[i]}, {"label", sys.labels[i]}, {"initial", sys.initial[i]}});
      odes.push_back({{"species", i}, {"rhs", detail::expr_tree(sys.derivatives[i], sys.labels)}});
    }
    ordered_json params = ordered_json::array();
    for (std::size_t i = 0; i < sys.param_names.size(); ++i) {
      params.push_back({{"name", sys.param_names[i]}, {"value", sys.param_values[i]}});
    }
    doc["species"] = std::move(species);
    doc["params"] = std::move(params);
    doc["odes"] = std::move(odes);
    return doc.dump(2) + "\n";
  }
  if (sys.size() == 0) return "";
  std::string out;
  if (format == OdeFormat::Text) {
    auto namer = [&](const Expr& leaf) {
      return leaf.var_kind() == VarKind::Species ? "[" + sys.labels[leaf.var_index()] + "]" : leaf.var_name();
    };
    for (std::size_t i = 0; i < sys.size(); ++i) {
      out += "d[" + sys.labels[i] + "]/dt = " + render_text(sys.derivatives[i], namer) + "\n";
    }
    return out;
  }
  auto namer = [&](const Expr& leaf) {
    return leaf.var_kind() == VarKind::Species ? latex_species(sys.labels[leaf.var_index()])
                                               : latex_symbol(leaf.var_name());
  };
  out += "\\documentclass{article}\n\\usepackage{amsmath}\n\\begin{document}\n\\begin{align*}\n";
  for (std::size_t i = 0; i < sys.size(); ++i) {
    out += "  \\frac{\\mathrm{d}" + latex_species(sys.labels[i]) + "}{\\mathrm{d}t} &= " +
           render_latex(sys.derivatives[i], namer);
    out += i + 1 < sys.size() ? " \\\\\n" : "\n";
  }
  out += "\\end{align*}\n\\end{document}\n";
  return out;
}

std::vector<std::vector<std::int64_t>> conservation_laws(const OdeSystem& sys) {
  const std::size_t n = sys.size();
  std::vector<std::vector<Fraction>> rows;
  for (const auto& st : sys.stoichiometry) {
    if (st.empty()) continue;
    std::vector<Fraction> row(n);
    for (const auto& [p, nu] : st) row[p] = Fraction{nu, 1};
    rows.push_back(std::move(row));
  }
  // Reduced row echelon form; free columns span the null space.
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c].zero()) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    Fraction lead = rows[r][c];
    for (auto& v : rows[r]) v = v / lead;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c].zero()) continue;
      Fraction factor = rows[i][c];
      for (std::size_t k = 0; k < n; ++k) rows[i][k] = rows[i][k] - factor * rows[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  std::vector<std::vector<std::int64_t>> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
    std::vector<Fraction> v(n, Fraction{0, 1});
    v[free] = Fraction{1, 1};
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = Fraction{0, 1} - rows[i][free];
    std::int64_t lcm = 1;
    for (const auto& q : v) lcm = std::lcm(lcm, q.den);
    std::vector<std::int64_t> ints(n);
    std::int64_t g = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ints[i] = v[i].num * (lcm / v[i].den);
      g = std::gcd(g, ints[i] < 0 ? -ints[i] : ints[i]);
    }
    if (g > 1) {
      for (auto& x : ints) x /= g;
    }
    basis.push_back(std::move(ints));
  }
  return basis;
}

std::string trajectory_csv(const std::vector<std::string>& columns, const Trajectory& traj) {
  std::vector<std::string> header{"t"};
  header.insert(header.end(), columns.begin(), columns.end());
  std::string out = csv_row(header);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<std::string> fields{format_number(traj.times[k])};
    for (double v : traj.rows[k]) fields.push_back(format_number(v));
    out += csv_row(fields);
  }
  return out;
}

}  // namespace bond
