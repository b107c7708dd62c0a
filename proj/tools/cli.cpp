#include "cli.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bond/error.hpp"
#include "bond/json.hpp"
#include "bond/ode.hpp"
#include "bond/parser.hpp"
#include "bond/reactions.hpp"
#include "bond/ssa.hpp"
#include "bond/transitions.hpp"

namespace bond::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string file;
  std::string out;
  std::string format = "text";
  std::vector<std::string> sets;
  std::size_t cap = kDefaultPrimeCap;
  std::string species;

  double t_end = 0.0;
  double rtol = 1e-6;
  double atol = 1e-9;
  double max_step = 0.0;
  std::size_t grid = 100;

  double h = 0.0;
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  double sample_dt = 0.0;
  std::string stats;
  unsigned threads = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

class Session {
 public:
  Session(const Options& opt, std::ostream& err) : opt_(opt), err_(err) {}

  Model& model() {
    if (!model_) {
      source_ = read_file(opt_.file);
      model_ = parse_model(source_);
      for (const auto& s : opt_.sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects NAME=VALUE, got '" + s + "'");
        double v = 0.0;
        try {
          std::size_t used = 0;
          v = std::stod(s.substr(eq + 1), &used);
          if (used != s.size() - eq - 1) throw std::invalid_argument(s);
        } catch (const std::logic_error&) {
          throw UsageError("--set value is not a number: '" + s + "'");
        }
        model_->set_param(s.substr(0, eq), v);
      }
      for (const auto& w : model_->warnings) warn(w);
    }
    return *model_;
  }

  const ReactionSystem& system() {
    if (!system_) {
      system_ = compile(model(), opt_.cap);
      for (const auto& w : system_->warnings) warn(w);
    }
    return *system_;
  }

  void warn(const std::string& w) {
    if (warned_.insert(w).second) err_ << "warning: " << w << "\n";
  }

 private:
  const Options& opt_;
  std::ostream& err_;
  std::string source_;
  std::optional<Model> model_;
  std::optional<ReactionSystem> system_;
  std::set<std::string> warned_;
};

std::string cmd_primes(Session& s) {
  const ReactionSystem& rs = s.system();
  std::string out;
  for (std::size_t i = 0; i < rs.index.size(); ++i) {
    out += std::to_string(i) + "\t" + rs.labels[i] + "\t" + format_number(rs.initial[i]) + "\t" + rs.index[i].key +
           "\n";
  }
  return out;
}

std::string cmd_transitions(Session& s, const Options& opt) {
  const Model& m = s.model();
  std::vector<CanonicalSpecies> sources;
  if (!opt.species.empty()) {
    sources.push_back(normalize(parse_species(opt.species), m.species));
  } else {
    sources = s.system().index.primes();
  }
  std::string out;
  for (const auto& src : sources) {
    for (const auto& t : transitions(src.term, m.species)) out += t.to_string() + "\n";
  }
  return out;
}

std::string cmd_odes(Session& s, const Options& opt) {
  OdeFormat format;
  if (opt.format == "text") {
    format = OdeFormat::Text;
  } else if (opt.format == "latex") {
    format = OdeFormat::Latex;
  } else if (opt.format == "json") {
    format = OdeFormat::Json;
  } else {
    throw UsageError("unknown format '" + opt.format + "' (expected text, latex or json)");
  }
  return render_odes(build_odes(s.system()), format);
}

std::string cmd_simulate(Session& s, const Options& opt) {
  OdeSystem sys = build_odes(s.system());
  IntegrateOptions io;
  io.rtol = opt.rtol;
  io.atol = opt.atol;
  io.max_step = opt.max_step;
  io.grid = opt.grid;
  Trajectory traj = integrate(sys, sys.initial, opt.t_end, io);
  return trajectory_csv(sys.keys, traj);
}

std::string cmd_ssa(Session& s, const Options& opt, std::ostream& out) {
  DiscreteSystem sys = discretize(s.system(), opt.h);
  SsaOptions so;
  so.t_end = opt.t_end;
  so.sample_dt = opt.sample_dt;
  so.seed = opt.seed;
  std::vector<SsaRun> runs = run_ensemble(sys, sys.initial, so, opt.runs, opt.threads);
  for (const auto& r : runs) {
    for (const auto& w : r.warnings) s.warn("run " + std::to_string(r.run) + ": " + w);
  }
  if (!opt.stats.empty()) write_output(opt.stats, stats_csv(sys, aggregate(sys, runs)), out);
  return runs_csv(sys, runs);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color) {
  auto tag = [&](const std::string& code) {
    std::string text = code.empty() ? "error" : "error[" + code + "]";
    return color ? "\033[1;31m" + text + "\033[0m" : text;
  };

  Options opt;
  std::string crn_format = "json";
  CLI::App app{"bond-calculus compiler and simulator", "bondc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto with_file = [&](CLI::App* sub) {
    sub->add_option("file", opt.file, "model file (.bond)")->required();
    sub->add_option("--set", opt.sets, "override a parameter, NAME=VALUE (repeatable)");
    sub->add_option("--cap", opt.cap, "maximum number of reachable primes")->check(CLI::PositiveNumber);
    return sub;
  };

  auto* check = with_file(app.add_subcommand("check", "parse and validate a model"));
  auto* primes = with_file(app.add_subcommand("primes", "list reachable prime species"));
  auto* trans = with_file(app.add_subcommand("transitions", "list multi-transitions of primes"));
  trans->add_option("--species", opt.species, "species term to derive instead of all primes");
  auto* crn = with_file(app.add_subcommand("crn", "print the reaction network"));
  crn->add_option("--format", crn_format, "output format")->check(CLI::IsMember({"json"}));
  auto* odes = with_file(app.add_subcommand("odes", "print the ODE system"));
  odes->add_option("--format", opt.format, "text, latex or json")->check(CLI::IsMember({"text", "latex", "json"}));
  odes->add_option("--out", opt.out, "output file");

  auto* sim = with_file(app.add_subcommand("simulate", "integrate the ODEs and write a CSV trajectory"));
  sim->add_option("--t-end", opt.t_end, "end time")->required()->check(CLI::PositiveNumber);
  sim->add_option("--rtol", opt.rtol, "relative tolerance")->check(CLI::PositiveNumber);
  sim->add_option("--atol", opt.atol, "absolute tolerance")->check(CLI::PositiveNumber);
  sim->add_option("--max-step", opt.max_step, "maximum step (default t_end/50)")->check(CLI::NonNegativeNumber);
  sim->add_option("--grid", opt.grid, "number of output intervals")->check(CLI::PositiveNumber);
  sim->add_option("--out", opt.out, "output CSV file");

  auto* ssa = with_file(app.add_subcommand("ssa", "stochastic simulation on discrete levels"));
  ssa->set_help_flag("--help", "print this help message and exit");
  ssa->add_option("--h", opt.h, "level size in concentration units")->required()->check(CLI::PositiveNumber);
  ssa->add_option("--t-end", opt.t_end, "end time")->required()->check(CLI::PositiveNumber);
  ssa->add_option("--seed", opt.seed, "random seed")->required();
  ssa->add_option("--runs", opt.runs, "number of independent runs")->check(CLI::PositiveNumber);
  ssa->add_option("--sample-dt", opt.sample_dt, "sampling interval (default t_end/100)")
      ->check(CLI::NonNegativeNumber);
  ssa->add_option("--out", opt.out, "per-run CSV file");
  ssa->add_option("--stats", opt.stats, "mean/std CSV file");
  ssa->add_option("--threads", opt.threads, "worker threads (default: all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << tag("") << ": " << e.what() << "\n";
    return 2;
  }

  Session session(opt, err);
  try {
    std::string artifact;
    if (check->parsed()) {
      session.model();
    } else if (primes->parsed()) {
      artifact = cmd_primes(session);
    } else if (trans->parsed()) {
      artifact = cmd_transitions(session, opt);
    } else if (crn->parsed()) {
      artifact = crn_json(session.system());
    } else if (odes->parsed()) {
      artifact = cmd_odes(session, opt);
    } else if (sim->parsed()) {
      artifact = cmd_simulate(session, opt);
    } else if (ssa->parsed()) {
      artifact = cmd_ssa(session, opt, out);
    }
    write_output(opt.out, artifact, out);
    return 0;
  } catch (const UsageError& e) {
    err << tag("") << ": " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << tag(std::string(to_string(e.code()))) << ": " << opt.file << ":" << describe(e) << "\n";
    return 1;
  } catch (const BondError& e) {
    err << tag(std::string(to_string(e.code()))) << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bond::cli
