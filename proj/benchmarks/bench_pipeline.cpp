#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "bond/congruence.hpp"
#include "bond/ode.hpp"
#include "bond/parser.hpp"
#include "bond/reactions.hpp"
#include "bond/ssa.hpp"

namespace {

bond::Model load(const std::string& name) {
  std::ifstream f(std::string(BOND_MODELS_DIR) + "/" + name);
  std::stringstream ss;
  ss << f.rdbuf();
  return bond::parse_model(ss.str());
}

void BM_Compile(benchmark::State& state, const char* name) {
  bond::Model m = load(name);
  for (auto _ : state) benchmark::DoNotOptimize(bond::compile(m));
}
BENCHMARK_CAPTURE(BM_Compile, mm, "mm.bond");
BENCHMARK_CAPTURE(BM_Compile, enzyme_ma, "enzyme_ma.bond");
BENCHMARK_CAPTURE(BM_Compile, kuznetsov, "kuznetsov.bond");

void BM_BuildOdes(benchmark::State& state) {
  bond::ReactionSystem rs = bond::compile(load("kuznetsov.bond"));
  for (auto _ : state) benchmark::DoNotOptimize(bond::build_odes(rs));
}
BENCHMARK(BM_BuildOdes);

void BM_Normalize(benchmark::State& state) {
  bond::Model m = load("kuznetsov.bond");
  bond::SpeciesTerm t = bond::parse_species("(TC | EC | new m in (ECb(m) | TCb(m)) | new n in (TCb(n) | ECb(n)))");
  for (auto _ : state) benchmark::DoNotOptimize(bond::normalize(t, m.species));
}
BENCHMARK(BM_Normalize);

void BM_FieldEval(benchmark::State& state) {
  bond::OdeSystem sys = bond::build_odes(bond::compile(load("kuznetsov.bond")));
  std::vector<double> x = sys.initial;
  for (auto _ : state) benchmark::DoNotOptimize(bond::eval_field(sys, x));
}
BENCHMARK(BM_FieldEval);

void BM_IntegrateKuznetsov(benchmark::State& state) {
  bond::OdeSystem sys = bond::build_odes(bond::compile(load("kuznetsov.bond")));
  bond::IntegrateOptions io;
  io.grid = 100;
  for (auto _ : state) benchmark::DoNotOptimize(bond::integrate(sys, sys.initial, 1000.0, io));
}
BENCHMARK(BM_IntegrateKuznetsov)->Unit(benchmark::kMillisecond);

void BM_GillespieEnzyme(benchmark::State& state) {
  bond::DiscreteSystem ds = bond::discretize(bond::compile(load("enzyme_ma.bond")), 0.001);
  bond::SsaOptions so;
  so.t_end = 5.0;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    so.seed = ++seed;
    benchmark::DoNotOptimize(bond::gillespie(ds, ds.initial, so));
  }
}
BENCHMARK(BM_GillespieEnzyme)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
