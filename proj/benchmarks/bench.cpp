#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "elevator/evaluator.hpp"
#include "elevator/frontend.hpp"
#include "elevator/generators.hpp"
#include "elevator/substitution.hpp"

using namespace elevator;

namespace {

const std::string kPrograms = ELEVATOR_PROGRAMS_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void BM_CheckCorpusFile(benchmark::State& state, const std::string& file, const std::string& spec_file) {
  auto spec = load_mode_spec_file(kPrograms + "/specs/" + spec_file);
  auto src = slurp(kPrograms + "/corpus/" + file);
  for (auto _ : state) benchmark::DoNotOptimize(elaborate(parse(src, file), spec));
}
BENCHMARK_CAPTURE(BM_CheckCorpusFile, nth_opt, std::string("nth_opt.elv"), std::string("two_mode.json"));
BENCHMARK_CAPTURE(BM_CheckCorpusFile, map_lin_meta_opt, std::string("map_lin_meta_opt.elv"),
                  std::string("three_mode.json"));

// nth n with n growing; the generated template grows linearly.
void BM_EvaluateNth(benchmark::State& state) {
  auto spec = code_program_spec();
  auto sig = elaborate(parse(slurp(kPrograms + "/corpus/nth_naive.elv"), "nth_naive.elv"), spec);
  Evaluator ev(spec, &sig);
  auto e = synth_term({}, resolve_constructors(parse_term("nth " + std::to_string(state.range(0)) + "@P"), sig), "",
                      spec, sig)
               .term;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(ev, e, 1000000));
}
BENCHMARK(BM_EvaluateNth)->RangeMultiplier(4)->Range(1, 64);

void BM_HereditarySubstitution(benchmark::State& state) {
  auto fam = nested_redex_family(int(state.range(0)), "P");
  for (auto _ : state) benchmark::DoNotOptimize(subst_type(fam.subst, fam.gamma, fam.type));
}
BENCHMARK(BM_HereditarySubstitution)->DenseRange(2, 10, 4);

void BM_GenerateClosedTerm(benchmark::State& state) {
  auto spec = code_program_linear_spec();
  auto sig = prelude_signature(spec);
  Generator gen(spec, sig, 42);
  for (auto _ : state) benchmark::DoNotOptimize(gen.closed_term(gen.random_mode()));
}
BENCHMARK(BM_GenerateClosedTerm);

}  // namespace

BENCHMARK_MAIN();
