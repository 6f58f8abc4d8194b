#include <gtest/gtest.h>

#include "elevator/evaluator.hpp"
#include "elevator/frontend.hpp"
#include "elevator/printer.hpp"
#include "support.hpp"

using namespace elevator;

namespace {

struct Env {
  ModeSpec spec;
  Signature sig;
  Evaluator ev;
  Env(ModeSpec s, const std::string& src = "")
      : spec(std::move(s)), sig(src.empty() ? prelude_signature(spec) : test::elab_source(src, spec)), ev(spec, &sig) {}
  TermPtr term(const std::string& src, const Mode& m = "") const {
    return synth_term({}, resolve_constructors(parse_term(src), sig), m, spec, sig).term;
  }
};

}  // namespace

TEST(Evaluator, EachRuleFires) {
  Env env(code_program_spec(), "def two : Nat{P} = 2@P");
  auto rule = [&](const std::string& src) { return env.ev.step(env.term(src)).rule; };
  EXPECT_EQ(rule("(\\x . x : Unit@P -> Unit@P) unit@P"), "beta");
  EXPECT_EQ(rule("(/\\a . \\x . x : forall a : Type@P . a -> a) [Unit@P]"), "type-beta");
  EXPECT_EQ(rule("(load x = (store unit : Down<C,P> Unit@C) in store x : Down<C,P> Unit@C)"), "load-store");
  EXPECT_EQ(rule("force (susp (y . y) : Up<C,P>[y : Unit@P |- Unit@P]) @ (unit)"), "force-susp");
  EXPECT_EQ(rule("match 1@P with | Zero => unit@P | Succ m => unit@P"), "match");
  EXPECT_EQ(rule("two"), "delta");
}

TEST(Evaluator, ForceSuspSubstitutesTheContext) {
  Env env(code_program_spec());
  auto r = env.ev.step(env.term("force (susp (y . y) : Up<C,P>[y : Nat{P} |- Nat{P}]) @ (3@P)"));
  ASSERT_TRUE(r.stepped);
  EXPECT_TRUE(alpha_eq(r.term, env.term("3@P")));
}

TEST(Evaluator, ValuesDoNotStep) {
  Env env(code_program_spec());
  for (const char* src : {"unit@P", "(\\x . x : Unit@P -> Unit@P)", "2@P", "(store unit : Down<C,P> Unit@C)"}) {
    auto e = env.term(src);
    EXPECT_TRUE(env.ev.is_weak_normal(e)) << src;
    EXPECT_FALSE(env.ev.step(e).stepped) << src;
  }
}

TEST(Evaluator, NoReductionUnderLambda) {
  Env env(code_program_spec());
  auto e = env.term("(\\y . (\\x . x : Unit@P -> Unit@P) y : Unit@P -> Unit@P)");
  EXPECT_TRUE(env.ev.is_weak_normal(e));
  EXPECT_FALSE(env.ev.step(e).stepped);
}

TEST(Evaluator, TemplateReductionSplicesAccessibleForces) {
  Env env(code_program_spec());
  // the splice inside a code template runs at ambient C; the beta is left alone
  auto e = env.term(
      "(susp (force (susp (z . (\\x . x : Unit@P -> Unit@P) z) : Up<C,P>[z : Unit@P |- Unit@P]) @ (unit)) : "
      "Up<C,P>[ |- Unit@P])");
  ASSERT_EQ(e->tag, Term::Tag::Susp);
  EXPECT_FALSE(env.ev.is_normal_template(e->body, "C"));
  auto r = env.ev.template_step(e->body, "C");
  ASSERT_TRUE(r.stepped);
  EXPECT_EQ(r.rule, "splice");
  EXPECT_TRUE(env.ev.is_normal_template(r.term, "C"));
  EXPECT_FALSE(env.ev.template_step(r.term, "C").stepped);
  // template reduction only discharges splices; the application stays as syntax
  EXPECT_TRUE(env.ev.is_normal_template(r.term, "P"));
}

TEST(Evaluator, EvaluateCountsStepsAndTraces) {
  Env env(code_program_spec());
  std::vector<TraceEntry> trace;
  auto r = evaluate(env.ev, env.term("(\\x . x : Nat{P} -> Nat{P}) ((\\y . y : Nat{P} -> Nat{P}) 1@P)"), 100, &trace);
  EXPECT_EQ(r.kind, EvalOutcome::Kind::Value);
  EXPECT_EQ(r.steps, 2u);
  ASSERT_EQ(trace.size(), 3u);  // includes the starting term
  EXPECT_EQ(trace[1].rule, "beta");
  EXPECT_TRUE(alpha_eq(r.term, env.term("1@P")));
}

TEST(Evaluator, FuelExhaustion) {
  Env env(code_program_spec(), "def loop : Unit@P -> Unit@P = \\x . loop x");
  auto r = evaluate(env.ev, env.term("loop unit@P"), 50);
  EXPECT_EQ(r.kind, EvalOutcome::Kind::FuelExhausted);
  EXPECT_EQ(r.steps, 50u);
}

TEST(Evaluator, OpenTermIsStuck) {
  Env env(code_program_spec());
  auto r = evaluate(env.ev, tm_app(tm_var("f"), tm_one("P")), 10);
  EXPECT_EQ(r.kind, EvalOutcome::Kind::Value);  // weak neutral
  auto s = evaluate(env.ev, tm_def("missing"), 10);
  EXPECT_EQ(s.kind, EvalOutcome::Kind::Stuck);
}

TEST(Evaluator, StoreLoadChainsFromCorpus) {
  auto spec = load_mode_spec_file(test::kSpecs + "/two_mode.json");
  auto sig = elaborate(parse(test::slurp(test::kCorpus + "/convert_nat.elv"), "convert_nat.elv"), spec);
  Evaluator ev(spec, &sig);
  auto e = synth_term({}, resolve_constructors(parse_term("convertNat 3@P"), sig), "", spec, sig).term;
  auto r = evaluate(ev, e, 1000);
  ASSERT_EQ(r.kind, EvalOutcome::Kind::Value);
  auto want = synth_term({}, resolve_constructors(parse_term("(store 3@C : Down<C,P> Nat{C})"), sig), "", spec, sig).term;
  EXPECT_TRUE(alpha_eq(r.term, want)) << print_term(r.term);
}
