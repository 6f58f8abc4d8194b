#include <gtest/gtest.h>

#include "elevator/frontend.hpp"
#include "elevator/printer.hpp"
#include "elevator/typing.hpp"
#include "support.hpp"

using namespace elevator;

namespace {

struct Env {
  ModeSpec spec;
  Signature sig;
  explicit Env(ModeSpec s) : spec(std::move(s)), sig(prelude_signature(spec)) {}

  TypePtr type(const std::string& src, const Mode& m, const Context& ctx = {}) const {
    return check_type(ctx, parse_type(src), kind_type(m), spec, sig);
  }
  Decl var(const std::string& x, const std::string& t, const Mode& m) const { return decl_term(x, type(t, m)); }
  CheckResult check(const Context& ctx, const std::string& e, const std::string& t, const Mode& m) const {
    return check_term(ctx, resolve_constructors(parse_term(e), sig), type(t, m, ctx), spec, sig);
  }
  std::string code(const Context& ctx, const std::string& e, const std::string& t, const Mode& m) const {
    return test::error_code([&] { check(ctx, e, t, m); });
  }
};

}  // namespace

TEST(Typing, IdentityAndApplication) {
  Env env(code_program_spec());
  EXPECT_EQ(env.code({}, "\\x . x", "Unit@P -> Unit@P", "P"), "none");
  EXPECT_EQ(env.code({}, "(\\x . x : Unit@P -> Unit@P) unit@P", "Unit@P", "P"), "none");
  EXPECT_EQ(env.code({}, "\\x . x", "Unit@P -> Nat{P}", "P"), codes::kTypeMismatch);
}

TEST(Typing, PolymorphismAndTypeApplication) {
  Env env(code_program_spec());
  EXPECT_EQ(env.code({}, "/\\a . \\x . x", "forall a : Type@P . a -> a", "P"), "none");
  EXPECT_EQ(env.code({}, "(/\\a . \\x . x : forall a : Type@P . a -> a) [Unit@P] unit@P", "Unit@P", "P"), "none");
}

TEST(Typing, StoreAndLoadAcrossModes) {
  Env env(code_program_spec());
  EXPECT_EQ(env.code({}, "store unit", "Down<C,P> Unit@C", "P"), "none");
  EXPECT_EQ(env.code({env.var("d", "Down<C,P> Nat{C}", "P")}, "load n = d in store n", "Down<C,P> Nat{C}", "P"), "none");
}

TEST(Typing, ProgramVariableInvisibleFromCode) {
  Env env(code_program_spec());
  Context ctx = {env.var("p", "Nat{P}", "P")};
  EXPECT_EQ(env.code(ctx, "store p", "Down<C,P> Nat{C}", "P"), codes::kModeAccess);
  Context cctx = {env.var("c", "Nat{C}", "C")};
  EXPECT_EQ(env.code(cctx, "store c", "Down<C,P> Nat{C}", "P"), "none");
}

TEST(Typing, TemplatesSpliceUnderContexts) {
  Env env(code_program_spec());
  EXPECT_EQ(env.code({}, "susp (a, xs . xs)", "Up<C,P>[a : Type@P, xs : List{P} a |- List{P} a]", "C"), "none");
  Context ctx = {env.var("t", "Up<C,P>[y : Unit@P |- Unit@P]", "C")};
  EXPECT_EQ(env.code(ctx, "force t @ (unit)", "Unit@P", "P"), "none");
  EXPECT_EQ(env.code(ctx, "force t @ (Zero)", "Unit@P", "P"), codes::kTypeMismatch);
}

TEST(Typing, LinearVariablesCountedExactly) {
  Env env(code_program_linear_spec());
  Context ctx = {env.var("g", "Unit@GF", "GF")};
  EXPECT_EQ(env.code(ctx, "g", "Unit@GF", "GF"), "none");
  EXPECT_EQ(env.code(ctx, "unit", "Unit@GF", "GF"), codes::kWeakening);
  Context fctx = {env.var("f", "Unit@GF -o Unit@GF -o Unit@GF", "GF"), env.var("g", "Unit@GF", "GF")};
  EXPECT_EQ(env.code(fctx, "f g g", "Unit@GF", "GF"), codes::kLinearity);
}

TEST(Typing, MatchBranchesMustAgreeOnLinearUse) {
  Env env(code_program_linear_spec());
  Context ctx = {env.var("n", "Nat{GF}", "GF"), env.var("g", "Unit@GF", "GF")};
  EXPECT_EQ(env.code(ctx, "match n with | Zero => g | Succ m => match m with | Zero => g | Succ k => g", "Unit@GF", "GF"),
            codes::kWeakening);
}

TEST(Typing, UsageMaskReportsConsumption) {
  Env env(code_program_linear_spec());
  Context ctx = {env.var("g", "Unit@GF", "GF"), env.var("p", "Unit@P", "P")};
  CheckOptions loose;
  loose.require_exhaustive_use = false;
  auto r = check_term(ctx, tm_var("g"), ty_unit("GF"), env.spec, env.sig, loose);
  EXPECT_EQ(r.usage, (UsageMask{true, false}));
}

TEST(Typing, RecursionForbiddenAtLinearMode) {
  auto spec = linear_intuitionistic_spec();
  EXPECT_EQ(test::error_code([&] { test::elab_source("def loop : Unit@L -o Unit@L = \\x . loop x", spec); }),
            codes::kRecursion);
  EXPECT_EQ(test::error_code([&] { test::elab_source("def loop : Unit@U -> Unit@U = \\x . loop x", spec); }), "none");
}

TEST(Typing, KindMismatch) {
  Env env(code_program_spec());
  EXPECT_EQ(test::error_code([&] { env.type("List{P} Nat{C}", "P"); }), codes::kKindMismatch);
}

TEST(Typing, CountOccurrencesUsesMostDemandingBranch) {
  auto e = parse_term("match n with | Zero => f x x | Succ m => x");
  EXPECT_EQ(count_occurrences(e, "x"), 2u);
  EXPECT_EQ(count_occurrences(e, "n"), 1u);
  EXPECT_EQ(count_occurrences(parse_term("\\x . x"), "x"), 0u);
}

TEST(Typing, SynthesisReturnsAccessibleMode) {
  Env env(code_program_spec());
  Context ctx = {env.var("c", "Nat{C}", "C")};
  auto r = synth_term(ctx, tm_var("c"), "P", env.spec, env.sig);
  EXPECT_EQ(r.type->mode, "C");
}

TEST(Typing, CorpusSignaturesElaborate) {
  for (const auto& [file, spec] : std::vector<std::pair<std::string, std::string>>{
           {"nth_naive.elv", "two_mode.json"}, {"map_lin_meta.elv", "three_mode.json"}}) {
    auto sig = elaborate(parse(test::slurp(test::kCorpus + "/" + file), file),
                         load_mode_spec_file(test::kSpecs + "/" + spec));
    EXPECT_FALSE(sig.defs.empty()) << file;
  }
}
