#include <gtest/gtest.h>

#include "elevator/frontend.hpp"
#include "elevator/generators.hpp"
#include "elevator/printer.hpp"
#include "elevator/properties.hpp"

using namespace elevator;

TEST(Generator, ClosedTermsTypeCheck) {
  auto spec = code_program_linear_spec();
  auto sig = prelude_signature(spec);
  Generator gen(spec, sig, 11);
  int produced = 0;
  for (int i = 0; i < 60; ++i) {
    auto g = gen.closed_term(gen.random_mode());
    if (!g) continue;
    ++produced;
    EXPECT_NO_THROW(check_term(g->ctx, g->term, g->type, spec, sig)) << print_term(g->term);
  }
  EXPECT_GT(produced, 40);
  EXPECT_EQ(gen.rejected(), 0u);
}

TEST(Generator, SameSeedSameTerms) {
  auto spec = code_program_spec();
  auto sig = prelude_signature(spec);
  Generator a(spec, sig, 99), b(spec, sig, 99);
  for (int i = 0; i < 20; ++i) {
    auto x = a.closed_term("P"), y = b.closed_term("P");
    ASSERT_EQ(bool(x), bool(y));
    if (x) EXPECT_EQ(print_term(x->term), print_term(y->term));
  }
}

TEST(Generator, ClosedTypesHaveNoFreeVariables) {
  auto spec = code_program_spec();
  auto sig = prelude_signature(spec);
  Generator gen(spec, sig, 5);
  for (int i = 0; i < 50; ++i) EXPECT_TRUE(fv(gen.type_at("P", 2)).empty());
}

TEST(Properties, SmallRunPassesOnEverySpec) {
  PropertyOptions opts;
  opts.terms = 40;
  opts.pairs = 20;
  for (const auto& ns : default_property_specs())
    for (const auto& r : run_all_properties(ns, opts)) EXPECT_TRUE(r.ok()) << r.name << " " << ns.name << ": " << r.counterexample;
}

TEST(Properties, ReportIsReproducible) {
  PropertyOptions opts;
  opts.terms = 25;
  opts.pairs = 10;
  opts.seed = 1234;
  NamedSpec ns{"two", code_program_spec()};
  EXPECT_EQ(format_report(run_all_properties(ns, opts)), format_report(run_all_properties(ns, opts)));
}

TEST(Properties, ConstructionOrderNotApplicableWithoutStrictOrder) {
  auto r = construction_order_property({"single", single_mode_spec()}, {});
  EXPECT_FALSE(r.applicable);
  EXPECT_TRUE(r.ok());
}

TEST(Properties, HereditaryDepthTen) {
  auto r = hereditary_substitution_property(10);
  EXPECT_TRUE(r.ok()) << r.counterexample;
  EXPECT_EQ(r.cases, 10u);
}
