#include <gtest/gtest.h>

#include "elevator/generators.hpp"
#include "elevator/printer.hpp"
#include "elevator/substitution.hpp"
#include "support.hpp"

using namespace elevator;

namespace {

KindPtr type_family(ErasedContext args) {
  Context ctx;
  for (const auto& a : args) ctx.push_back(decl_type(a, kind_type("P")));
  return kind_up("C", "P", ctx, kind_type("P"));
}

}  // namespace

TEST(Substitution, ForcingAThunkReducesHereditarily) {
  auto k = type_family({});
  auto t = ty_neutral(neu_force(neu_var("a"), {}, "C", "P"), "P");
  Subst s = {sub_type("a", ty_thunk({}, ty_unit("P"), "C"), erase_kind(k))};
  auto r = subst_type(s, {{"a", erase_kind(k)}}, t);
  EXPECT_TRUE(alpha_eq(r, ty_unit("P"))) << print_type(r);
}

TEST(Substitution, ThunkArgumentsAreInstantiated) {
  auto k = type_family({"b"});
  // force a @ (b |-> Unit@P)  with  a := thunk (b . b)
  auto t = ty_neutral(neu_force(neu_var("a"), {sub_type("b", ty_unit("P"), df_type("P"))}, "C", "P"), "P");
  Subst s = {sub_type("a", ty_thunk({"b"}, ty_var("b", "P"), "C"), erase_kind(k))};
  auto r = subst_type(s, {{"a", erase_kind(k)}}, t);
  EXPECT_TRUE(alpha_eq(r, ty_unit("P"))) << print_type(r);
  EXPECT_FALSE(has_type_redex(r));
}

TEST(Substitution, UnrelatedNeutralStaysNeutral) {
  auto t = ty_neutral(neu_force(neu_var("c"), {}, "C", "P"), "P");
  Subst s = {sub_type("a", ty_unit("P"), df_type("P"))};
  EXPECT_TRUE(alpha_eq(subst_type(s, {}, t), t));
}

TEST(Substitution, TermSubstitutionAvoidsCapture) {
  auto u = ty_unit("P");
  auto target = tm_lam("y", u, tm_app(tm_var("x"), tm_var("y")));
  auto r = single_subst_term("x", tm_var("y"), "P", target);
  EXPECT_TRUE(alpha_eq(r, tm_lam("z", u, tm_app(tm_var("y"), tm_var("z"))))) << print_term(r);
}

TEST(Substitution, ShadowedVariableUntouched) {
  auto u = ty_unit("P");
  auto target = tm_lam("x", u, tm_var("x"));
  EXPECT_TRUE(alpha_eq(single_subst_term("x", tm_one("P"), "P", target), target));
}

TEST(Substitution, SuspensionBindersScopeOverBody) {
  auto target = tm_susp("C", "P", {"x"}, tm_app(tm_var("x"), tm_var("w")));
  auto r = single_subst_term("x", tm_one("P"), "P", target);
  EXPECT_TRUE(alpha_eq(r, target));
  auto r2 = single_subst_term("w", tm_one("P"), "P", target);
  EXPECT_TRUE(alpha_eq(r2, tm_susp("C", "P", {"x"}, tm_app(tm_var("x"), tm_one("P")))));
}

TEST(Substitution, TypeSubstitutionIntoTerm) {
  auto target = tm_tapp(tm_def("head"), ty_var("a", "P"));
  auto r = single_subst_term_type("a", ty_unit("P"), df_type("P"), target);
  EXPECT_TRUE(alpha_eq(r, tm_tapp(tm_def("head"), ty_unit("P"))));
}

TEST(Usage, MergeRefusesDoubleLinearUse) {
  auto spec = code_program_linear_spec();
  Context ctx = {decl_term("g", ty_unit("GF")), decl_term("p", ty_unit("P"))};
  EXPECT_EQ(test::error_code([&] { merge_usage(ctx, spec, {true, false}, {true, false}); }), codes::kSplit);
  EXPECT_EQ(merge_usage(ctx, spec, {false, true}, {false, true}), (UsageMask{false, true}));
  EXPECT_EQ(merge_usage(ctx, spec, {true, false}, {false, true}), (UsageMask{true, true}));
}

TEST(Usage, SplitDistributesClaimedEntries) {
  auto spec = code_program_linear_spec();
  Subst s = {sub_type("a", ty_unit("P"), df_type("P")), sub_term("x", tm_one("GF"), "GF"),
             sub_term("y", tm_one("P"), "P")};
  auto [l, r] = split_substitution(s, spec, {false, true, true}, {false, false, true});
  ASSERT_EQ(l.size(), 3u);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].name, "a");
  EXPECT_EQ(r[1].name, "y");
  EXPECT_EQ(test::error_code([&] { split_substitution(s, spec, {false, true, false}, {false, true, false}); }),
            codes::kSplit);
}

TEST(Substitution, NestedFamilyStaysWithinWatchdog) {
  for (int d = 1; d <= 10; ++d) {
    auto fam = nested_redex_family(d, "P");
    size_t input = size(fam.type);
    for (const auto& e : fam.subst) input += size(e.type);
    SubstWatch watch;
    watch.limit = 10 * input;
    auto r = subst_type(fam.subst, fam.gamma, fam.type, &watch);
    EXPECT_FALSE(has_type_redex(r));
    EXPECT_TRUE(alpha_eq(r, ty_unit("P"))) << "depth " << d << ": " << print_type(r);
    EXPECT_LE(watch.max_depth, watch.limit);
  }
}

TEST(Substitution, WatchdogLimitTrips) {
  auto fam = nested_redex_family(6, "P");
  SubstWatch watch;
  watch.limit = 2;
  EXPECT_EQ(test::error_code([&] { subst_type(fam.subst, fam.gamma, fam.type, &watch); }), codes::kSubst);
}
