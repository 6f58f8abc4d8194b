#include <gtest/gtest.h>

#include "elevator/frontend.hpp"
#include "elevator/printer.hpp"
#include "elevator/syntax.hpp"

using namespace elevator;

TEST(Syntax, FreshNameSequence) {
  EXPECT_EQ(fresh_name("x", {}), "x");
  EXPECT_EQ(fresh_name("x", {"x"}), "x'");
  EXPECT_EQ(fresh_name("x", {"x", "x'"}), "x''");
  EXPECT_EQ(fresh_name("x", {"x", "x'", "x''"}), "x1");
}

TEST(Syntax, AlphaEquivalenceIgnoresBinderNames) {
  auto u = ty_unit("P");
  EXPECT_TRUE(alpha_eq(tm_lam("x", u, tm_var("x")), tm_lam("y", u, tm_var("y"))));
  EXPECT_FALSE(alpha_eq(tm_lam("x", u, tm_var("z")), tm_lam("y", u, tm_var("y"))));
  EXPECT_TRUE(alpha_eq(tm_susp("C", "P", {"a", "xs"}, tm_var("xs")), tm_susp("C", "P", {"b", "ys"}, tm_var("ys"))));
  EXPECT_FALSE(alpha_eq(tm_susp("C", "P", {"a", "xs"}, tm_var("xs")), tm_susp("C", "P", {"a", "xs"}, tm_var("a"))));
  EXPECT_TRUE(alpha_eq(ty_forall("a", kind_type("P"), ty_var("a", "P")), ty_forall("b", kind_type("P"), ty_var("b", "P"))));
}

TEST(Syntax, AlphaEquivalenceRespectsModes) {
  EXPECT_FALSE(alpha_eq(tm_one("C"), tm_one("P")));
  EXPECT_FALSE(alpha_eq(tm_store("C", "P", tm_one("C")), tm_store("C", "GF", tm_one("C"))));
}

TEST(Syntax, FreeVariablesRespectBinders) {
  auto e = tm_load("C", "P", "x", tm_var("y"), tm_app(tm_var("x"), tm_var("z")));
  EXPECT_EQ(fv(e), (std::set<std::string>{"y", "z"}));
  auto s = tm_susp("C", "P", {"a"}, tm_app(tm_var("a"), tm_var("b")));
  EXPECT_EQ(fv(s), (std::set<std::string>{"b"}));
  auto f = tm_force("C", "P", tm_var("t"), {sub_term("a", tm_var("w"), "P")});
  EXPECT_EQ(fv(f), (std::set<std::string>{"t", "w"}));
}

TEST(Syntax, SizeCountsNodes) {
  EXPECT_EQ(size(tm_var("x")), 1u);
  EXPECT_GT(size(tm_app(tm_var("f"), tm_var("x"))), size(tm_var("f")));
}

TEST(Syntax, ErasureKeepsOnlyKinds) {
  Context ctx = {decl_type("a", kind_type("P")), decl_term("x", ty_var("a", "P"))};
  auto df = erase_context(ctx);
  ASSERT_EQ(df.size(), 2u);
  EXPECT_NE(df[0].kind, nullptr);
  EXPECT_EQ(df[1].kind, nullptr);
  EXPECT_EQ(names_of(ctx), (ErasedContext{"a", "x"}));
}

TEST(Syntax, PrintedTypesReparse) {
  for (const char* src : {"forall a : Type@P . List{P} a -> a", "Down<C,P> Up<C,P>[a : Type@P, xs : List{P} a |- a]"}) {
    auto t = parse_type(src);
    EXPECT_TRUE(alpha_eq(parse_type(print_type(t)), t)) << src << " printed as " << print_type(t);
  }
}

TEST(Syntax, PrintedKindsReparse) {
  auto k = parse_kind("Up<C,GF>[b : Type@GF |- Type@GF]");
  EXPECT_TRUE(alpha_eq(parse_kind(print_kind(k)), k)) << print_kind(k);
}

TEST(Syntax, PrintedTermsReparse) {
  for (const char* src : {"\\x . load y = x in store (susp (a, b . force y @ (a, b)))",
                          "match n with | Zero => unit@P | Succ m => f m", "/\\a . \\x . (x : a)"}) {
    auto e = parse_term(src);
    EXPECT_TRUE(alpha_eq(parse_term(print_term(e)), e)) << src << " printed as " << print_term(e);
  }
}

TEST(Syntax, MapModesRewritesEveryMode) {
  auto t = ty_down("m", "m", ty_data("Nat", "m", {}));
  auto r = map_modes(t, [](const Mode&) { return Mode("P"); });
  EXPECT_TRUE(alpha_eq(r, ty_down("P", "P", ty_data("Nat", "P", {}))));
}
