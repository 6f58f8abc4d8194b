#include "elevator/generators.hpp"

#include <algorithm>
#include <functional>

namespace elevator {

namespace {

struct GenFail {};
struct ForkFail {};

constexpr size_t kBudget = 400;

uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x ^= x >> 31;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  return x;
}

}  // namespace

class Generator::Impl {
 public:
  Impl(const ModeSpec& spec, const Signature& sig, uint64_t seed, GenOptions opts)
      : spec_(spec), sig_(sig), seed_(seed), opts_(std::move(opts)), main_rng_(seed), rng_(&main_rng_) {}

  // ---- randomness ------------------------------------------------------------

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(*rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(*rng_); }

  template <class T>
  const T& choose(const std::vector<T>& v) {
    return v[pick(v.size())];
  }

  std::vector<Mode> modes_where(const std::function<bool(const Mode&)>& f) const {
    std::vector<Mode> out;
    for (const auto& m : spec_.modes())
      if (f(m)) out.push_back(m);
    return out;
  }

  std::string fresh(const std::string& base) { return prefix_ + base + std::to_string(counter_++); }

  // ---- types -----------------------------------------------------------------

  struct TyVar {
    std::string name;
    KindPtr kind;
  };

  bool above_floors(const Mode& j) const {
    return std::all_of(floors_.begin(), floors_.end(), [&](const Mode& f) { return spec_.geq(j, f); });
  }

  TypePtr type_at(const Mode& k, int d) {
    floors_.push_back(k);
    struct Pop {
      std::vector<Mode>& v;
      ~Pop() { v.pop_back(); }
    } pop{floors_};

    std::vector<std::pair<double, std::function<TypePtr()>>> opts;
    opts.push_back({3, [&] { return ty_unit(k); }});
    if (sig_.find_data("Nat")) opts.push_back({2, [&] { return ty_data("Nat", k, {}); }});
    for (const auto& tv : tyscope_) {
      const Mode j = tv.kind->hi;
      if (!above_floors(j)) continue;
      if (tv.kind->tag == Kind::Tag::Type && j == k) {
        opts.push_back({3, [&, tv] { return ty_var(tv.name, k); }});
      } else if (tv.kind->tag == Kind::Tag::CtxUp && tv.kind->ctx.empty() && tv.kind->lo == k) {
        opts.push_back({3, [&, tv, j] { return ty_neutral(neu_force(neu_var(tv.name), {}, j, k), k); }});
      }
    }
    const auto above = modes_where([&](const Mode& m) { return spec_.geq(m, k); });
    const auto below = modes_where([&](const Mode& l) { return spec_.geq(k, l); });
    if (d > 0) {
      opts.push_back({3, [&] {
                        auto dom = type_at(k, d - 1);
                        return ty_arrow(dom, type_at(k, d - 1));
                      }});
      opts.push_back({3, [&] {
                        Mode m = choose(above);
                        return ty_down(m, k, type_at(m, d - 1));
                      }});
      opts.push_back({3, [&] {
                        Mode l = choose(below);
                        auto between = modes_where([&](const Mode& j) { return spec_.gt(k, j) && spec_.geq(j, l); });
                        Context psi;
                        if (!between.empty()) {
                          size_t n = pick(3);
                          for (size_t i = 0; i < n; ++i) {
                            Mode j = choose(between);
                            psi.push_back(decl_term(fresh("p"), type_at(j, d - 1)));
                          }
                        }
                        return ty_up(k, l, std::move(psi), type_at(l, d - 1));
                      }});
      opts.push_back({1, [&] {
                        Mode j = choose(above);
                        KindPtr kd;
                        if (coin(0.5)) {
                          kd = kind_type(j);
                        } else {
                          Mode l = choose(modes_where([&](const Mode& x) { return spec_.geq(j, x); }));
                          kd = kind_up(j, l, {}, kind_type(l));
                        }
                        std::string a = fresh("t");
                        tyscope_.push_back({a, kd});
                        TypePtr body;
                        try {
                          body = type_at(k, d - 1);
                        } catch (...) {
                          tyscope_.pop_back();
                          throw;
                        }
                        tyscope_.pop_back();
                        return ty_forall(a, kd, body);
                      }});
    }
    double total = 0;
    for (const auto& o : opts) total += o.first;
    double r = std::uniform_real_distribution<double>(0, total)(*rng_);
    for (const auto& o : opts) {
      if (r < o.first) return o.second();
      r -= o.first;
    }
    return opts.back().second();
  }

  TypePtr closed_type(const Mode& k, int d) {
    auto saved_scope = std::move(tyscope_);
    auto saved_floors = std::move(floors_);
    tyscope_.clear();
    floors_.clear();
    auto t = type_at(k, d);
    tyscope_ = std::move(saved_scope);
    floors_ = std::move(saved_floors);
    return t;
  }

  // ---- term context ------------------------------------------------------------

  struct Slot {
    Decl decl;
    int uses = 0;
    bool visible = true;
  };

  class Hide {
   public:
    Hide(Impl& g, const Mode& j) : g_(g) {
      for (size_t i = 0; i < g_.slots_.size(); ++i) {
        auto& s = g_.slots_[i];
        if (s.visible && !g_.spec_.geq(s.decl.mode, j)) {
          s.visible = false;
          hidden_.push_back(i);
        }
      }
    }
    ~Hide() {
      for (size_t i : hidden_)
        if (i < g_.slots_.size()) g_.slots_[i].visible = true;
    }
    Hide(const Hide&) = delete;
    Hide& operator=(const Hide&) = delete;

   private:
    Impl& g_;
    std::vector<size_t> hidden_;
  };

  bool weakenable(const Slot& s) const { return spec_.allows(s.decl.mode, StructRule::Weakening); }
  bool contractible(const Slot& s) const { return spec_.allows(s.decl.mode, StructRule::Contraction); }
  bool usable(const Slot& s) const {
    return s.visible && s.decl.sort == Sort::TermVar && (s.uses == 0 || contractible(s));
  }
  bool owed(const Slot& s) const { return s.decl.sort == Sort::TermVar && s.uses == 0 && !weakenable(s); }

  void push(Decl d) { slots_.push_back({std::move(d), 0, true}); }

  void pop(size_t n) {
    for (size_t i = 0; i < n; ++i) {
      if (owed(slots_.back())) throw GenFail{};
      slots_.pop_back();
    }
  }

  bool any_owed_visible() const {
    return std::any_of(slots_.begin(), slots_.end(), [&](const Slot& s) { return s.visible && owed(s); });
  }

  // Fresh names for the entries of `psi`, with later types and `body` renamed accordingly.
  std::pair<Context, TypePtr> rename_ctx(const Context& psi, const TypePtr& body) {
    Subst ren;
    DfContext gamma;
    Context out;
    for (const auto& d : psi) {
      Decl nd = d;
      nd.name = fresh(d.sort == Sort::TypeVar ? "b" : "y");
      if (!ren.empty()) {
        if (nd.type) nd.type = subst_type(ren, gamma, nd.type);
        if (nd.kind) nd.kind = subst_kind(ren, gamma, nd.kind);
      }
      if (d.sort == Sort::TypeVar) {
        auto dk = erase_kind(d.kind);
        ren.push_back(sub_type(d.name, ty_var(nd.name, d.kind->hi), dk));
        gamma.push_back({d.name, dk});
      } else {
        ren.push_back(sub_term(d.name, tm_var(nd.name), d.mode));
        gamma.push_back({d.name, nullptr});
      }
      out.push_back(nd);
    }
    return {out, ren.empty() ? body : subst_type(ren, gamma, body)};
  }

  // ---- terms -----------------------------------------------------------------

  using Option = std::pair<double, std::function<TermPtr()>>;

  TermPtr try_options(std::vector<Option> opts) {
    for (int attempt = 0; attempt < 3 && !opts.empty(); ++attempt) {
      double total = 0;
      for (const auto& o : opts) total += o.first;
      double r = std::uniform_real_distribution<double>(0, total)(*rng_);
      size_t idx = opts.size() - 1;
      for (size_t i = 0; i < opts.size(); ++i) {
        if (r < opts[i].first) {
          idx = i;
          break;
        }
        r -= opts[i].first;
      }
      auto snap = slots_;
      try {
        return opts[idx].second();
      } catch (const GenFail&) {
        slots_ = std::move(snap);
        opts.erase(opts.begin() + static_cast<long>(idx));
      }
    }
    throw GenFail{};
  }

  TermPtr gen(const TypePtr& a, int d) {
    const Mode k = a->mode;
    if (opts_.observer && !forking_ && !spec_.geq(k, *opts_.observer)) return fork(a, d);
    if (++budget_ > kBudget) throw GenFail{};
    Hide h(*this, k);
    std::vector<Option> opts;
    const bool pressing = any_owed_visible();

    // variables
    std::vector<size_t> vars, owed_vars;
    for (size_t i = 0; i < slots_.size(); ++i) {
      const auto& s = slots_[i];
      if (usable(s) && alpha_eq(s.decl.type, a)) {
        vars.push_back(i);
        if (owed(s)) owed_vars.push_back(i);
      }
    }
    if (!vars.empty()) {
      opts.push_back({owed_vars.empty() ? 3.0 : 12.0, [&, vars, owed_vars] {
                        size_t i = owed_vars.empty() ? choose(vars) : choose(owed_vars);
                        ++slots_[i].uses;
                        return tm_var(slots_[i].decl.name);
                      }});
    }

    add_intros(a, d, pressing, opts);
    if (d > 0) {
      add_redexes(a, d, opts);
      add_eliminations(a, d, opts);
    }
    return try_options(std::move(opts));
  }

  void add_intros(const TypePtr& a, int d, bool pressing, std::vector<Option>& opts) {
    const Mode k = a->mode;
    switch (a->tag) {
      case Type::Tag::Unit: opts.push_back({pressing ? 0.5 : 2.0, [k] { return tm_one(k); }}); break;
      case Type::Tag::Data:
        if (a->data_name != "Nat" || !a->args.empty()) break;
        opts.push_back({pressing ? 0.5 : 1.5, [k] { return tm_ctor("", k, "Zero", {}); }});
        if (d > 0) opts.push_back({1, [&, a, k, d] { return tm_ctor("", k, "Succ", {gen(a, d - 1)}); }});
        break;
      case Type::Tag::Arrow:
        opts.push_back({4, [&, a, d] {
                          std::string x = fresh("x");
                          push(decl_term(x, a->body));
                          auto body = gen(a->cod, d);
                          pop(1);
                          return tm_lam(x, nullptr, body);
                        }});
        break;
      case Type::Tag::Down:
        opts.push_back({4, [&, a, d] { return tm_store("", "", gen(a->body, d)); }});
        break;
      case Type::Tag::CtxUp: opts.push_back({4, [&, a, d] { return intro_susp(a, d); }}); break;
      case Type::Tag::Forall:
        opts.push_back({4, [&, a, d] {
                          std::string b = fresh("a");
                          auto body_type =
                              single_subst_type(a->var, ty_var(b, a->kind->hi), erase_kind(a->kind), a->body);
                          push(decl_type(b, a->kind));
                          auto body = gen(body_type, d);
                          pop(1);
                          return tm_tlam(b, nullptr, body);
                        }});
        break;
      default: break;
    }
  }

  // Caller has hidden everything below the suspension's upper mode.
  TermPtr intro_susp(const TypePtr& up, int d) {
    auto [psi, body_type] = rename_ctx(up->ctx, up->body);
    for (const auto& decl : psi) push(decl);
    auto body = gen(body_type, d);
    pop(psi.size());
    return tm_susp("", "", names_of(psi), body);
  }

  Subst gen_subst(const Context& psi, int d) {
    Subst sigma;
    DfContext gamma;
    for (const auto& decl : psi) {
      if (decl.sort == Sort::TypeVar) {
        if (decl.kind->tag != Kind::Tag::Type) throw GenFail{};
        auto dk = erase_kind(decl.kind);
        sigma.push_back(sub_type(decl.name, closed_type(decl.kind->hi, 1), dk));
        gamma.push_back({decl.name, dk});
      } else {
        auto t = sigma.empty() ? decl.type : subst_type(sigma, gamma, decl.type);
        sigma.push_back(sub_term(decl.name, gen(t, d), decl.mode));
        gamma.push_back({decl.name, nullptr});
      }
    }
    return sigma;
  }

  void add_redexes(const TypePtr& a, int d, std::vector<Option>& opts) {
    const Mode k = a->mode;
    opts.push_back({2, [&, a, d, k] {
                      auto b = closed_type(k, 1);
                      std::string x = fresh("x");
                      push(decl_term(x, b));
                      auto body = gen(a, d - 1);
                      pop(1);
                      auto head = tm_annot(tm_lam(x, nullptr, body), ty_arrow(b, a));
                      return tm_app(head, gen(b, d - 1));
                    }});
    opts.push_back({2.5, [&, a, d, k] {
                      Mode m = choose(modes_where([&](const Mode& x) { return spec_.geq(x, k); }));
                      auto b = closed_type(m, 1);
                      auto bound = tm_annot(tm_store("", "", gen(b, d - 1)), ty_down(m, k, b));
                      std::string y = fresh("y");
                      push(decl_term(y, b));
                      auto cont = gen(a, d - 1);
                      pop(1);
                      return tm_load("", "", y, bound, cont);
                    }});
    opts.push_back({3, [&, a, d, k] {
                      auto free = fv(a);
                      Mode m = choose(modes_where([&](const Mode& x) { return spec_.geq(x, k); }));
                      for (const auto& s : slots_)
                        if (s.decl.sort == Sort::TypeVar && free.count(s.decl.name) && !spec_.geq(s.decl.mode, m))
                          throw GenFail{};
                      auto between = modes_where([&](const Mode& j) { return spec_.gt(m, j) && spec_.geq(j, k); });
                      Context psi;
                      if (!between.empty()) {
                        size_t n = pick(3);
                        for (size_t i = 0; i < n; ++i) {
                          Mode j = choose(between);
                          psi.push_back(decl_term(fresh("p"), closed_type(j, 1)));
                        }
                      }
                      auto up = ty_up(m, k, psi, a);
                      TermPtr head;
                      {
                        Hide hm(*this, m);
                        head = intro_susp(up, d - 1);
                      }
                      auto sigma = gen_subst(psi, d - 1);
                      return tm_force("", "", tm_annot(head, up), sigma);
                    }});
    opts.push_back({1, [&, a, d, k] {
                      Mode j = choose(modes_where([&](const Mode& x) { return spec_.geq(x, k); }));
                      std::string b = fresh("a");
                      push(decl_type(b, kind_type(j)));
                      auto body = gen(a, d - 1);
                      pop(1);
                      auto head = tm_annot(tm_tlam(b, nullptr, body), ty_forall(b, kind_type(j), a));
                      return tm_tapp(head, closed_type(j, 1));
                    }});
    if (sig_.find_data("Nat")) {
      opts.push_back({1, [&, a, d, k] {
                        auto nat = ty_data("Nat", k, {});
                        auto scrut = tm_annot(gen(nat, d - 1), nat);
                        return match_nat(scrut, a, d);
                      }});
    }
  }

  TermPtr match_nat(const TermPtr& scrut, const TypePtr& a, int d) {
    const Mode k = a->mode;
    std::vector<int> start;
    for (const auto& s : slots_) start.push_back(s.uses);
    auto zero = gen(a, d - 1);
    std::vector<int> after_zero;
    for (const auto& s : slots_) after_zero.push_back(s.uses);
    for (size_t i = 0; i < start.size(); ++i) slots_[i].uses = start[i];
    std::string n = fresh("n");
    push(decl_term(n, ty_data("Nat", k, {})));
    auto succ = gen(a, d - 1);
    pop(1);
    for (size_t i = 0; i < start.size(); ++i) {
      auto& s = slots_[i];
      bool used_zero = after_zero[i] > start[i];
      bool used_succ = s.uses > start[i];
      if (used_zero != used_succ && s.decl.sort == Sort::TermVar && (!weakenable(s) || !contractible(s)))
        throw GenFail{};
      s.uses = std::max(s.uses, after_zero[i]);
    }
    return tm_match("", scrut, {{"Zero", {}, zero}, {"Succ", {n}, succ}});
  }

  void add_eliminations(const TypePtr& a, int d, std::vector<Option>& opts) {
    const Mode k = a->mode;
    for (size_t i = 0; i < slots_.size(); ++i) {
      const auto& s = slots_[i];
      if (!usable(s)) continue;
      const double w = owed(s) ? 6.0 : 1.0;
      const auto& t = s.decl.type;
      const std::string name = s.decl.name;
      switch (t->tag) {
        case Type::Tag::Arrow:
          if (alpha_eq(t->cod, a))
            opts.push_back({w, [&, i, t, d, name] {
                              ++slots_[i].uses;
                              return tm_app(tm_var(name), gen(t->body, d - 1));
                            }});
          break;
        case Type::Tag::Down:
          if (spec_.geq(t->lo, k))
            opts.push_back({w, [&, i, t, a, d, name] {
                              ++slots_[i].uses;
                              std::string y = fresh("y");
                              push(decl_term(y, t->body));
                              auto cont = gen(a, d - 1);
                              pop(1);
                              return tm_load("", "", y, tm_var(name), cont);
                            }});
          break;
        case Type::Tag::Data:
          if (t->data_name == "Nat" && t->mode == k)
            opts.push_back({w, [&, i, a, d, name] {
                              ++slots_[i].uses;
                              return match_nat(tm_var(name), a, d);
                            }});
          break;
        case Type::Tag::CtxUp: {
          if (t->lo != k || !alpha_eq(t->body, a)) break;
          auto free = fv(t->body);
          bool closed = std::none_of(t->ctx.begin(), t->ctx.end(), [&](const Decl& x) { return free.count(x.name); });
          if (!closed) break;
          opts.push_back({w, [&, i, t, d, name] {
                            ++slots_[i].uses;
                            return tm_force("", "", tm_var(name), gen_subst(t->ctx, d - 1));
                          }});
          break;
        }
        default: break;
      }
    }
  }

  // Inaccessible region: separate random stream, enclosing context hidden.
  TermPtr fork(const TypePtr& a, int d) {
    forking_ = true;
    std::mt19937_64 frng(mix(mix(seed_, fork_index_++), static_cast<uint64_t>(opts_.variant) + 1));
    auto* saved_rng = rng_;
    const auto saved_counter = counter_;
    const auto saved_budget = budget_;
    rng_ = &frng;
    prefix_ = "f";
    std::vector<size_t> hidden;
    for (size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i].visible) {
        slots_[i].visible = false;
        hidden.push_back(i);
      }
    TermPtr out;
    for (int attempt = 0; attempt < 40 && !out; ++attempt) {
      auto snap = slots_;
      budget_ = 0;
      try {
        out = gen(a, d);
      } catch (const GenFail&) {
        slots_ = std::move(snap);
      }
    }
    for (size_t i : hidden) slots_[i].visible = true;
    rng_ = saved_rng;
    counter_ = saved_counter;
    budget_ = saved_budget;
    prefix_.clear();
    forking_ = false;
    if (!out) throw ForkFail{};
    return out;
  }

  // ---- entry points ------------------------------------------------------------

  std::optional<GeneratedTerm> term_in(const Context& ctx, const TypePtr& t, int attempts) {
    fork_failed_ = false;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      slots_.clear();
      budget_ = 0;
      TermPtr e;
      try {
        for (const auto& d : ctx) push(d);
        e = gen(t, opts_.term_depth);
        pop(ctx.size());
      } catch (const GenFail&) {
        continue;
      } catch (const ForkFail&) {
        fork_failed_ = true;
        return std::nullopt;
      }
      try {
        auto r = check_term(ctx, e, t, spec_, sig_);
        return GeneratedTerm{ctx, r.term, t, t->mode};
      } catch (const Error&) {
        ++rejected_;
      }
    }
    return std::nullopt;
  }

  Context context(size_t max_entries) {
    Context ctx;
    size_t n = pick(max_entries + 1);
    for (size_t i = 0; i < n; ++i) {
      Mode j = choose(spec_.modes());
      ctx.push_back(decl_term(fresh("v"), closed_type(j, 1)));
    }
    return ctx;
  }

  const ModeSpec& spec_;
  const Signature& sig_;
  uint64_t seed_;
  GenOptions opts_;
  std::mt19937_64 main_rng_;
  std::mt19937_64* rng_;
  std::vector<Slot> slots_;
  std::vector<TyVar> tyscope_;
  std::vector<Mode> floors_;
  std::string prefix_;
  size_t counter_ = 0;
  size_t budget_ = 0;
  size_t fork_index_ = 0;
  size_t rejected_ = 0;
  bool forking_ = false;
  bool fork_failed_ = false;
};

Generator::Generator(const ModeSpec& spec, const Signature& sig, uint64_t seed, GenOptions opts)
    : impl_(std::make_unique<Impl>(spec, sig, seed, std::move(opts))) {}

Generator::~Generator() = default;

TypePtr Generator::type_at(const Mode& k, int depth) { return impl_->closed_type(k, depth); }

Context Generator::context(size_t max_entries) { return impl_->context(max_entries); }

std::optional<GeneratedTerm> Generator::closed_term(const Mode& k) {
  for (int i = 0; i < 20; ++i) {
    auto t = impl_->closed_type(k, impl_->opts_.type_depth);
    auto r = impl_->term_in({}, t, 5);
    if (r || impl_->fork_failed_) return r;
  }
  return std::nullopt;
}

std::optional<GeneratedTerm> Generator::closed_term_of(const TypePtr& t) { return impl_->term_in({}, t, 30); }

std::optional<GeneratedTerm> Generator::open_term(const Context& ctx, const TypePtr& t) {
  return impl_->term_in(ctx, t, 30);
}

std::mt19937_64& Generator::rng() { return *impl_->rng_; }

const Mode& Generator::random_mode() { return impl_->choose(impl_->spec_.modes()); }

size_t Generator::rejected() const { return impl_->rejected_; }

bool Generator::fork_failed() const { return impl_->fork_failed_; }

NestedRedex nested_redex_family(int depth, const Mode& k) {
  // kinds[i]: Type for i = 0, else a suspension over one argument of kinds[i-1].
  std::vector<KindPtr> kinds{kind_type(k)};
  for (int i = 1; i <= depth; ++i) kinds.push_back(kind_up(k, k, {decl_type("g", kinds[i - 1])}, kind_type(k)));
  // vals[i] inhabits kinds[i]; applying vals[i] to vals[i-1] reduces to vals[i-1] applied to vals[i-2].
  std::vector<TypePtr> vals{ty_unit(k)};
  if (depth >= 1) vals.push_back(ty_thunk({"g"}, ty_var("g", k), k));
  for (int i = 2; i <= depth; ++i) {
    Subst arg{sub_type("g", vals[i - 2], erase_kind(kinds[i - 2]))};
    vals.push_back(ty_thunk({"g"}, ty_neutral(neu_force(neu_var("g"), arg, k, k), k), k));
  }
  NestedRedex out;
  if (depth == 0) {
    out.type = ty_unit(k);
    return out;
  }
  Subst arg{sub_type("g", vals[depth - 1], erase_kind(kinds[depth - 1]))};
  out.type = ty_neutral(neu_force(neu_var("f"), arg, k, k), k);
  out.subst = {sub_type("f", vals[depth], erase_kind(kinds[depth]))};
  out.gamma = {{"f", erase_kind(kinds[depth])}};
  return out;
}

}  // namespace elevator
