#include "elevator/evaluator.hpp"

#include "elevator/substitution.hpp"
#include "elevator/typing.hpp"

namespace elevator {

namespace {

StepResult none() { return {}; }

StepResult stepped(TermPtr t, std::string rule) {
  StepResult r;
  r.stepped = true;
  r.term = std::move(t);
  r.rule = std::move(rule);
  return r;
}

// Rebuilds `e` with one field replaced when the inner step fired.
template <class F>
StepResult lift(const StepResult& inner, const TermPtr& e, F&& set) {
  if (!inner.stepped) return inner;
  return stepped(modify(e, [&](Term& t) { set(t, inner.term); }), inner.rule);
}

// Instantiates the body of a suspension with an explicit substitution whose
// entries are matched to the suspension's names by position.
std::optional<TermPtr> splice(const Term& susp, const Subst& sigma) {
  if (susp.names.size() != sigma.size()) return std::nullopt;
  Subst renamed = sigma;
  for (size_t i = 0; i < renamed.size(); ++i) renamed[i].name = susp.names[i];
  return subst_term(renamed, measure_of(renamed), susp.body);
}

}  // namespace

StepResult Evaluator::step(const TermPtr& e) const {
  switch (e->tag) {
    case Term::Tag::Var:
    case Term::Tag::One:
    case Term::Tag::TLam:
    case Term::Tag::Lam:
    case Term::Tag::Annot: return none();
    case Term::Tag::Def: {
      if (!sig_) return none();
      const DefDecl* d = sig_->find_def(e->name);
      if (!d) return none();
      return stepped(d->body, "delta");
    }
    case Term::Tag::Susp:
      return lift(template_step(e->body, e->hi), e, [](Term& t, const TermPtr& b) { t.body = b; });
    case Term::Tag::Force: {
      const auto& h = e->body;
      if (h->tag == Term::Tag::Susp && h->hi == e->hi && h->lo == e->lo && is_normal_template(h->body, e->hi)) {
        if (auto r = splice(*h, e->sub)) return stepped(*r, "force-susp");
        return none();
      }
      return lift(step(h), e, [](Term& t, const TermPtr& b) { t.body = b; });
    }
    case Term::Tag::Store: return lift(step(e->body), e, [](Term& t, const TermPtr& b) { t.body = b; });
    case Term::Tag::Load: {
      const auto& b = e->body;
      if (b->tag == Term::Tag::Store && b->hi == e->hi && b->lo == e->lo && is_weak_normal(b->body))
        return stepped(single_subst_term(e->name, b->body, e->hi, e->cont), "load-store");
      return lift(step(b), e, [](Term& t, const TermPtr& x) { t.body = x; });
    }
    case Term::Tag::TApp: {
      const auto& h = e->body;
      if (h->tag == Term::Tag::TLam)
        return stepped(single_subst_term_type(h->name, e->type, erase_kind(h->kind), h->body), "type-beta");
      return lift(step(h), e, [](Term& t, const TermPtr& x) { t.body = x; });
    }
    case Term::Tag::App: {
      const auto& h = e->body;
      if (h->tag == Term::Tag::Lam && is_weak_normal(e->cont))
        return stepped(single_subst_term(h->name, e->cont, h->type ? h->type->mode : Mode{}, h->body), "beta");
      auto r = step(h);
      if (r.stepped) return lift(r, e, [](Term& t, const TermPtr& x) { t.body = x; });
      if (!is_weak_normal(h)) return none();
      return lift(step(e->cont), e, [](Term& t, const TermPtr& x) { t.cont = x; });
    }
    case Term::Tag::Ctor:
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (is_weak_normal(e->args[i])) continue;
        return lift(step(e->args[i]), e, [i](Term& t, const TermPtr& x) { t.args[i] = x; });
      }
      return none();
    case Term::Tag::Match: {
      const auto& s = e->body;
      if (s->tag == Term::Tag::Ctor && is_weak_normal(s)) {
        for (const auto& b : e->branches) {
          if (b.ctor != s->name) continue;
          if (b.binders.size() != s->args.size()) return none();
          Subst sigma;
          for (size_t i = 0; i < b.binders.size(); ++i) sigma.push_back(sub_term(b.binders[i], s->args[i], e->hi));
          return stepped(subst_term(sigma, measure_of(sigma), b.body), "match");
        }
        return none();
      }
      return lift(step(s), e, [](Term& t, const TermPtr& x) { t.body = x; });
    }
  }
  return none();
}

StepResult Evaluator::template_step(const TermPtr& e, const Mode& m) const {
  switch (e->tag) {
    case Term::Tag::Var:
    case Term::Tag::One:
    case Term::Tag::Def:
    case Term::Tag::Annot: return none();
    case Term::Tag::Susp:
    case Term::Tag::TLam:
    case Term::Tag::Lam:
      return lift(template_step(e->body, m), e, [](Term& t, const TermPtr& b) { t.body = b; });
    case Term::Tag::TApp:
      return lift(template_step(e->body, m), e, [](Term& t, const TermPtr& b) { t.body = b; });
    case Term::Tag::Force: {
      const auto& h = e->body;
      if (spec_.geq(e->hi, m)) {
        if (h->tag == Term::Tag::Susp && h->hi == e->hi && h->lo == e->lo && is_normal_template(h->body, e->hi)) {
          if (auto r = splice(*h, e->sub)) return stepped(*r, "splice");
          return none();
        }
        return lift(step(h), e, [](Term& t, const TermPtr& b) { t.body = b; });
      }
      return lift(template_step(h, m), e, [](Term& t, const TermPtr& b) { t.body = b; });
    }
    case Term::Tag::Store:
      if (spec_.geq(e->hi, m)) return lift(step(e->body), e, [](Term& t, const TermPtr& b) { t.body = b; });
      return lift(template_step(e->body, m), e, [](Term& t, const TermPtr& b) { t.body = b; });
    case Term::Tag::Load: {
      const auto& b = e->body;
      if (spec_.geq(e->lo, m)) {
        if (!is_weak_normal(b)) return lift(step(b), e, [](Term& t, const TermPtr& x) { t.body = x; });
      } else if (!is_normal_template(b, m)) {
        return lift(template_step(b, m), e, [](Term& t, const TermPtr& x) { t.body = x; });
      }
      return lift(template_step(e->cont, m), e, [](Term& t, const TermPtr& x) { t.cont = x; });
    }
    case Term::Tag::App: {
      auto r = template_step(e->body, m);
      if (r.stepped) return lift(r, e, [](Term& t, const TermPtr& x) { t.body = x; });
      if (!is_normal_template(e->body, m)) return none();
      return lift(template_step(e->cont, m), e, [](Term& t, const TermPtr& x) { t.cont = x; });
    }
    case Term::Tag::Ctor:
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (is_normal_template(e->args[i], m)) continue;
        return lift(template_step(e->args[i], m), e, [i](Term& t, const TermPtr& x) { t.args[i] = x; });
      }
      return none();
    case Term::Tag::Match: {
      if (!is_normal_template(e->body, m))
        return lift(template_step(e->body, m), e, [](Term& t, const TermPtr& x) { t.body = x; });
      for (size_t i = 0; i < e->branches.size(); ++i) {
        if (is_normal_template(e->branches[i].body, m)) continue;
        return lift(template_step(e->branches[i].body, m), e,
                    [i](Term& t, const TermPtr& x) { t.branches[i].body = x; });
      }
      return none();
    }
  }
  return none();
}

bool Evaluator::is_weak_neutral(const TermPtr& e) const {
  switch (e->tag) {
    case Term::Tag::Var: return true;
    case Term::Tag::Force:
    case Term::Tag::Load:
    case Term::Tag::TApp:
    case Term::Tag::Match: return is_weak_neutral(e->body);
    case Term::Tag::App: return is_weak_neutral(e->body) && is_weak_normal(e->cont);
    default: return false;
  }
}

bool Evaluator::is_weak_normal(const TermPtr& e) const {
  switch (e->tag) {
    case Term::Tag::Susp: return is_normal_template(e->body, e->hi);
    case Term::Tag::Store: return is_weak_normal(e->body);
    case Term::Tag::TLam:
    case Term::Tag::Lam:
    case Term::Tag::One: return true;
    case Term::Tag::Ctor:
      for (const auto& a : e->args)
        if (!is_weak_normal(a)) return false;
      return true;
    default: return is_weak_neutral(e);
  }
}

bool Evaluator::is_normal_template(const TermPtr& e, const Mode& k) const {
  switch (e->tag) {
    case Term::Tag::Var:
    case Term::Tag::One:
    case Term::Tag::Def: return true;
    case Term::Tag::Susp:
    case Term::Tag::TLam:
    case Term::Tag::Lam:
    case Term::Tag::TApp: return is_normal_template(e->body, k);
    case Term::Tag::Force:
      return spec_.geq(e->hi, k) ? is_weak_neutral(e->body) : is_normal_template(e->body, k);
    case Term::Tag::Store: return spec_.geq(e->hi, k) ? is_weak_normal(e->body) : is_normal_template(e->body, k);
    case Term::Tag::Load:
      return (spec_.geq(e->lo, k) ? is_weak_normal(e->body) : is_normal_template(e->body, k)) &&
             is_normal_template(e->cont, k);
    case Term::Tag::App: return is_normal_template(e->body, k) && is_normal_template(e->cont, k);
    case Term::Tag::Ctor:
      for (const auto& a : e->args)
        if (!is_normal_template(a, k)) return false;
      return true;
    case Term::Tag::Match:
      if (!is_normal_template(e->body, k)) return false;
      for (const auto& b : e->branches)
        if (!is_normal_template(b.body, k)) return false;
      return true;
    case Term::Tag::Annot: return false;
  }
  return false;
}

EvalOutcome evaluate(const Evaluator& ev, const TermPtr& e, size_t fuel, std::vector<TraceEntry>* trace) {
  EvalOutcome out;
  out.term = e;
  if (trace) trace->push_back({0, "start", e});
  while (true) {
    auto r = ev.step(out.term);
    if (!r.stepped) {
      out.kind = ev.is_weak_normal(out.term) ? EvalOutcome::Kind::Value : EvalOutcome::Kind::Stuck;
      return out;
    }
    if (out.steps >= fuel) {
      out.kind = EvalOutcome::Kind::FuelExhausted;
      return out;
    }
    out.term = r.term;
    ++out.steps;
    if (trace) trace->push_back({out.steps, r.rule, out.term});
  }
}

std::string to_string(EvalOutcome::Kind k) {
  switch (k) {
    case EvalOutcome::Kind::Value: return "VALUE";
    case EvalOutcome::Kind::FuelExhausted: return "FUEL_EXHAUSTED";
    case EvalOutcome::Kind::Stuck: return "STUCK";
  }
  return "?";
}

}  // namespace elevator
