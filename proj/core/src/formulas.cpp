#include "efq/formulas.hpp"

#include <algorithm>

namespace efq {

void Formula::finish() {
  switch (kind_) {
    case Kind::Eq:
    case Kind::Rel:
      size_ = or_size_ = 1;
      depth_ = 0;
      free_ = std::set<std::string>(vars_.begin(), vars_.end());
      return;
    case Kind::Not:
      size_ = subs_[0]->size_ + 1;
      depth_ = subs_[0]->depth_;
      free_ = subs_[0]->free_;
      if (or_sugar_) {
        const Formula& a = *subs_[0]->subs_[0]->subs_[0];
        const Formula& b = *subs_[0]->subs_[1]->subs_[0];
        or_size_ = a.or_size_ + b.or_size_;
      } else {
        or_size_ = subs_[0]->or_size_ + 1;
      }
      return;
    case Kind::And:
      size_ = subs_[0]->size_ + subs_[1]->size_;
      or_size_ = subs_[0]->or_size_ + subs_[1]->or_size_;
      depth_ = std::max(subs_[0]->depth_, subs_[1]->depth_);
      free_ = subs_[0]->free_;
      free_.insert(subs_[1]->free_.begin(), subs_[1]->free_.end());
      return;
    case Kind::Quant:
      size_ = or_size_ = 1;
      depth_ = 0;
      free_.clear();
      for (std::size_t j = 0; j < subs_.size(); ++j) {
        size_ += subs_[j]->size_;
        or_size_ += subs_[j]->or_size_;
        depth_ = std::max(depth_, subs_[j]->depth_);
        for (const auto& v : subs_[j]->free_)
          if (std::find(bound_[j].vars.begin(), bound_[j].vars.end(), v) == bound_[j].vars.end())
            free_.insert(v);
      }
      depth_ += 1;
      return;
  }
}

int Formula::size(SizeMode mode) const { return mode == SizeMode::Standard ? size_ : or_size_; }

bool operator==(const Formula& a, const Formula& b) {
  if (&a == &b) return true;
  if (a.kind_ != b.kind_ || a.vars_ != b.vars_ || a.name_ != b.name_ || a.bound_ != b.bound_ ||
      a.or_sugar_ != b.or_sugar_ || a.subs_.size() != b.subs_.size() || a.size_ != b.size_)
    return false;
  for (std::size_t i = 0; i < a.subs_.size(); ++i)
    if (!(*a.subs_[i] == *b.subs_[i])) return false;
  return true;
}

FormulaPtr Formula::eq(std::string x, std::string y) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Eq;
  f->vars_ = {std::move(x), std::move(y)};
  f->finish();
  return f;
}

FormulaPtr Formula::rel(std::string name, std::vector<std::string> args) {
  if (args.empty()) throw PreconditionError("relation atom needs arguments");
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Rel;
  f->name_ = std::move(name);
  f->vars_ = std::move(args);
  f->finish();
  return f;
}

FormulaPtr Formula::negate(FormulaPtr sub) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Not;
  f->subs_ = {std::move(sub)};
  f->finish();
  return f;
}

FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::And;
  f->subs_ = {std::move(a), std::move(b)};
  f->finish();
  return f;
}

FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Not;
  f->or_sugar_ = true;
  f->subs_ = {conj(negate(std::move(a)), negate(std::move(b)))};
  f->finish();
  return f;
}

FormulaPtr Formula::quant(const Quantifier& q, std::vector<VarTuple> bound,
                          std::vector<FormulaPtr> subs) {
  if (static_cast<int>(bound.size()) != q.width() || static_cast<int>(subs.size()) != q.width())
    throw PreconditionError("quantifier '" + q.name() + "' expects " + std::to_string(q.width()) +
                            " bound tuples and subformulas");
  for (int j = 0; j < q.width(); ++j)
    if (static_cast<int>(bound[j].size()) != q.type().arities[j])
      throw PreconditionError("quantifier '" + q.name() + "' component " + std::to_string(j) +
                              " binds " + std::to_string(q.type().arities[j]) + " variables");
  return quant(q.name(), std::move(bound), std::move(subs));
}

FormulaPtr Formula::quant(std::string name, std::vector<VarTuple> bound,
                          std::vector<FormulaPtr> subs) {
  if (bound.empty() || bound.size() != subs.size())
    throw PreconditionError("quantifier node needs one bound tuple per subformula");
  for (const auto& b : bound)
    if (b.vars.empty()) throw PreconditionError("bound tuple must be nonempty");
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Quant;
  f->name_ = std::move(name);
  f->bound_ = std::move(bound);
  f->subs_ = std::move(subs);
  f->finish();
  return f;
}

FormulaPtr conj_all(const std::vector<FormulaPtr>& parts) {
  FormulaPtr out;
  for (const auto& p : parts) out = out ? Formula::conj(out, p) : p;
  return out;
}

FormulaPtr disj_all(const std::vector<FormulaPtr>& parts) {
  FormulaPtr out;
  for (const auto& p : parts) out = out ? Formula::disj(out, p) : p;
  return out;
}

FormulaPtr false_formula(const std::string& x) { return Formula::negate(Formula::eq(x, x)); }

namespace {

void print(const Formula& f, std::string& out);

// Operands of & and | that print as a quantifier, possibly under negations,
// get parentheses, since a quantifier body extends as far right as possible.
void print_operand(const Formula& f, std::string& out) {
  const Formula* g = &f;
  while (g->kind() == Formula::Kind::Not && !g->is_or_sugar()) g = &g->sub();
  if (g->kind() == Formula::Kind::Quant) {
    out += '(';
    print(f, out);
    out += ')';
  } else {
    print(f, out);
  }
}

void print_tuple(const VarTuple& t, bool bare, std::string& out) {
  if (bare) {
    out += t.vars[0];
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < t.vars.size(); ++i) {
    if (i) out += ',';
    out += t.vars[i];
  }
  out += ')';
}

void print(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::Eq:
      out += f.vars()[0] + " = " + f.vars()[1];
      return;
    case Formula::Kind::Rel:
      out += f.name() + '(';
      for (std::size_t i = 0; i < f.vars().size(); ++i) {
        if (i) out += ',';
        out += f.vars()[i];
      }
      out += ')';
      return;
    case Formula::Kind::Not:
      if (f.is_or_sugar()) {
        out += '(';
        print_operand(f.sub().sub(0).sub(), out);
        out += " | ";
        print_operand(f.sub().sub(1).sub(), out);
        out += ')';
        return;
      }
      out += '!';
      if (f.sub().kind() == Formula::Kind::Eq) {
        out += '(';
        print(f.sub(), out);
        out += ')';
      } else {
        print(f.sub(), out);
      }
      return;
    case Formula::Kind::And:
      out += '(';
      print_operand(f.sub(0), out);
      out += " & ";
      print_operand(f.sub(1), out);
      out += ')';
      return;
    case Formula::Kind::Quant: {
      out += f.name() + ' ';
      const bool single = f.bound().size() == 1;
      for (const auto& b : f.bound()) print_tuple(b, single && b.vars.size() == 1, out);
      out += ". ";
      if (single) {
        print(f.sub(), out);
        return;
      }
      out += '(';
      for (std::size_t j = 0; j < f.subs().size(); ++j) {
        if (j) out += ", ";
        print(f.sub(j), out);
      }
      out += ')';
      return;
    }
  }
}

struct Evaluator {
  const Structure& s;
  const QuantifierSet& qset;
  const EvalTrace& trace;

  Element value(const Assignment& a, const std::string& v) const {
    auto it = a.find(v);
    if (it == a.end()) throw PreconditionError("unbound variable '" + v + "'");
    return it->second;
  }

  bool run(const Formula& f, Assignment& a) const {
    switch (f.kind()) {
      case Formula::Kind::Eq:
        return value(a, f.vars()[0]) == value(a, f.vars()[1]);
      case Formula::Kind::Rel: {
        auto idx = s.vocabulary().index_of(f.name());
        if (!idx) throw InputError("unknown relation '" + f.name() + "'");
        if (static_cast<int>(f.vars().size()) != s.vocabulary().arity(*idx))
          throw InputError("arity mismatch for relation '" + f.name() + "'");
        Tuple t;
        t.reserve(f.vars().size());
        for (const auto& v : f.vars()) t.push_back(value(a, v));
        return s.holds(*idx, t);
      }
      case Formula::Kind::Not:
        return !run(f.sub(), a);
      case Formula::Kind::And:
        return run(f.sub(0), a) && run(f.sub(1), a);
      case Formula::Kind::Quant:
        return run_quant(f, a);
    }
    return false;
  }

  TupleSet ext(const Formula& f, const VarTuple& x, const Assignment& a) const {
    TupleSet out;
    for (const auto& t : tuples_respecting(s.domain_size(), x)) {
      Assignment b = a;
      for (std::size_t i = 0; i < t.size(); ++i) b[x.vars[i]] = t[i];
      if (run(f, b)) out.push_back(t);
    }
    return out;
  }

  bool run_quant(const Formula& f, const Assignment& a) const {
    const Quantifier* q = qset.find(f.name());
    if (!q) throw InputError("unknown quantifier '" + f.name() + "'");
    if (q->width() != static_cast<int>(f.subs().size()))
      throw InputError("quantifier '" + f.name() + "' used with wrong width");
    std::vector<TupleSet> sets;
    sets.reserve(f.subs().size());
    for (std::size_t j = 0; j < f.subs().size(); ++j) {
      if (static_cast<int>(f.bound()[j].size()) != q->type().arities[j])
        throw InputError("quantifier '" + f.name() + "' used with wrong arity");
      sets.push_back(ext(f.sub(j), f.bound()[j], a));
    }
    bool accepted = q->monadic() ? q->accepts_count(s.domain_size(), static_cast<long long>(sets[0].size()))
                                 : q->accepts(s.domain_size(), sets);
    if (trace) trace(f, a, sets, accepted);
    return accepted;
  }
};

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

void validate(const Formula& f, const Vocabulary& vocab, const QuantifierSet& qset) {
  switch (f.kind()) {
    case Formula::Kind::Eq:
      return;
    case Formula::Kind::Rel: {
      auto idx = vocab.index_of(f.name());
      if (!idx) throw InputError("unknown relation '" + f.name() + "'");
      if (static_cast<int>(f.vars().size()) != vocab.arity(*idx))
        throw InputError("relation '" + f.name() + "' has arity " +
                         std::to_string(vocab.arity(*idx)));
      return;
    }
    case Formula::Kind::Quant: {
      const Quantifier* q = qset.find(f.name());
      if (!q) throw InputError("unknown quantifier '" + f.name() + "'");
      if (q->width() != static_cast<int>(f.subs().size()))
        throw InputError("quantifier '" + f.name() + "' has width " + std::to_string(q->width()));
      for (int j = 0; j < q->width(); ++j)
        if (static_cast<int>(f.bound()[j].size()) != q->type().arities[j])
          throw InputError("quantifier '" + f.name() + "' component " + std::to_string(j) +
                           " binds " + std::to_string(q->type().arities[j]) + " variables");
      break;
    }
    default:
      break;
  }
  for (const auto& s : f.subs()) validate(*s, vocab, qset);
}

bool eval(const Context& c, const Formula& f, const QuantifierSet& qset, const EvalTrace& trace) {
  for (const auto& v : f.free_vars())
    if (!c.assignment.count(v)) throw PreconditionError("unbound free variable '" + v + "'");
  Assignment a = c.assignment;
  return Evaluator{*c.structure, qset, trace}.run(f, a);
}

TupleSet extension(const Context& c, const Formula& f, const VarTuple& x,
                   const QuantifierSet& qset) {
  for (const auto& v : f.free_vars())
    if (!c.assignment.count(v) &&
        std::find(x.vars.begin(), x.vars.end(), v) == x.vars.end())
      throw PreconditionError("unbound free variable '" + v + "'");
  EvalTrace none;
  return Evaluator{*c.structure, qset, none}.ext(f, x, c.assignment);
}

}  // namespace efq
