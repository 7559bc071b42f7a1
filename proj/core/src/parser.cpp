#include <cctype>

#include "efq/formulas.hpp"

namespace efq {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class FormulaParser {
 public:
  FormulaParser(const std::string& text, const Vocabulary& vocab, const QuantifierSet& qset)
      : text_(text), vocab_(vocab), qset_(qset) {}

  FormulaPtr parse() {
    auto f = parse_or();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  const std::string& text_;
  const Vocabulary& vocab_;
  const QuantifierSet& qset_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) { fail_at(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) { throw ParseError(msg, at); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool eat(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected identifier");
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  FormulaPtr parse_or() {
    auto l = parse_and();
    while (eat('|')) l = Formula::disj(l, parse_and());
    return l;
  }

  FormulaPtr parse_and() {
    auto l = parse_unary();
    while (eat('&')) l = Formula::conj(l, parse_unary());
    return l;
  }

  // If a quantifier name starts at pos_, returns it and its end offset.
  std::optional<std::pair<std::string, std::size_t>> quantifier_here() {
    skip();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) return std::nullopt;
    std::size_t end = pos_;
    while (end < text_.size() && ident_char(text_[end])) ++end;
    std::string word = text_.substr(pos_, end - pos_);
    // `exactly=3` style names: identifier, '=', digits, all adjacent.
    if (end + 1 < text_.size() && text_[end] == '=' &&
        std::isdigit(static_cast<unsigned char>(text_[end + 1]))) {
      std::size_t e2 = end + 1;
      while (e2 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e2]))) ++e2;
      std::string joined = text_.substr(pos_, e2 - pos_);
      if (qset_.find(joined)) return std::make_pair(joined, e2);
      fail("unknown quantifier '" + joined + "'");
    }
    if (!qset_.find(word)) return std::nullopt;
    std::size_t after = end;
    while (after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]))) ++after;
    // A relation of the same name wins when it is followed by an argument list.
    if (vocab_.index_of(word) && after < text_.size() && text_[after] == '(') return std::nullopt;
    return std::make_pair(word, end);
  }

  FormulaPtr parse_unary() {
    if (eat('!')) return Formula::negate(parse_unary());
    if (auto q = quantifier_here()) return parse_quantified(q->first, q->second);
    return parse_primary();
  }

  VarTuple parse_tuple() {
    std::vector<std::string> vars;
    expect('(');
    vars.push_back(identifier());
    while (eat(',')) vars.push_back(identifier());
    expect(')');
    return VarTuple(std::move(vars));
  }

  FormulaPtr parse_quantified(const std::string& name, std::size_t name_end) {
    const std::size_t start = pos_;
    pos_ = name_end;
    const Quantifier& q = *qset_.find(name);
    std::vector<VarTuple> bound;
    if (peek('(')) {
      while (peek('(')) bound.push_back(parse_tuple());
    } else {
      bound.push_back(VarTuple{identifier()});
    }
    if (static_cast<int>(bound.size()) != q.width())
      fail_at("quantifier '" + name + "' has width " + std::to_string(q.width()) + " but " +
                  std::to_string(bound.size()) + " variable tuples were given",
              start);
    for (int j = 0; j < q.width(); ++j)
      if (static_cast<int>(bound[j].size()) != q.type().arities[j])
        fail_at("quantifier '" + name + "' component " + std::to_string(j + 1) + " binds " +
                    std::to_string(q.type().arities[j]) + " variables",
                start);
    expect('.');
    std::vector<FormulaPtr> subs;
    if (q.width() == 1) {
      subs.push_back(parse_or());
    } else {
      expect('(');
      subs.push_back(parse_or());
      while (eat(',')) subs.push_back(parse_or());
      expect(')');
      if (static_cast<int>(subs.size()) != q.width())
        fail_at("quantifier '" + name + "' expects " + std::to_string(q.width()) + " subformulas",
                start);
    }
    return Formula::quant(q, std::move(bound), std::move(subs));
  }

  FormulaPtr parse_primary() {
    if (eat('(')) {
      auto f = parse_or();
      expect(')');
      return f;
    }
    skip();
    const std::size_t start = pos_;
    std::string first = identifier();
    if (eat('(')) {
      auto idx = vocab_.index_of(first);
      if (!idx) fail_at("unknown relation '" + first + "'", start);
      std::vector<std::string> args{identifier()};
      while (eat(',')) args.push_back(identifier());
      expect(')');
      if (static_cast<int>(args.size()) != vocab_.arity(*idx))
        fail_at("relation '" + first + "' has arity " + std::to_string(vocab_.arity(*idx)) +
                    ", got " + std::to_string(args.size()) + " arguments",
                start);
      return Formula::rel(first, std::move(args));
    }
    if (eat('=')) return Formula::eq(first, identifier());
    fail_at("expected '(' or '=' after '" + first + "'", pos_);
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const Vocabulary& vocab,
                         const QuantifierSet& qset) {
  return FormulaParser(text, vocab, qset).parse();
}

}  // namespace efq
