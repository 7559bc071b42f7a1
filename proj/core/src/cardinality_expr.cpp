#include <cctype>

#include "efq/quantifiers.hpp"

namespace efq::detail {

struct CardinalityExpr::Node {
  enum class Kind { Literal, Size, Domain, Unary, Binary } kind = Kind::Literal;
  long long value = 0;
  std::string op;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const CardinalityExpr::Node>;
using Node = CardinalityExpr::Node;

// Precedence climbing: || < && < comparisons < + - < * / % < unary.
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    auto n = parse_or();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(const std::string& tok) {
    skip();
    if (text_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  static NodePtr binary(std::string op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = std::move(op);
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  NodePtr parse_or() {
    auto l = parse_and();
    while (eat("||")) l = binary("||", l, parse_and());
    return l;
  }

  NodePtr parse_and() {
    auto l = parse_cmp();
    while (eat("&&")) l = binary("&&", l, parse_cmp());
    return l;
  }

  NodePtr parse_cmp() {
    auto l = parse_add();
    for (const char* op : {"==", "!=", "<=", ">=", "<", ">"}) {
      if (eat(op)) return binary(op, l, parse_add());
    }
    return l;
  }

  NodePtr parse_add() {
    auto l = parse_mul();
    while (true) {
      if (eat("+")) l = binary("+", l, parse_mul());
      else if (eat("-")) l = binary("-", l, parse_mul());
      else return l;
    }
  }

  NodePtr parse_mul() {
    auto l = parse_unary();
    while (true) {
      if (eat("*")) l = binary("*", l, parse_unary());
      else if (eat("/")) l = binary("/", l, parse_unary());
      else if (eat("%")) l = binary("%", l, parse_unary());
      else return l;
    }
  }

  NodePtr parse_unary() {
    skip();
    if (pos_ < text_.size() && text_[pos_] == '!' &&
        (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '=')) {
      ++pos_;
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Unary;
      n->op = "!";
      n->lhs = parse_unary();
      return n;
    }
    if (eat("-")) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Unary;
      n->op = "-";
      n->lhs = parse_unary();
      return n;
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip();
    if (eat("(")) {
      auto n = parse_or();
      if (!eat(")")) fail("expected ')'");
      return n;
    }
    auto n = std::make_shared<Node>();
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      long long v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        v = v * 10 + (text_[pos_++] - '0');
      n->kind = Node::Kind::Literal;
      n->value = v;
      return n;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string word = text_.substr(start, pos_ - start);
    if (word == "size") n->kind = Node::Kind::Size;
    else if (word == "domain") n->kind = Node::Kind::Domain;
    else {
      pos_ = start;
      fail(word.empty() ? "expected expression" : "unknown identifier '" + word + "'");
    }
    return n;
  }
};

long long eval(const Node& n, long long size, long long domain) {
  switch (n.kind) {
    case Node::Kind::Literal: return n.value;
    case Node::Kind::Size: return size;
    case Node::Kind::Domain: return domain;
    case Node::Kind::Unary: {
      long long v = eval(*n.lhs, size, domain);
      return n.op == "!" ? (v == 0) : -v;
    }
    case Node::Kind::Binary: break;
  }
  long long a = eval(*n.lhs, size, domain);
  if (n.op == "&&") return a != 0 && eval(*n.rhs, size, domain) != 0;
  if (n.op == "||") return a != 0 || eval(*n.rhs, size, domain) != 0;
  long long b = eval(*n.rhs, size, domain);
  if (n.op == "+") return a + b;
  if (n.op == "-") return a - b;
  if (n.op == "*") return a * b;
  if (n.op == "/" || n.op == "%") {
    if (b == 0) throw InputError("division by zero in cardinality predicate");
    return n.op == "/" ? a / b : a % b;
  }
  if (n.op == "==") return a == b;
  if (n.op == "!=") return a != b;
  if (n.op == "<") return a < b;
  if (n.op == "<=") return a <= b;
  if (n.op == ">") return a > b;
  return a >= b;
}

}  // namespace

CardinalityExpr::CardinalityExpr(const std::string& text) : root_(Parser(text).parse()) {}

long long CardinalityExpr::evaluate(long long size, long long domain) const {
  return eval(*root_, size, domain);
}

}  // namespace efq::detail
