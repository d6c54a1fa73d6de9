#include "isos/while_lang.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <sstream>

namespace isos::lang {

namespace {

constexpr Value kMax = std::numeric_limits<Value>::max();

Value sat_add(Value a, Value b) { return a > kMax - b ? kMax : a + b; }
Value sat_mul(Value a, Value b) {
  if (a == 0 || b == 0) return 0;
  return a > kMax / b ? kMax : a * b;
}

std::size_t mix(std::size_t seed, std::size_t v) { return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)); }

}  // namespace

// ---------------------------------------------------------------------------
// Store

Store::Store(std::initializer_list<std::pair<const std::string, Value>> init) {
  for (const auto& [k, v] : init) {
    if (v != 0) values_[k] = v;
  }
}

Value Store::get(const std::string& var) const {
  auto it = values_.find(var);
  return it == values_.end() ? 0 : it->second;
}

Store Store::updated(const std::string& var, Value v) const {
  Store out = *this;
  if (v == 0) {
    out.values_.erase(var);
  } else {
    out.values_[var] = v;
  }
  return out;
}

std::string Store::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : values_) {
    if (!first) out += ",";
    first = false;
    out += k + "=" + std::to_string(v);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Expr

Expr Expr::constant(Value n) { return Expr(std::make_shared<const Rep>(Rep{Kind::Const, n, {}, nullptr, nullptr})); }
Expr Expr::variable(std::string name) {
  return Expr(std::make_shared<const Rep>(Rep{Kind::Var, 0, std::move(name), nullptr, nullptr}));
}
Expr Expr::binary(Kind k, Expr a, Expr b) {
  return Expr(std::make_shared<const Rep>(
      Rep{k, 0, {}, std::make_shared<const Expr>(std::move(a)), std::make_shared<const Expr>(std::move(b))}));
}
Expr Expr::plus(Expr a, Expr b) { return binary(Kind::Plus, std::move(a), std::move(b)); }
Expr Expr::monus(Expr a, Expr b) { return binary(Kind::Monus, std::move(a), std::move(b)); }
Expr Expr::times(Expr a, Expr b) { return binary(Kind::Times, std::move(a), std::move(b)); }

bool Expr::operator==(const Expr& o) const {
  if (rep_ == o.rep_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Const:
      return value() == o.value();
    case Kind::Var:
      return name() == o.name();
    default:
      return lhs() == o.lhs() && rhs() == o.rhs();
  }
}

std::size_t Expr::hash() const {
  std::size_t h = static_cast<std::size_t>(kind());
  switch (kind()) {
    case Kind::Const:
      return mix(h, std::hash<Value>{}(value()));
    case Kind::Var:
      return mix(h, std::hash<std::string>{}(name()));
    default:
      return mix(mix(h, lhs().hash()), rhs().hash());
  }
}

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Plus:
    case Expr::Kind::Monus:
      return 1;
    case Expr::Kind::Times:
      return 2;
    default:
      return 3;
  }
}

std::string print_expr(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const:
      return std::to_string(e.value());
    case Expr::Kind::Var:
      return e.name();
    default:
      break;
  }
  int p = precedence(e.kind());
  std::string l = print_expr(e.lhs());
  std::string r = print_expr(e.rhs());
  if (precedence(e.lhs().kind()) < p) l = "(" + l + ")";
  if (precedence(e.rhs().kind()) <= p) r = "(" + r + ")";
  const char* op = e.kind() == Expr::Kind::Plus ? " + " : e.kind() == Expr::Kind::Monus ? " - " : " * ";
  return l + op + r;
}

}  // namespace

std::string Expr::to_string() const { return print_expr(*this); }

Value eval_expr(const Expr& e, const Store& s) {
  switch (e.kind()) {
    case Expr::Kind::Const:
      return e.value();
    case Expr::Kind::Var:
      return s.get(e.name());
    case Expr::Kind::Plus:
      return sat_add(eval_expr(e.lhs(), s), eval_expr(e.rhs(), s));
    case Expr::Kind::Monus: {
      Value a = eval_expr(e.lhs(), s);
      Value b = eval_expr(e.rhs(), s);
      return a > b ? a - b : 0;
    }
    case Expr::Kind::Times:
      return sat_mul(eval_expr(e.lhs(), s), eval_expr(e.rhs(), s));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Attributes

bool AssignAttr::equals(const Attribute& other) const {
  const auto* o = dynamic_cast<const AssignAttr*>(&other);
  return o && o->var_ == var_ && o->expr_ == expr_;
}
std::size_t AssignAttr::hash() const { return mix(std::hash<std::string>{}(var_), expr_.hash()); }
std::string AssignAttr::to_string() const { return var_ + " := " + expr_.to_string(); }

bool CondAttr::equals(const Attribute& other) const {
  const auto* o = dynamic_cast<const CondAttr*>(&other);
  return o && o->expr_ == expr_;
}
std::size_t CondAttr::hash() const { return mix(17, expr_.hash()); }
std::string CondAttr::to_string() const { return expr_.to_string(); }

// ---------------------------------------------------------------------------
// Program constructors

Program skip() { return Term::node(ops::kSkip); }
Program assign(const std::string& var, Expr e) {
  return Term::node(ops::kAssign, {}, std::make_shared<const AssignAttr>(var, std::move(e)));
}
Program seq(Program p, Program q) { return Term::node(ops::kSeq, {std::move(p), std::move(q)}); }
Program while_loop(Expr cond, Program body) {
  return Term::node(ops::kWhile, {std::move(body)}, std::make_shared<const CondAttr>(std::move(cond)));
}
Program floor_of(Program p) { return Term::node(ops::kFloor, {std::move(p)}); }
Program interleave(Program p, Program q) { return Term::node(ops::kInterleave, {std::move(p), std::move(q)}); }
Program branch(Program p, Program q) { return Term::node(ops::kBranch, {std::move(p), std::move(q)}); }
Program ceil_of(Program p) { return Term::node(ops::kCeil, {std::move(p)}); }

const Signature& base_signature() {
  static const Signature sig({{ops::kSkip, 0, false},
                              {ops::kAssign, 0, true},
                              {ops::kSeq, 2, false},
                              {ops::kWhile, 1, true}});
  return sig;
}

const Signature& full_signature() {
  static const Signature sig = base_signature().extended({{ops::kFloor, 1, false},
                                                          {ops::kInterleave, 2, false},
                                                          {ops::kBranch, 2, false},
                                                          {ops::kCeil, 1, false}});
  return sig;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
 public:
  Parser(std::string_view text, bool holes) : text_(text), holes_(holes) {}

  Term program() {
    Term t = seq_level();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return t;
  }

  Expr expression_only() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(std::string_view tok) {
    skip_ws();
    return text_.substr(pos_, tok.size()) == tok;
  }

  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  std::optional<std::string> peek_ident() {
    skip_ws();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) return std::nullopt;
    std::size_t end = pos_;
    while (end < text_.size() && is_ident_char(text_[end])) ++end;
    return std::string(text_.substr(pos_, end - pos_));
  }

  bool accept_keyword(std::string_view kw) {
    auto id = peek_ident();
    if (!id || *id != kw) return false;
    pos_ += kw.size();
    return true;
  }

  static bool is_keyword(const std::string& id) {
    return id == "skip" || id == "while" || id == "floor" || id == "ceil";
  }

  Term seq_level() {
    Term left = binary_level();
    if (accept(";")) return seq(std::move(left), seq_level());
    return left;
  }

  Term binary_level() {
    Term left = atom();
    for (;;) {
      if (accept("<|")) {
        left = interleave(std::move(left), atom());
      } else if (accept("\\/")) {
        left = branch(std::move(left), atom());
      } else {
        return left;
      }
    }
  }

  Term atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of program");
    if (accept("(")) {
      Term t = seq_level();
      expect(")");
      return t;
    }
    if (peek("[]")) {
      if (!holes_) fail("hole is not allowed in a program");
      pos_ += 2;
      return Term::hole();
    }
    if (accept_keyword("skip")) return skip();
    if (accept_keyword("while")) {
      Expr cond = expr();
      expect("{");
      Term body = seq_level();
      expect("}");
      return while_loop(std::move(cond), std::move(body));
    }
    if (accept_keyword("floor")) {
      expect("(");
      Term t = seq_level();
      expect(")");
      return floor_of(std::move(t));
    }
    if (accept_keyword("ceil")) {
      expect("(");
      Term t = seq_level();
      expect(")");
      return ceil_of(std::move(t));
    }
    if (auto id = peek_ident()) {
      pos_ += id->size();
      expect(":=");
      return assign(*id, expr());
    }
    fail("expected a program");
  }

  Expr expr() {
    Expr left = term();
    for (;;) {
      if (accept("+")) {
        left = Expr::plus(std::move(left), term());
      } else if (accept("-")) {
        left = Expr::monus(std::move(left), term());
      } else {
        return left;
      }
    }
  }

  Expr term() {
    Expr left = factor();
    while (accept("*")) left = Expr::times(std::move(left), factor());
    return left;
  }

  Expr factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      Value v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        Value d = static_cast<Value>(text_[pos_] - '0');
        if (v > (kMax - d) / 10) {
          pos_ = start;
          fail("numeral out of range");
        }
        v = v * 10 + d;
        ++pos_;
      }
      return Expr::constant(v);
    }
    if (auto id = peek_ident()) {
      if (is_keyword(*id)) fail("keyword '" + *id + "' used as a variable");
      pos_ += id->size();
      return Expr::variable(*id);
    }
    fail("expected an expression");
  }

  std::string_view text_;
  bool holes_;
  std::size_t pos_ = 0;
};

int program_level(const Term& t) {
  if (!t.is_node()) return 3;
  if (t.op() == ops::kSeq) return 1;
  if (t.op() == ops::kInterleave || t.op() == ops::kBranch) return 2;
  return 3;
}

std::string print_at(const Term& t) {
  if (t.is_hole()) return "[]";
  if (t.is_var()) return to_string(t);
  const std::string& op = t.op();
  if (op == ops::kSkip) return "skip";
  if (op == ops::kAssign) return t.attribute() ? t.attribute()->to_string() : "?:=?";
  if (op == ops::kWhile) {
    return "while " + (t.attribute() ? t.attribute()->to_string() : std::string("?")) + " { " + print_at(t.child(0)) +
           " }";
  }
  if (op == ops::kFloor) return "floor(" + print_at(t.child(0)) + ")";
  if (op == ops::kCeil) return "ceil(" + print_at(t.child(0)) + ")";
  if (op == ops::kSeq) {
    std::string l = print_at(t.child(0));
    if (program_level(t.child(0)) <= 1) l = "(" + l + ")";
    return l + " ; " + print_at(t.child(1));
  }
  if (op == ops::kInterleave || op == ops::kBranch) {
    std::string l = print_at(t.child(0));
    std::string r = print_at(t.child(1));
    if (program_level(t.child(0)) < 2) l = "(" + l + ")";
    if (program_level(t.child(1)) <= 2) r = "(" + r + ")";
    return l + (op == ops::kInterleave ? " <| " : " \\/ ") + r;
  }
  return to_string(t);
}

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text, false).expression_only(); }
Program parse_program(std::string_view text) { return Parser(text, false).program(); }
Term parse_term(std::string_view text) { return Parser(text, true).program(); }

Store parse_store(std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  bool braced = pos < text.size() && text[pos] == '{';
  if (braced) ++pos;
  Store s;
  std::set<std::string> seen;
  skip_ws();
  bool empty = pos >= text.size() || (braced && text[pos] == '}');
  while (!empty) {
    skip_ws();
    if (pos >= text.size() || !is_ident_start(text[pos])) throw ParseError("expected a variable", pos);
    std::size_t start = pos;
    while (pos < text.size() && is_ident_char(text[pos])) ++pos;
    std::string var(text.substr(start, pos - start));
    if (!seen.insert(var).second) throw ParseError("variable '" + var + "' assigned twice", start);
    skip_ws();
    if (pos >= text.size() || text[pos] != '=') throw ParseError("expected '='", pos);
    ++pos;
    skip_ws();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
      throw ParseError("expected a number", pos);
    }
    Value v = 0;
    std::size_t num = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      Value d = static_cast<Value>(text[pos] - '0');
      if (v > (kMax - d) / 10) throw ParseError("number out of range", num);
      v = v * 10 + d;
      ++pos;
    }
    s = s.updated(var, v);
    skip_ws();
    if (pos < text.size() && text[pos] == ',') {
      ++pos;
      continue;
    }
    break;
  }
  skip_ws();
  if (braced) {
    if (pos >= text.size() || text[pos] != '}') throw ParseError("expected '}'", pos);
    ++pos;
    skip_ws();
  }
  if (pos != text.size()) throw ParseError("unexpected '" + std::string(1, text[pos]) + "'", pos);
  return s;
}

std::string print_program(const Term& t) { return print_at(t); }

std::vector<std::string> corpus_lines(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

std::vector<Program> parse_program_corpus(std::string_view text) {
  std::vector<Program> out;
  for (const auto& line : corpus_lines(text)) out.push_back(parse_program(line));
  return out;
}

// ---------------------------------------------------------------------------
// Specifications

bool default_interrupt_predicate(const Store& s) { return s.get("x") == 42; }
bool default_branch_predicate(const Store& s) { return s.get("x") == 0; }

namespace {

using Scheme = RuleScheme<Store>;
using SE = StateExpr<Store>;
using G = Guard<Store>;
using C = Conclusion<Store>;
using B = Bindings<Store>;

constexpr Shape Om = Shape::Omitted;
constexpr Shape Pr = Shape::Progressing;
constexpr Shape Te = Shape::Terminating;

Term x(std::uint32_t j) { return Term::var(MetaVar::x(j)); }
Term y(std::uint32_t j) { return Term::var(MetaVar::y(j)); }
Term node(const char* op, std::vector<Term> kids, AttributePtr attr = nullptr) {
  return Term::node(op, std::move(kids), std::move(attr));
}

Value cond_value(const B& b) { return eval_expr(b.attribute_as<CondAttr>().expr(), b.input()); }

Scheme while1() {
  return {ops::kWhile, {Om}, G{{kInputState}, [](const B& b) { return cond_value(b) == 0; }}, C::terminate(SE::input()),
          "while1"};
}

Scheme while2(bool overlapping) {
  G guard = overlapping ? G{{kInputState}, [](const B&) { return true; }}
                        : G{{kInputState}, [](const B& b) { return cond_value(b) != 0; }};
  return {ops::kWhile, {Om}, std::move(guard),
          C::progress(SE::input(), node(ops::kSeq, {x(1), node(ops::kWhile, {x(1)}, self_attribute())})), "while2"};
}

std::vector<Scheme> base_schemes(bool with_seq) {
  std::vector<Scheme> out;
  out.push_back({ops::kSkip, {}, G::always(), C::terminate(SE::input()), "skip"});
  out.push_back({ops::kAssign, {}, G::always(), C::terminate(SE::opaque({kInputState}, [](const B& b) {
                                                   const auto& a = b.attribute_as<AssignAttr>();
                                                   return b.input().updated(a.var(), eval_expr(a.expr(), b.input()));
                                                 })),
                 "asn"});
  out.push_back(while1());
  out.push_back(while2(false));
  out.push_back({ops::kSeq, {Te, Om}, G::always(), C::progress(SE::premiss_output(1), x(2)), "seq1"});
  if (with_seq) {
    out.push_back(
        {ops::kSeq, {Pr, Om}, G::always(), C::progress(SE::premiss_output(1), node(ops::kSeq, {y(1), x(2)})), "seq2"});
  }
  return out;
}

StorePredicate or_default(const StorePredicate& p, bool (*fallback)(const Store&)) {
  return p ? p : StorePredicate(fallback);
}

Signature with_op(const char* name, std::size_t arity) { return base_signature().extended({{name, arity, false}}); }

}  // namespace

StateDomain<Store> store_domain() {
  StateDomain<Store> d;
  d.display = [](const Store& s) { return s.to_string(); };
  d.sample = [](std::mt19937_64& rng) {
    static const std::vector<Value> values{0, 0, 1, 2, 3, 42};
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    Store s;
    for (const char* v : {"x", "y", kInterruptFlag}) s = s.updated(v, values[pick(rng)]);
    return s;
  };
  return d;
}

namespace {

WhileSpec finish(std::string name, Signature sig, std::vector<Scheme> schemes) {
  WhileSpec spec(std::move(name), std::move(sig), store_domain(), std::move(schemes));
  spec.set_printer([](const Term& t) { return print_program(t); });
  spec.set_attribute_sampler([](const Operator& op, std::mt19937_64& rng) -> AttributePtr {
    ProgramGenOptions options;
    options.vars = {"x", "y", kInterruptFlag};
    options.constants = {0, 1, 2, 42};
    if (op.name == ops::kAssign) {
      std::uniform_int_distribution<std::size_t> pick(0, options.vars.size() - 1);
      return std::make_shared<const AssignAttr>(options.vars[pick(rng)], random_expr(rng, options));
    }
    if (op.name == ops::kWhile) return std::make_shared<const CondAttr>(random_expr(rng, options));
    return nullptr;
  });
  return spec;
}

}  // namespace

WhileSpec build_spec(const WhileVariant& variant) {
  using K = WhileVariant::Kind;
  switch (variant.kind) {
    case K::Base:
      return finish("while", base_signature(), base_schemes(true));
    case K::Floor: {
      auto schemes = base_schemes(true);
      schemes.push_back({ops::kFloor, {Pr}, G::always(),
                         C::progress(SE::constant(Store{}), node(ops::kFloor, {y(1)})), "floor1"});
      schemes.push_back({ops::kFloor, {Te}, G::always(), C::terminate(SE::premiss_output(1)), "floor2"});
      return finish("while+floor", with_op(ops::kFloor, 1), std::move(schemes));
    }
    case K::Interrupt: {
      StorePredicate p = or_default(variant.predicate, default_interrupt_predicate);
      auto schemes = base_schemes(false);
      auto flag = [](const B& b) { return b.input().get(kInterruptFlag); };
      schemes.push_back({ops::kSeq, {Pr, Om}, G{{kInputState}, [flag](const B& b) { return flag(b) == 0; }},
                         C::progress(SE::premiss_output(1), node(ops::kSeq, {y(1), x(2)})), "seq2"});
      schemes.push_back({ops::kSeq, {Pr, Om},
                         G{{kInputState, 1}, [flag, p](const B& b) { return flag(b) != 0 && p(b.output(1)); }},
                         C::progress(SE::premiss_output(1), x(2)), "seq3"});
      schemes.push_back({ops::kSeq, {Pr, Om},
                         G{{kInputState, 1}, [flag, p](const B& b) { return flag(b) != 0 && !p(b.output(1)); }},
                         C::progress(SE::premiss_output(1), node(ops::kSeq, {y(1), x(2)})), "seq4"});
      return finish("while+interrupt", base_signature(), std::move(schemes));
    }
    case K::Interleave: {
      auto schemes = base_schemes(true);
      schemes.push_back({ops::kInterleave, {Pr, Om}, G::always(),
                         C::progress(SE::premiss_output(1), node(ops::kInterleave, {x(2), y(1)})), "interleave1"});
      schemes.push_back(
          {ops::kInterleave, {Te, Om}, G::always(), C::progress(SE::premiss_output(1), x(2)), "interleave2"});
      return finish("while+interleave", with_op(ops::kInterleave, 2), std::move(schemes));
    }
    case K::Branch: {
      StorePredicate p = or_default(variant.predicate, default_branch_predicate);
      auto schemes = base_schemes(true);
      schemes.push_back({ops::kBranch, {Pr, Pr}, G{{kInputState}, [p](const B& b) { return p(b.input()); }},
                         C::progress(SE::premiss_output(1), node(ops::kBranch, {y(1), x(2)})), "branch1"});
      schemes.push_back({ops::kBranch, {Pr, Pr}, G{{kInputState}, [p](const B& b) { return !p(b.input()); }},
                         C::progress(SE::premiss_output(2), node(ops::kBranch, {x(1), y(2)})), "branch2"});
      // Either side terminating ends the branch with the input store.
      schemes.push_back({ops::kBranch, {Te, Om}, G::always(), C::terminate(SE::input()), "branch3"});
      schemes.push_back({ops::kBranch, {Pr, Te}, G::always(), C::terminate(SE::input()), "branch4"});
      return finish("while+branch", with_op(ops::kBranch, 2), std::move(schemes));
    }
    case K::Ceil: {
      auto schemes = base_schemes(true);
      schemes.push_back(
          {ops::kCeil, {Pr}, G::always(), C::progress(SE::premiss_output(1), node(ops::kCeil, {y(1)})), "ceil1"});
      schemes.push_back({ops::kCeil, {Te}, G::always(), C::progress(SE::premiss_output(1), x(1)), "ceil2"});
      return finish("while+ceil", with_op(ops::kCeil, 1), std::move(schemes));
    }
  }
  throw Error("unknown While variant");
}

std::vector<std::string> variant_names() {
  return {"while", "while+floor", "while+interrupt", "while+interleave", "while+branch", "while+ceil"};
}

std::optional<WhileVariant> variant_from_name(std::string_view name) {
  if (name == "while") return WhileVariant::base();
  if (name == "while+floor") return WhileVariant::floor();
  if (name == "while+interrupt") return WhileVariant::interrupt();
  if (name == "while+interleave") return WhileVariant::interleave();
  if (name == "while+branch") return WhileVariant::branch();
  if (name == "while+ceil") return WhileVariant::ceil();
  return std::nullopt;
}

WhileSpec broken_missing_while1() {
  auto schemes = base_schemes(true);
  std::erase_if(schemes, [](const Scheme& s) { return s.label == "while1"; });
  return finish("while-missing-while1", base_signature(), std::move(schemes));
}

WhileSpec broken_overlapping_while() {
  auto schemes = base_schemes(true);
  for (auto& s : schemes) {
    if (s.label == "while2") s = while2(true);
  }
  return finish("while-overlapping-while", base_signature(), std::move(schemes));
}

std::optional<WhileSpec> spec_from_name(std::string_view name) {
  if (auto v = variant_from_name(name)) return build_spec(*v);
  if (name == "fixture:missing-while1") return broken_missing_while1();
  if (name == "fixture:overlapping-while") return broken_overlapping_while();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Probes and generators

std::vector<Store> stores_over(const std::vector<std::string>& vars, const std::vector<Value>& values) {
  std::vector<Store> out{Store{}};
  for (const auto& var : vars) {
    std::vector<Store> next;
    for (const auto& s : out) {
      for (Value v : values) next.push_back(s.updated(var, v));
    }
    out = std::move(next);
  }
  return out;
}

ProbeSet<Store> parse_probe_spec(std::string_view spec) {
  std::vector<std::string> vars;
  std::vector<Value> values;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    char c = spec[i];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      if (!values.empty()) throw ParseError("variables must precede values in probe specifier", i);
      std::string v(1, c);
      if (std::find(vars.begin(), vars.end(), v) != vars.end()) throw ParseError("duplicate probe variable", i);
      vars.push_back(v);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      Value v = static_cast<Value>(c - '0');
      if (std::find(values.begin(), values.end(), v) != values.end()) throw ParseError("duplicate probe value", i);
      values.push_back(v);
    } else {
      throw ParseError("unexpected '" + std::string(1, c) + "' in probe specifier", i);
    }
  }
  if (vars.empty() || values.empty()) throw ParseError("probe specifier needs variables and values", spec.size());
  return ProbeSet<Store>(stores_over(vars, values), false);
}

ProbeSet<Store> parse_probe_lines(std::string_view text) {
  std::vector<Store> stores;
  for (const auto& line : corpus_lines(text)) stores.push_back(parse_store(line == "{}" ? "" : line));
  if (stores.empty()) throw ParseError("probe file lists no stores", 0);
  return ProbeSet<Store>(std::move(stores), false);
}

Expr random_expr(std::mt19937_64& rng, const ProgramGenOptions& options, std::size_t depth) {
  std::uniform_int_distribution<int> kind(0, depth == 0 ? 1 : 4);
  std::uniform_int_distribution<std::size_t> var(0, options.vars.size() - 1);
  std::uniform_int_distribution<std::size_t> cst(0, options.constants.size() - 1);
  switch (kind(rng)) {
    case 0:
      return Expr::constant(options.constants[cst(rng)]);
    case 1:
      return Expr::variable(options.vars[var(rng)]);
    case 2:
      return Expr::plus(random_expr(rng, options, depth - 1), random_expr(rng, options, depth - 1));
    case 3:
      return Expr::monus(random_expr(rng, options, depth - 1), random_expr(rng, options, depth - 1));
    default:
      return Expr::times(random_expr(rng, options, depth - 1), random_expr(rng, options, depth - 1));
  }
}

Program random_program(std::mt19937_64& rng, const ProgramGenOptions& options) {
  std::function<Program(std::size_t)> gen = [&](std::size_t depth) -> Program {
    std::uniform_int_distribution<std::size_t> var(0, options.vars.size() - 1);
    int top = depth == 0 ? 1 : (options.loops ? 3 : 2) + (options.extensions ? 4 : 0);
    std::uniform_int_distribution<int> kind(0, top);
    int k = kind(rng);
    if (!options.loops && k >= 3) ++k;
    switch (k) {
      case 0:
        return skip();
      case 1:
        return assign(options.vars[var(rng)], random_expr(rng, options, 1));
      case 2:
        return seq(gen(depth - 1), gen(depth - 1));
      case 3:
        return while_loop(random_expr(rng, options, 1), gen(depth - 1));
      case 4:
        return floor_of(gen(depth - 1));
      case 5:
        return interleave(gen(depth - 1), gen(depth - 1));
      case 6:
        return branch(gen(depth - 1), gen(depth - 1));
      default:
        return ceil_of(gen(depth - 1));
    }
  };
  return gen(options.max_depth);
}

}  // namespace isos::lang
