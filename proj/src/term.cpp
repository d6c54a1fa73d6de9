#include "isos/term.hpp"

#include <functional>
#include <sstream>
#include <unordered_set>

namespace isos {

Signature::Signature(std::vector<Operator> operators) : operators_(std::move(operators)) {
  std::unordered_set<std::string> seen;
  for (const auto& op : operators_) {
    if (op.name.empty()) throw Error("operator name must be nonempty");
    if (!seen.insert(op.name).second) throw Error("duplicate operator '" + op.name + "'");
  }
}

const Operator* Signature::find(std::string_view name) const {
  for (const auto& op : operators_) {
    if (op.name == name) return &op;
  }
  return nullptr;
}

const Operator& Signature::at(std::string_view name) const {
  const Operator* op = find(name);
  if (!op) throw UnknownOperator("unknown operator '" + std::string(name) + "'");
  return *op;
}

Signature Signature::extended(std::vector<Operator> more) const {
  std::vector<Operator> all = operators_;
  all.insert(all.end(), more.begin(), more.end());
  return Signature(std::move(all));
}

MetaVar MetaVar::x(std::uint32_t j) {
  if (j == 0) throw Error("metavariable indices are 1-based");
  return {Kind::X, j};
}

MetaVar MetaVar::y(std::uint32_t j) {
  if (j == 0) throw Error("metavariable indices are 1-based");
  return {Kind::Y, j};
}

std::string to_string(const MetaVar& v) {
  return (v.kind == MetaVar::Kind::X ? "x" : "y") + std::to_string(v.index);
}

namespace {

class SelfAttribute final : public Attribute {
 public:
  bool equals(const Attribute& other) const override { return this == &other; }
  std::size_t hash() const override { return 0x5e1f; }
  std::string to_string() const override { return "self"; }
};

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

const AttributePtr& self_attribute() {
  static const AttributePtr instance = std::make_shared<SelfAttribute>();
  return instance;
}

bool same_attribute(const AttributePtr& a, const AttributePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->equals(*b);
}

struct Term::Rep {
  Kind kind;
  MetaVar var;
  std::string op;
  AttributePtr attribute;
  std::vector<Term> children;
  std::size_t hash;
  std::size_t size;
};

Term Term::var(MetaVar v) {
  std::size_t h = mix(mix(1, static_cast<std::size_t>(v.kind)), v.index);
  return Term(std::make_shared<const Rep>(Rep{Kind::Var, v, {}, nullptr, {}, h, 1}));
}

Term Term::node(std::string op, std::vector<Term> children, AttributePtr attribute) {
  std::size_t h = mix(2, std::hash<std::string>{}(op));
  if (attribute) h = mix(h, attribute->hash());
  std::size_t size = 1;
  for (const auto& c : children) {
    h = mix(h, c.hash());
    size += c.size();
  }
  return Term(std::make_shared<const Rep>(
      Rep{Kind::Node, {}, std::move(op), std::move(attribute), std::move(children), h, size}));
}

Term Term::hole() {
  static const Term instance(std::make_shared<const Rep>(Rep{Kind::Hole, {}, {}, nullptr, {}, 3, 1}));
  return instance;
}

Term::Kind Term::kind() const { return rep_->kind; }

const MetaVar& Term::var() const {
  if (!is_var()) throw Error("term is not a metavariable");
  return rep_->var;
}

const std::string& Term::op() const {
  if (!is_node()) throw Error("term is not an operator node");
  return rep_->op;
}

const AttributePtr& Term::attribute() const { return rep_->attribute; }
std::span<const Term> Term::children() const { return rep_->children; }
std::size_t Term::hash() const { return rep_->hash; }
std::size_t Term::size() const { return rep_->size; }

bool operator==(const Term& a, const Term& b) {
  if (a.rep_ == b.rep_) return true;
  const auto& x = *a.rep_;
  const auto& y = *b.rep_;
  if (x.hash != y.hash || x.kind != y.kind || x.size != y.size) return false;
  switch (x.kind) {
    case Term::Kind::Hole:
      return true;
    case Term::Kind::Var:
      return x.var == y.var;
    case Term::Kind::Node:
      if (x.op != y.op || !same_attribute(x.attribute, y.attribute)) return false;
      if (x.children.size() != y.children.size()) return false;
      for (std::size_t i = 0; i < x.children.size(); ++i) {
        if (!(x.children[i] == y.children[i])) return false;
      }
      return true;
  }
  return false;
}

namespace {

// Rebuilds t bottom-up; `leaf` maps Var/Hole leaves, `attr` maps attributes.
// Untouched subtrees are shared rather than copied.
Term rebuild(const Term& t, const std::function<Term(const Term&)>& leaf,
             const std::function<AttributePtr(const AttributePtr&)>& attr) {
  if (!t.is_node()) return leaf(t);
  bool changed = false;
  std::vector<Term> children;
  children.reserve(t.arity());
  for (const auto& c : t.children()) {
    children.push_back(rebuild(c, leaf, attr));
    changed = changed || children.back().identity() != c.identity();
  }
  AttributePtr a = attr(t.attribute());
  changed = changed || a != t.attribute();
  if (!changed) return t;
  return Term::node(t.op(), std::move(children), std::move(a));
}

AttributePtr keep_attribute(const AttributePtr& a) { return a; }

}  // namespace

Term substitute(const Term& t, const Binding& binding) {
  if (binding.empty()) return t;
  return rebuild(
      t,
      [&](const Term& leaf) {
        if (leaf.is_var()) {
          auto it = binding.find(leaf.var());
          if (it != binding.end()) return it->second;
        }
        return leaf;
      },
      keep_attribute);
}

Term substitute(const Signature& sig, const Term& t, const Binding& binding) {
  for (const auto& [v, replacement] : binding) validate_term(sig, replacement);
  return substitute(t, binding);
}

Term bind_self_attribute(const Term& t, const AttributePtr& attribute) {
  return rebuild(
      t, [](const Term& leaf) { return leaf; },
      [&](const AttributePtr& a) { return a == self_attribute() ? attribute : a; });
}

Term fill_holes(const Term& t, const Term& filler) {
  return rebuild(
      t, [&](const Term& leaf) { return leaf.is_hole() ? filler : leaf; }, keep_attribute);
}

namespace {

void collect_metavars(const Term& t, std::set<MetaVar>& out) {
  if (t.is_var()) {
    out.insert(t.var());
  } else if (t.is_node()) {
    for (const auto& c : t.children()) collect_metavars(c, out);
  }
}

}  // namespace

std::set<MetaVar> metavars(const Term& t) {
  std::set<MetaVar> out;
  collect_metavars(t, out);
  return out;
}

std::size_t count_holes(const Term& t) {
  if (t.is_hole()) return 1;
  std::size_t n = 0;
  if (t.is_node()) {
    for (const auto& c : t.children()) n += count_holes(c);
  }
  return n;
}

bool is_closed(const Term& t) {
  if (!t.is_node()) return false;
  for (const auto& c : t.children()) {
    if (!is_closed(c)) return false;
  }
  return true;
}

void validate_term(const Signature& sig, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return;
    case Term::Kind::Hole:
      throw UnexpectedHole("hole outside of a context");
    case Term::Kind::Node:
      break;
  }
  const Operator* op = sig.find(t.op());
  if (!op) throw UnknownOperator("unknown operator '" + t.op() + "'");
  if (op->arity != t.arity()) {
    throw ArityMismatch("operator '" + t.op() + "' expects " + std::to_string(op->arity) +
                        " arguments, got " + std::to_string(t.arity()));
  }
  if (op->parameterized != static_cast<bool>(t.attribute())) {
    throw ArityMismatch("operator '" + t.op() + "' " +
                        (op->parameterized ? "requires" : "does not take") + " an attribute");
  }
  for (const auto& c : t.children()) validate_term(sig, c);
}

void validate_program(const Signature& sig, const Term& t) {
  validate_term(sig, t);
  if (!metavars(t).empty()) throw OpenTerm("program contains metavariables: " + to_string(t));
}

std::string to_string(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return to_string(t.var());
    case Term::Kind::Hole:
      return "[]";
    case Term::Kind::Node:
      break;
  }
  std::string out = t.op();
  if (t.attribute()) out += "<" + t.attribute()->to_string() + ">";
  if (t.arity() == 0) return out;
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    out += to_string(t.child(i));
  }
  out += ')';
  return out;
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }

}  // namespace isos
