#pragma once

// Signatures, metavariables and immutable terms.
//
// Operators may be parameterized: the While language has one `x := e`
// constant per assignment and one unary `while e` per condition. Such an
// operator family is a single Operator whose term nodes carry an Attribute
// (the assignment or the condition). Rule targets refer to "the attribute
// of the source operator" through self_attribute().

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isos/errors.hpp"

namespace isos {

struct Operator {
  std::string name;
  std::size_t arity = 0;
  bool parameterized = false;
};

class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<Operator> operators);

  const Operator* find(std::string_view name) const;
  const Operator& at(std::string_view name) const;
  const std::vector<Operator>& operators() const { return operators_; }

  Signature extended(std::vector<Operator> more) const;

 private:
  std::vector<Operator> operators_;
};

struct MetaVar {
  enum class Kind : std::uint8_t { X, Y };
  Kind kind = Kind::X;
  std::uint32_t index = 1;  // 1-based, as in x1..xn

  static MetaVar x(std::uint32_t j);
  static MetaVar y(std::uint32_t j);

  auto operator<=>(const MetaVar&) const = default;
};

std::string to_string(const MetaVar& v);

// Operator payload. Implementations must be immutable.
class Attribute {
 public:
  virtual ~Attribute() = default;
  virtual bool equals(const Attribute& other) const = 0;
  virtual std::size_t hash() const = 0;
  virtual std::string to_string() const = 0;
};

using AttributePtr = std::shared_ptr<const Attribute>;

// Placeholder attribute in rule targets, replaced by the source operator's
// attribute when a rule fires.
const AttributePtr& self_attribute();
bool same_attribute(const AttributePtr& a, const AttributePtr& b);

class Term {
 public:
  enum class Kind : std::uint8_t { Var, Node, Hole };

  static Term var(MetaVar v);
  static Term node(std::string op, std::vector<Term> children = {},
                   AttributePtr attribute = nullptr);
  static Term hole();

  Kind kind() const;
  bool is_var() const { return kind() == Kind::Var; }
  bool is_node() const { return kind() == Kind::Node; }
  bool is_hole() const { return kind() == Kind::Hole; }

  const MetaVar& var() const;
  const std::string& op() const;
  const AttributePtr& attribute() const;
  std::span<const Term> children() const;
  const Term& child(std::size_t i) const { return children()[i]; }
  std::size_t arity() const { return children().size(); }

  std::size_t hash() const;
  std::size_t size() const;  // number of nodes, leaves included

  // Identity of the underlying node; equal pointers imply equal terms.
  const void* identity() const { return rep_.get(); }

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Rep;
  explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

using Program = Term;  // closed: no metavariables and no hole
using Binding = std::map<MetaVar, Term>;

Term substitute(const Term& t, const Binding& binding);
// Checked variant: every substituted subterm must validate against sig.
Term substitute(const Signature& sig, const Term& t, const Binding& binding);
Term bind_self_attribute(const Term& t, const AttributePtr& attribute);
// Replaces every Hole leaf by `filler`.
Term fill_holes(const Term& t, const Term& filler);

std::set<MetaVar> metavars(const Term& t);
std::size_t count_holes(const Term& t);
bool is_closed(const Term& t);

// Throws UnknownOperator, ArityMismatch or UnexpectedHole.
void validate_term(const Signature& sig, const Term& t);
// validate_term plus OpenTerm on any metavariable.
void validate_program(const Signature& sig, const Term& t);

// Canonical applicative rendering `f(t1,...,tn)`; `[]` is the hole.
std::string to_string(const Term& t);
std::ostream& operator<<(std::ostream& os, const Term& t);

}  // namespace isos
