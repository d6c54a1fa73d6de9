#pragma once

// The While language, its expression evaluator, the pathological
// extensions used as congruence counterexamples, and concrete syntax.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "isos/engine.hpp"
#include "isos/spec.hpp"
#include "isos/term.hpp"

namespace isos::lang {

using Value = std::uint64_t;

// Program variables map to naturals; absent keys read as 0 and zero
// entries are never stored, so map equality is store equality.
class Store {
 public:
  Store() = default;
  Store(std::initializer_list<std::pair<const std::string, Value>> init);

  Value get(const std::string& var) const;
  Store updated(const std::string& var, Value v) const;  // s[x <- v]
  const std::map<std::string, Value>& entries() const { return values_; }

  bool operator==(const Store&) const = default;
  std::string to_string() const;  // `{x=1,y=2}`, `{}` for the empty store

 private:
  std::map<std::string, Value> values_;
};

// Arithmetic saturates at the top of the 64-bit range; subtraction is monus.
class Expr {
 public:
  enum class Kind : std::uint8_t { Const, Var, Plus, Monus, Times };

  static Expr constant(Value n);
  static Expr variable(std::string name);
  static Expr plus(Expr a, Expr b);
  static Expr monus(Expr a, Expr b);
  static Expr times(Expr a, Expr b);

  Kind kind() const { return rep_->kind; }
  Value value() const { return rep_->value; }
  const std::string& name() const { return rep_->name; }
  const Expr& lhs() const { return *rep_->lhs; }
  const Expr& rhs() const { return *rep_->rhs; }

  bool operator==(const Expr& o) const;
  std::size_t hash() const;
  std::string to_string() const;

 private:
  struct Rep {
    Kind kind;
    Value value = 0;
    std::string name;
    std::shared_ptr<const Expr> lhs, rhs;
  };
  explicit Expr(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Expr binary(Kind k, Expr a, Expr b);
  std::shared_ptr<const Rep> rep_;
};

Value eval_expr(const Expr& e, const Store& s);

// Attribute of `x := e`.
class AssignAttr final : public Attribute {
 public:
  AssignAttr(std::string var, Expr e) : var_(std::move(var)), expr_(std::move(e)) {}
  const std::string& var() const { return var_; }
  const Expr& expr() const { return expr_; }
  bool equals(const Attribute& other) const override;
  std::size_t hash() const override;
  std::string to_string() const override;

 private:
  std::string var_;
  Expr expr_;
};

// Attribute of `while e`.
class CondAttr final : public Attribute {
 public:
  explicit CondAttr(Expr e) : expr_(std::move(e)) {}
  const Expr& expr() const { return expr_; }
  bool equals(const Attribute& other) const override;
  std::size_t hash() const override;
  std::string to_string() const override;

 private:
  Expr expr_;
};

namespace ops {
inline constexpr const char* kSkip = "skip";
inline constexpr const char* kAssign = "assign";
inline constexpr const char* kSeq = "seq";
inline constexpr const char* kWhile = "while";
inline constexpr const char* kFloor = "floor";
inline constexpr const char* kInterleave = "interleave";
inline constexpr const char* kBranch = "branch";
inline constexpr const char* kCeil = "ceil";
}  // namespace ops

Program skip();
Program assign(const std::string& var, Expr e);
Program seq(Program p, Program q);
Program while_loop(Expr cond, Program body);
Program floor_of(Program p);
Program interleave(Program p, Program q);
Program branch(Program p, Program q);
Program ceil_of(Program p);

// Signature of the base language plus every extension operator.
const Signature& full_signature();
const Signature& base_signature();

// Concrete syntax: `skip`, `x := e`, `p ; q` (right-associative),
// `while e { p }`, `floor(p)`, `p <| q`, `p \/ q`, `ceil(p)`, parentheses
// for grouping. `<|` and `\/` bind tighter than `;` and associate left.
Expr parse_expr(std::string_view text);
Program parse_program(std::string_view text);
// Like parse_program but also accepts `[]` as a hole.
Term parse_term(std::string_view text);
Store parse_store(std::string_view text);  // `x=1,y=2`; empty text is the empty store

std::string print_program(const Term& t);

// Lines of a corpus file: `#` starts a comment, blank lines are skipped.
std::vector<std::string> corpus_lines(std::string_view text);
std::vector<Program> parse_program_corpus(std::string_view text);

// ---------------------------------------------------------------------------
// Specifications

using StorePredicate = std::function<bool(const Store&)>;

struct WhileVariant {
  enum class Kind : std::uint8_t { Base, Floor, Interrupt, Interleave, Branch, Ceil };
  Kind kind = Kind::Base;
  StorePredicate predicate;  // interrupt/branch; defaults apply when empty

  static WhileVariant base() { return {Kind::Base, {}}; }
  static WhileVariant floor() { return {Kind::Floor, {}}; }
  static WhileVariant interrupt(StorePredicate p = {}) { return {Kind::Interrupt, std::move(p)}; }
  static WhileVariant interleave() { return {Kind::Interleave, {}}; }
  static WhileVariant branch(StorePredicate p = {}) { return {Kind::Branch, std::move(p)}; }
  static WhileVariant ceil() { return {Kind::Ceil, {}}; }
};

// Interrupt flag variable.
inline constexpr const char* kInterruptFlag = "i";
// P_interrupt(s) <=> s(x) = 42.
bool default_interrupt_predicate(const Store& s);
// P_branch(s) <=> s(x) = 0.
bool default_branch_predicate(const Store& s);

using WhileSpec = Specification<Store>;

WhileSpec build_spec(const WhileVariant& variant);

// CLI names: while, while+floor, while+interrupt, while+interleave,
// while+branch, while+ceil.
std::vector<std::string> variant_names();
std::optional<WhileVariant> variant_from_name(std::string_view name);

// Deliberately broken fixtures: base While without while1, and with
// overlapping while1/while2 guards.
WhileSpec broken_missing_while1();
WhileSpec broken_overlapping_while();
std::optional<WhileSpec> spec_from_name(std::string_view name);

StateDomain<Store> store_domain();

// ---------------------------------------------------------------------------
// Probes and generators

// Every store over `vars` with values drawn from `values`.
std::vector<Store> stores_over(const std::vector<std::string>& vars, const std::vector<Value>& values);
// `xy012`: letters name variables, digits list values. `@file` is read by
// the caller; see parse_probe_lines.
ProbeSet<Store> parse_probe_spec(std::string_view spec);
ProbeSet<Store> parse_probe_lines(std::string_view text);

struct ProgramGenOptions {
  std::vector<std::string> vars{"x", "y"};
  std::vector<Value> constants{0, 1, 2};
  std::size_t max_depth = 3;
  bool loops = true;
  bool extensions = false;  // floor, interleave, branch, ceil
};

Program random_program(std::mt19937_64& rng, const ProgramGenOptions& options = {});
Expr random_expr(std::mt19937_64& rng, const ProgramGenOptions& options, std::size_t depth = 2);

}  // namespace isos::lang
