#pragma once

// Stateful SOS specifications as guarded rule schemes.
//
// A RuleScheme stands for a set of concrete rules: one per trigger that is
// compatible with its premiss shapes and satisfies its guard. Guards and
// opaque state expressions are host functions with a declared read-set over
// the rule's state variables (the input s and premiss outputs s'_j); the
// format checkers work on these declarations only.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "isos/errors.hpp"
#include "isos/term.hpp"

namespace isos {

template <class S>
struct StateDomain {
  std::function<std::string(const S&)> display;
  // Present iff the domain is finite.
  std::optional<std::vector<S>> enumeration;
  std::function<S(std::mt19937_64&)> sample;
};

enum class Shape : std::uint8_t { Omitted, Progressing, Terminating };
enum class Mode : std::uint8_t { Progressing, Terminating };

inline const char* to_string(Mode m) { return m == Mode::Progressing ? "pr" : "te"; }

inline bool compatible(Shape shape, Mode mode) {
  switch (shape) {
    case Shape::Omitted:
      return true;
    case Shape::Progressing:
      return mode == Mode::Progressing;
    case Shape::Terminating:
      return mode == Mode::Terminating;
  }
  return false;
}

// 0 is the rule input s; j >= 1 is the output s'_j of premiss j.
using StateVar = std::size_t;
inline constexpr StateVar kInputState = 0;
using ReadSet = std::set<StateVar>;

inline std::string state_var_name(StateVar v) {
  return v == kInputState ? std::string("s") : "s'" + std::to_string(v);
}

template <class S>
struct TriggerPremiss {
  S output;
  Mode mode;
  bool operator==(const TriggerPremiss&) const = default;
};

template <class S>
struct Trigger {
  S input;
  std::vector<TriggerPremiss<S>> premisses;

  std::size_t arity() const { return premisses.size(); }
  bool operator==(const Trigger&) const = default;
};

template <class S>
std::string render_trigger(const Trigger<S>& trig, const std::function<std::string(const S&)>& display) {
  std::string out = "(" + display(trig.input) + ";";
  for (std::size_t j = 0; j < trig.premisses.size(); ++j) {
    out += (j ? ", (" : " (") + display(trig.premisses[j].output) + ", " +
           to_string(trig.premisses[j].mode) + ")";
  }
  return out + ")";
}

// An operator occurrence: name plus attribute for parameterized families.
struct OpInstance {
  std::string name;
  AttributePtr attribute;
};

// Read-restricted view of a trigger handed to guards and opaque functions.
template <class S>
class Bindings {
 public:
  Bindings(const Trigger<S>& trigger, const AttributePtr& attribute, const ReadSet& allowed)
      : trigger_(trigger), attribute_(attribute), allowed_(allowed) {}

  const S& input() const {
    require(kInputState);
    return trigger_.input;
  }
  const S& output(std::size_t j) const {
    require(j);
    if (j == 0 || j > trigger_.premisses.size()) {
      throw ReadSetViolation("premiss output s'" + std::to_string(j) + " does not exist");
    }
    return trigger_.premisses[j - 1].output;
  }
  const S& get(StateVar v) const { return v == kInputState ? input() : output(v); }

  const AttributePtr& attribute() const { return attribute_; }
  template <class A>
  const A& attribute_as() const {
    const auto* a = dynamic_cast<const A*>(attribute_.get());
    if (!a) throw Error("operator attribute has unexpected type");
    return *a;
  }

 private:
  void require(StateVar v) const {
    if (!allowed_.count(v)) {
      throw ReadSetViolation("read of " + state_var_name(v) + " outside declared read-set");
    }
  }

  const Trigger<S>& trigger_;
  const AttributePtr& attribute_;
  const ReadSet& allowed_;
};

template <class S>
class StateExpr {
 public:
  enum class Kind : std::uint8_t { Input, PremissOutput, Constant, Opaque };
  using Function = std::function<S(const Bindings<S>&)>;

  static StateExpr input() { return StateExpr(Kind::Input, 0, std::nullopt, {}, {}); }
  static StateExpr premiss_output(std::size_t j) {
    return StateExpr(Kind::PremissOutput, j, std::nullopt, {}, {});
  }
  static StateExpr constant(S value) { return StateExpr(Kind::Constant, 0, std::move(value), {}, {}); }
  static StateExpr opaque(ReadSet reads, Function fn) {
    return StateExpr(Kind::Opaque, 0, std::nullopt, std::move(reads), std::move(fn));
  }

  Kind kind() const { return kind_; }
  std::size_t premiss() const { return premiss_; }
  const std::optional<S>& constant_value() const { return constant_; }
  bool is_pass_through(std::size_t j) const { return kind_ == Kind::PremissOutput && premiss_ == j; }

  ReadSet reads() const {
    switch (kind_) {
      case Kind::Input:
        return {kInputState};
      case Kind::PremissOutput:
        return {premiss_};
      case Kind::Constant:
        return {};
      case Kind::Opaque:
        return declared_;
    }
    return {};
  }

  S evaluate(const Trigger<S>& trig, const AttributePtr& attribute) const {
    switch (kind_) {
      case Kind::Input:
        return trig.input;
      case Kind::PremissOutput:
        if (premiss_ == 0 || premiss_ > trig.arity()) {
          throw Error("premiss output s'" + std::to_string(premiss_) + " does not exist");
        }
        return trig.premisses[premiss_ - 1].output;
      case Kind::Constant:
        return *constant_;
      case Kind::Opaque:
        return fn_(Bindings<S>(trig, attribute, declared_));
    }
    throw Error("unreachable state expression kind");
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::Input:
        return "s";
      case Kind::PremissOutput:
        return state_var_name(premiss_);
      case Kind::Constant:
        return "const";
      case Kind::Opaque:
        return "opaque";
    }
    return "?";
  }

 private:
  StateExpr(Kind kind, std::size_t j, std::optional<S> constant, ReadSet declared, Function fn)
      : kind_(kind), premiss_(j), constant_(std::move(constant)), declared_(std::move(declared)), fn_(std::move(fn)) {}

  Kind kind_;
  std::size_t premiss_;
  std::optional<S> constant_;
  ReadSet declared_;
  Function fn_;
};

template <class S>
struct Guard {
  ReadSet reads;
  std::function<bool(const Bindings<S>&)> predicate;

  static Guard always() { return Guard{{}, nullptr}; }

  bool holds(const Trigger<S>& trig, const AttributePtr& attribute) const {
    if (!predicate) return true;
    return predicate(Bindings<S>(trig, attribute, reads));
  }
};

template <class S>
struct Conclusion {
  StateExpr<S> output;
  std::optional<Term> target;  // absent: terminating conclusion

  static Conclusion progress(StateExpr<S> out, Term target) { return {std::move(out), std::move(target)}; }
  static Conclusion terminate(StateExpr<S> out) { return {std::move(out), std::nullopt}; }
  bool progressing() const { return target.has_value(); }
};

template <class S>
struct RuleScheme {
  std::string op;
  std::vector<Shape> shapes;
  Guard<S> guard;
  Conclusion<S> conclusion;
  std::string label;

  std::size_t arity() const { return shapes.size(); }

  bool bound(StateVar v) const {
    return v == kInputState || (v <= shapes.size() && shapes[v - 1] != Shape::Omitted);
  }

  bool matches(const Trigger<S>& trig, const AttributePtr& attribute) const {
    if (trig.arity() != shapes.size()) return false;
    for (std::size_t j = 0; j < shapes.size(); ++j) {
      if (!compatible(shapes[j], trig.premisses[j].mode)) return false;
    }
    return guard.holds(trig, attribute);
  }
};

template <class S>
using SchemePtr = std::shared_ptr<const RuleScheme<S>>;

template <class S>
class Specification {
 public:
  // Query backend: returns every scheme matching (operator, trigger).
  using Backend = std::function<std::vector<SchemePtr<S>>(const OpInstance&, const Trigger<S>&)>;
  using AttributeSampler = std::function<AttributePtr(const Operator&, std::mt19937_64&)>;
  using Printer = std::function<std::string(const Term&)>;

  Specification(std::string name, Signature sig, StateDomain<S> states, std::vector<RuleScheme<S>> schemes)
      : name_(std::move(name)), sig_(std::move(sig)), states_(std::move(states)) {
    for (auto& scheme : schemes) {
      auto ptr = std::make_shared<const RuleScheme<S>>(std::move(scheme));
      by_op_[ptr->op].push_back(ptr);
      schemes_.push_back(std::move(ptr));
    }
  }

  Specification(std::string name, Signature sig, StateDomain<S> states, Backend backend)
      : name_(std::move(name)), sig_(std::move(sig)), states_(std::move(states)), backend_(std::move(backend)) {}

  const std::string& name() const { return name_; }
  const Signature& signature() const { return sig_; }
  const StateDomain<S>& states() const { return states_; }
  const std::vector<SchemePtr<S>>& schemes() const { return schemes_; }
  bool query_backed() const { return static_cast<bool>(backend_); }

  std::vector<SchemePtr<S>> schemes_for(std::string_view op) const {
    auto it = by_op_.find(std::string(op));
    return it == by_op_.end() ? std::vector<SchemePtr<S>>{} : it->second;
  }

  std::vector<SchemePtr<S>> query(const OpInstance& f, const Trigger<S>& trig) const {
    if (backend_) return backend_(f, trig);
    std::vector<SchemePtr<S>> out;
    auto it = by_op_.find(f.name);
    if (it == by_op_.end()) return out;
    for (const auto& scheme : it->second) {
      if (scheme->matches(trig, f.attribute)) out.push_back(scheme);
    }
    return out;
  }

  std::string display(const S& s) const { return states_.display ? states_.display(s) : "<state>"; }

  std::string print(const Term& t) const { return printer_ ? printer_(t) : to_string(t); }
  void set_printer(Printer p) { printer_ = std::move(p); }
  const Printer& printer() const { return printer_; }

  const AttributeSampler& attribute_sampler() const { return attribute_sampler_; }
  void set_attribute_sampler(AttributeSampler sampler) { attribute_sampler_ = std::move(sampler); }

 private:
  std::string name_;
  Signature sig_;
  StateDomain<S> states_;
  std::vector<SchemePtr<S>> schemes_;
  std::unordered_map<std::string, std::vector<SchemePtr<S>>> by_op_;
  Backend backend_;
  Printer printer_;
  AttributeSampler attribute_sampler_;
};

// ---------------------------------------------------------------------------
// Static validation

struct Finding {
  std::string scheme;
  std::string message;
};

struct ValidationReport {
  std::string spec;
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  std::string render() const {
    std::string out;
    for (const auto& f : findings) out += spec + ":" + f.scheme + ": " + f.message + "\n";
    return out;
  }
};

template <class S>
void check_read_set(const RuleScheme<S>& scheme, const ReadSet& reads, const std::string& what,
                    std::vector<Finding>& out) {
  for (StateVar v : reads) {
    if (!scheme.bound(v)) {
      out.push_back({scheme.label, what + " reads unbound variable " + state_var_name(v)});
    }
  }
}

template <class S>
ValidationReport validate_spec(const Specification<S>& spec) {
  ValidationReport report{spec.name(), {}};
  auto& out = report.findings;
  std::set<std::string> labels;
  for (const auto& ptr : spec.schemes()) {
    const RuleScheme<S>& scheme = *ptr;
    if (!labels.insert(scheme.label).second) out.push_back({scheme.label, "duplicate scheme label"});
    const Operator* op = spec.signature().find(scheme.op);
    if (!op) {
      out.push_back({scheme.label, "unknown operator '" + scheme.op + "'"});
      continue;
    }
    if (op->arity != scheme.arity()) {
      out.push_back({scheme.label, "arity mismatch: operator '" + scheme.op + "' has arity " +
                                       std::to_string(op->arity) + " but scheme has " +
                                       std::to_string(scheme.arity()) + " premiss shapes"});
      continue;
    }
    const auto& output = scheme.conclusion.output;
    if (output.kind() == StateExpr<S>::Kind::PremissOutput &&
        (output.premiss() == 0 || !scheme.bound(output.premiss()))) {
      out.push_back({scheme.label, "unbound premiss output " + state_var_name(output.premiss())});
    } else {
      check_read_set(scheme, output.reads(), "conclusion output", out);
    }
    check_read_set(scheme, scheme.guard.reads, "guard", out);
    if (scheme.conclusion.target) {
      const Term& target = *scheme.conclusion.target;
      for (const MetaVar& v : metavars(target)) {
        bool ok = v.index >= 1 && v.index <= scheme.arity();
        if (ok && v.kind == MetaVar::Kind::Y) ok = scheme.shapes[v.index - 1] == Shape::Progressing;
        if (!ok) out.push_back({scheme.label, "unbound target variable " + to_string(v)});
      }
      try {
        validate_term(spec.signature(), target);
      } catch (const Error& e) {
        out.push_back({scheme.label, std::string("ill-formed target: ") + e.what()});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rule resolution

template <class S>
std::vector<SchemePtr<S>> match_schemes(const Specification<S>& spec, const OpInstance& f, const Trigger<S>& trig) {
  return spec.query(f, trig);
}

template <class S>
SchemePtr<S> resolve_rule(const Specification<S>& spec, const OpInstance& f, const Trigger<S>& trig) {
  auto matches = match_schemes(spec, f, trig);
  if (matches.size() == 1) return matches.front();
  std::string trigger_text = render_trigger<S>(trig, [&](const S& s) { return spec.display(s); });
  std::string op_text = f.attribute ? f.name + "<" + f.attribute->to_string() + ">" : f.name;
  std::vector<std::string> labels;
  for (const auto& m : matches) labels.push_back(m->label);
  if (matches.empty()) {
    throw MissingRule(op_text, trigger_text, labels,
                      spec.name() + ": no rule for " + op_text + " with trigger " + trigger_text);
  }
  std::string joined;
  for (const auto& l : labels) joined += (joined.empty() ? "" : ", ") + l;
  throw AmbiguousRules(op_text, trigger_text, labels,
                       spec.name() + ": rules {" + joined + "} all apply to " + op_text + " with trigger " +
                           trigger_text);
}

// Progress(s', t) when `target` is present, otherwise Final(s').
template <class S>
struct RResult {
  S output;
  std::optional<Term> target;

  bool final() const { return !target.has_value(); }
  bool operator==(const RResult&) const = default;
};

using PositionSet = std::set<std::size_t>;  // 1-based positions

template <class S>
Trigger<S> trigger_for(const PositionSet& progressing, const S& s, const std::vector<S>& outputs) {
  Trigger<S> trig{s, {}};
  for (std::size_t j = 1; j <= outputs.size(); ++j) {
    trig.premisses.push_back({outputs[j - 1], progressing.count(j) ? Mode::Progressing : Mode::Terminating});
  }
  return trig;
}

// Evaluates the conclusion of the rule resolved for a trigger. The target
// stays open over x1..xn and y_j (j progressing).
template <class S>
RResult<S> fire(const RuleScheme<S>& scheme, const OpInstance& f, const Trigger<S>& trig) {
  S out = scheme.conclusion.output.evaluate(trig, f.attribute);
  if (!scheme.conclusion.target) return {std::move(out), std::nullopt};
  return {std::move(out), bind_self_attribute(*scheme.conclusion.target, f.attribute)};
}

template <class S>
RResult<S> r_family(const Specification<S>& spec, const OpInstance& f, const PositionSet& progressing, const S& s,
                    const std::vector<S>& outputs) {
  const Operator& op = spec.signature().at(f.name);
  if (outputs.size() != op.arity) {
    throw ArityMismatch("r-family query for '" + f.name + "' needs " + std::to_string(op.arity) + " outputs");
  }
  Trigger<S> trig = trigger_for(progressing, s, outputs);
  return fire(*resolve_rule(spec, f, trig), f, trig);
}

template <class S>
using Family = std::function<RResult<S>(const OpInstance&, const PositionSet&, const S&, const std::vector<S>&)>;

// Builds the specification whose rules are read off the family: for each
// trigger, the single rule with premisses fixed by the trigger's modes,
// output and target given by the family.
template <class S>
Specification<S> spec_of_family(Family<S> family, Signature sig, StateDomain<S> states, std::string name = "family") {
  auto backend = [family = std::move(family)](const OpInstance& f, const Trigger<S>& trig) {
    PositionSet progressing;
    std::vector<S> outputs;
    std::vector<Shape> shapes;
    std::string w;
    for (std::size_t j = 1; j <= trig.arity(); ++j) {
      const auto& p = trig.premisses[j - 1];
      outputs.push_back(p.output);
      if (p.mode == Mode::Progressing) {
        progressing.insert(j);
        shapes.push_back(Shape::Progressing);
        w += (w.empty() ? "" : ",") + std::to_string(j);
      } else {
        shapes.push_back(Shape::Terminating);
      }
    }
    RResult<S> r = family(f, progressing, trig.input, outputs);
    ReadSet all;
    for (std::size_t v = 0; v <= trig.arity(); ++v) all.insert(v);
    Guard<S> guard{all, [trig](const Bindings<S>& b) {
                     if (!(b.input() == trig.input)) return false;
                     for (std::size_t j = 1; j <= trig.arity(); ++j) {
                       if (!(b.output(j) == trig.premisses[j - 1].output)) return false;
                     }
                     return true;
                   }};
    Conclusion<S> conclusion = r.target ? Conclusion<S>::progress(StateExpr<S>::constant(r.output), *r.target)
                                        : Conclusion<S>::terminate(StateExpr<S>::constant(r.output));
    auto scheme = std::make_shared<const RuleScheme<S>>(
        RuleScheme<S>{f.name, std::move(shapes), std::move(guard), std::move(conclusion), f.name + "/W={" + w + "}"});
    return std::vector<SchemePtr<S>>{scheme};
  };
  return Specification<S>(std::move(name), std::move(sig), std::move(states),
                          typename Specification<S>::Backend(std::move(backend)));
}

template <class S>
Family<S> family_of(const Specification<S>& spec) {
  return [&spec](const OpInstance& f, const PositionSet& w, const S& s, const std::vector<S>& outputs) {
    return r_family(spec, f, w, s, outputs);
  };
}

// ---------------------------------------------------------------------------
// Determinism sampling

template <class S>
struct TriggerProbe {
  OpInstance op;
  Trigger<S> trigger;
};

template <class S>
std::vector<TriggerProbe<S>> sample_triggers(const Specification<S>& spec, const Operator& op, std::size_t count,
                                             std::mt19937_64& rng) {
  std::vector<TriggerProbe<S>> out;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t n = 0; n < count; ++n) {
    AttributePtr attr;
    if (op.parameterized) {
      if (!spec.attribute_sampler()) throw Error("no attribute sampler for operator '" + op.name + "'");
      attr = spec.attribute_sampler()(op, rng);
    }
    Trigger<S> trig{spec.states().sample(rng), {}};
    for (std::size_t j = 0; j < op.arity; ++j) {
      S out_state = spec.states().sample(rng);
      trig.premisses.push_back({std::move(out_state), coin(rng) ? Mode::Progressing : Mode::Terminating});
    }
    out.push_back({OpInstance{op.name, attr}, std::move(trig)});
  }
  return out;
}

struct DeterminismEntry {
  std::string op;
  std::string trigger;
  std::vector<std::string> labels;  // matching schemes
};

struct DeterminismReport {
  std::string spec;
  std::size_t probes = 0;
  std::vector<DeterminismEntry> violations;  // zero or several matches

  bool ok() const { return violations.empty(); }
  std::size_t missing() const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [](const auto& v) { return v.labels.empty(); }));
  }
  std::size_t ambiguous() const { return violations.size() - missing(); }
  std::string render() const {
    std::string out;
    for (const auto& v : violations) {
      out += spec + ":" + v.op + ": ";
      if (v.labels.empty()) {
        out += "no rule for trigger " + v.trigger + "\n";
      } else {
        std::string joined;
        for (const auto& l : v.labels) joined += (joined.empty() ? "" : ", ") + l;
        out += "rules {" + joined + "} overlap on trigger " + v.trigger + "\n";
      }
    }
    return out;
  }
};

template <class S>
DeterminismReport determinism_check(const Specification<S>& spec, const std::vector<TriggerProbe<S>>& probes) {
  DeterminismReport report{spec.name(), probes.size(), {}};
  for (const auto& probe : probes) {
    auto matches = match_schemes(spec, probe.op, probe.trigger);
    if (matches.size() == 1) continue;
    DeterminismEntry entry{probe.op.name, render_trigger<S>(probe.trigger, [&](const S& s) { return spec.display(s); }),
                           {}};
    for (const auto& m : matches) entry.labels.push_back(m->label);
    report.violations.push_back(std::move(entry));
  }
  return report;
}

// Samples `per_operator` triggers for every operator of the signature.
template <class S>
DeterminismReport determinism_check(const Specification<S>& spec, std::size_t per_operator, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TriggerProbe<S>> probes;
  for (const auto& op : spec.signature().operators()) {
    auto more = sample_triggers(spec, op, per_operator, rng);
    probes.insert(probes.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  return determinism_check(spec, probes);
}

// Spot-checks read-set honesty: perturbing a variable outside the declared
// read-set must not change a guard verdict or an opaque output.
template <class S>
ValidationReport fuzz_read_sets(const Specification<S>& spec, std::size_t samples, std::uint64_t seed) {
  ValidationReport report{spec.name(), {}};
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (const auto& ptr : spec.schemes()) {
    const RuleScheme<S>& scheme = *ptr;
    const Operator* op = spec.signature().find(scheme.op);
    if (!op || op->arity != scheme.arity()) continue;
    bool flagged = false;
    for (std::size_t n = 0; n < samples && !flagged; ++n) {
      AttributePtr attr;
      if (op->parameterized && spec.attribute_sampler()) attr = spec.attribute_sampler()(*op, rng);
      Trigger<S> trig{spec.states().sample(rng), {}};
      for (Shape shape : scheme.shapes) {
        Mode mode = shape == Shape::Progressing   ? Mode::Progressing
                    : shape == Shape::Terminating ? Mode::Terminating
                    : coin(rng)                   ? Mode::Progressing
                                                  : Mode::Terminating;
        trig.premisses.push_back({spec.states().sample(rng), mode});
      }
      auto evaluate = [&](const Trigger<S>& t) {
        std::pair<bool, std::optional<S>> r{scheme.guard.holds(t, attr), std::nullopt};
        if (r.first && scheme.conclusion.output.kind() == StateExpr<S>::Kind::Opaque) {
          r.second = scheme.conclusion.output.evaluate(t, attr);
        }
        return r;
      };
      std::pair<bool, std::optional<S>> base;
      try {
        base = evaluate(trig);
      } catch (const ReadSetViolation& e) {
        report.findings.push_back({scheme.label, e.what()});
        flagged = true;
        break;
      }
      ReadSet declared = scheme.guard.reads;
      for (StateVar v : scheme.conclusion.output.reads()) declared.insert(v);
      for (StateVar v = 0; v <= scheme.arity() && !flagged; ++v) {
        if (declared.count(v)) continue;
        Trigger<S> perturbed = trig;
        (v == kInputState ? perturbed.input : perturbed.premisses[v - 1].output) = spec.states().sample(rng);
        if (evaluate(perturbed) != base) {
          report.findings.push_back({scheme.label, "result depends on undeclared " + state_var_name(v)});
          flagged = true;
        }
      }
    }
  }
  return report;
}

}  // namespace isos
