#pragma once

// Conservative syntactic checks for the streamlined and cool formats.
//
// Checks read rule schemes and their declared read-sets only, never guard
// extensions. A failing verdict means the format could not be established
// from the schemes; it says nothing about compositionality itself.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "isos/spec.hpp"
#include "isos/term.hpp"

namespace isos {

enum class OperatorClass : std::uint8_t { Passive, Active };

inline const char* to_string(OperatorClass c) { return c == OperatorClass::Passive ? "Passive" : "Active"; }

namespace detail {

inline std::set<std::uint32_t> y_indices(const Term& t) {
  std::set<std::uint32_t> out;
  for (const MetaVar& v : metavars(t)) {
    if (v.kind == MetaVar::Kind::Y) out.insert(v.index);
  }
  return out;
}

inline bool only_x_except(const Term& t, std::size_t excluded) {
  for (const MetaVar& v : metavars(t)) {
    if (v.kind == MetaVar::Kind::Y || v.index == excluded) return false;
  }
  return true;
}

inline Term self_application(const Operator& op, std::size_t j) {
  std::vector<Term> children;
  for (std::uint32_t i = 1; i <= op.arity; ++i) {
    children.push_back(Term::var(i == j ? MetaVar::y(i) : MetaVar::x(i)));
  }
  return Term::node(op.name, std::move(children), op.parameterized ? self_attribute() : nullptr);
}

template <class S>
bool others_omitted(const RuleScheme<S>& scheme, std::size_t j) {
  for (std::size_t i = 1; i <= scheme.arity(); ++i) {
    if (i != j && scheme.shapes[i - 1] != Shape::Omitted) return false;
  }
  return true;
}

inline bool subset_of(const ReadSet& reads, const ReadSet& allowed) {
  for (StateVar v : reads) {
    if (!allowed.count(v)) return false;
  }
  return true;
}

}  // namespace detail

// Positions j with a progressing premiss whose y_j occurs in the target.
template <class S>
std::set<std::size_t> is_receiving(const RuleScheme<S>& scheme) {
  std::set<std::size_t> out;
  if (!scheme.conclusion.target) return out;
  for (std::uint32_t j : detail::y_indices(*scheme.conclusion.target)) {
    if (j >= 1 && j <= scheme.arity() && scheme.shapes[j - 1] == Shape::Progressing) out.insert(j);
  }
  return out;
}

template <class S>
OperatorClass classify(const Specification<S>& spec, const std::string& op) {
  for (const auto& ptr : spec.schemes_for(op)) {
    const RuleScheme<S>& scheme = *ptr;
    for (Shape shape : scheme.shapes) {
      if (shape != Shape::Omitted) return OperatorClass::Active;
    }
    if (!detail::subset_of(scheme.guard.reads, {kInputState})) return OperatorClass::Active;
    if (!detail::subset_of(scheme.conclusion.output.reads(), {kInputState})) return OperatorClass::Active;
    if (scheme.conclusion.target && !detail::only_x_except(*scheme.conclusion.target, 0)) {
      return OperatorClass::Active;
    }
  }
  return OperatorClass::Passive;
}

struct OperatorVerdict {
  std::string op;
  OperatorClass cls = OperatorClass::Passive;
  std::optional<std::size_t> receiving;  // chosen position for active operators
  bool pass = true;
  std::vector<std::string> reasons;  // "<scheme label>: <violated clause>"
};

struct FormatReport {
  std::string spec;
  std::string format;
  std::vector<OperatorVerdict> operators;

  bool pass() const {
    for (const auto& o : operators) {
      if (!o.pass) return false;
    }
    return true;
  }
  const OperatorVerdict* find(const std::string& op) const {
    for (const auto& o : operators) {
      if (o.op == op) return &o;
    }
    return nullptr;
  }
};

namespace detail {

// Returns the violated clause for receiving position j, or nothing.
template <class S>
std::optional<std::string> streamlined_violation(const Operator& op, const RuleScheme<S>& scheme, std::size_t j) {
  auto receiving = is_receiving(scheme);
  if (!receiving.empty()) {
    if (receiving != std::set<std::size_t>{j}) return std::string("receiving at a position other than ") + std::to_string(j);
    if (!others_omitted(scheme, j)) return std::string("receiving rule has premisses besides position ") + std::to_string(j);
    if (!scheme.conclusion.output.is_pass_through(j)) {
      return std::string("receiving rule output is not the premiss output s'") + std::to_string(j);
    }
    const Term& target = *scheme.conclusion.target;
    if (!(target == self_application(op, j)) && !(target == Term::var(MetaVar::y(static_cast<std::uint32_t>(j))))) {
      return std::string("receiving rule target is neither f(x)[y") + std::to_string(j) + "/x" + std::to_string(j) +
             "] nor y" + std::to_string(j);
    }
    return std::nullopt;
  }
  if (scheme.conclusion.target && !only_x_except(*scheme.conclusion.target, j)) {
    return std::string("non-receiving rule target keeps x") + std::to_string(j) + " or a y variable";
  }
  return std::nullopt;
}

template <class S>
std::optional<std::string> cool_violation(const Operator& op, const RuleScheme<S>& scheme, std::size_t j) {
  switch (scheme.shapes[j - 1]) {
    case Shape::Progressing: {
      if (!others_omitted(scheme, j)) return std::string("patience rule has premisses besides position ") + std::to_string(j);
      if (!scheme.conclusion.output.is_pass_through(j)) {
        return std::string("progressing premiss ") + std::to_string(j) + " but output is not s'" + std::to_string(j);
      }
      if (!scheme.conclusion.target || !(*scheme.conclusion.target == self_application(op, j))) {
        return std::string("progressing premiss ") + std::to_string(j) + " but not a patience rule";
      }
      return std::nullopt;
    }
    case Shape::Terminating: {
      if (!others_omitted(scheme, j)) return std::string("terminating premiss ") + std::to_string(j) + " with further premisses";
      ReadSet allowed{j};
      if (!subset_of(scheme.guard.reads, allowed)) return std::string("guard depends on more than s'") + std::to_string(j);
      if (!subset_of(scheme.conclusion.output.reads(), allowed)) {
        return std::string("output depends on more than s'") + std::to_string(j);
      }
      if (scheme.conclusion.target && !only_x_except(*scheme.conclusion.target, j)) {
        return std::string("target keeps x") + std::to_string(j) + " or a y variable";
      }
      return std::nullopt;
    }
    case Shape::Omitted:
      return std::string("premiss ") + std::to_string(j) + " omitted";
  }
  return std::string("unknown shape");
}

template <class S, class Violation>
FormatReport check_format(const Specification<S>& spec, const std::string& format, Violation violation) {
  FormatReport report{spec.name(), format, {}};
  for (const auto& op : spec.signature().operators()) {
    OperatorVerdict v{op.name, OperatorClass::Passive, std::nullopt, true, {}};
    if (spec.query_backed()) {
      v.cls = OperatorClass::Active;
      v.pass = false;
      v.reasons.push_back("query-backed specification has no schemes to inspect");
      report.operators.push_back(std::move(v));
      continue;
    }
    v.cls = classify(spec, op.name);
    if (v.cls == OperatorClass::Active) {
      auto schemes = spec.schemes_for(op.name);
      std::vector<std::string> reasons;
      for (std::size_t j = 1; j <= op.arity; ++j) {
        std::optional<std::string> failure;
        for (const auto& ptr : schemes) {
          if (ptr->arity() != op.arity) {
            failure = ptr->label + ": arity mismatch";
          } else if (auto why = violation(op, *ptr, j)) {
            failure = ptr->label + ": " + *why;
          }
          if (failure) break;
        }
        if (!failure) {
          v.receiving = j;
          reasons.clear();
          break;
        }
        reasons.push_back("j=" + std::to_string(j) + " " + *failure);
      }
      if (!v.receiving) {
        v.pass = false;
        v.reasons = std::move(reasons);
      }
    }
    report.operators.push_back(std::move(v));
  }
  return report;
}

}  // namespace detail

template <class S>
FormatReport check_streamlined(const Specification<S>& spec) {
  return detail::check_format(spec, "streamlined", [](const Operator& op, const RuleScheme<S>& scheme, std::size_t j) {
    return detail::streamlined_violation(op, scheme, j);
  });
}

// Terminating-position schemes must not read s, in the guard as well as
// in the output.
template <class S>
FormatReport check_cool(const Specification<S>& spec) {
  return detail::check_format(spec, "cool", [](const Operator& op, const RuleScheme<S>& scheme, std::size_t j) {
    return detail::cool_violation(op, scheme, j);
  });
}

inline std::string render_verdict_cell(const OperatorVerdict* v) {
  if (!v) return "n/a";
  if (v->pass) return "pass";
  std::string reasons;
  for (const auto& r : v->reasons) reasons += (reasons.empty() ? "" : "; ") + r;
  return "fail(format not established: " + reasons + ")";
}

// One line per operator:
// `<op>: <Passive|Active>, receiving=<j|->, streamlined=<...>, cool=<...>`.
inline std::string render_formats(const FormatReport& streamlined, const FormatReport& cool) {
  std::string out;
  for (const auto& s : streamlined.operators) {
    const OperatorVerdict* c = cool.find(s.op);
    std::optional<std::size_t> receiving = s.receiving ? s.receiving : (c ? c->receiving : std::nullopt);
    out += s.op + ": " + to_string(s.cls) + ", receiving=" + (receiving ? std::to_string(*receiving) : "-") +
           ", streamlined=" + render_verdict_cell(&s) + ", cool=" + render_verdict_cell(c) + "\n";
  }
  return out;
}

}  // namespace isos
