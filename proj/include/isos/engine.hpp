#pragma once

// Execution of a specification: the one-step transition function and the
// bounded approximants of resumption, trace and termination semantics.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "isos/spec.hpp"
#include "isos/term.hpp"

namespace isos {

template <class S>
struct StepOutcome {
  S state;
  std::optional<Program> program;  // absent: terminated

  static StepOutcome continue_with(S s, Program p) { return {std::move(s), std::move(p)}; }
  static StepOutcome terminated(S s) { return {std::move(s), std::nullopt}; }

  bool is_terminated() const { return !program.has_value(); }
  bool operator==(const StepOutcome&) const = default;
};

namespace detail {

// Steps every subterm on the same input state, memoized per subterm.
template <class S>
class Stepper {
 public:
  Stepper(const Specification<S>& spec, const S& state) : spec_(spec), state_(state) {}

  StepOutcome<S> step(const Term& p) {
    if (auto it = memo_.find(p); it != memo_.end()) return it->second;
    if (!p.is_node()) throw OpenTerm("cannot step an open term: " + to_string(p));

    Trigger<S> trig{state_, {}};
    std::vector<StepOutcome<S>> subs;
    subs.reserve(p.arity());
    for (std::size_t j = 0; j < p.arity(); ++j) {
      path_.push_back(j);
      subs.push_back(step(p.child(j)));
      path_.pop_back();
      trig.premisses.push_back({subs.back().state, subs.back().is_terminated() ? Mode::Terminating : Mode::Progressing});
    }

    OpInstance f{p.op(), p.attribute()};
    SchemePtr<S> scheme;
    try {
      scheme = resolve_rule(spec_, f, trig);
    } catch (RuleResolutionError& e) {
      e.set_path(path_);
      throw;
    }
    RResult<S> r = fire(*scheme, f, trig);
    StepOutcome<S> outcome;
    if (r.final()) {
      outcome = StepOutcome<S>::terminated(std::move(r.output));
    } else {
      Binding binding;
      for (std::size_t j = 1; j <= p.arity(); ++j) {
        binding.emplace(MetaVar::x(static_cast<std::uint32_t>(j)), p.child(j - 1));
        if (scheme->shapes[j - 1] == Shape::Progressing) {
          binding.emplace(MetaVar::y(static_cast<std::uint32_t>(j)), *subs[j - 1].program);
        }
      }
      outcome = StepOutcome<S>::continue_with(std::move(r.output), substitute(*r.target, binding));
    }
    memo_.emplace(p, outcome);
    return outcome;
  }

 private:
  const Specification<S>& spec_;
  const S& state_;
  std::unordered_map<Term, StepOutcome<S>, TermHash> memo_;
  std::vector<std::size_t> path_;
};

}  // namespace detail

template <class S>
StepOutcome<S> step(const Specification<S>& spec, const S& s, const Program& p) {
  detail::Stepper<S> stepper(spec, s);
  return stepper.step(p);
}

enum class TraceStatus : std::uint8_t { Terminated, Truncated };

// Output states of a run, the input state excluded.
template <class S>
struct Trace {
  std::vector<S> states;
  TraceStatus status = TraceStatus::Truncated;
  std::size_t bound = 0;  // the k of the producing call

  bool terminated() const { return status == TraceStatus::Terminated; }
  // Structural comparison: states and status.
  bool operator==(const Trace& o) const { return states == o.states && status == o.status; }

  // The trace truncated to k steps, status recomputed.
  Trace prefix(std::size_t k) const {
    if (states.size() <= k) return {states, status, k};
    return {std::vector<S>(states.begin(), states.begin() + static_cast<std::ptrdiff_t>(k)), TraceStatus::Truncated, k};
  }
};

template <class S>
Trace<S> trace(const Specification<S>& spec, const S& s, const Program& p, std::size_t k) {
  if (k == 0) throw Error("trace bound must be at least 1");
  Trace<S> out{{}, TraceStatus::Truncated, k};
  S state = s;
  Program current = p;
  while (out.states.size() < k) {
    StepOutcome<S> o = step(spec, state, current);
    out.states.push_back(o.state);
    if (o.is_terminated()) {
      out.status = TraceStatus::Terminated;
      break;
    }
    state = std::move(o.state);
    current = std::move(*o.program);
  }
  return out;
}

template <class S>
std::string render_trace(const Trace<S>& t, const std::function<std::string(const S&)>& display) {
  std::string out;
  for (const auto& s : t.states) out += display(s) + "\n";
  out += t.terminated() ? "TERMINATED" : "TRUNCATED(" + std::to_string(t.bound) + ")";
  return out;
}

template <class S>
struct TerminationResult {
  std::optional<S> final_state;  // absent: fuel exhausted
  std::size_t steps = 0;
  std::size_t fuel = 0;

  bool is_final() const { return final_state.has_value(); }
  bool operator==(const TerminationResult&) const = default;
};

// A terminating step counts as one step.
template <class S>
TerminationResult<S> run(const Specification<S>& spec, const S& s, const Program& p, std::size_t fuel) {
  if (fuel == 0) throw Error("fuel must be at least 1");
  S state = s;
  Program current = p;
  for (std::size_t n = 1; n <= fuel; ++n) {
    StepOutcome<S> o = step(spec, state, current);
    if (o.is_terminated()) return {std::move(o.state), n, fuel};
    state = std::move(o.state);
    current = std::move(*o.program);
  }
  return {std::nullopt, fuel, fuel};
}

template <class S>
std::string render_termination(const TerminationResult<S>& r, const std::function<std::string(const S&)>& display) {
  if (r.is_final()) return "FINAL " + display(*r.final_state) + " after " + std::to_string(r.steps) + " steps";
  return "FUEL_EXHAUSTED(" + std::to_string(r.fuel) + ")";
}

// fn: the final state of a terminated trace, nothing for a truncated one.
template <class S>
std::optional<S> fn_of_trace(const Trace<S>& t) {
  if (!t.terminated() || t.states.empty()) return std::nullopt;
  return t.states.back();
}

// ---------------------------------------------------------------------------
// Resumption trees

template <class S>
struct ProbeSet {
  std::vector<S> states;
  bool exhaustive = false;

  ProbeSet() = default;
  ProbeSet(std::vector<S> s, bool exh = false) : states(std::move(s)), exhaustive(exh) {
    if (states.empty()) throw Error("probe set must be nonempty");
    for (std::size_t i = 0; i < states.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (states[i] == states[j]) throw Error("probe set contains duplicates");
      }
    }
  }

  static ProbeSet exhaustive_of(const StateDomain<S>& domain) {
    if (!domain.enumeration) throw Error("state domain is not finite");
    return ProbeSet(*domain.enumeration, true);
  }

  std::optional<std::size_t> index_of(const S& s) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i] == s) return i;
    }
    return std::nullopt;
  }
};

template <class S>
struct ResumptionNode;

template <class S>
using ResumptionPtr = std::shared_ptr<const ResumptionNode<S>>;

template <class S>
struct ResumptionEdge {
  enum class Kind : std::uint8_t { Child, Terminated, Unexpanded };
  S label;
  Kind kind;
  ResumptionPtr<S> child;  // set iff kind == Child
};

// One edge per probe state, in probe order.
template <class S>
struct ResumptionNode {
  std::size_t depth = 0;
  std::vector<ResumptionEdge<S>> edges;
};

namespace detail {

template <class S>
ResumptionPtr<S> build_resumption(const Specification<S>& spec, const Program& p, const ProbeSet<S>& probes,
                                  std::size_t depth,
                                  std::map<std::size_t, std::unordered_map<Term, ResumptionPtr<S>, TermHash>>& memo) {
  auto& level = memo[depth];
  if (auto it = level.find(p); it != level.end()) return it->second;
  auto node = std::make_shared<ResumptionNode<S>>();
  node->depth = depth;
  for (const S& s : probes.states) {
    StepOutcome<S> o = step(spec, s, p);
    using Kind = typename ResumptionEdge<S>::Kind;
    if (o.is_terminated()) {
      node->edges.push_back({std::move(o.state), Kind::Terminated, nullptr});
    } else if (depth == 1) {
      node->edges.push_back({std::move(o.state), Kind::Unexpanded, nullptr});
    } else {
      auto child = build_resumption(spec, *o.program, probes, depth - 1, memo);
      node->edges.push_back({std::move(o.state), Kind::Child, std::move(child)});
    }
  }
  level.emplace(p, node);
  return node;
}

}  // namespace detail

// Subtrees reached by equal programs at equal depth are shared.
template <class S>
ResumptionPtr<S> resumption(const Specification<S>& spec, const Program& p, const ProbeSet<S>& probes,
                            std::size_t depth) {
  if (depth == 0) throw Error("resumption depth must be at least 1");
  std::map<std::size_t, std::unordered_map<Term, ResumptionPtr<S>, TermHash>> memo;
  return detail::build_resumption(spec, p, probes, depth, memo);
}

// Path to the first difference between two trees, or nothing if equal.
template <class S>
struct TreeDifference {
  std::vector<S> path;  // probe states chosen from the root
  std::string left;
  std::string right;
};

namespace detail {

template <class S>
std::string describe_edge(const ResumptionEdge<S>& e, const std::function<std::string(const S&)>& display) {
  using Kind = typename ResumptionEdge<S>::Kind;
  std::string kind = e.kind == Kind::Terminated ? "terminated" : e.kind == Kind::Unexpanded ? "unexpanded" : "continues";
  return display(e.label) + " (" + kind + ")";
}

template <class S>
std::optional<TreeDifference<S>> compare_trees(const ResumptionNode<S>& a, const ResumptionNode<S>& b,
                                               const ProbeSet<S>& probes,
                                               const std::function<std::string(const S&)>& display,
                                               std::set<std::pair<const void*, const void*>>& seen) {
  if (&a == &b || !seen.insert({&a, &b}).second) return std::nullopt;
  if (a.depth != b.depth || a.edges.size() != b.edges.size()) {
    return TreeDifference<S>{{}, "depth " + std::to_string(a.depth), "depth " + std::to_string(b.depth)};
  }
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const auto& ea = a.edges[i];
    const auto& eb = b.edges[i];
    if (!(ea.label == eb.label) || ea.kind != eb.kind) {
      return TreeDifference<S>{{probes.states[i]}, describe_edge(ea, display), describe_edge(eb, display)};
    }
    if (ea.child) {
      if (auto d = compare_trees(*ea.child, *eb.child, probes, display, seen)) {
        d->path.insert(d->path.begin(), probes.states[i]);
        return d;
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

template <class S>
std::optional<TreeDifference<S>> first_difference(const ResumptionNode<S>& a, const ResumptionNode<S>& b,
                                                  const ProbeSet<S>& probes,
                                                  const std::function<std::string(const S&)>& display) {
  std::set<std::pair<const void*, const void*>> seen;
  return detail::compare_trees(a, b, probes, display, seen);
}

// Executes a resumption tree without interruption: each edge label is fed
// forward as the next lookup state.
template <class S>
Trace<S> trc_exec(const ResumptionNode<S>& root, const ProbeSet<S>& probes, const S& s,
                  const std::function<std::string(const S&)>& display) {
  Trace<S> out{{}, TraceStatus::Truncated, root.depth};
  const ResumptionNode<S>* node = &root;
  S state = s;
  while (node) {
    auto idx = probes.index_of(state);
    if (!idx || *idx >= node->edges.size()) throw ProbeMiss(display(state));
    const auto& edge = node->edges[*idx];
    out.states.push_back(edge.label);
    using Kind = typename ResumptionEdge<S>::Kind;
    if (edge.kind == Kind::Terminated) {
      out.status = TraceStatus::Terminated;
      break;
    }
    state = edge.label;
    node = edge.kind == Kind::Child ? edge.child.get() : nullptr;
  }
  return out;
}

}  // namespace isos
