#pragma once

// Bounded equivalence checks for the three semantics and a congruence
// search over generated single-hole contexts.
//
// All checks quantify over a finite probe set. Distinguished is always a
// genuine separation; Equivalent is bounded evidence unless the probe set
// is exhaustive.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "isos/engine.hpp"
#include "isos/spec.hpp"
#include "isos/term.hpp"

namespace isos {

enum class Semantics : std::uint8_t { Resumption, Trace, Termination };
enum class Verdict : std::uint8_t { Equivalent, Distinguished, Inconclusive };

inline const char* to_string(Semantics s) {
  switch (s) {
    case Semantics::Resumption:
      return "resumption";
    case Semantics::Trace:
      return "trace";
    case Semantics::Termination:
      return "termination";
  }
  return "?";
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Equivalent:
      return "EQUIVALENT";
    case Verdict::Distinguished:
      return "DISTINGUISHED";
    case Verdict::Inconclusive:
      return "INCONCLUSIVE";
  }
  return "?";
}

// Which semantics and at which bound (k, fuel or depth).
struct SemanticsParams {
  Semantics kind = Semantics::Trace;
  std::size_t bound = 1;

  std::string describe() const {
    const char* name = kind == Semantics::Trace ? "k" : kind == Semantics::Termination ? "fuel" : "depth";
    return std::string(to_string(kind)) + "(" + name + "=" + std::to_string(bound) + ")";
  }
};

template <class S>
struct EquivVerdict {
  Verdict verdict = Verdict::Equivalent;
  SemanticsParams params;
  std::string probe_summary;
  std::optional<S> witness;  // Distinguished: the first separating probe
  std::string left_evidence;
  std::string right_evidence;
  std::string reason;  // Inconclusive

  bool equivalent() const { return verdict == Verdict::Equivalent; }
  bool distinguished() const { return verdict == Verdict::Distinguished; }
};

template <class S>
std::string render_verdict(const EquivVerdict<S>& v, const std::function<std::string(const S&)>& display) {
  std::string out = std::string(to_string(v.verdict)) + " under " + v.params.describe() + " over " +
                    v.probe_summary + "\n";
  if (v.witness) {
    out += "witness: " + display(*v.witness) + "\n";
    out += "left:\n" + v.left_evidence + "\n";
    out += "right:\n" + v.right_evidence + "\n";
  }
  if (!v.reason.empty()) out += "reason: " + v.reason + "\n";
  return out;
}

template <class S>
std::string probe_summary(const ProbeSet<S>& probes) {
  return std::to_string(probes.states.size()) + " probe states" + (probes.exhaustive ? " (exhaustive)" : "");
}

template <class S>
EquivVerdict<S> trace_equiv(const Specification<S>& spec, const Program& p, const Program& q,
                            const ProbeSet<S>& probes, std::size_t k) {
  EquivVerdict<S> v{Verdict::Equivalent, {Semantics::Trace, k}, probe_summary(probes), {}, {}, {}, {}};
  if (k == 0) return v;
  auto display = [&](const S& s) { return spec.display(s); };
  for (const S& s : probes.states) {
    Trace<S> a = trace(spec, s, p, k);
    Trace<S> b = trace(spec, s, q, k);
    if (!(a == b)) {
      v.verdict = Verdict::Distinguished;
      v.witness = s;
      v.left_evidence = render_trace<S>(a, display);
      v.right_evidence = render_trace<S>(b, display);
      return v;
    }
  }
  return v;
}

// Final vs fuel exhaustion is Inconclusive: running out of fuel is not
// divergence. Two exhausted runs count as equal at this fuel.
template <class S>
EquivVerdict<S> term_equiv(const Specification<S>& spec, const Program& p, const Program& q,
                           const ProbeSet<S>& probes, std::size_t fuel) {
  EquivVerdict<S> v{Verdict::Equivalent, {Semantics::Termination, fuel}, probe_summary(probes), {}, {}, {}, {}};
  auto display = [&](const S& s) { return spec.display(s); };
  std::optional<std::string> undecided;
  for (const S& s : probes.states) {
    TerminationResult<S> a = run(spec, s, p, fuel);
    TerminationResult<S> b = run(spec, s, q, fuel);
    if (a.is_final() && b.is_final()) {
      if (!(*a.final_state == *b.final_state)) {
        v.verdict = Verdict::Distinguished;
        v.witness = s;
        v.left_evidence = render_termination<S>(a, display);
        v.right_evidence = render_termination<S>(b, display);
        return v;
      }
    } else if (a.is_final() != b.is_final() && !undecided) {
      undecided = "at " + display(s) + ": " + render_termination<S>(a, display) + " vs " +
                  render_termination<S>(b, display) + "; divergence not established";
    }
  }
  if (undecided) {
    v.verdict = Verdict::Inconclusive;
    v.reason = *undecided;
  }
  return v;
}

template <class S>
EquivVerdict<S> resumption_equiv(const Specification<S>& spec, const Program& p, const Program& q,
                                 const ProbeSet<S>& probes, std::size_t depth) {
  EquivVerdict<S> v{Verdict::Equivalent, {Semantics::Resumption, depth}, probe_summary(probes), {}, {}, {}, {}};
  auto display = [&](const S& s) { return spec.display(s); };
  auto a = resumption(spec, p, probes, depth);
  auto b = resumption(spec, q, probes, depth);
  if (auto d = first_difference<S>(*a, *b, probes, display)) {
    v.verdict = Verdict::Distinguished;
    v.witness = d->path.front();
    std::string path;
    for (const auto& s : d->path) path += (path.empty() ? "" : " -> ") + display(s);
    v.left_evidence = "path " + path + ": " + d->left;
    v.right_evidence = "path " + path + ": " + d->right;
  }
  return v;
}

template <class S>
EquivVerdict<S> equiv(const Specification<S>& spec, const SemanticsParams& params, const Program& p,
                      const Program& q, const ProbeSet<S>& probes) {
  switch (params.kind) {
    case Semantics::Resumption:
      return resumption_equiv(spec, p, q, probes, params.bound);
    case Semantics::Trace:
      return trace_equiv(spec, p, q, probes, params.bound);
    case Semantics::Termination:
      return term_equiv(spec, p, q, probes, params.bound);
  }
  throw Error("unknown semantics");
}

// ---------------------------------------------------------------------------
// Contexts

class Context {
 public:
  explicit Context(Term t) : term_(std::move(t)) {
    if (count_holes(term_) != 1) throw Error("a context must contain exactly one hole");
  }
  static Context identity() { return Context(Term::hole()); }

  const Term& term() const { return term_; }
  std::size_t depth() const { return hole_depth(term_); }

  bool operator==(const Context&) const = default;

 private:
  static std::size_t hole_depth(const Term& t) {
    if (t.is_hole()) return 0;
    for (const auto& c : t.children()) {
      if (count_holes(c)) return 1 + hole_depth(c);
    }
    return 0;
  }
  Term term_;
};

inline Program apply_context(const Context& c, const Program& p) { return fill_holes(c.term(), p); }

struct ContextGenOptions {
  std::size_t max_depth = 2;
  std::uint64_t seed = 0;
  // Leaf fillings per (operator, hole position); all of them are enumerated
  // when there are at most this many.
  std::size_t fillings_per_shape = 4;
  // Attribute choices for parameterized operators; operators without an
  // entry are not used as context layers.
  std::map<std::string, std::vector<AttributePtr>> attributes;
};

// Breadth-first by hole depth, identity first. Reproducible for a seed.
class ContextGenerator {
 public:
  ContextGenerator(Signature sig, std::vector<Program> leaf_pool, ContextGenOptions options)
      : sig_(std::move(sig)), pool_(std::move(leaf_pool)), options_(std::move(options)), rng_(options_.seed) {
    if (pool_.empty()) throw Error("context leaf pool must be nonempty");
  }

  std::optional<Context> next() {
    if (!started_) {
      started_ = true;
      current_ = {Context::identity()};
      return current_.front();
    }
    while (true) {
      if (pending_.empty()) {
        if (parent_ >= current_.size()) {
          if (next_level_.empty() || depth_ >= options_.max_depth) return std::nullopt;
          current_ = std::move(next_level_);
          next_level_.clear();
          parent_ = 0;
          ++depth_;
          continue;
        }
        if (depth_ >= options_.max_depth) return std::nullopt;
        expand(current_[parent_++]);
        continue;
      }
      Context c = std::move(pending_.front());
      pending_.pop_front();
      next_level_.push_back(c);
      return c;
    }
  }

  std::vector<Context> take(std::size_t n) {
    std::vector<Context> out;
    while (out.size() < n) {
      auto c = next();
      if (!c) break;
      out.push_back(std::move(*c));
    }
    return out;
  }

 private:
  void expand(const Context& inner) {
    for (const auto& op : sig_.operators()) {
      if (op.arity == 0) continue;
      std::vector<AttributePtr> attrs{nullptr};
      if (op.parameterized) {
        auto it = options_.attributes.find(op.name);
        if (it == options_.attributes.end() || it->second.empty()) continue;
        attrs = it->second;
      }
      for (const auto& attr : attrs) {
        for (std::size_t pos = 0; pos < op.arity; ++pos) {
          for (const auto& fill : fillings(op.arity - 1)) {
            std::vector<Term> children;
            std::size_t k = 0;
            for (std::size_t i = 0; i < op.arity; ++i) children.push_back(i == pos ? inner.term() : fill[k++]);
            pending_.emplace_back(Term::node(op.name, std::move(children), attr));
          }
        }
      }
    }
  }

  std::vector<std::vector<Term>> fillings(std::size_t slots) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < slots && total <= options_.fillings_per_shape; ++i) total *= pool_.size();
    std::vector<std::vector<Term>> out;
    if (total <= options_.fillings_per_shape) {
      for (std::size_t n = 0; n < total; ++n) {
        std::vector<Term> fill;
        std::size_t code = n;
        for (std::size_t i = 0; i < slots; ++i) {
          fill.push_back(pool_[code % pool_.size()]);
          code /= pool_.size();
        }
        out.push_back(std::move(fill));
      }
      return out;
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
    for (std::size_t n = 0; n < options_.fillings_per_shape; ++n) {
      std::vector<Term> fill;
      for (std::size_t i = 0; i < slots; ++i) fill.push_back(pool_[pick(rng_)]);
      out.push_back(std::move(fill));
    }
    return out;
  }

  Signature sig_;
  std::vector<Program> pool_;
  ContextGenOptions options_;
  std::mt19937_64 rng_;
  bool started_ = false;
  std::size_t depth_ = 0;
  std::vector<Context> current_;
  std::vector<Context> next_level_;
  std::size_t parent_ = 0;
  std::deque<Context> pending_;
};

inline ContextGenerator gen_contexts(const Signature& sig, std::vector<Program> leaf_pool, std::size_t max_depth,
                                     std::uint64_t seed, ContextGenOptions options = {}) {
  options.max_depth = max_depth;
  options.seed = seed;
  return ContextGenerator(sig, std::move(leaf_pool), std::move(options));
}

// ---------------------------------------------------------------------------
// Congruence search

template <class S>
struct Counterexample {
  std::size_t pair = 0;
  std::size_t combination = 0;  // enumeration index
  Context context;
  Program left;
  Program right;
  EquivVerdict<S> verdict;
};

template <class S>
struct CongruenceReport {
  SemanticsParams params;
  std::vector<std::string> notices;
  std::vector<Counterexample<S>> counterexamples;
  std::size_t checked = 0;
  std::size_t inconclusive = 0;
  std::size_t contexts = 0;

  bool found() const { return !counterexamples.empty(); }
};

template <class S>
std::string render_congruence(const CongruenceReport<S>& r, const Specification<S>& spec) {
  std::string out;
  for (const auto& n : r.notices) out += "notice: " + n + "\n";
  for (std::size_t i = 0; i < r.counterexamples.size(); ++i) {
    const auto& c = r.counterexamples[i];
    out += "counterexample " + std::to_string(i + 1) + " (pair " + std::to_string(c.pair) + ", combination " +
           std::to_string(c.combination) + ")\n";
    out += "  context: " + spec.print(c.context.term()) + "\n";
    out += "  left:    " + spec.print(c.left) + "\n";
    out += "  right:   " + spec.print(c.right) + "\n";
    if (c.verdict.witness) out += "  witness: " + spec.display(*c.verdict.witness) + "\n";
    auto indent = [](const std::string& text) {
      std::string res = "    ";
      for (char ch : text) {
        res += ch;
        if (ch == '\n') res += "    ";
      }
      return res;
    };
    out += "  left evidence:\n" + indent(c.verdict.left_evidence) + "\n";
    out += "  right evidence:\n" + indent(c.verdict.right_evidence) + "\n";
  }
  if (r.counterexamples.empty()) out += "none found\n";
  out += "checked " + std::to_string(r.checked) + " combinations over " + std::to_string(r.contexts) +
         " contexts under " + r.params.describe() + ", " + std::to_string(r.inconclusive) + " inconclusive\n";
  out += "COUNTEREXAMPLES=" + std::to_string(r.counterexamples.size()) + "\n";
  return out;
}

using ProgramPair = std::pair<Program, Program>;

// Checks C[p] against C[q] for up to `budget` (pair, context) combinations,
// contexts in stream order and pairs in input order. Pairs that are not
// equivalent on their own are skipped with a notice.
template <class S>
CongruenceReport<S> congruence_probe(const Specification<S>& spec, const SemanticsParams& params,
                                     const std::vector<ProgramPair>& pairs,
                                     const std::function<std::optional<Context>()>& contexts,
                                     const ProbeSet<S>& probes, std::size_t budget) {
  CongruenceReport<S> report;
  report.params = params;
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto v = equiv(spec, params, pairs[i].first, pairs[i].second, probes);
    if (v.equivalent()) {
      live.push_back(i);
    } else {
      report.notices.push_back("pair " + std::to_string(i) + " (" + spec.print(pairs[i].first) + " vs " +
                               spec.print(pairs[i].second) + ") is " + to_string(v.verdict) +
                               " on its own; skipped");
    }
  }
  if (live.empty()) return report;
  while (report.checked < budget) {
    auto ctx = contexts();
    if (!ctx) break;
    ++report.contexts;
    for (std::size_t i : live) {
      if (report.checked >= budget) break;
      Program left = apply_context(*ctx, pairs[i].first);
      Program right = apply_context(*ctx, pairs[i].second);
      auto v = equiv(spec, params, left, right, probes);
      std::size_t index = report.checked++;
      if (v.distinguished()) {
        report.counterexamples.push_back({i, index, *ctx, left, right, std::move(v)});
      } else if (v.verdict == Verdict::Inconclusive) {
        ++report.inconclusive;
      }
    }
  }
  return report;
}

template <class S>
CongruenceReport<S> congruence_probe(const Specification<S>& spec, const SemanticsParams& params,
                                     const std::vector<ProgramPair>& pairs, ContextGenerator& contexts,
                                     const ProbeSet<S>& probes, std::size_t budget) {
  return congruence_probe<S>(spec, params, pairs, [&contexts] { return contexts.next(); }, probes, budget);
}

}  // namespace isos
