#include "isos/while_suites.hpp"

#include <random>

namespace isos::lang {

ProbeSet<Store> xy012() { return ProbeSet<Store>(stores_over({"x", "y"}, {0, 1, 2}), false); }

namespace {

const char* cell(Verdict v) {
  switch (v) {
    case Verdict::Equivalent:
      return "✓";
    case Verdict::Distinguished:
      return "✗";
    case Verdict::Inconclusive:
      return "?";
  }
  return "?";
}

// Pads to a display width, counting UTF-8 code points.
std::string pad(std::string s, std::size_t width) {
  std::size_t shown = 0;
  for (unsigned char c : s) shown += (c & 0xC0) != 0x80;
  if (shown < width) s.append(width - shown, ' ');
  return s;
}

}  // namespace

bool Table1::matches_expected() const {
  const Verdict E = Verdict::Equivalent, D = Verdict::Distinguished;
  const Verdict expected[3][2] = {{D, D}, {E, D}, {E, E}};
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      if (cells[r][c].verdict != expected[r][c]) return false;
    }
  }
  return true;
}

std::string Table1::render() const {
  std::string h0 = "(" + print_program(pairs[0].first) + ") = (" + print_program(pairs[0].second) + ")";
  std::string h1 = "(" + print_program(pairs[1].first) + ") = (" + print_program(pairs[1].second) + ")";
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.describe().size());
  std::string out = pad("", w) + " | " + h0 + " | " + h1 + "\n";
  for (std::size_t r = 0; r < 3; ++r) {
    out += pad(rows[r].describe(), w) + " | " + pad(cell(cells[r][0].verdict), h0.size()) + " | " +
           cell(cells[r][1].verdict) + "\n";
  }
  return out;
}

Table1 table1(std::size_t depth, std::size_t k, std::size_t fuel) {
  auto spec = build_spec(WhileVariant::base());
  auto probes = xy012();
  Table1 t;
  t.pairs = {ProgramPair{parse_program("x := 1 ; y := x"), parse_program("x := 1 ; y := 1")},
             ProgramPair{parse_program("x := 1 ; x := 2"), parse_program("x := 2")}};
  t.rows = {SemanticsParams{Semantics::Resumption, depth}, SemanticsParams{Semantics::Trace, k},
            SemanticsParams{Semantics::Termination, fuel}};
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 2; ++c) t.cells[r][c] = equiv(spec, t.rows[r], t.pairs[c].first, t.pairs[c].second, probes);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Suites

std::vector<std::string> suite_names() {
  return {"floor",       "interleave",         "branch", "ceil", "interrupt", "cool-termination",
          "streamlined-trace", "streamlined-trace-interrupt"};
}

namespace {

std::vector<Program> programs(std::initializer_list<const char*> texts) {
  std::vector<Program> out;
  for (const char* t : texts) out.push_back(parse_program(t));
  return out;
}

ProgramPair pair(const char* a, const char* b) { return {parse_program(a), parse_program(b)}; }

std::map<std::string, std::vector<AttributePtr>> loop_conditions(std::initializer_list<const char*> conds) {
  std::vector<AttributePtr> attrs;
  for (const char* c : conds) attrs.push_back(std::make_shared<const CondAttr>(parse_expr(c)));
  return {{ops::kWhile, attrs}};
}

Suite counterexample_suite(std::string name, std::string variant, ProgramPair p, std::vector<Program> leaves) {
  Suite s;
  s.name = std::move(name);
  s.variant = std::move(variant);
  s.params = {Semantics::Trace, 8};
  s.pairs = {std::move(p)};
  s.leaves = std::move(leaves);
  s.attributes = loop_conditions({"x"});
  s.max_depth = 2;
  s.probes = xy012();
  s.expect_counterexample = true;
  return s;
}

}  // namespace

std::optional<Suite> make_suite(std::string_view name) {
  if (name == "floor") {
    return counterexample_suite("floor", "while+floor", pair("x := 1 ; x := x + 1", "x := 1 ; x := x * 2"),
                                programs({"skip", "x := 0"}));
  }
  if (name == "interleave") {
    return counterexample_suite("interleave", "while+interleave", pair("x := 2 ; x := x + 2", "x := 2 ; x := x * 2"),
                                programs({"skip", "x := 0"}));
  }
  if (name == "branch") {
    // The right operand must keep progressing for three steps so that the
    // left one is stepped again after the store was reset.
    return counterexample_suite("branch", "while+branch", pair("x := 2 ; x := x + 2", "x := 2 ; x := x * 2"),
                                programs({"skip", "x := 0", "x := 0 ; x := 0 ; x := 0 ; x := 0"}));
  }
  if (name == "ceil") {
    return counterexample_suite("ceil", "while+ceil", pair("x := 2 ; x := x + 2", "x := 2 ; x := x * 2"),
                                programs({"skip", "x := 0"}));
  }
  if (name == "interrupt") {
    Suite s = counterexample_suite("interrupt", "while+interrupt", pair("x := 42 ; x := 2", "x := 2"),
                                   programs({"skip", "x := 0"}));
    s.params = {Semantics::Termination, 50};
    s.probes = ProbeSet<Store>(stores_over({"x", "i"}, {0, 1, 2}), false);
    return s;
  }

  const char* p = "x := 1";
  const char* q = "y := x + 1";
  const char* r = "x := y * 2";
  auto assoc = ProgramPair{seq(seq(parse_program(p), parse_program(q)), parse_program(r)),
                           seq(parse_program(p), seq(parse_program(q), parse_program(r)))};
  Suite s;
  s.name = std::string(name);
  s.max_depth = 4;
  s.random_contexts = true;
  s.attributes = loop_conditions({"x", "y - x", "2 - y"});
  if (name == "cool-termination") {
    s.variant = "while";
    s.params = {Semantics::Termination, 500};
    s.pairs = {pair("x := 1 ; x := 2", "x := 2"), {seq(skip(), parse_program(p)), parse_program(p)}, assoc};
    s.leaves = programs({"skip", "x := 0", "y := x + 1", "x := x - 1", "while x { x := x - 1 }"});
    s.probes = xy012();
    return s;
  }
  if (name == "streamlined-trace" || name == "streamlined-trace-interrupt") {
    bool interrupt = name == "streamlined-trace-interrupt";
    s.variant = interrupt ? "while+interrupt" : "while";
    s.params = {Semantics::Trace, 6};
    s.pairs = {assoc, pair("x := 1 ; y := x", "x := 1 ; y := 1")};
    s.leaves = programs({"skip", "x := 0", "y := x + 1", "x := x - 1"});
    if (interrupt) {
      for (const char* extra : {"i := 1", "x := 42", "i := 0"}) s.leaves.push_back(parse_program(extra));
      s.probes = ProbeSet<Store>(stores_over({"x", "y", "i"}, {0, 1, 2}), false);
    } else {
      s.probes = xy012();
    }
    return s;
  }
  return std::nullopt;
}

std::function<std::optional<Context>()> random_context_stream(const Signature& sig, std::vector<Program> leaves,
                                                              std::map<std::string, std::vector<AttributePtr>> attrs,
                                                              std::size_t max_depth, std::uint64_t seed) {
  if (leaves.empty()) throw Error("context leaf pool must be nonempty");
  std::vector<Operator> layers;
  for (const auto& op : sig.operators()) {
    if (op.arity == 0) continue;
    if (op.parameterized && (!attrs.count(op.name) || attrs.at(op.name).empty())) continue;
    layers.push_back(op);
  }
  if (layers.empty()) throw Error("signature has no operator to build contexts from");
  auto rng = std::make_shared<std::mt19937_64>(seed);
  auto first = std::make_shared<bool>(true);
  return [=]() -> std::optional<Context> {
    if (*first) {
      *first = false;
      return Context::identity();
    }
    std::size_t depth = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, max_depth))(*rng);
    Term t = Term::hole();
    for (std::size_t d = 0; d < depth; ++d) {
      const Operator& op = layers[std::uniform_int_distribution<std::size_t>(0, layers.size() - 1)(*rng)];
      AttributePtr attr;
      if (op.parameterized) {
        const auto& choices = attrs.at(op.name);
        attr = choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(*rng)];
      }
      std::size_t pos = std::uniform_int_distribution<std::size_t>(0, op.arity - 1)(*rng);
      std::vector<Term> children;
      for (std::size_t i = 0; i < op.arity; ++i) {
        children.push_back(i == pos ? t : leaves[std::uniform_int_distribution<std::size_t>(0, leaves.size() - 1)(*rng)]);
      }
      t = Term::node(op.name, std::move(children), attr);
    }
    return Context(t);
  };
}

CongruenceReport<Store> run_suite(const Suite& suite, std::uint64_t seed, std::optional<std::size_t> budget) {
  auto variant = variant_from_name(suite.variant);
  if (!variant) throw Error("unknown variant '" + suite.variant + "'");
  auto spec = build_spec(*variant);
  std::size_t n = budget.value_or(suite.budget);
  if (suite.random_contexts) {
    auto stream = random_context_stream(spec.signature(), suite.leaves, suite.attributes, suite.max_depth, seed);
    return congruence_probe<Store>(spec, suite.params, suite.pairs, stream, suite.probes, n);
  }
  ContextGenOptions options;
  options.attributes = suite.attributes;
  auto gen = gen_contexts(spec.signature(), suite.leaves, suite.max_depth, seed, options);
  return congruence_probe<Store>(spec, suite.params, suite.pairs, gen, suite.probes, n);
}

}  // namespace isos::lang
