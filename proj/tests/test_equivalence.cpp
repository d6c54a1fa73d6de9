#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "isos/equivalence.hpp"
#include "isos/while_lang.hpp"
#include "isos/while_suites.hpp"

using namespace isos;
using lang::parse_program;
using lang::parse_term;
using lang::Store;

namespace {

const lang::WhileSpec& spec_named(const char* name) {
  static std::map<std::string, lang::WhileSpec> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, *lang::spec_from_name(name)).first;
  return it->second;
}

const lang::WhileSpec& base() { return spec_named("while"); }

ProbeSet<Store> x012() { return ProbeSet<Store>(lang::stores_over({"x"}, {0, 1, 2})); }

}  // namespace

TEST_CASE("trace_equiv") {
  auto probes = lang::xy012();
  auto v = trace_equiv(base(), parse_program("x := 1 ; y := x"), parse_program("x := 1 ; y := 1"), probes, 8);
  CHECK(v.equivalent());
  CHECK(v.params.describe() == "trace(k=8)");

  v = trace_equiv(base(), parse_program("x := 1 ; x := 2"), parse_program("x := 2"), probes, 8);
  REQUIRE(v.distinguished());
  CHECK(*v.witness == probes.states.front());
  CHECK(v.left_evidence == "{x=1}\n{x=2}\nTERMINATED");
  CHECK(v.right_evidence == "{x=2}\nTERMINATED");

  Program p = parse_program("while x { x := x - 1 }");
  CHECK(trace_equiv(base(), p, parse_program("skip"), probes, 0).equivalent());
}

TEST_CASE("term_equiv") {
  auto probes = lang::xy012();
  CHECK(term_equiv(base(), parse_program("x := 1 ; x := 2"), parse_program("x := 2"), probes, 10).equivalent());
  Program loop = parse_program("while 1 { skip }");
  CHECK(term_equiv(base(), loop, loop, probes, 50).equivalent());

  auto v = term_equiv(base(), loop, parse_program("skip"), probes, 50);
  CHECK(v.verdict == Verdict::Inconclusive);
  CHECK_FALSE(v.reason.empty());

  const auto& interrupt = spec_named("while+interrupt");
  Context c(parse_term("[] ; skip"));
  Program l = apply_context(c, parse_program("x := 42 ; x := 2"));
  Program r = apply_context(c, parse_program("x := 2"));
  ProbeSet<Store> flagged({Store{{"i", 1}}});
  v = term_equiv(interrupt, l, r, flagged, 50);
  REQUIRE(v.distinguished());
  CHECK(v.left_evidence == "FINAL {i=1,x=42} after 2 steps");
  CHECK(v.right_evidence == "FINAL {i=1,x=2} after 2 steps");
  CHECK(term_equiv(interrupt, parse_program("x := 42 ; x := 2"), parse_program("x := 2"), flagged, 50).equivalent());
}

TEST_CASE("resumption_equiv") {
  auto v = resumption_equiv(base(), parse_program("x := 1 ; x := x + 1"), parse_program("x := 1 ; x := x * 2"),
                            x012(), 2);
  REQUIRE(v.distinguished());
  CHECK(v.left_evidence == "path {} -> {}: {x=1} (terminated)");
  CHECK(v.right_evidence == "path {} -> {}: {} (terminated)");

  Program p = parse_program("while x { x := x - 1 ; y := y + 1 }");
  CHECK(resumption_equiv(base(), p, p, lang::xy012(), 5).equivalent());
  for (std::size_t d = 1; d <= 4; ++d) {
    CHECK(resumption_equiv(base(), parse_program("skip"), parse_program("x := x + 0"), lang::xy012(), d).equivalent());
  }
}

TEST_CASE("apply_context") {
  Program t1 = parse_program("x := 1 ; x := x + 1");
  CHECK(apply_context(Context(parse_term("floor([])")), t1) == lang::floor_of(t1));
  CHECK(apply_context(Context::identity(), t1) == t1);
  CHECK(apply_context(Context(parse_term("[] ; skip")), t1) == lang::seq(t1, lang::skip()));
  CHECK_THROWS(Context(parse_term("[] ; []")));
  CHECK_THROWS(Context(parse_term("skip")));
}

TEST_CASE("gen_contexts enumerates breadth-first") {
  std::vector<Program> pool{parse_program("skip"), parse_program("x := 0")};
  auto only = gen_contexts(lang::base_signature(), pool, 0, 1).take(10);
  REQUIRE(only.size() == 1);
  CHECK(only[0] == Context::identity());

  ContextGenOptions options;
  options.attributes[lang::ops::kWhile] = {std::make_shared<const lang::CondAttr>(lang::parse_expr("x"))};
  auto level1 = gen_contexts(lang::base_signature(), pool, 1, 1, options).take(100);
  std::set<std::string> printed;
  for (const auto& c : level1) printed.insert(lang::print_program(c.term()));
  CHECK(level1.front() == Context::identity());
  CHECK(printed.count("[] ; skip"));
  CHECK(printed.count("skip ; []"));
  CHECK(printed.count("[] ; x := 0"));
  CHECK(printed.count("x := 0 ; []"));
  CHECK(printed.count("while x { [] }"));
  CHECK(level1.size() == 6);

  auto a = gen_contexts(lang::full_signature(), pool, 2, 9, options).take(300);
  auto b = gen_contexts(lang::full_signature(), pool, 2, 9, options).take(300);
  CHECK(a == b);
  std::size_t last = 0;
  for (const auto& c : a) {
    CHECK(c.depth() >= last);
    last = c.depth();
  }
}

TEST_CASE("congruence_probe finds the floor counterexample") {
  auto suite = *lang::make_suite("floor");
  auto report = lang::run_suite(suite, 1);
  REQUIRE(report.found());
  CHECK(lang::print_program(report.counterexamples.front().context.term()) == "floor([])");
  CHECK(report.notices.empty());
  auto text = render_congruence(report, spec_named("while+floor"));
  CHECK(text.find("COUNTEREXAMPLES=") != std::string::npos);
}

TEST_CASE("congruence_probe finds the interleave counterexample") {
  const auto& spec = spec_named("while+interleave");
  std::vector<ProgramPair> pairs{{parse_program("x := 2 ; x := x + 2"), parse_program("x := 2 ; x := x * 2")}};
  std::vector<Context> contexts{Context::identity(), Context(parse_term("[] <| x := 0"))};
  std::size_t i = 0;
  auto stream = [&]() -> std::optional<Context> {
    if (i < contexts.size()) return contexts[i++];
    return std::nullopt;
  };
  auto report = congruence_probe<Store>(spec, {Semantics::Trace, 8}, pairs, stream, lang::xy012(), 200);
  REQUIRE(report.counterexamples.size() == 1);
  CHECK(report.counterexamples[0].context == contexts[1]);
  CHECK(report.checked == 2);
}

TEST_CASE("congruence_probe skips pairs that already differ") {
  std::vector<ProgramPair> pairs{{parse_program("x := 1 ; x := 2"), parse_program("x := 2")}};
  auto gen = gen_contexts(lang::base_signature(), {parse_program("skip")}, 1, 0);
  auto report = congruence_probe<Store>(base(), {Semantics::Trace, 8}, pairs, gen, lang::xy012(), 50);
  CHECK(report.notices.size() == 1);
  CHECK(report.checked == 0);
}

TEST_CASE("associativity survives contexts") {
  auto suite = *lang::make_suite("streamlined-trace");
  auto report = lang::run_suite(suite, 3);
  CHECK(report.checked == 200);
  CHECK_FALSE(report.found());
  CHECK(report.notices.empty());
}

TEST_CASE("checkers are reflexive and symmetric") {
  std::mt19937_64 rng(8);
  auto probes = lang::xy012();
  for (int n = 0; n < 30; ++n) {
    Program p = lang::random_program(rng);
    Program q = lang::random_program(rng);
    for (auto params : {SemanticsParams{Semantics::Trace, 5}, SemanticsParams{Semantics::Termination, 30},
                        SemanticsParams{Semantics::Resumption, 3}}) {
      CHECK(equiv(base(), params, p, p, probes).equivalent());
      CHECK(equiv(base(), params, p, q, probes).verdict == equiv(base(), params, q, p, probes).verdict);
    }
  }
}

TEST_CASE("distinguishing is monotone in k") {
  std::mt19937_64 rng(12);
  auto probes = lang::xy012();
  for (int n = 0; n < 40; ++n) {
    Program p = lang::random_program(rng);
    Program q = lang::random_program(rng);
    for (std::size_t k = 1; k <= 6; ++k) {
      auto v = trace_equiv(base(), p, q, probes, k);
      if (!v.distinguished()) continue;
      for (std::size_t k2 = k; k2 <= 10; ++k2) {
        CHECK(trace_equiv(base(), p, q, ProbeSet<Store>({*v.witness}), k2).distinguished());
      }
      break;
    }
  }
}

TEST_CASE("refinement between the semantics") {
  auto probes = ProbeSet<Store>::exhaustive_of(
      StateDomain<Store>{[](const Store& s) { return s.to_string(); }, lang::stores_over({"x"}, {0, 1}), nullptr});
  // Programs over one variable with values in {0,1}.
  std::vector<Program> pool{parse_program("skip"), parse_program("x := 1"), parse_program("x := 0"),
                            parse_program("x := 1 - x"), parse_program("skip ; skip"),
                            parse_program("x := 1 ; x := 0"), parse_program("while x { x := 0 }"),
                            parse_program("x := x * 1")};
  for (const auto& p : pool) {
    for (const auto& q : pool) {
      for (std::size_t k = 1; k <= 4; ++k) {
        if (resumption_equiv(base(), p, q, probes, k).equivalent()) {
          CHECK(trace_equiv(base(), p, q, probes, k).equivalent());
        }
      }
      for (const auto& s : probes.states) {
        auto a = trace(base(), s, p, 6);
        auto b = trace(base(), s, q, 6);
        if (a.terminated() && a == b) CHECK(term_equiv(base(), p, q, ProbeSet<Store>({s}), 6).equivalent());
      }
    }
  }
}
