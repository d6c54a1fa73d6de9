#include <catch_amalgamated.hpp>

#include <random>

#include "isos/engine.hpp"
#include "isos/spec.hpp"
#include "isos/turing.hpp"
#include "isos/while_lang.hpp"

using namespace isos;
using lang::Store;

namespace {

Trigger<Store> trig(Store s, std::vector<std::pair<Store, Mode>> premisses) {
  Trigger<Store> t{std::move(s), {}};
  for (auto& [out, mode] : premisses) t.premisses.push_back({out, mode});
  return t;
}

std::vector<std::string> labels(const std::vector<SchemePtr<Store>>& schemes) {
  std::vector<std::string> out;
  for (const auto& s : schemes) out.push_back(s->label);
  return out;
}

OpInstance seq_op() { return {lang::ops::kSeq, nullptr}; }

OpInstance while_op(const char* cond) {
  return {lang::ops::kWhile, std::make_shared<const lang::CondAttr>(lang::parse_expr(cond))};
}

Term x(std::uint32_t j) { return Term::var(MetaVar::x(j)); }
Term y(std::uint32_t j) { return Term::var(MetaVar::y(j)); }

}  // namespace

TEST_CASE("validate_spec accepts every corpus variant") {
  for (const auto& name : lang::variant_names()) {
    auto spec = lang::build_spec(*lang::variant_from_name(name));
    INFO(name);
    auto report = validate_spec(spec);
    CHECK(report.ok());
    CHECK(report.render().empty());
  }
}

TEST_CASE("validate_spec flags unbound variables") {
  Signature sig({{"u", 1, false}, {"b", 2, false}});
  std::vector<RuleScheme<Store>> schemes;
  schemes.push_back({"u", {Shape::Terminating}, Guard<Store>::always(),
                     Conclusion<Store>::progress(StateExpr<Store>::input(), y(1)), "bad-target"});
  schemes.push_back({"b", {Shape::Progressing, Shape::Omitted},
                     Guard<Store>{{2}, [](const Bindings<Store>& b) { return b.output(2).get("x") == 0; }},
                     Conclusion<Store>::terminate(StateExpr<Store>::input()), "bad-guard"});
  schemes.push_back({"b", {Shape::Omitted, Shape::Omitted}, Guard<Store>::always(),
                     Conclusion<Store>::terminate(StateExpr<Store>::premiss_output(1)), "bad-output"});
  Specification<Store> spec("broken", sig, lang::store_domain(), std::move(schemes));
  auto report = validate_spec(spec);
  REQUIRE(report.findings.size() == 3);
  CHECK(report.findings[0].scheme == "bad-target");
  CHECK(report.findings[0].message == "unbound target variable y1");
  CHECK(report.findings[1].scheme == "bad-guard");
  CHECK(report.findings[1].message == "guard reads unbound variable s'2");
  CHECK(report.findings[2].scheme == "bad-output");
}

TEST_CASE("validate_spec flags arity and unknown operators") {
  Signature sig({{"u", 1, false}});
  std::vector<RuleScheme<Store>> schemes;
  schemes.push_back({"u", {}, Guard<Store>::always(), Conclusion<Store>::terminate(StateExpr<Store>::input()), "a"});
  schemes.push_back({"v", {}, Guard<Store>::always(), Conclusion<Store>::terminate(StateExpr<Store>::input()), "b"});
  Specification<Store> spec("broken", sig, lang::store_domain(), std::move(schemes));
  auto report = validate_spec(spec);
  REQUIRE(report.findings.size() == 2);
  CHECK(report.findings[1].message == "unknown operator 'v'");
}

TEST_CASE("match_schemes picks the rule by shape and guard") {
  auto spec = lang::build_spec(lang::WhileVariant::base());
  Store s{{"x", 1}};
  Store s1{{"x", 2}};
  CHECK(labels(match_schemes(spec, seq_op(), trig(s, {{s1, Mode::Terminating}, {s, Mode::Progressing}}))) ==
        std::vector<std::string>{"seq1"});
  CHECK(labels(match_schemes(spec, while_op("x"), trig(Store{}, {{Store{}, Mode::Terminating}}))) ==
        std::vector<std::string>{"while1"});
  CHECK(labels(match_schemes(spec, while_op("x"), trig(s, {{Store{}, Mode::Terminating}}))) ==
        std::vector<std::string>{"while2"});
  auto broken = lang::broken_overlapping_while();
  CHECK(match_schemes(broken, while_op("x"), trig(Store{}, {{Store{}, Mode::Terminating}})).size() == 2);
}

TEST_CASE("resolve_rule reports missing and ambiguous rules") {
  auto spec = lang::build_spec(lang::WhileVariant::base());
  Store s{{"x", 1}};
  CHECK(resolve_rule(spec, seq_op(), trig(s, {{s, Mode::Progressing}, {s, Mode::Terminating}}))->label == "seq2");

  auto missing = lang::broken_missing_while1();
  auto t = trig(Store{}, {{Store{}, Mode::Terminating}});
  CHECK_THROWS_AS(resolve_rule(missing, while_op("x"), t), MissingRule);
  try {
    resolve_rule(missing, while_op("x"), t);
  } catch (const MissingRule& e) {
    CHECK(e.labels().empty());
  }

  auto overlapping = lang::broken_overlapping_while();
  CHECK_THROWS_AS(resolve_rule(overlapping, while_op("x"), t), AmbiguousRules);
  try {
    resolve_rule(overlapping, while_op("x"), t);
  } catch (const AmbiguousRules& e) {
    CHECK(e.labels().size() == 2);
  }
}

TEST_CASE("engine errors carry the subterm path") {
  auto missing = lang::broken_missing_while1();
  Program p = lang::parse_program("skip ; while x { skip }");
  try {
    (void)run(missing, Store{}, p, 10);
    FAIL("expected MissingRule");
  } catch (const MissingRule& e) {
    CHECK(e.path() == std::vector<std::size_t>{1});
  }
}

TEST_CASE("r_family reads rules off as functions") {
  auto spec = lang::build_spec(lang::WhileVariant::base());
  Store s{{"x", 1}};
  Store s1{{"x", 5}};
  Store s2{{"y", 7}};
  auto r = r_family(spec, seq_op(), {1}, s, {s1, s2});
  CHECK(r.output == s1);
  CHECK(r.target == Term::node(lang::ops::kSeq, {y(1), x(2)}));

  r = r_family(spec, seq_op(), {}, s, {s1, s2});
  CHECK(r.output == s1);
  CHECK(r.target == x(2));

  r = r_family(spec, {lang::ops::kSkip, nullptr}, {}, s, {});
  CHECK(r.final());
  CHECK(r.output == s);

  CHECK_THROWS_AS(r_family(spec, seq_op(), {}, s, {s1}), ArityMismatch);
}

TEST_CASE("spec_of_family round trip on every variant") {
  for (const auto& name : lang::variant_names()) {
    INFO(name);
    auto spec = lang::build_spec(*lang::variant_from_name(name));
    auto rebuilt = spec_of_family<Store>(family_of(spec), spec.signature(), spec.states());
    auto again = family_of(rebuilt);
    std::mt19937_64 rng(2024);
    std::size_t agreed = 0;
    for (const auto& op : spec.signature().operators()) {
      for (int n = 0; n < 1000; ++n) {
        AttributePtr attr = op.parameterized ? spec.attribute_sampler()(op, rng) : nullptr;
        OpInstance f{op.name, attr};
        PositionSet w;
        std::vector<Store> outs;
        for (std::size_t j = 1; j <= op.arity; ++j) {
          if (rng() % 2) w.insert(j);
          outs.push_back(spec.states().sample(rng));
        }
        Store s = spec.states().sample(rng);
        auto expected = r_family(spec, f, w, s, outs);
        auto actual = again(f, w, s, outs);
        CHECK(actual == expected);
        agreed += actual == expected;
      }
    }
    CHECK(agreed == 1000 * spec.signature().operators().size());
  }
}

TEST_CASE("a family that always stops gives one-step programs") {
  auto family = [](const OpInstance&, const PositionSet&, const Store& s, const std::vector<Store>&) {
    return RResult<Store>{s, std::nullopt};
  };
  auto spec = spec_of_family<Store>(family, lang::base_signature(), lang::store_domain());
  std::mt19937_64 rng(5);
  for (int n = 0; n < 50; ++n) {
    Program p = lang::random_program(rng);
    Store s = spec.states().sample(rng);
    auto r = run(spec, s, p, 5);
    REQUIRE(r.is_final());
    CHECK(r.steps == 1);
    CHECK(*r.final_state == s);
  }
}

TEST_CASE("determinism_check on corpus and machine specs") {
  for (const auto& name : lang::variant_names()) {
    INFO(name);
    auto report = determinism_check(lang::build_spec(*lang::variant_from_name(name)), 500, 99);
    CHECK(report.ok());
    CHECK(report.probes == 500 * lang::build_spec(*lang::variant_from_name(name)).signature().operators().size());
  }
  auto machine = tm::canonicalize_halt(tm::parse_machine("states: q0 qh\nstart: q0\nhalt: qh\nq0,_ -> qh,_,S\n"));
  auto tspec = tm::build_tm_spec(machine);
  CHECK(validate_spec(tspec).ok());
  CHECK(determinism_check(tspec, 500, 99).ok());
}

TEST_CASE("determinism_check flags broken fixtures") {
  auto missing = determinism_check(lang::broken_missing_while1(), 500, 3);
  CHECK(missing.missing() > 0);
  CHECK(missing.ambiguous() == 0);
  CHECK(missing.render().find("no rule for trigger") != std::string::npos);

  auto overlapping = determinism_check(lang::broken_overlapping_while(), 500, 3);
  CHECK(overlapping.ambiguous() > 0);
  CHECK(overlapping.missing() == 0);
}

TEST_CASE("read-set fuzzing finds honest declarations") {
  for (const auto& name : lang::variant_names()) {
    INFO(name);
    CHECK(fuzz_read_sets(lang::build_spec(*lang::variant_from_name(name)), 200, 17).ok());
  }
}

TEST_CASE("read-set fuzzing catches a dishonest guard") {
  Signature sig({{"u", 1, false}});
  std::vector<RuleScheme<Store>> schemes;
  // Declares {s} but reads s'1.
  schemes.push_back({"u", {Shape::Terminating},
                     Guard<Store>{{0}, [](const Bindings<Store>& b) { return b.output(1).get("x") == 0; }},
                     Conclusion<Store>::terminate(StateExpr<Store>::input()), "liar"});
  Specification<Store> spec("liar", sig, lang::store_domain(), std::move(schemes));
  auto report = fuzz_read_sets(spec, 50, 1);
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].scheme == "liar");
}

TEST_CASE("resolved targets validate against the signature") {
  auto spec = lang::build_spec(lang::WhileVariant::interrupt());
  std::mt19937_64 rng(31);
  lang::ProgramGenOptions opts;
  for (int n = 0; n < 100; ++n) {
    Program p = lang::random_program(rng, opts);
    Store s = spec.states().sample(rng);
    auto o = step(spec, s, p);
    if (o.program) CHECK_NOTHROW(validate_program(spec.signature(), *o.program));
  }
}
