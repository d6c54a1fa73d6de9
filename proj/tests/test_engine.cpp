#include <catch_amalgamated.hpp>

#include <optional>
#include <random>

#include "isos/engine.hpp"
#include "isos/while_lang.hpp"
#include "isos/while_suites.hpp"
#include "random_specs.hpp"

using namespace isos;
using lang::parse_program;
using lang::Store;

namespace {

const lang::WhileSpec& base() {
  static const lang::WhileSpec spec = lang::build_spec(lang::WhileVariant::base());
  return spec;
}

std::string show(const Store& s) { return s.to_string(); }

}  // namespace

TEST_CASE("step follows the base rules") {
  CHECK(step(base(), Store{}, parse_program("skip")) == StepOutcome<Store>::terminated(Store{}));
  CHECK(step(base(), Store{}, parse_program("x := x + 1")) == StepOutcome<Store>::terminated(Store{{"x", 1}}));
  CHECK(step(base(), Store{{"y", 5}}, parse_program("x := 1 ; y := x")) ==
        StepOutcome<Store>::continue_with(Store{{"x", 1}, {"y", 5}}, parse_program("y := x")));
  Program loop = parse_program("while x { y := 1 }");
  CHECK(step(base(), Store{{"x", 1}}, loop) ==
        StepOutcome<Store>::continue_with(Store{{"x", 1}}, parse_program("y := 1 ; while x { y := 1 }")));
  CHECK(step(base(), Store{}, loop) == StepOutcome<Store>::terminated(Store{}));
}

TEST_CASE("step is deterministic") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 100; ++n) {
    Program p = lang::random_program(rng);
    Store s = base().states().sample(rng);
    CHECK(step(base(), s, p) == step(base(), s, p));
  }
}

TEST_CASE("step rejects open terms") {
  CHECK_THROWS_AS(step(base(), Store{}, Term::var(MetaVar::x(1))), OpenTerm);
}

TEST_CASE("trace collects output states") {
  auto t = trace(base(), Store{}, parse_program("x := 1 ; x := x + 1"), 8);
  CHECK(t.states == std::vector<Store>{Store{{"x", 1}}, Store{{"x", 2}}});
  CHECK(t.terminated());

  Store s{{"y", 2}};
  auto loop = trace(base(), s, parse_program("while 1 { skip }"), 3);
  CHECK(loop.states == std::vector<Store>{s, s, s});
  CHECK(loop.status == TraceStatus::Truncated);
  CHECK(render_trace<Store>(loop, show) == "{y=2}\n{y=2}\n{y=2}\nTRUNCATED(3)");

  CHECK_THROWS(trace(base(), s, parse_program("skip"), 0));
}

TEST_CASE("a trace ending exactly at the bound is terminated") {
  auto t = trace(base(), Store{}, parse_program("x := 1 ; x := 2"), 2);
  CHECK(t.terminated());
  CHECK(t.states.size() == 2);
}

TEST_CASE("trace ignores how an assigned value is computed") {
  for (const Store& s : lang::xy012().states) {
    CHECK(trace(base(), s, parse_program("x := 1 ; y := x"), 8) ==
          trace(base(), s, parse_program("x := 1 ; y := 1"), 8));
  }
}

TEST_CASE("run counts the terminating step") {
  auto r = run(base(), Store{}, parse_program("x := 1 ; x := 2"), 10);
  REQUIRE(r.is_final());
  CHECK(*r.final_state == Store{{"x", 2}});
  CHECK(r.steps == 2);

  auto d = run(base(), Store{{"x", 4}}, parse_program("while 1 { skip }"), 100);
  CHECK_FALSE(d.is_final());
  CHECK(d.fuel == 100);
  CHECK(render_termination<Store>(d, show) == "FUEL_EXHAUSTED(100)");

  auto one = run(base(), Store{}, parse_program("skip"), 1);
  CHECK(one.is_final());
  CHECK(one.steps == 1);
  CHECK(render_termination<Store>(one, show) == "FINAL {} after 1 steps");
}

TEST_CASE("fn_of_trace") {
  Trace<Store> done{{Store{{"x", 1}}, Store{{"x", 2}}}, TraceStatus::Terminated, 8};
  CHECK(fn_of_trace(done) == Store{{"x", 2}});
  Store s{{"x", 1}};
  Trace<Store> cut{{s, s, s}, TraceStatus::Truncated, 3};
  CHECK_FALSE(fn_of_trace(cut).has_value());
  CHECK(fn_of_trace(trace(base(), s, parse_program("skip"), 1)) == s);
}

TEST_CASE("resumption trees") {
  ProbeSet<Store> probes({Store{}, Store{{"x", 1}}});
  auto t1 = resumption(base(), parse_program("x := 1 ; x := x + 1"), probes, 2);
  REQUIRE(t1->edges.size() == 2);
  for (const auto& e : t1->edges) {
    CHECK(e.label == Store{{"x", 1}});
    REQUIRE(e.child);
    CHECK(e.child->depth == 1);
    CHECK(e.child->edges[0].label == Store{{"x", 1}});
    CHECK(e.child->edges[1].label == Store{{"x", 2}});
    CHECK(e.child->edges[1].kind == ResumptionEdge<Store>::Kind::Terminated);
  }
  auto t2 = resumption(base(), parse_program("x := 1 ; x := x * 2"), probes, 2);
  auto d = first_difference<Store>(*t1, *t2, probes, show);
  REQUIRE(d);
  CHECK(d->path == std::vector<Store>{Store{}, Store{}});
  CHECK(d->left == "{x=1} (terminated)");
  CHECK(d->right == "{} (terminated)");

  auto sk = resumption(base(), parse_program("skip"), probes, 4);
  for (std::size_t i = 0; i < probes.states.size(); ++i) {
    CHECK(sk->edges[i].kind == ResumptionEdge<Store>::Kind::Terminated);
    CHECK(sk->edges[i].label == probes.states[i]);
  }
}

TEST_CASE("depth-one children are unexpanded") {
  ProbeSet<Store> probes({Store{}});
  auto t = resumption(base(), parse_program("while 1 { skip }"), probes, 1);
  CHECK(t->edges[0].kind == ResumptionEdge<Store>::Kind::Unexpanded);
  CHECK_THROWS(resumption(base(), parse_program("skip"), probes, 0));
}

TEST_CASE("trc_exec executes a tree") {
  auto probes = ProbeSet<Store>(lang::stores_over({"x"}, {0, 1, 2}));
  Program p = parse_program("x := 1 ; x := x + 1");
  auto tree = resumption(base(), p, probes, 3);
  CHECK(trc_exec<Store>(*tree, probes, Store{}, show) == trace(base(), Store{}, p, 3));

  auto sk = resumption(base(), parse_program("skip"), probes, 2);
  auto t = trc_exec<Store>(*sk, probes, Store{{"x", 2}}, show);
  CHECK(t.terminated());
  CHECK(t.states.size() == 1);

  ProbeSet<Store> lone({Store{}});
  auto small = resumption(base(), p, lone, 3);
  try {
    (void)trc_exec<Store>(*small, lone, Store{}, show);
    FAIL("expected ProbeMiss");
  } catch (const ProbeMiss& e) {
    CHECK(std::string(e.what()).find("{x=1}") != std::string::npos);
  }
}

TEST_CASE("probe sets reject duplicates and emptiness") {
  CHECK_THROWS(ProbeSet<Store>(std::vector<Store>{}));
  CHECK_THROWS(ProbeSet<Store>({Store{}, Store{}}));
}

TEST_CASE("trace prefixes are coherent") {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 60; ++n) {
    Program p = lang::random_program(rng);
    Store s = base().states().sample(rng);
    auto longer = trace(base(), s, p, 12);
    for (std::size_t k = 1; k <= 12; ++k) CHECK(trace(base(), s, p, k) == longer.prefix(k));
  }
}

TEST_CASE("run and trace agree") {
  std::mt19937_64 rng(22);
  for (int n = 0; n < 60; ++n) {
    Program p = lang::random_program(rng);
    Store s = base().states().sample(rng);
    auto r = run(base(), s, p, 20);
    auto t = trace(base(), s, p, 20);
    if (r.is_final()) {
      CHECK(t.terminated());
      CHECK(t.states.size() == r.steps);
      CHECK(t.states.back() == *r.final_state);
    } else {
      CHECK_FALSE(t.terminated());
    }
    if (auto f = fn_of_trace(t)) CHECK(run(base(), s, p, 20).final_state == f);
  }
}

TEST_CASE("tree execution matches direct execution") {
  std::mt19937_64 rng(49);
  auto probes = lang::xy012();
  for (int n = 0; n < 50; ++n) {
    Program p = testing_support::bounded_program(rng, 4);
    auto tree = resumption(base(), p, probes, 6);
    for (const Store& s : probes.states) {
      Trace<Store> direct = trace(base(), s, p, 6);
      CHECK(trc_exec<Store>(*tree, probes, s, show) == direct);
      if (auto f = fn_of_trace(direct)) CHECK(run(base(), s, p, 6).final_state == f);
    }
  }
}

TEST_CASE("tree execution outside the probe set reports a miss") {
  std::mt19937_64 rng(50);
  auto probes = lang::xy012();
  std::size_t misses = 0;
  for (int n = 0; n < 50; ++n) {
    Program p = lang::random_program(rng);
    auto tree = resumption(base(), p, probes, 4);
    for (const Store& s : probes.states) {
      std::optional<Trace<Store>> t;
      try {
        t = trc_exec<Store>(*tree, probes, s, show);
      } catch (const ProbeMiss&) {
        ++misses;
      }
      if (t) CHECK(*t == trace(base(), s, p, 4));
    }
  }
  CHECK(misses > 0);
}
