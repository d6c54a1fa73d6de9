#include <catch_amalgamated.hpp>

#include <random>

#include "isos/term.hpp"
#include "isos/while_lang.hpp"

using namespace isos;

namespace {

Term x(std::uint32_t j) { return Term::var(MetaVar::x(j)); }
Term y(std::uint32_t j) { return Term::var(MetaVar::y(j)); }
Term sq(Term a, Term b) { return Term::node("seq", {std::move(a), std::move(b)}); }
Term f(Term a, Term b) { return Term::node("f", {std::move(a), std::move(b)}); }
Term skip() { return Term::node("skip"); }

}  // namespace

TEST_CASE("substitute replaces metavariables") {
  CHECK(substitute(sq(x(1), x(2)), {{MetaVar::x(1), y(1)}}) == sq(y(1), x(2)));
  CHECK(substitute(x(1), {}) == x(1));
  CHECK(substitute(f(x(1), x(1)), {{MetaVar::x(1), skip()}}) == f(skip(), skip()));
}

TEST_CASE("metavars collects both kinds") {
  CHECK(metavars(sq(x(1), y(1))) == std::set<MetaVar>{MetaVar::x(1), MetaVar::y(1)});
  CHECK(metavars(skip()).empty());
  CHECK(metavars(f(x(2), f(y(2), x(2)))) == std::set<MetaVar>{MetaVar::x(2), MetaVar::y(2)});
}

TEST_CASE("validate_term against the While signature") {
  const Signature& sig = lang::base_signature();
  CHECK_NOTHROW(validate_term(sig, skip()));
  CHECK_THROWS_AS(validate_term(sig, Term::node("seq", {skip()})), ArityMismatch);
  CHECK_THROWS_AS(validate_term(sig, Term::node("g", {skip()})), UnknownOperator);
  CHECK_THROWS_AS(validate_term(sig, sq(Term::hole(), skip())), UnexpectedHole);
  CHECK_NOTHROW(validate_term(sig, sq(x(1), skip())));
  CHECK_THROWS_AS(validate_program(sig, sq(x(1), skip())), OpenTerm);
}

TEST_CASE("holes and self attributes") {
  Term c = sq(Term::hole(), skip());
  CHECK(count_holes(c) == 1);
  CHECK_FALSE(is_closed(c));
  CHECK(fill_holes(c, skip()) == sq(skip(), skip()));
  CHECK(is_closed(sq(skip(), skip())));

  auto cond = std::make_shared<const lang::CondAttr>(lang::parse_expr("x"));
  Term target = Term::node("while", {x(1)}, self_attribute());
  Term bound = bind_self_attribute(target, cond);
  CHECK(same_attribute(bound.attribute(), cond));
  CHECK(to_string(Term::node("seq", {skip(), x(2)})) == "seq(skip,x2)");
}

TEST_CASE("structural equality and hashing") {
  Term a = sq(skip(), x(1));
  Term b = sq(skip(), x(1));
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK_FALSE(a == sq(skip(), x(2)));
  CHECK(a.size() == 3);
}

namespace {

Term random_open_term(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 4 : 2);
  switch (pick(rng)) {
    case 0:
      return skip();
    case 1:
      return x(1 + rng() % 3);
    case 2:
      return y(1 + rng() % 3);
    case 3:
      return f(random_open_term(rng, depth - 1), random_open_term(rng, depth - 1));
    default:
      return sq(random_open_term(rng, depth - 1), random_open_term(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("substitution composes for disjoint bindings") {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 300; ++n) {
    Term t = random_open_term(rng, 4);
    // b1's range mentions only x3 and y2, neither of which b2 binds.
    Binding b1{{MetaVar::x(1), f(x(3), y(2))}, {MetaVar::x(2), sq(y(2), skip())}};
    Binding b2{{MetaVar::y(1), skip()}, {MetaVar::y(3), random_open_term(rng, 2)}};
    Binding both = b1;
    both.insert(b2.begin(), b2.end());
    CHECK(substitute(t, both) == substitute(substitute(t, b1), b2));

    std::set<MetaVar> expected;
    for (const MetaVar& v : metavars(t)) {
      auto it = b1.find(v);
      if (it == b1.end()) {
        expected.insert(v);
      } else {
        for (const MetaVar& w : metavars(it->second)) expected.insert(w);
      }
    }
    CHECK(metavars(substitute(t, b1)) == expected);
  }
}

TEST_CASE("parsed corpus programs validate") {
  std::mt19937_64 rng(11);
  lang::ProgramGenOptions opts;
  opts.extensions = true;
  for (int n = 0; n < 200; ++n) {
    Program p = lang::random_program(rng, opts);
    CHECK_NOTHROW(validate_program(lang::full_signature(), lang::parse_program(lang::print_program(p))));
  }
}
