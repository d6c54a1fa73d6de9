#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "isos/format.hpp"
#include "isos/while_lang.hpp"
#include "random_specs.hpp"

using namespace isos;
using lang::Store;

namespace {

lang::WhileSpec variant(const char* name) { return lang::build_spec(*lang::variant_from_name(name)); }

SchemePtr<Store> scheme(const lang::WhileSpec& spec, const std::string& label) {
  for (const auto& s : spec.schemes()) {
    if (s->label == label) return s;
  }
  FAIL("no scheme " << label);
  return nullptr;
}

}  // namespace

TEST_CASE("classify") {
  auto spec = variant("while");
  CHECK(classify(spec, lang::ops::kSkip) == OperatorClass::Passive);
  CHECK(classify(spec, lang::ops::kAssign) == OperatorClass::Passive);
  CHECK(classify(spec, lang::ops::kSeq) == OperatorClass::Active);
  CHECK(classify(spec, lang::ops::kWhile) == OperatorClass::Passive);
  CHECK(classify(variant("while+floor"), lang::ops::kFloor) == OperatorClass::Active);
}

TEST_CASE("is_receiving") {
  auto spec = variant("while");
  CHECK(is_receiving(*scheme(spec, "seq2")) == std::set<std::size_t>{1});
  CHECK(is_receiving(*scheme(spec, "seq1")).empty());
  CHECK(is_receiving(*scheme(spec, "skip")).empty());
  CHECK(is_receiving(*scheme(variant("while+interleave"), "interleave1")) == std::set<std::size_t>{1});
  CHECK(is_receiving(*scheme(variant("while+interrupt"), "seq3")).empty());
}

TEST_CASE("format verdicts of the corpus variants") {
  struct Expected {
    const char* name;
    bool streamlined;
    bool cool;
  };
  for (auto e : {Expected{"while", true, true}, Expected{"while+floor", false, false},
                 Expected{"while+interrupt", true, false}, Expected{"while+interleave", false, false},
                 Expected{"while+branch", false, false}, Expected{"while+ceil", false, false}}) {
    INFO(e.name);
    auto spec = variant(e.name);
    CHECK(check_streamlined(spec).pass() == e.streamlined);
    CHECK(check_cool(spec).pass() == e.cool);
  }
}

TEST_CASE("failing reports cite schemes") {
  auto floor = check_streamlined(variant("while+floor"));
  const auto* f = floor.find(lang::ops::kFloor);
  REQUIRE(f);
  CHECK_FALSE(f->pass);
  REQUIRE(f->reasons.size() == 1);
  CHECK(f->reasons[0] == "j=1 floor1: receiving rule output is not the premiss output s'1");

  auto cool = check_cool(variant("while+interrupt"));
  const auto* s = cool.find(lang::ops::kSeq);
  REQUIRE(s);
  CHECK_FALSE(s->pass);
  bool cites_seq3 = false;
  for (const auto& r : s->reasons) cites_seq3 |= r.find("seq3") != std::string::npos;
  CHECK(cites_seq3);

  auto branch = check_streamlined(variant("while+branch"));
  CHECK(branch.find(lang::ops::kBranch)->reasons.size() == 2);

  auto ok = check_streamlined(variant("while"));
  CHECK(ok.find(lang::ops::kSeq)->receiving == 1u);
  CHECK(render_verdict_cell(ok.find(lang::ops::kSeq)) == "pass");
  CHECK(render_verdict_cell(f).rfind("fail(format not established: ", 0) == 0);
}

TEST_CASE("format rendering") {
  auto spec = variant("while+interrupt");
  std::string text = render_formats(check_streamlined(spec), check_cool(spec));
  CHECK(text.find("skip: Passive, receiving=-, streamlined=pass, cool=pass\n") != std::string::npos);
  CHECK(text.find("seq: Active, receiving=1, streamlined=pass, cool=fail(format not established: ") !=
        std::string::npos);
}

TEST_CASE("cool implies streamlined on random specifications") {
  testing_support::RandomSpecs gen(4242);
  std::size_t checked = 0, cool = 0, streamlined = 0, attempts = 0;
  while (checked < 100 && attempts < 10000) {
    auto spec = gen.next(attempts++);
    if (!validate_spec(spec).ok()) continue;
    ++checked;
    bool c = check_cool(spec).pass();
    bool s = check_streamlined(spec).pass();
    cool += c;
    streamlined += s;
    if (c) CHECK(s);
  }
  CHECK(checked == 100);
  CHECK(cool > 0);
  CHECK(streamlined > cool);
}

TEST_CASE("verdicts do not depend on scheme order") {
  std::mt19937_64 rng(6);
  for (const auto& name : lang::variant_names()) {
    INFO(name);
    auto spec = lang::build_spec(*lang::variant_from_name(name));
    std::vector<RuleScheme<Store>> schemes;
    for (const auto& s : spec.schemes()) schemes.push_back(*s);
    std::shuffle(schemes.begin(), schemes.end(), rng);
    Specification<Store> shuffled(spec.name(), spec.signature(), spec.states(), std::move(schemes));
    for (auto [a, b] : {std::pair{check_streamlined(spec), check_streamlined(shuffled)},
                        std::pair{check_cool(spec), check_cool(shuffled)}}) {
      CHECK(a.pass() == b.pass());
      for (const auto& o : a.operators) {
        CHECK(o.pass == b.find(o.op)->pass);
        CHECK(o.receiving == b.find(o.op)->receiving);
      }
    }
  }
}
