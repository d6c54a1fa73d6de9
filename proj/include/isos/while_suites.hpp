#pragma once

// Reproducible experiments over the While corpus: the verdict
// matrix and named congruence suites.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isos/equivalence.hpp"
#include "isos/while_lang.hpp"

namespace isos::lang {

// Stores over {x, y} with values {0, 1, 2}.
ProbeSet<Store> xy012();

struct Table1 {
  std::vector<ProgramPair> pairs;  // two columns
  std::array<SemanticsParams, 3> rows;  // resumption, trace, termination
  std::array<std::array<EquivVerdict<Store>, 2>, 3> cells;

  // The expected pattern: resumption separates both pairs, trace only the
  // second, termination neither.
  bool matches_expected() const;
  std::string render() const;
};

Table1 table1(std::size_t depth = 3, std::size_t k = 8, std::size_t fuel = 50);

struct Suite {
  std::string name;
  std::string variant;  // CLI variant name
  SemanticsParams params;
  std::vector<ProgramPair> pairs;
  std::vector<Program> leaves;  // context fillings
  std::map<std::string, std::vector<AttributePtr>> attributes;
  std::size_t max_depth = 2;
  bool random_contexts = false;  // seeded random contexts instead of breadth-first
  ProbeSet<Store> probes;
  std::size_t budget = 200;
  bool expect_counterexample = false;
};

// floor, interleave, branch, ceil, interrupt (one known counterexample
// each), cool-termination, streamlined-trace, streamlined-trace-interrupt
// (properties that must hold).
std::vector<std::string> suite_names();
std::optional<Suite> make_suite(std::string_view name);

// Uniformly random contexts of hole depth 0..max_depth, identity first.
std::function<std::optional<Context>()> random_context_stream(const Signature& sig, std::vector<Program> leaves,
                                                              std::map<std::string, std::vector<AttributePtr>> attrs,
                                                              std::size_t max_depth, std::uint64_t seed);

CongruenceReport<Store> run_suite(const Suite& suite, std::uint64_t seed, std::optional<std::size_t> budget = {});

}  // namespace isos::lang
