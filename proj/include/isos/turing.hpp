#pragma once

// Deterministic single-tape Turing machines and the specification whose
// trace-compositionality is equivalent to the machine not halting on the
// empty tape.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "isos/engine.hpp"
#include "isos/equivalence.hpp"
#include "isos/spec.hpp"

namespace isos::tm {

using Symbol = std::string;
inline const Symbol kBlank = "_";

enum class Move : std::uint8_t { L, R, S };

struct Action {
  std::string state;
  Symbol write;
  Move move;
  bool operator==(const Action&) const = default;
};

struct TuringMachine {
  std::string name = "machine";
  std::vector<std::string> states;
  std::string start;
  std::string halt;
  std::map<std::pair<std::string, Symbol>, Action> transitions;

  // Throws Error unless start/halt are states, transitions mention only
  // declared states, and nothing leaves the halting state.
  void validate() const;
};

// Canonical form: `left` runs from the far end towards the head and has no
// blanks at its far end; `right` runs away from the head and has no blanks
// at its far end.
struct Configuration {
  std::string state;
  std::vector<Symbol> left;
  Symbol head = kBlank;
  std::vector<Symbol> right;

  bool operator==(const Configuration&) const = default;
  auto operator<=>(const Configuration&) const = default;
  std::string to_string() const;
};

Configuration initial_configuration(const TuringMachine& m);
Configuration halting_configuration(const TuringMachine& m);

// Nothing when `c` is in the halting state. Throws StuckConfiguration when
// no transition applies outside the halting state.
std::optional<Configuration> tm_step(const TuringMachine& m, const Configuration& c);

struct Simulation {
  std::optional<std::size_t> halted_after;  // steps to reach the halting state
  bool cycle = false;                       // a configuration repeated
  std::size_t steps = 0;                    // steps simulated
  Configuration last;
};

Simulation simulate(const TuringMachine& m, std::size_t fuel);

// Marked blank written in place of the blank by canonicalized machines.
inline const Symbol kMarkedBlank = "_*";

// Wraps `m` with a cleanup phase so that its only halting configuration is
// the halting state on the all-blank tape.
TuringMachine canonicalize_halt(const TuringMachine& m);

// Text format: `states: a b c`, `start: a`, `halt: c`, then one transition
// per line `q,sym -> q',sym',L|R|S`; `_` is the blank, `#` starts a comment.
TuringMachine parse_machine(std::string_view text, std::string name = "machine");

// ---------------------------------------------------------------------------
// States and specification

struct Bit {
  int value = 0;
  bool operator==(const Bit&) const = default;
};
struct Err {
  bool operator==(const Err&) const = default;
};
enum class Tag : std::uint8_t { C0, C, D0, D };
const char* to_string(Tag t);
struct Counter {
  std::uint64_t n = 0;
  Tag tag = Tag::C0;
  bool operator==(const Counter&) const = default;
};

using TmState = std::variant<Configuration, Bit, Err, Counter>;

std::string display_state(const TmState& s);

namespace ops {
inline constexpr const char* kI = "i";
inline constexpr const char* kJ = "j";
inline constexpr const char* kC0 = "c0";
inline constexpr const char* kC = "c";
inline constexpr const char* kD0 = "d0";
inline constexpr const char* kD = "d";
inline constexpr const char* kU = "u";
}  // namespace ops

const Signature& tm_signature();

Program constant(const char* op);
Program u(Program p);
Program u_iterate(std::size_t n, Program p);

// Expects a machine with a unique halting configuration (see
// canonicalize_halt). Every trigger not covered by an explicit rule
// terminates in err.
Specification<TmState> build_tm_spec(const TuringMachine& m);

// ---------------------------------------------------------------------------
// Demo

struct DemoReport {
  std::string machine;
  std::string start;  // the initial configuration, displayed
  Simulation simulation;  // of the canonicalized machine
  std::size_t k_max = 0;
  std::size_t fuel = 0;

  std::optional<std::size_t> ij_first_difference;  // smallest k with i, j distinguished
  EquivVerdict<TmState> ij_termination;
  EquivVerdict<TmState> u_trace;  // u(i) vs u(j) at Conf(C0), k = max(kMax, fuel)
  TerminationResult<TmState> u_i_run;
  TerminationResult<TmState> u_j_run;
  // u(i) against u^n(i) at Counter(0, c0), for non-halting machines.
  std::vector<std::pair<std::size_t, EquivVerdict<TmState>>> iterates;

  bool ij_equivalent() const { return !ij_first_difference.has_value(); }
  bool violation() const { return ij_equivalent() && u_trace.distinguished(); }
  std::string render() const;
};

DemoReport demo(const TuringMachine& m, std::size_t k_max, std::size_t fuel);

}  // namespace isos::tm
