#include "isos/turing.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace isos::tm {

void TuringMachine::validate() const {
  std::set<std::string> known(states.begin(), states.end());
  if (known.size() != states.size()) throw Error("machine '" + name + "' declares a state twice");
  if (!known.count(start)) throw Error("machine '" + name + "': start state '" + start + "' is not declared");
  if (!known.count(halt)) throw Error("machine '" + name + "': halting state '" + halt + "' is not declared");
  for (const auto& [key, action] : transitions) {
    if (!known.count(key.first)) throw Error("machine '" + name + "': unknown state '" + key.first + "'");
    if (!known.count(action.state)) throw Error("machine '" + name + "': unknown state '" + action.state + "'");
    if (key.first == halt) throw Error("machine '" + name + "': transition out of the halting state");
  }
}

namespace {

std::string join_symbols(const std::vector<Symbol>& syms, bool spaced) {
  std::string out;
  for (const auto& s : syms) {
    if (spaced && !out.empty()) out += ' ';
    out += s;
  }
  return out;
}

void trim(Configuration& c) {
  auto lead = std::find_if(c.left.begin(), c.left.end(), [](const Symbol& s) { return s != kBlank; });
  c.left.erase(c.left.begin(), lead);
  while (!c.right.empty() && c.right.back() == kBlank) c.right.pop_back();
}

}  // namespace

std::string Configuration::to_string() const {
  bool spaced = head.size() != 1;
  for (const auto& s : left) spaced = spaced || s.size() != 1;
  for (const auto& s : right) spaced = spaced || s.size() != 1;
  std::string l = join_symbols(left, spaced);
  std::string r = join_symbols(right, spaced);
  if (spaced) {
    if (!l.empty()) l += ' ';
    if (!r.empty()) r = ' ' + r;
  }
  return "(" + state + "," + l + "[" + head + "]" + r + ")";
}

Configuration initial_configuration(const TuringMachine& m) { return {m.start, {}, kBlank, {}}; }
Configuration halting_configuration(const TuringMachine& m) { return {m.halt, {}, kBlank, {}}; }

std::optional<Configuration> tm_step(const TuringMachine& m, const Configuration& c) {
  if (c.state == m.halt) return std::nullopt;
  auto it = m.transitions.find({c.state, c.head});
  if (it == m.transitions.end()) {
    throw StuckConfiguration("machine '" + m.name + "' has no transition from " + c.to_string());
  }
  const Action& a = it->second;
  Configuration next = c;
  next.state = a.state;
  next.head = a.write;
  switch (a.move) {
    case Move::L:
      next.right.insert(next.right.begin(), next.head);
      if (next.left.empty()) {
        next.head = kBlank;
      } else {
        next.head = next.left.back();
        next.left.pop_back();
      }
      break;
    case Move::R:
      next.left.push_back(next.head);
      if (next.right.empty()) {
        next.head = kBlank;
      } else {
        next.head = next.right.front();
        next.right.erase(next.right.begin());
      }
      break;
    case Move::S:
      break;
  }
  trim(next);
  return next;
}

Simulation simulate(const TuringMachine& m, std::size_t fuel) {
  Simulation sim;
  sim.last = initial_configuration(m);
  std::set<Configuration> seen{sim.last};
  while (sim.steps < fuel) {
    if (sim.last.state == m.halt) {
      sim.halted_after = sim.steps;
      return sim;
    }
    sim.last = *tm_step(m, sim.last);
    ++sim.steps;
    if (!seen.insert(sim.last).second) {
      sim.cycle = true;
      return sim;
    }
  }
  if (sim.last.state == m.halt) sim.halted_after = sim.steps;
  return sim;
}

TuringMachine canonicalize_halt(const TuringMachine& m) {
  m.validate();
  if (m.start == m.halt) return m;
  std::set<std::string> names(m.states.begin(), m.states.end());
  auto fresh = [&](std::string base) {
    while (names.count(base)) base += "'";
    names.insert(base);
    return base;
  };
  const std::string mark = fresh("clean_mark");
  const std::string left = fresh("clean_left");
  const std::string right = fresh("clean_right");

  TuringMachine out;
  out.name = m.name;
  out.states = m.states;
  out.states.insert(out.states.end(), {mark, left, right});
  out.start = m.start;
  out.halt = m.halt;

  std::set<Symbol> written{kBlank, kMarkedBlank};
  for (const auto& [key, a] : m.transitions) {
    if (key.second == kMarkedBlank || a.write == kMarkedBlank) {
      throw Error("machine '" + m.name + "' already uses the reserved symbol " + kMarkedBlank);
    }
    Symbol w = a.write == kBlank ? kMarkedBlank : a.write;
    written.insert(w);
    Action redirected{a.state, w, a.move};
    if (a.state == m.halt) redirected.state = a.move == Move::S ? left : mark;
    out.transitions[key] = redirected;
    if (key.second == kBlank) out.transitions[{key.first, kMarkedBlank}] = redirected;
  }
  for (const Symbol& s : written) {
    bool blank = s == kBlank;
    out.transitions[{mark, s}] = {left, blank ? kMarkedBlank : s, Move::S};
    out.transitions[{left, s}] = blank ? Action{right, kBlank, Move::R} : Action{left, s, Move::L};
    out.transitions[{right, s}] = blank ? Action{m.halt, kBlank, Move::S} : Action{right, kBlank, Move::R};
  }
  return out;
}

TuringMachine parse_machine(std::string_view text, std::string name) {
  TuringMachine m;
  m.name = std::move(name);
  bool have_states = false, have_start = false, have_halt = false;
  std::size_t offset = 0;
  auto split_ws = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  };
  auto strip = [](std::string s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };

  while (offset <= text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(offset, end - offset));
    std::size_t line_start = offset;
    offset = end + 1;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;

    auto header = [&](const char* key) -> std::optional<std::string> {
      std::string k(key);
      if (line.rfind(k, 0) == 0) return strip(line.substr(k.size()));
      return std::nullopt;
    };
    if (auto v = header("states:")) {
      m.states = split_ws(*v);
      have_states = true;
      continue;
    }
    if (auto v = header("start:")) {
      m.start = *v;
      have_start = true;
      continue;
    }
    if (auto v = header("halt:")) {
      m.halt = *v;
      have_halt = true;
      continue;
    }
    auto arrow = line.find("->");
    if (arrow == std::string::npos) throw ParseError("expected a header or a transition", line_start);
    auto lhs = split_ws(line.substr(0, arrow));
    auto rhs = split_ws(line.substr(arrow + 2));
    if (lhs.size() != 2) throw ParseError("transition source must be `state,symbol`", line_start);
    if (rhs.size() != 3) throw ParseError("transition target must be `state,symbol,L|R|S`", line_start + arrow + 2);
    Move mv;
    if (rhs[2] == "L") {
      mv = Move::L;
    } else if (rhs[2] == "R") {
      mv = Move::R;
    } else if (rhs[2] == "S") {
      mv = Move::S;
    } else {
      throw ParseError("move must be L, R or S", line_start + arrow + 2);
    }
    if (!m.transitions.emplace(std::make_pair(lhs[0], lhs[1]), Action{rhs[0], rhs[1], mv}).second) {
      throw ParseError("duplicate transition for (" + lhs[0] + "," + lhs[1] + ")", line_start);
    }
  }
  if (!have_states) throw ParseError("missing `states:` header", text.size());
  if (!have_start) throw ParseError("missing `start:` header", text.size());
  if (!have_halt) throw ParseError("missing `halt:` header", text.size());
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// States and specification

const char* to_string(Tag t) {
  switch (t) {
    case Tag::C0:
      return "c0";
    case Tag::C:
      return "c";
    case Tag::D0:
      return "d0";
    case Tag::D:
      return "d";
  }
  return "?";
}

std::string display_state(const TmState& s) {
  if (const auto* c = std::get_if<Configuration>(&s)) return c->to_string();
  if (const auto* b = std::get_if<Bit>(&s)) return std::to_string(b->value);
  if (std::holds_alternative<Err>(s)) return "err";
  const auto& n = std::get<Counter>(s);
  return "(" + std::to_string(n.n) + "," + to_string(n.tag) + ")";
}

const Signature& tm_signature() {
  static const Signature sig({{ops::kI, 0, false},
                              {ops::kJ, 0, false},
                              {ops::kC0, 0, false},
                              {ops::kC, 0, false},
                              {ops::kD0, 0, false},
                              {ops::kD, 0, false},
                              {ops::kU, 1, false}});
  return sig;
}

Program constant(const char* op) { return Term::node(op); }
Program u(Program p) { return Term::node(ops::kU, {std::move(p)}); }
Program u_iterate(std::size_t n, Program p) {
  for (std::size_t i = 0; i < n; ++i) p = u(std::move(p));
  return p;
}

namespace {

using Scheme = RuleScheme<TmState>;
using SE = StateExpr<TmState>;
using G = Guard<TmState>;
using C = Conclusion<TmState>;
using B = Bindings<TmState>;

bool is_conf(const TmState& s) { return std::holds_alternative<Configuration>(s); }
bool is_bit(const TmState& s) { return std::holds_alternative<Bit>(s); }
bool is_bit(const TmState& s, int v) { return is_bit(s) && std::get<Bit>(s).value == v; }
bool is_counter(const TmState& s) { return std::holds_alternative<Counter>(s); }
bool is_counter(const TmState& s, Tag t) { return is_counter(s) && std::get<Counter>(s).tag == t; }
bool is_err(const TmState& s) { return std::holds_alternative<Err>(s); }

G input_guard(std::function<bool(const TmState&)> p) {
  return G{{kInputState}, [p = std::move(p)](const B& b) { return p(b.input()); }};
}

Term node(const char* op, std::vector<Term> kids = {}) { return Term::node(op, std::move(kids)); }

// The explicit rules for a constant, followed by the err default on the
// complement of their guards.
void add_with_default(std::vector<Scheme>& out, const char* op,
                      std::vector<std::pair<std::function<bool(const TmState&)>, Scheme>> rules) {
  std::vector<std::function<bool(const TmState&)>> covered;
  for (auto& [pred, scheme] : rules) {
    covered.push_back(pred);
    scheme.guard = input_guard(pred);
    out.push_back(std::move(scheme));
  }
  out.push_back({op, {}, input_guard([covered](const TmState& s) {
                   return std::none_of(covered.begin(), covered.end(), [&](const auto& p) { return p(s); });
                 }),
                 C::terminate(SE::constant(Err{})), std::string(op) + "-err"});
}

}  // namespace

Specification<TmState> build_tm_spec(const TuringMachine& m) {
  m.validate();
  const Configuration c0 = initial_configuration(m);
  const Configuration halt = halting_configuration(m);
  std::vector<Scheme> schemes;

  schemes.push_back({ops::kI, {}, G::always(), C::progress(SE::constant(c0), node(ops::kC0)), "i"});
  schemes.push_back({ops::kJ, {}, G::always(), C::progress(SE::constant(c0), node(ops::kD0)), "j"});

  auto steps = [m](const TmState& s) {
    const auto* c = std::get_if<Configuration>(&s);
    return c && c->state != m.halt && m.transitions.count({c->state, c->head});
  };
  auto successor = SE::opaque({kInputState}, [m](const B& b) -> TmState {
    return *tm_step(m, std::get<Configuration>(b.input()));
  });
  auto is_halt = [halt](const TmState& s) { return is_conf(s) && std::get<Configuration>(s) == halt; };

  for (auto [op, next, tag, label] : {std::tuple{ops::kC0, ops::kC, Tag::C0, "c0"},
                                     std::tuple{ops::kD0, ops::kD, Tag::D0, "d0"}}) {
    add_with_default(schemes, op,
                     {{steps, {op, {}, G::always(), C::progress(successor, node(op)), std::string(label) + "-step"}},
                      {is_halt,
                       {op, {}, G::always(), C::progress(SE::constant(Bit{0}), node(next)), std::string(label) + "-halt"}},
                      {[tag](const TmState& s) { return is_counter(s, tag); },
                       {op, {}, G::always(), C::terminate(SE::input()), std::string(label) + "-done"}}});
  }
  for (auto [op, tag, one] : {std::tuple{ops::kC, Tag::C, 1}, std::tuple{ops::kD, Tag::D, 0}}) {
    std::string label(op);
    add_with_default(schemes, op,
                     {{[](const TmState& s) { return is_bit(s, 0); },
                       {op, {}, G::always(), C::progress(SE::input(), node(op)), label + "-zero"}},
                      {[](const TmState& s) { return is_bit(s, 1); },
                       {op, {}, G::always(), C::terminate(SE::constant(Bit{one})), label + "-one"}},
                      {[tag](const TmState& s) { return is_counter(s, tag); },
                       {op, {}, G::always(), C::terminate(SE::input()), label + "-done"}}});
  }

  using Shape::Omitted;
  using Shape::Progressing;
  using Shape::Terminating;
  Term y1 = Term::var(MetaVar::y(1));
  Term x1 = Term::var(MetaVar::x(1));
  schemes.push_back({ops::kU, {Progressing}, input_guard([](const TmState& s) { return is_bit(s); }),
                     C::progress(SE::constant(Bit{1}), y1), "u-bit"});
  schemes.push_back({ops::kU, {Progressing}, input_guard([](const TmState& s) { return is_conf(s); }),
                     C::progress(SE::premiss_output(1), node(ops::kU, {y1})), "u-conf"});
  schemes.push_back({ops::kU, {Omitted}, input_guard([](const TmState& s) { return is_counter(s); }),
                     C::progress(SE::opaque({kInputState},
                                            [](const B& b) -> TmState {
                                              Counter n = std::get<Counter>(b.input());
                                              ++n.n;
                                              return n;
                                            }),
                                 x1),
                     "u-count"});
  schemes.push_back({ops::kU, {Omitted}, input_guard(is_err), C::terminate(SE::constant(Err{})), "u-err-state"});
  schemes.push_back({ops::kU, {Terminating},
                     input_guard([](const TmState& s) { return is_bit(s) || is_conf(s); }),
                     C::terminate(SE::constant(Err{})), "u-err-term"});

  // Sampled configurations come from the machine's own run plus a few
  // arbitrary tapes over its alphabet.
  std::vector<Configuration> pool{c0, halt};
  {
    Configuration c = c0;
    for (int n = 0; n < 32 && c.state != m.halt; ++n) {
      auto next = m.transitions.count({c.state, c.head}) ? tm_step(m, c) : std::nullopt;
      if (!next) break;
      c = *next;
      pool.push_back(c);
    }
  }
  std::vector<Symbol> alphabet{kBlank};
  for (const auto& [key, a] : m.transitions) {
    alphabet.push_back(key.second);
    alphabet.push_back(a.write);
  }
  StateDomain<TmState> domain;
  domain.display = display_state;
  domain.sample = [pool, alphabet, states = m.states](std::mt19937_64& rng) -> TmState {
    std::uniform_int_distribution<int> kind(0, 5);
    switch (kind(rng)) {
      case 0:
        return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      case 1: {
        Configuration c;
        c.state = states[std::uniform_int_distribution<std::size_t>(0, states.size() - 1)(rng)];
        std::uniform_int_distribution<std::size_t> sym(0, alphabet.size() - 1);
        c.head = alphabet[sym(rng)];
        for (int n = std::uniform_int_distribution<int>(0, 2)(rng); n > 0; --n) c.left.push_back(alphabet[sym(rng)]);
        for (int n = std::uniform_int_distribution<int>(0, 2)(rng); n > 0; --n) c.right.push_back(alphabet[sym(rng)]);
        trim(c);
        return c;
      }
      case 2:
        return Bit{std::uniform_int_distribution<int>(0, 1)(rng)};
      case 3:
        return Err{};
      default:
        return Counter{std::uniform_int_distribution<std::uint64_t>(0, 3)(rng),
                       static_cast<Tag>(std::uniform_int_distribution<int>(0, 3)(rng))};
    }
  };

  return Specification<TmState>("tm:" + m.name, tm_signature(), std::move(domain), std::move(schemes));
}

// ---------------------------------------------------------------------------
// Demo

DemoReport demo(const TuringMachine& m, std::size_t k_max, std::size_t fuel) {
  if (k_max == 0 || fuel == 0) throw Error("kMax and fuel must be at least 1");
  TuringMachine w = canonicalize_halt(m);
  auto spec = build_tm_spec(w);
  DemoReport r;
  r.machine = m.name;
  r.start = initial_configuration(w).to_string();
  r.simulation = simulate(w, fuel);
  r.k_max = k_max;
  r.fuel = fuel;

  const TmState c0 = initial_configuration(w);
  Program i = constant(ops::kI);
  Program j = constant(ops::kJ);
  ProbeSet<TmState> ij_probes({TmState{Bit{0}}, c0});
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (!trace_equiv(spec, i, j, ij_probes, k).equivalent()) {
      r.ij_first_difference = k;
      break;
    }
  }
  r.ij_termination = term_equiv(spec, i, j, ij_probes, fuel);

  ProbeSet<TmState> u_probes({c0});
  r.u_trace = trace_equiv(spec, u(i), u(j), u_probes, std::max(k_max, fuel));
  r.u_i_run = run(spec, c0, u(i), fuel);
  r.u_j_run = run(spec, c0, u(j), fuel);

  if (r.simulation.cycle) {
    ProbeSet<TmState> counter({TmState{Counter{0, Tag::C0}}});
    for (std::size_t n : {2, 3}) {
      r.iterates.emplace_back(n, trace_equiv(spec, u(i), u_iterate(n, i), counter, k_max));
    }
  }
  return r;
}

std::string DemoReport::render() const {
  auto show = [](const TmState& s) { return display_state(s); };
  std::ostringstream out;
  out << "machine: " << machine << "\n";
  if (simulation.halted_after) {
    out << "run: halts after " << *simulation.halted_after << " steps (cleanup included)\n";
  } else if (simulation.cycle) {
    out << "run: configuration cycle after " << simulation.steps << " steps, never halts\n";
  } else {
    out << "run: no halt within fuel " << fuel << "\n";
  }
  if (ij_first_difference) {
    out << "i vs j: DISTINGUISHED under trace(k=" << *ij_first_difference << ")\n";
  } else {
    out << "i vs j: EQUIVALENT under trace(k) for every k <= " << k_max << "\n";
  }
  out << "i vs j: " << isos::to_string(ij_termination.verdict) << " under " << ij_termination.params.describe()
      << "\n";
  out << "u(i) vs u(j) at " << start << ": " << isos::to_string(u_trace.verdict)
      << " under " << u_trace.params.describe() << "\n";
  out << "  u(i): " << render_termination<TmState>(u_i_run, show) << "\n";
  out << "  u(j): " << render_termination<TmState>(u_j_run, show) << "\n";
  for (const auto& [n, v] : iterates) {
    out << "u(i) vs u^" << n << "(i) at (0,c0): " << isos::to_string(v.verdict) << " under " << v.params.describe()
        << "\n";
  }
  out << "congruence violation: " << (violation() ? "witnessed" : "not witnessed") << "\n";
  return out.str();
}

}  // namespace isos::tm
