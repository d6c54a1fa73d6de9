#include "isos/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "isos/format.hpp"
#include "isos/turing.hpp"
#include "isos/while_lang.hpp"
#include "isos/while_suites.hpp"

namespace isos::cli {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string program_text(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::string joined;
  for (const auto& line : lang::corpus_lines(read_file(arg.substr(1)))) joined += (joined.empty() ? "" : " ") + line;
  return joined;
}

lang::WhileSpec load_spec(const std::string& name) {
  auto spec = lang::spec_from_name(name);
  if (!spec) {
    std::string known;
    for (const auto& n : lang::variant_names()) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown specification '" + name + "' (known: " + known + ")");
  }
  return *spec;
}

Program load_program(const lang::WhileSpec& spec, const std::string& arg) {
  Program p = lang::parse_program(program_text(arg));
  validate_program(spec.signature(), p);
  return p;
}

ProbeSet<lang::Store> load_probes(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return lang::parse_probe_lines(read_file(arg.substr(1)));
  return lang::parse_probe_spec(arg);
}

struct Options {
  std::string spec = "while";
  std::string prog;
  std::string state;
  std::size_t fuel = 100;
  std::size_t k = 8;
  std::size_t depth = 3;
  std::string left;
  std::string right;
  std::string semantics = "trace";
  std::string probes = "xy012";
  bool streamlined = false;
  bool cool = false;
  std::string suite;
  std::uint64_t seed = 0;
  std::optional<std::size_t> budget;
  std::string machine;
  std::size_t kmax = 20;
};

auto display_store = [](const lang::Store& s) { return s.to_string(); };

int cmd_run(const Options& o, std::ostream& out) {
  auto spec = load_spec(o.spec);
  auto p = load_program(spec, o.prog);
  auto r = run(spec, lang::parse_store(o.state), p, o.fuel);
  out << render_termination<lang::Store>(r, display_store) << "\n";
  out << "RESULT=" << (r.is_final() ? "FINAL" : "FUEL_EXHAUSTED") << "\n";
  return 0;
}

int cmd_step(const Options& o, std::ostream& out) {
  auto spec = load_spec(o.spec);
  auto p = load_program(spec, o.prog);
  auto r = step(spec, lang::parse_store(o.state), p);
  if (r.is_terminated()) {
    out << "TERMINATED " << r.state.to_string() << "\n";
  } else {
    out << "CONTINUE " << r.state.to_string() << " " << spec.print(*r.program) << "\n";
  }
  out << "RESULT=" << (r.is_terminated() ? "TERMINATED" : "CONTINUE") << "\n";
  return 0;
}

int cmd_trace(const Options& o, std::ostream& out) {
  auto spec = load_spec(o.spec);
  auto p = load_program(spec, o.prog);
  auto t = trace(spec, lang::parse_store(o.state), p, o.k);
  out << render_trace<lang::Store>(t, display_store) << "\n";
  out << "RESULT=" << (t.terminated() ? "TERMINATED" : "TRUNCATED") << "\n";
  return 0;
}

int cmd_equiv(const Options& o, std::ostream& out) {
  auto spec = load_spec(o.spec);
  auto p = load_program(spec, o.left);
  auto q = load_program(spec, o.right);
  auto probes = load_probes(o.probes);
  SemanticsParams params;
  if (o.semantics == "trace") {
    params = {Semantics::Trace, o.k};
  } else if (o.semantics == "termination") {
    params = {Semantics::Termination, o.fuel};
  } else if (o.semantics == "resumption") {
    params = {Semantics::Resumption, o.depth};
  } else {
    throw UsageError("semantics must be trace, termination or resumption");
  }
  auto v = equiv(spec, params, p, q, probes);
  out << render_verdict<lang::Store>(v, display_store);
  out << "RESULT=" << to_string(v.verdict) << "\n";
  switch (v.verdict) {
    case Verdict::Equivalent:
      return kExitEquivalent;
    case Verdict::Distinguished:
      return kExitDistinguished;
    case Verdict::Inconclusive:
      return kExitInconclusive;
  }
  return kExitInconclusive;
}

int cmd_check_format(const Options& o, std::ostream& out) {
  auto spec = load_spec(o.spec);
  auto streamlined = check_streamlined(spec);
  auto cool = check_cool(spec);
  out << render_formats(streamlined, cool);
  bool pass;
  if (o.streamlined && !o.cool) {
    pass = streamlined.pass();
    out << "streamlined: " << (pass ? "pass" : "fail") << "\n";
  } else if (o.cool && !o.streamlined) {
    pass = cool.pass();
    out << "cool: " << (pass ? "pass" : "fail") << "\n";
  } else {
    pass = streamlined.pass() && cool.pass();
    out << "streamlined: " << (streamlined.pass() ? "pass" : "fail") << ", cool: " << (cool.pass() ? "pass" : "fail")
        << "\n";
  }
  out << "RESULT=" << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int cmd_table1(std::ostream& out) {
  auto t = lang::table1();
  out << t.render();
  out << "RESULT=" << (t.matches_expected() ? "MATCH" : "MISMATCH") << "\n";
  return t.matches_expected() ? 0 : 1;
}

int cmd_congruence(const Options& o, std::ostream& out, bool spec_given) {
  auto suite = lang::make_suite(o.suite);
  if (!suite) {
    std::string known;
    for (const auto& n : lang::suite_names()) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown suite '" + o.suite + "' (known: " + known + ")");
  }
  if (spec_given) {
    load_spec(o.spec);
    suite->variant = o.spec;
  }
  auto spec = load_spec(suite->variant);
  auto report = lang::run_suite(*suite, o.seed, o.budget);
  out << "suite " << suite->name << " on " << spec.name() << "\n";
  out << render_congruence(report, spec);
  out << "RESULT=" << (report.found() ? "FOUND" : "NONE") << "\n";
  return 0;
}

int cmd_tm_demo(const Options& o, std::ostream& out) {
  auto machine = tm::parse_machine(read_file(o.machine), std::filesystem::path(o.machine).stem().string());
  auto report = tm::demo(machine, o.kmax, o.fuel);
  out << report.render();
  out << "RESULT=" << (report.violation() ? "VIOLATION" : "NO_VIOLATION") << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stateful SOS toolkit", "isos"};
  app.require_subcommand(1);
  Options o;

  auto add_spec = [&](CLI::App* sub) { return sub->add_option("--spec", o.spec, "specification variant"); };

  auto* run_cmd = app.add_subcommand("run", "run a program to termination");
  add_spec(run_cmd);
  run_cmd->add_option("--prog", o.prog, "program text or @file")->required();
  run_cmd->add_option("--state", o.state, "initial store, e.g. x=1,y=2");
  run_cmd->add_option("--fuel", o.fuel, "step budget")->check(CLI::PositiveNumber);

  auto* step_cmd = app.add_subcommand("step", "perform one step");
  add_spec(step_cmd);
  step_cmd->add_option("--prog", o.prog, "program text or @file")->required();
  step_cmd->add_option("--state", o.state, "input store");

  auto* trace_cmd = app.add_subcommand("trace", "print the first k output states");
  add_spec(trace_cmd);
  trace_cmd->add_option("--prog", o.prog, "program text or @file")->required();
  trace_cmd->add_option("--state", o.state, "initial store");
  trace_cmd->add_option("--k", o.k, "trace bound")->check(CLI::PositiveNumber);

  auto* equiv_cmd = app.add_subcommand("equiv", "compare two programs");
  add_spec(equiv_cmd);
  equiv_cmd->add_option("--left", o.left, "left program")->required();
  equiv_cmd->add_option("--right", o.right, "right program")->required();
  equiv_cmd->add_option("--semantics", o.semantics, "trace|termination|resumption")
      ->check(CLI::IsMember({"trace", "termination", "resumption"}));
  equiv_cmd->add_option("--k", o.k, "trace bound")->check(CLI::PositiveNumber);
  equiv_cmd->add_option("--fuel", o.fuel, "termination fuel")->check(CLI::PositiveNumber);
  equiv_cmd->add_option("--depth", o.depth, "resumption depth")->check(CLI::PositiveNumber);
  equiv_cmd->add_option("--probes", o.probes, "probe specifier (xy012) or @file");

  auto* format_cmd = app.add_subcommand("check-format", "check the streamlined and cool formats");
  add_spec(format_cmd);
  format_cmd->add_flag("--streamlined", o.streamlined, "exit status reflects the streamlined check");
  format_cmd->add_flag("--cool", o.cool, "exit status reflects the cool check");

  app.add_subcommand("table1", "separate the three semantics by program pairs");

  auto* cong_cmd = app.add_subcommand("congruence", "search contexts for congruence failures");
  auto* cong_spec = add_spec(cong_cmd);
  cong_cmd->add_option("--suite", o.suite, "suite name")->required();
  cong_cmd->add_option("--seed", o.seed, "context sampling seed");
  cong_cmd->add_option("--budget", o.budget, "number of (pair, context) combinations")->check(CLI::PositiveNumber);

  auto* tm_cmd = app.add_subcommand("tm-demo", "run the halting reduction on a machine");
  tm_cmd->add_option("--machine", o.machine, "machine file")->required();
  tm_cmd->add_option("--kmax", o.kmax, "largest trace bound")->check(CLI::PositiveNumber);
  tm_cmd->add_option("--fuel", o.fuel, "step budget")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    out << "RESULT=USAGE_ERROR\n";
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(o, out);
    if (step_cmd->parsed()) return cmd_step(o, out);
    if (trace_cmd->parsed()) return cmd_trace(o, out);
    if (equiv_cmd->parsed()) return cmd_equiv(o, out);
    if (format_cmd->parsed()) return cmd_check_format(o, out);
    if (cong_cmd->parsed()) return cmd_congruence(o, out, cong_spec->count() > 0);
    if (tm_cmd->parsed()) return cmd_tm_demo(o, out);
    return cmd_table1(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    out << "RESULT=USAGE_ERROR\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    out << "RESULT=PARSE_ERROR\n";
    return kExitParse;
  } catch (const UnknownOperator& e) {
    err << "parse error: " << e.what() << "\n";
    out << "RESULT=PARSE_ERROR\n";
    return kExitParse;
  } catch (const ArityMismatch& e) {
    err << "parse error: " << e.what() << "\n";
    out << "RESULT=PARSE_ERROR\n";
    return kExitParse;
  } catch (const RuleResolutionError& e) {
    err << "engine error: " << e.describe() << "\n";
    err << "trigger: " << e.trigger() << "\n";
    out << "RESULT=ENGINE_ERROR\n";
    return kExitEngine;
  } catch (const Error& e) {
    err << "engine error: " << e.what() << "\n";
    out << "RESULT=ENGINE_ERROR\n";
    return kExitEngine;
  }
}

}  // namespace isos::cli
