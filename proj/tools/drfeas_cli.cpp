// drfeas: run Douglas-Rachford feasibility scenarios from the command line.
//
//   drfeas list
//   drfeas run <scenario> [--set k=v]... [--max-iter n] [--tol t]
//              [--csv path] [--svg path] [--json path] [--dims i,j]
//   drfeas run --config <path> [...same output flags]
//   drfeas verify
//
// Exit codes: 0 success, 1 usage or invalid input, 2 numerical error,
// 3 verification failure. A path of "-" writes to stdout.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "drfeas/drfeas.hpp"

namespace {

using namespace drfeas;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerify = 3;

void write_to(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open '" + path + "' for writing");
  f << text;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Overrides parse_overrides(const std::vector<std::string>& items) {
  Overrides o;
  for (const auto& s : items) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidInput("--set expects key=value, got '" + s + "'");
    o[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return o;
}

std::pair<std::size_t, std::size_t> parse_dims(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InvalidInput("--dims expects i,j (1-based)");
  try {
    const long i = std::stol(s.substr(0, comma));
    const long j = std::stol(s.substr(comma + 1));
    if (i < 1 || j < 1) throw InvalidInput("--dims indices are 1-based");
    return {static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)};
  } catch (const std::logic_error&) {
    throw InvalidInput("--dims expects i,j (1-based)");
  }
}

struct RunArgs {
  std::string scenario;
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::size_t> max_iter;
  std::optional<double> tol;
  std::string csv, svg, json;
  std::string dims = "1,2";
};

int do_run(const RunArgs& a) {
  if (a.scenario.empty() == a.config.empty())
    throw InvalidInput("run: give either a scenario name or --config");

  std::optional<Trace> trace;
  ConvergenceReport report;
  std::optional<Verdict> verdict;
  if (!a.config.empty()) {
    if (!a.sets.empty()) throw InvalidInput("run: --set applies to scenarios only");
    RunConfig cfg = parse_config(read_file(a.config));
    if (a.max_iter) cfg.iterate.max_iter = *a.max_iter;
    if (a.tol) cfg.iterate.fix_tol = *a.tol;
    trace = iterate(cfg.A, cfg.B, cfg.x0, cfg.iterate);
    report = classify(*trace, cfg.classify);
  } else {
    RunResult r = run(a.scenario, parse_overrides(a.sets), RunOptions{a.max_iter, a.tol});
    trace = std::move(r.trace);
    report = std::move(r.report);
    verdict = std::move(r.verdict);
  }

  if (!a.csv.empty()) write_to(a.csv, emit_trace_csv(*trace));
  if (!a.svg.empty()) {
    const auto [i, j] = parse_dims(a.dims);
    write_to(a.svg, emit_svg(*trace, i, j));
  }
  if (!a.json.empty()) write_to(a.json, emit_summary(report));

  const bool stdout_taken = a.csv == "-" || a.svg == "-" || a.json == "-";
  if (!stdout_taken) {
    std::cout << emit_text_summary(report);
    if (verdict) {
      for (const auto& c : verdict->checks)
        std::cout << (c.ok ? "  ok    " : "  FAIL  ") << c.field << ": expected " << c.expected
                  << ", got " << c.actual << "\n";
      std::cout << "verdict:       " << (verdict->pass() ? "pass" : "fail") << "\n";
    }
  }
  return 0;
}

struct VerifyRow {
  std::string name;
  bool pass = false;
  std::string detail;
};

int do_verify() {
  std::vector<std::future<VerifyRow>> jobs;
  for (const auto& name : list_scenarios()) {
    jobs.push_back(std::async(std::launch::async, [name] {
      VerifyRow row{name, false, ""};
      try {
        const RunResult r = run(name);
        row.pass = r.verdict.pass();
        row.detail = to_string(r.report.status);
        for (const auto& c : r.verdict.checks)
          if (!c.ok) row.detail += "; " + c.field + " expected " + c.expected + ", got " + c.actual;
      } catch (const std::exception& e) {
        row.detail = std::string("error: ") + e.what();
      }
      return row;
    }));
  }
  std::vector<VerifyRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  std::sort(rows.begin(), rows.end(),
            [](const VerifyRow& a, const VerifyRow& b) { return a.name < b.name; });

  std::size_t failed = 0;
  for (const auto& r : rows) {
    std::printf("%-4s  %-30s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    failed += r.pass ? 0 : 1;
  }
  std::printf("%zu/%zu scenarios pass\n", rows.size() - failed, rows.size());
  return failed == 0 ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Douglas-Rachford feasibility scenarios"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "print the scenario registry");

  RunArgs ra;
  auto* runc = app.add_subcommand("run", "run a scenario or a config file");
  runc->add_option("scenario", ra.scenario, "scenario name");
  runc->add_option("--config", ra.config, "JSON config file (\"-\" for stdin)");
  runc->add_option("--set", ra.sets, "scenario parameter override key=value")->take_all();
  runc->add_option("--max-iter", ra.max_iter, "iteration budget");
  runc->add_option("--tol", ra.tol, "fixed-point tolerance");
  runc->add_option("--csv", ra.csv, "write the trace as CSV");
  runc->add_option("--svg", ra.svg, "write a trajectory drawing");
  runc->add_option("--json", ra.json, "write the report as JSON");
  runc->add_option("--dims", ra.dims, "coordinate pair for --svg, 1-based (default 1,2)");

  app.add_subcommand("verify", "run every scenario and check its expectation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (list->parsed()) {
      for (const auto& s : scenario_registry()) {
        std::string params;
        for (const auto& p : s.params) params += (params.empty() ? " [" : ", ") + p;
        if (!params.empty()) params += "]";
        std::printf("%-30s %s%s\n", s.name.c_str(), s.description.c_str(), params.c_str());
      }
      return 0;
    }
    if (runc->parsed()) return do_run(ra);
    return do_verify();
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
