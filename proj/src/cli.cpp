#include "funcert/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "funcert/error.hpp"

namespace funcert {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

json graph_record(const FeatureGraph& g, const Alphabet& alphabet, const Signature& sig) {
  json nodes = json::array();
  std::map<Node, std::vector<std::string>> names;
  for (auto [v, n] : g.anchors()) names[n].push_back(sig.fo_name(FoVar{v}));
  for (Node n = 0; n < g.num_nodes(); ++n) {
    json node = {{"id", n}, {"vars", names[n]}};
    if (auto s = g.sort(n)) node["sort"] = *s < sig.sorts.size() ? sig.sorts[*s] : std::to_string(*s);
    nodes.push_back(std::move(node));
  }
  json edges = json::array();
  for (const auto& [key, to] : g.edges()) edges.push_back(json::array({key.first, alphabet.name(key.second), to}));
  return {{"nodes", nodes}, {"edges", edges}};
}

int exit_code(Status s) {
  switch (s) {
    case Status::kSat:
      return 0;
    case Status::kUnsat:
      return 1;
    case Status::kUnknown:
      return 2;
  }
  return 2;
}

}  // namespace

std::string render_report(const SolveReport& r, ReportFormat format) {
  const auto& store = *r.store;
  const auto& sig = *r.signature;
  std::ostringstream os;
  if (format == ReportFormat::kText) {
    os << "status: " << to_string(r.status) << "\n";
    os << "control: " << to_string(r.control.kind) << "\n";
    for (std::size_t i = 0; i < r.clauses.size(); ++i) {
      os << "clause " << i + 1 << ":\n";
      for (const auto& line : lines_of(render(r.clauses[i], store))) os << "  " << line << "\n";
    }
    for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
      os << "witness " << i + 1 << (r.witness_checked[i] ? " (checked)" : " (check failed)") << ":\n";
      for (const auto& line : lines_of(r.witnesses[i].render(store.alphabet(), sig))) os << "  " << line << "\n";
    }
    os << "stats: steps " << r.stats.steps << ", branches " << r.stats.branches << ", visited " << r.stats.visited
       << ", pruned " << r.stats.pruned << "\n";
    for (const auto& d : r.diagnostics) os << "diagnostic: " << d << "\n";
    return os.str();
  }

  os << json{{"type", "status"}, {"status", to_string(r.status)}, {"control", to_string(r.control.kind)}}.dump() << "\n";
  for (std::size_t i = 0; i < r.clauses.size(); ++i)
    os << json{{"type", "clause"}, {"index", i + 1}, {"constraints", lines_of(render(r.clauses[i], store))}}.dump()
       << "\n";
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    json w = {{"type", "witness"}, {"index", i + 1}, {"checked", static_cast<bool>(r.witness_checked[i])}};
    w.update(graph_record(r.witnesses[i], store.alphabet(), sig));
    os << w.dump() << "\n";
  }
  json fired = json::object();
  for (std::size_t i = 0; i < kRuleCount; ++i)
    if (r.stats.fired[i]) fired[to_string(static_cast<RuleId>(i))] = r.stats.fired[i];
  os << json{{"type", "stats"},         {"steps", r.stats.steps},   {"branches", r.stats.branches},
             {"visited", r.stats.visited}, {"pruned", r.stats.pruned}, {"fired", fired}}
            .dump()
     << "\n";
  for (const auto& d : r.diagnostics) os << json{{"type", "diagnostic"}, {"message", d}}.dump() << "\n";
  return os.str();
}

std::string render_trace_record(const TraceRecord& t) {
  json theta = json::array({t.theta.unrelated, t.theta.constraints, t.theta.complex_terms, t.theta.variables});
  return json{{"branch", t.branch}, {"parent", t.parent}, {"rule", to_string(t.rule)},
              {"param", t.param},   {"clause", t.clause}, {"theta", theta}}
      .dump();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decide feature descriptions with functional uncertainty", "funcert"};
  app.require_subcommand(1);
  auto* cmd = app.add_subcommand("solve", "Solve a problem file");

  std::string file, control = "basic", emit = "solved", format = "text", trace;
  std::size_t threshold = 2;
  SolveOptions opts;
  cmd->add_option("FILE", file, "Problem file")->required();
  cmd->add_option("--control", control, "Rule-application control")
      ->check(CLI::IsMember({"basic", "quasi", "km", "heuristic", "auto"}));
  cmd->add_option("--delay-threshold", threshold, "Heuristic control: largest Solve expansion done immediately")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--emit", emit, "Clauses to report")->check(CLI::IsMember({"solved", "presolved"}));
  cmd->add_flag("--witness", opts.witness, "Extract and check witness graphs");
  cmd->add_option("--trace", trace, "Write one record per derived clause to this file");
  cmd->add_option("--max-steps", opts.limits.max_steps, "Rule application limit");
  cmd->add_option("--max-visited", opts.limits.max_visited, "Visited-set limit for memoizing controls");
  cmd->add_flag("--strict-paper", opts.strict, "Drop the single-feature solve modes and InstEq");
  cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "records"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }

  if (control == "auto") {
    opts.control = Control::basic();
    opts.auto_retry = true;
  } else {
    auto kind = control_from_string(control);
    opts.control = kind == Control::Kind::kHeuristic ? Control::heuristic(threshold) : Control{*kind, threshold};
  }
  opts.emit = emit == "presolved" ? Emit::kPresolved : Emit::kSolved;

  std::ifstream in(file);
  if (!in) {
    err << "error: cannot read " << file << "\n";
    return 3;
  }
  std::stringstream text;
  text << in.rdbuf();

  std::ofstream trace_out;
  DeriveHooks hooks;
  if (!trace.empty()) {
    trace_out.open(trace);
    if (!trace_out) {
      err << "error: cannot write " << trace << "\n";
      return 3;
    }
    hooks.trace = [&](const TraceRecord& r) { trace_out << render_trace_record(r) << "\n"; };
  }

  try {
    auto report = solve(text.str(), opts, hooks);
    out << render_report(report, format == "records" ? ReportFormat::kRecords : ReportFormat::kText);
    return exit_code(report.status);
  } catch (const ParseError& e) {
    err << file << ":" << e.what() << "\n";
    return 3;
  } catch (const ResourceLimit& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace funcert
