#pragma once

// Command-line front end. `run` takes the arguments after the program name.

#include <ostream>
#include <string>
#include <vector>

#include "funcert/solver.hpp"

namespace funcert {

enum class ReportFormat { kText, kRecords };

/// Exit codes: 0 sat, 1 unsat, 2 unknown, 3 usage or parse error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string render_report(const SolveReport& report, ReportFormat format);

/// One line-delimited record per derived clause: the branch, its parent,
/// the rule and parameter that produced it, the clause and its theta.
std::string render_trace_record(const TraceRecord& r);

}  // namespace funcert
