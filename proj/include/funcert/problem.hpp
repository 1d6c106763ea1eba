#pragma once

// Problem files: feature/sort declarations followed by constraint statements.
//
//   features comp, obj, topic;
//   sorts A, B;
//   s topic x;               # feature path
//   s <comp* . obj> x;       # functional uncertainty
//   A(x); x = y;
//   x $m y; div($m, f.$n); prefix(f, $m); patheq($m, $n); in($m, f+);

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "funcert/clause.hpp"
#include "funcert/lang.hpp"

namespace funcert {

struct ParsedTerm {
  bool is_path_var = false;
  std::string first;
  bool is_complex = false;
  bool second_is_path_var = false;
  std::string second;
};

struct Statement {
  enum class Kind { kSort, kAgree, kPath, kRegular, kEdge, kDiv, kPrefix, kPathEq, kIn };
  Kind kind = Kind::kSort;
  int line = 0;
  int column = 0;
  std::string sort;
  std::string x;
  std::string y;
  std::vector<std::string> path;  // kPath
  std::string regex;              // kRegular, kIn
  int regex_column = 0;
  ParsedTerm t1;                  // kEdge (path var), kDiv, kPrefix, kPathEq, kIn
  ParsedTerm t2;
};

struct Problem {
  std::vector<std::string> features;
  std::vector<std::string> sorts;
  std::vector<Statement> statements;
};

Problem parse_problem(std::string_view text);
Problem parse_problem_file(const std::string& path);

struct BuiltProblem {
  std::shared_ptr<Signature> signature;
  Clause clause;
  /// True when only sorts, agreements, feature paths and regular edges occur.
  bool km_only = true;
};

/// The alphabet declared by the problem.
Alphabet alphabet_of(const Problem& p);

/// Translates the statements into a clause over `store`, whose alphabet must
/// be the problem's.
BuiltProblem build(const Problem& p, LangStore& store);

}  // namespace funcert
