#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "funcert/cli.hpp"
#include "json.hpp"

using namespace funcert;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string problem(const char* name) { return std::string(FUNCERT_PROBLEMS_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = std::string(FUNCERT_BINARY_DIR) + "/" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("exit codes follow the verdict") {
  CHECK(cli({"solve", problem("topic.fd"), "--control", "km"}).code == 0);
  CHECK(cli({"solve", problem("diverge_parity.fd")}).code == 1);
  auto cyclic = cli({"solve", problem("cyclic.fd"), "--control", "basic"});
  CHECK(cyclic.code == 2);
  CHECK(cyclic.out.find("diagnostic: loop detected; retry with --control quasi") != std::string::npos);
  CHECK(cli({"solve", problem("cyclic.fd"), "--control", "auto"}).code == 0);
  CHECK(cli({"solve", problem("cyclic.fd"), "--control", "quasi"}).code == 0);
}

TEST_CASE("usage and parse errors exit with 3") {
  CHECK(cli({}).code == 3);
  CHECK(cli({"solve"}).code == 3);
  CHECK(cli({"solve", problem("topic.fd"), "--control", "fast"}).code == 3);
  CHECK(cli({"solve", problem("topic.fd"), "--delay-threshold", "0"}).code == 3);
  CHECK(cli({"solve", "/nonexistent/file.fd"}).code == 3);
  auto path = write_temp("bad.fd", "features f;\nx g y;\n");
  auto bad = cli({"solve", path});
  CHECK(bad.code == 3);
  CHECK(bad.err.find(":2:") != std::string::npos);
  CHECK(cli({"solve", write_temp("empty.fd", "features f;\n")}).code == 3);
}

TEST_CASE("text report lists clauses and witnesses") {
  auto r = cli({"solve", problem("cyclic.fd"), "--control", "quasi", "--witness"});
  CHECK(r.out.rfind("status: sat\ncontrol: quasi\n", 0) == 0);
  CHECK(r.out.find("clause 1:\n") != std::string::npos);
  CHECK(r.out.find("witness 1 (checked):\n") != std::string::npos);
  CHECK(r.out.find("sort A") != std::string::npos);
  CHECK(r.out.find("sort B") != std::string::npos);
}

TEST_CASE("records are one JSON object per line") {
  auto r = cli({"solve", problem("topic.fd"), "--control", "km", "--witness", "--format", "records"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::vector<nlohmann::json> records;
  for (std::string line; std::getline(in, line);) records.push_back(nlohmann::json::parse(line));
  REQUIRE(!records.empty());
  CHECK(records.front()["type"] == "status");
  CHECK(records.front()["status"] == "sat");
  int witnesses = 0;
  for (const auto& rec : records)
    if (rec["type"] == "witness") {
      ++witnesses;
      CHECK(rec["checked"] == true);
      for (const auto& e : rec["edges"]) CHECK(e.size() == 3);
    }
  CHECK(witnesses >= 1);
  CHECK(records.back()["type"] == "stats");
}

TEST_CASE("trace file has one record per derived clause") {
  auto path = std::string(FUNCERT_BINARY_DIR) + "/trace.jsonl";
  auto r = cli({"solve", problem("topic.fd"), "--control", "quasi", "--trace", path, "--format", "records"});
  REQUIRE(r.code == 0);
  std::ifstream in(path);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    auto rec = nlohmann::json::parse(line);
    for (const char* key : {"branch", "parent", "rule", "param", "clause", "theta"}) CHECK(rec.contains(key));
    CHECK(rec["theta"].size() == 4);
  }
  std::istringstream out(r.out);
  nlohmann::json stats;
  for (std::string line; std::getline(out, line);) {
    auto rec = nlohmann::json::parse(line);
    if (rec["type"] == "stats") stats = rec;
  }
  CHECK(lines + 1 == stats["branches"].get<std::size_t>());  // the root has no record
  std::remove(path.c_str());
}

TEST_CASE("output is byte-identical across runs") {
  for (const char* name : {"topic.fd", "comp_grel2.fd", "cyclic.fd"}) {
    std::vector<std::string> args{"solve", problem(name), "--control", "km", "--witness", "--emit", "presolved"};
    auto a = cli(args), b = cli(args);
    CHECK(a.out == b.out);
    CHECK(a.code == b.code);
  }
}

TEST_CASE("strict mode and heuristic threshold are accepted") {
  CHECK(cli({"solve", problem("comp_grel2.fd"), "--control", "heuristic", "--delay-threshold", "6"}).code == 0);
  CHECK(cli({"solve", problem("topic.fd"), "--strict-paper"}).code == 0);
  CHECK(cli({"solve", problem("topic.fd"), "--max-steps", "3"}).code == 2);
}
