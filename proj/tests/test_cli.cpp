#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sstream>

#include "tgbtsp/cli.hpp"

using tgbtsp::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = tgbtsp::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(TGBTSP_DATA_DIR) + "/" + name; }

std::string shell(const std::string& cmd) {
  std::string text;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return text;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) text.append(buf.data(), got);
  pclose(p);
  return text;
}

}  // namespace

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, 0);
  const Result v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, std::string(tgbtsp::kToolVersion) + "\n");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({"gen"}).code, 2);
  EXPECT_EQ(run({"moments", "--tsplib", "/nonexistent.tsp"}).code, 2);
  EXPECT_EQ(run({"kopt", "--n", "10", "--k", "4"}).code, 2);
  EXPECT_EQ(run({"moments", "--n", "10", "--tsplib", data("burma14.tsp")}).code, 2);
  const Result none = run({"moments"});
  EXPECT_EQ(none.code, 2);
  EXPECT_NE(none.err.find("no instance"), std::string::npos);
}

TEST(Cli, DomainErrorsExitOne) {
  const Result truncated = run({"moments"}, R"({"n": 4, "geometry": "euclidean-2d", "coords": [[0, 0]]})");
  EXPECT_EQ(truncated.code, 1);
  EXPECT_NE(truncated.err.find("dimension-mismatch"), std::string::npos);
  const Result bad = run({"moments"}, "{not json");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("malformed-json"), std::string::npos);
  const Result fit = run({"fit", "--A", "5", "--mean", "4", "--variance", "1", "--skewness", "0"});
  EXPECT_EQ(fit.code, 1);
}

TEST(Cli, GenIsDeterministicAndCarriesMeta) {
  const Result a = run({"gen", "--n", "9", "--seed", "4"});
  const Result b = run({"gen", "--n", "9", "--seed", "4"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const json j = json::parse(a.out);
  EXPECT_EQ(j["meta"]["tool"], "tgb-tsp");
  EXPECT_EQ(j["meta"]["tool_version"], tgbtsp::kToolVersion);
  EXPECT_EQ(j["meta"]["command"], "gen");
  EXPECT_EQ(j["meta"]["seed"], 4);
  EXPECT_EQ(j["meta"]["instance_checksum"].get<std::string>().size(), 16u);
  EXPECT_EQ(j["instance"]["n"], 9);
  EXPECT_NE(a.out, run({"gen", "--n", "9", "--seed", "5"}).out);
}

TEST(Cli, GenTsplibFormatParses) {
  const Result r = run({"gen", "--n", "7", "--format", "tsplib"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(tgbtsp::parse_tsplib(r.out).n, 7u);
}

TEST(Cli, MomentsFromPipedInstance) {
  const Result g = run({"gen", "--n", "8", "--seed", "2"});
  const Result exact = run({"moments", "--exact"}, g.out);
  ASSERT_EQ(exact.code, 0) << exact.err;
  const json j = json::parse(exact.out);
  EXPECT_EQ(j["moments"]["basis"], "exact-enumeration");
  EXPECT_NEAR(j["moments"]["mean"].get<double>(), j["closed_form"]["mean"].get<double>(), 1e-9);
  EXPECT_EQ(j["meta"]["instance_checksum"], json::parse(g.out)["meta"]["instance_checksum"]);

  const Result csv = run({"moments", "--format", "csv", "--sample-size", "5000"}, g.out);
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("instance,n,basis,mean", 0), 0u);
}

TEST(Cli, EnumerateBurma14NeedsAllowLong) {
  const Result r = run({"enumerate", "--tsplib", data("burma14.tsp")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--allow-long"), std::string::npos);
  EXPECT_EQ(run({"enumerate", "--n", "15", "--allow-long"}).code, 2);
}

TEST(Cli, EnumerateSmallInstance) {
  const Result r = run({"enumerate", "--n", "7", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["tour_count"], 360);
  EXPECT_LE(j["shortest"]["length"].get<double>(), j["longest"]["length"].get<double>());
}

TEST(Cli, FitFromNumbers) {
  const Result r = run({"fit", "--A", "75.3", "--mean", "152.4", "--variance", "1100", "--skewness", "-0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_GT(j["params"]["B"].get<double>(), 152.4);
}

TEST(Cli, HeuristicsCommands) {
  const Result ch = run({"christofides", "--tsplib", data("burma14.tsp")});
  ASSERT_EQ(ch.code, 0) << ch.err;
  EXPECT_LE(json::parse(ch.out)["result"]["length"].get<double>(), 1.5 * 3323);
  const Result ko = run({"kopt", "--tsplib", data("burma14.tsp"), "--k", "3"});
  ASSERT_EQ(ko.code, 0) << ko.err;
  EXPECT_GE(json::parse(ko.out)["result"]["length"].get<double>(), 3323);
  const Result mx = run({"maxtsp", "--tsplib", data("burma14.tsp")});
  ASSERT_EQ(mx.code, 0) << mx.err;
  EXPECT_LE(json::parse(mx.out)["length"].get<double>(), 9139);
}

TEST(Cli, TgbReportJsonAndCsv) {
  const Result j = run({"tgb", "--n", "10", "--seed", "1", "--target-ratio", "1.05"});
  ASSERT_EQ(j.code, 0) << j.err;
  const json doc = json::parse(j.out);
  EXPECT_EQ(doc["report"]["schema_version"], tgbtsp::kReportSchemaVersion);
  EXPECT_TRUE(doc["report"]["min_iterations"]["K"].is_number_integer());
  const Result c = run({"tgb", "--n", "10", "--seed", "1", "--format", "csv"});
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(c.out.rfind(tgbtsp::report_csv_header(), 0), 0u);
}

TEST(Cli, ReportOverFiles) {
  const Result r = run({"report", data("burma14.tsp"), data("ulysses16.tsp"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

TEST(Cli, HistogramDefaultsToCsvWithMetadataLine) {
  const Result r = run({"histogram", "--n", "8", "--bins", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string first, header;
  std::getline(lines, first);
  std::getline(lines, header);
  EXPECT_EQ(first.rfind("# tool_version=", 0), 0u);
  EXPECT_NE(first.find("basis=exact-enumeration"), std::string::npos);
  EXPECT_EQ(header, "bin_center,density");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 12);
}

TEST(Cli, DeterministicAcrossWorkerCounts) {
  const Result a = run({"moments", "--n", "30", "--sample-size", "20000", "--workers", "1"});
  const Result b = run({"moments", "--n", "30", "--sample-size", "20000", "--workers", "3"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, BinaryPipesGenIntoHistogram) {
  const std::string bin = TGBTSP_CLI_PATH;
  const std::string out = shell(bin + " gen --n 8 --seed 6 | " + bin + " histogram --bins 5");
  EXPECT_EQ(out.rfind("# tool_version=", 0), 0u) << out;
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 7);
}
