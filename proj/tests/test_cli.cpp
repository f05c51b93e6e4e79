#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geofence/cli.hpp"
#include "test_support.hpp"

using namespace geofence;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "geofence");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return testing_support::data_path(name); }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("geofence_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, NoArgumentsIsUsageError) { EXPECT_EQ(run({}).code, 2); }

TEST(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(run({"fly"}).code, 2); }

TEST(Cli, MissingMapIsDataError) {
  const auto r = run({"tick", "--map", "/nonexistent/map.osm", "--uav", "52.073,-0.627,30,355,8"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, BadUavLineIsDataError) {
  EXPECT_EQ(run({"tick", "--map", data("cranfield_synthetic.osm"), "--uav", "52.073,-0.627,30"}).code, 1);
}

TEST(Cli, TickTestOnePrintsSituationAndAdvisory) {
  const auto dir = scratch("tick");
  const auto r = run({"tick", "--map", data("cranfield_synthetic.osm"), "--config", data("fence.cfg"), "--uav",
                      "52.073,-0.627,30,355,8", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines[0].rfind("Object OSM ID: ", 0), 0u);
  EXPECT_NE(r.out.find("LEVEL:CAUTION"), std::string::npos);
  EXPECT_NE(r.out.find("Make diversion to avoid going"), std::string::npos);
  EXPECT_NE(r.out.find("ETA: "), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "advisory_out.txt"));
  EXPECT_TRUE(fs::exists(dir / "composite.png"));
  fs::remove_all(dir);
}

TEST(Cli, TickTestTwoIsClear) {
  const auto r = run({"tick", "--map", data("cranfield_synthetic.osm"), "--config", data("fence.cfg"), "--uav",
                      "52.080,-0.625,30,355,10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("LEVEL:NONE\n"), std::string::npos);
  EXPECT_EQ(r.out.find("Make diversion"), std::string::npos);
}

TEST(Cli, IngestDumpFeedsTick) {
  const auto dir = scratch("ingest");
  const auto a = run({"ingest", "--map", data("cranfield_synthetic.osm"), "--out", dir.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_TRUE(fs::exists(dir / "session.json"));
  const auto from_xml = run({"tick", "--map", data("cranfield_synthetic.osm"), "--config", data("fence.cfg"),
                             "--uav", "52.073,-0.627,30,355,8"});
  const auto from_dump = run({"tick", "--map", (dir / "session.json").string(), "--config", data("fence.cfg"),
                              "--uav", "52.073,-0.627,30,355,8"});
  ASSERT_EQ(from_dump.code, 0) << from_dump.err;
  EXPECT_EQ(from_xml.out, from_dump.out);
  fs::remove_all(dir);
}

TEST(Cli, SimulateReplaysEveryLine) {
  const auto r = run({"simulate", "--map", data("cranfield_synthetic.osm"), "--config", data("fence.cfg"),
                      "--uav-file", data("flight.uav"), "--rate", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t ticks = 0;
  for (const auto& l : lines_of(r.out)) ticks += l.rfind("# tick ", 0) == 0;
  EXPECT_EQ(ticks, 5u);
}

TEST(Cli, BenchPrintsOneRowPerRadius) {
  const auto r = run({"bench", "--map", data("cranfield_synthetic.osm"), "--radii", "0.05,0.02,0.01,0.005,0.002"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "radius_deg,mean_ms,runs,within");
  EXPECT_EQ(lines[1].rfind("0.05,", 0), 0u);
  EXPECT_EQ(run({"bench", "--map", data("cranfield_synthetic.osm"), "--runs", "3"}).code, 2);
}

TEST(Cli, ExecutableExitCodes) {
  const std::string exe = GEOFENCE_CLI_PATH;
  EXPECT_EQ(WEXITSTATUS(std::system((exe + " > /dev/null 2>&1").c_str())), 2);
  const auto cmd = exe + " tick --map " + data("cranfield_synthetic.osm") + " --config " + data("fence.cfg") +
                   " --uav 52.073,-0.627,30,355,8 > /dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
}
