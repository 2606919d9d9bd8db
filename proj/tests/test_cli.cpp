#include "doctest.h"

#include "incorr/io.hpp"
#include "support/test_util.hpp"

using namespace incorr;
using testutil::run_command;

namespace {

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

const std::string kProject = quoted(testutil::data_dir() / "hbdq_project.json");

}  // namespace

TEST_CASE("build-panel writes the SVG and a summary") {
  testutil::TempDir dir;
  const auto out = dir.path() / "panel.svg";
  const auto r = run_command(testutil::cli_path() + " build-panel " + kProject + " -o " + quoted(out));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "4 logs, 62 contacts, 2 correlations\n");
  const auto doc = testutil::parse_xml(read_file(out));
  CHECK(testutil::groups_with_prefix(doc, "log-").size() == 4);
}

TEST_CASE("build-panel honours --level and --order") {
  testutil::TempDir dir;
  const auto plain = dir.path() / "a.svg";
  const auto leveled = dir.path() / "b.svg";
  const auto reordered = dir.path() / "c.svg";
  const std::string cli = testutil::cli_path() + " build-panel " + kProject;
  REQUIRE(run_command(cli + " -o " + quoted(plain)).exit_code == 0);
  REQUIRE(run_command(cli + " -o " + quoted(leveled) + " --level corr1").exit_code == 0);
  REQUIRE(run_command(cli + " -o " + quoted(reordered) + " --order log4,log3,log2,log1").exit_code == 0);
  CHECK(read_file(plain) != read_file(leveled));
  CHECK(read_file(plain) != read_file(reordered));
}

TEST_CASE("build-panel exit codes") {
  testutil::TempDir dir;
  const std::string out = " -o " + quoted(dir.path() / "x.svg");
  const std::string cli = testutil::cli_path() + " build-panel ";
  CHECK(run_command(cli + quoted(dir.path() / "missing.json") + out).exit_code == 1);
  CHECK(run_command(cli + kProject + out + " --level bogus").exit_code == 2);
  CHECK(run_command(cli + kProject + out + " --order log1,log2").exit_code == 2);
  CHECK(run_command(cli + kProject + out + " --order log1,log2,log3,log9").exit_code == 2);
  CHECK_FALSE(std::filesystem::exists(dir.path() / "x.svg"));

  write_file_atomic(dir.path() / "empty.json", "{}");
  CHECK(run_command(cli + quoted(dir.path() / "empty.json") + out).exit_code == 1);
  write_file_atomic(dir.path() / "broken.json", "{\"schema\":");
  CHECK(run_command(cli + quoted(dir.path() / "broken.json") + out).exit_code == 1);
  CHECK(run_command(testutil::cli_path()).exit_code != 0);
}

TEST_CASE("validate reports findings") {
  const std::string cli = testutil::cli_path() + " validate ";
  auto r = run_command(cli + quoted(testutil::data_dir() / "hbdq_dataset.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("ok") != std::string::npos);

  testutil::TempDir dir;
  Json doc = parse_json(read_file(testutil::data_dir() / "hbdq_dataset.json"));
  doc["contacts"][0]["points"] = Json::array({doc["contacts"][0]["points"][0]});
  write_file_atomic(dir.path() / "bad.json", doc.dump());
  r = run_command(cli + quoted(dir.path() / "bad.json"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find(doc["contacts"][0]["id"].get<std::string>()) != std::string::npos);

  write_file_atomic(dir.path() / "empty.json", "{}");
  CHECK(run_command(cli + quoted(dir.path() / "empty.json")).exit_code == 1);
}
