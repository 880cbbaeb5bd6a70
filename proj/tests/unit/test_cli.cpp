#include <doctest.h>

#include "cli_driver.hpp"
#include "fixtures.hpp"
#include "smscorpus/config.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SMSCORPUS_CLI;

cli::Result in(const fixtures::TempDir& dir, std::vector<std::string> args) {
  std::vector<std::string> full = {"--store", (dir / "store").string(), "--keys",
                                   (dir / "keys").string(), "--data", fixtures::data_dir().string()};
  full.insert(full.end(), args.begin(), args.end());
  return cli::run(kCli, full);
}

}  // namespace

TEST_CASE("keygen writes once") {
  fixtures::TempDir dir;
  CHECK(in(dir, {"keygen"}).exit_code == 0);
  CHECK((fs::status(dir / "keys").permissions() & fs::perms::group_read) == fs::perms::none);
  const auto again = in(dir, {"keygen"});
  CHECK(again.exit_code == 1);
  CHECK(again.err.find("already exists") != std::string::npos);
}

TEST_CASE("scrub matches the golden exemplars") {
  fixtures::TempDir dir;
  const auto r = in(dir, {"scrub", fixtures::path("exemplars.txt").string()});
  CHECK(r.exit_code == 0);
  CHECK(r.out == fixtures::read("exemplars.expected"));
}

TEST_CASE("errors and usage") {
  fixtures::TempDir dir;
  REQUIRE(in(dir, {"keygen"}).exit_code == 0);
  const auto missing = in(dir, {"moderate", "B000009", "approve"});
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("code=not_found") != std::string::npos);
  CHECK(missing.err.find("batch not found") != std::string::npos);
  CHECK(in(dir, {"moderate", "B000009", "maybe"}).exit_code == 2);
  CHECK(in(dir, {}).exit_code == 2);
  CHECK(in(dir, {"release", "verify", "2011-10"}).exit_code == 1);
  const auto junk = dir / "junk.txt";
  smscorpus::write_file(junk, "\x01\x02 nothing to see");
  const auto bad = in(dir, {"ingest", junk.string()});
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("code=no_schema") != std::string::npos);
}

TEST_CASE("end to end on the fixture corpus") {
  fixtures::TempDir dir;
  const auto e2e = cli::run_end_to_end(kCli, dir.path());
  for (const auto& f : e2e.failures) MESSAGE(f);
  CHECK(e2e.ok());
  CHECK(e2e.messages == 50);
}
