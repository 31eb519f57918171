#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "helpers.hpp"
#include "litgraph/text.hpp"

namespace fs = std::filesystem;
using litgraph::text::read_file;
using litgraph::text::write_file;

namespace {

struct Invocation {
  int exit_code;
  std::string output;
};

Invocation cli(const std::string& args, const testing::TempDir& dir) {
  const auto log = dir / "cli.log";
  const std::string cmd = std::string("'") + LITGRAPH_CLI + "' " + args + " > '" + log.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, fs::exists(log) ? read_file(log) : ""};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("taxonomy validate") {
  testing::TempDir dir("cli-tax");
  const auto good = cli("taxonomy validate " + q(fs::path(LITGRAPH_FIXTURE_DIR) / "../../data/taxonomy.txt"), dir);
  CHECK(good.exit_code == 0);
  CHECK(good.output.find("136 labels under 12 top-level categories") != std::string::npos);

  write_file(dir / "bad.txt", "Root\n      Orphan\n");
  const auto bad = cli("taxonomy validate " + q(dir / "bad.txt"), dir);
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("line 2") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  testing::TempDir dir("cli-usage");
  CHECK(cli("", dir).exit_code == 2);
  CHECK(cli("frobnicate", dir).exit_code == 2);
  CHECK(cli("filter", dir).exit_code == 2);
}

TEST_CASE("run exit codes") {
  testing::TempDir dir("cli-run");
  fs::copy(testing::fixture("e2e"), dir.path(), fs::copy_options::recursive);

  SUBCASE("success") {
    const auto r = cli("run --config " + q(dir / "litgraph.conf"), dir);
    CHECK(r.exit_code == 0);
    CHECK(read_file(dir / "out" / "filtered.txt") == read_file(testing::fixture("e2e/expected/filtered.txt")));
  }
  SUBCASE("missing key") {
    write_file(dir / "partial.conf", "depth = 1\noutput = out\n");
    const auto r = cli("run --config " + q(dir / "partial.conf"), dir);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("seeds") != std::string::npos);
  }
  SUBCASE("unknown override") {
    CHECK(cli("run --config " + q(dir / "litgraph.conf") + " --set bogus=1", dir).exit_code == 2);
  }
  SUBCASE("failing stage") {
    write_file(dir / "annotations" / "ORPHAN.ann", "T1\tPoW 0 3\tPoW\n");
    const auto r = cli("run --config " + q(dir / "litgraph.conf"), dir);
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("failed") != std::string::npos);
  }
  SUBCASE("dry run") {
    const auto r = cli("run --config " + q(dir / "litgraph.conf") + " --dry-run", dir);
    CHECK(r.exit_code == 0);
    CHECK_FALSE(fs::exists(dir / "out"));
  }
}

TEST_CASE("filter subcommand reproduces the kept list") {
  testing::TempDir dir("cli-filter");
  const auto e2e = testing::fixture("e2e");
  const auto r = cli("filter --reports " + q(e2e / "expected/density.csv") + " --seeds " + q(e2e / "seeds.txt") +
                         " --token-pct 10 --dlt-pct 30 --esg-pct 30 --token-floor 30 --out " + q(dir / "kept.txt") +
                         " --stages " + q(dir / "stages.csv"),
                     dir);
  CHECK(r.exit_code == 0);
  CHECK(read_file(dir / "kept.txt") == read_file(e2e / "expected/filtered.txt"));
  CHECK(read_file(dir / "stages.csv") == read_file(e2e / "expected/filter_stages.csv"));
}

TEST_CASE("ingest, tag and graph subcommands chain") {
  testing::TempDir dir("cli-chain");
  fs::copy(testing::fixture("e2e"), dir.path(), fs::copy_options::recursive);
  REQUIRE(cli("ingest --seeds " + q(dir / "seeds.txt") + " --depth 2 --cache " + q(dir / "cache") +
                  " --offline --out " + q(dir / "corpus.ndjson"),
              dir)
              .exit_code == 0);
  REQUIRE(cli("tag --corpus " + q(dir / "corpus.ndjson") + " --gazetteer --out " + q(dir / "ann") + " --reports " +
                  q(dir / "density.csv") + " --bio " + q(dir / "bio.txt"),
              dir)
              .exit_code == 0);
  CHECK(fs::exists(dir / "ann" / "P01.ann"));
  CHECK(read_file(dir / "bio.txt").find("-DOCSTART-") != std::string::npos);
  const auto g = cli("graph --citation --corpus " + q(dir / "corpus.ndjson") + " --mode cumulative --out " +
                         q(dir / "graphs"),
                     dir);
  CHECK(g.exit_code == 0);
  CHECK(fs::exists(dir / "graphs" / "citation_hits.csv"));
  CHECK(cli("graph --corpus " + q(dir / "missing.ndjson") + " --citation", dir).exit_code == 3);
}
