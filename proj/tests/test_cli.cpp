#include <doctest.h>

#include <chrono>
#include <filesystem>

#include "fareval/cli.hpp"
#include "fixtures.hpp"

using fareval::run_cli;

namespace {

std::string s(const std::filesystem::path& p) { return p.string(); }

}  // namespace

TEST_CASE("cli end-to-end on the synthetic fixture") {
  auto dir = fixtures::temp_dir("cli");
  auto fx = fixtures::write_disk_fixture(dir);

  SUBCASE("build-alignments and reuse the store") {
    auto store_path = dir / "store.bin";
    CHECK(run_cli({"build-alignments", "--metadata", s(fx.metadata), "--out",
                   s(store_path)}) == 0);
    CHECK(std::filesystem::exists(store_path));

    auto out = dir / "scores.csv";
    CHECK(run_cli({"eval-task1", "--metadata", s(fx.metadata), "--topics", s(fx.topics),
                   "--run", s(fx.run1), "--alignments", s(store_path), "--out", s(out)}) == 0);
    CHECK(std::filesystem::exists(out));
    CHECK(std::filesystem::exists(dir / "scores.agg.csv"));
  }

  SUBCASE("build-targets produces loadable JSON-lines") {
    auto tpath = dir / "targets.jsonl";
    CHECK(run_cli({"build-targets", "--metadata", s(fx.metadata), "--topics", s(fx.topics),
                   "--task", "2", "--out", s(tpath)}) == 0);
    CHECK(run_cli({"eval-task2", "--metadata", s(fx.metadata), "--topics", s(fx.topics),
                   "--run", s(fx.run2), "--targets", s(tpath), "--out",
                   s(dir / "t2.csv")}) == 0);
    // kind mismatch is refused
    CHECK(run_cli({"eval-task1", "--metadata", s(fx.metadata), "--topics", s(fx.topics),
                   "--run", s(fx.run1), "--targets", s(tpath), "--out",
                   s(dir / "t1.csv")}) != 0);
  }

  SUBCASE("eval commands are deterministic and fast") {
    auto out_a = dir / "a.csv";
    auto out_b = dir / "b.csv";
    auto start = std::chrono::steady_clock::now();
    CHECK(run_cli({"eval-task1", "--metadata", s(fx.metadata), "--topics", s(fx.topics),
                   "--run", s(fx.run1), "--seed", "7", "--out", s(out_a)}) == 0);
    CHECK(run_cli({"eval-task2", "--metadata", s(fx.metadata), "--topics", s(fx.topics),
                   "--run", s(fx.run2), "--seed", "7", "--out", s(dir / "a2.csv")}) == 0);
    auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(std::chrono::duration<double>(elapsed).count() < 1.0);

    CHECK(run_cli({"eval-task1", "--metadata", s(fx.metadata), "--topics", s(fx.topics),
                   "--run", s(fx.run1), "--seed", "7", "--out", s(out_b)}) == 0);
    CHECK(fixtures::read_bytes(out_a) == fixtures::read_bytes(out_b));
    CHECK(fixtures::read_bytes(dir / "a.agg.csv") == fixtures::read_bytes(dir / "b.agg.csv"));
  }

  SUBCASE("leaderboard merges and sorts aggregates") {
    CHECK(run_cli({"eval-task1", "--metadata", s(fx.metadata), "--topics", s(fx.topics),
                   "--run", s(fx.run1), "--run-name", "alpha", "--out",
                   s(dir / "alpha.csv")}) == 0);
    CHECK(run_cli({"eval-task1", "--metadata", s(fx.metadata), "--topics", s(fx.topics),
                   "--run", s(fx.run1), "--run-name", "beta", "--out",
                   s(dir / "beta.csv")}) == 0);
    auto board = dir / "board.csv";
    CHECK(run_cli({"leaderboard", "--task", "1", "--out", s(board),
                   s(dir / "alpha.agg.csv"), s(dir / "beta.agg.csv")}) == 0);
    auto text = fixtures::read_bytes(board);
    CHECK(text.find("alpha") != std::string::npos);
    CHECK(text.find("beta") != std::string::npos);
    // identical scores tie-break alphabetically
    CHECK(text.find("alpha") < text.find("beta"));
  }

  SUBCASE("build-pool writes the tiered union") {
    auto pool = dir / "pool.tsv";
    CHECK(run_cli({"build-pool", "--task1-run", s(fx.run1), "--task2-run", s(fx.run2),
                   "--task1-depth", "20", "--task2-depth", "5", "--task2-reps", "25",
                   "--out", s(pool)}) == 0);
    CHECK(std::filesystem::exists(pool));
    CHECK(!fixtures::read_bytes(pool).empty());
  }
}

TEST_CASE("cli validation and failure modes") {
  auto dir = fixtures::temp_dir("cli-err");
  auto fx = fixtures::write_disk_fixture(dir);

  SUBCASE("validate-run passes a well-formed run") {
    CHECK(run_cli({"validate-run", "--task", "1", "--run", s(fx.run1), "--topics",
                   s(fx.topics), "--expected-length", "30"}) == 0);
  }
  SUBCASE("validate-run fails on an unknown topic") {
    fixtures::write_text(dir / "bad.tsv", "999\t1\n");
    CHECK(run_cli({"validate-run", "--task", "1", "--run", s(dir / "bad.tsv"), "--topics",
                   s(fx.topics)}) != 0);
  }
  SUBCASE("validate-run is strict about incomplete task 2 runs") {
    // fewer reps than expected: warnings, nonzero exit
    CHECK(run_cli({"validate-run", "--task", "2", "--run", s(fx.run2), "--topics",
                   s(fx.topics)}) == 2);
  }
  SUBCASE("unknown flag exits nonzero") {
    CHECK(run_cli({"eval-task1", "--no-such-flag"}) != 0);
  }
  SUBCASE("missing file exits nonzero") {
    CHECK(run_cli({"eval-task1", "--metadata", s(dir / "nope.jsonl"), "--topics",
                   s(fx.topics), "--run", s(fx.run1), "--out", s(dir / "o.csv")}) != 0);
  }
  SUBCASE("no subcommand exits nonzero") {
    CHECK(run_cli(std::vector<std::string>{}) != 0);
  }
  SUBCASE("malformed run file exits nonzero") {
    fixtures::write_text(dir / "bad2.tsv", "1\t2\t3\t4\n");
    CHECK(run_cli({"validate-run", "--task", "1", "--run", s(dir / "bad2.tsv"), "--topics",
                   s(fx.topics)}) != 0);
  }
}
