#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "support/oracles.hpp"
#include "synvol/io.hpp"
#include "synvol/pipeline.hpp"

using namespace synvol;
using nlohmann::json;

namespace {

E2ESpec small_spec(double noise, double target_sigma) {
  E2ESpec spec;
  spec.scene.dims = {64, 64, 64};
  spec.scene.n_pairs = 10;
  spec.scene.seed = 42;
  spec.target_noise = noise;
  spec.source_noise = noise;
  spec.target_sigma = target_sigma;
  return spec;
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.patch = {32, 32, 32};
  return c;
}

int cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "synvol");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST_CASE("clean scene scores perfectly in both stages") {
  const auto r = run_e2e(small_config(), small_spec(0.0, 1.5));
  CHECK(r.stage1.score.f1 == 1.0);
  CHECK(r.stage2.score.f1 == 1.0);
  CHECK(r.source.score.f1 == 1.0);
  // Regeneration on detected points reproduces the stage-1 geometry.
  CHECK(r.stage2.pres.positions(PointKind::pre) == r.pseudo.points_pre.positions(PointKind::pre));
}

TEST_CASE("invalid config fails with a stage tag") {
  auto c = small_config();
  c.gamma_pre = 2.0;
  try {
    run_e2e(c, small_spec(0.0, 1.5));
    FAIL("expected an error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "config");
    CHECK(e.code() == ErrorCode::range);
  }
  auto spec = small_spec(0.0, 1.5);
  spec.scene.dims = {16, 16, 16};
  try {
    run_e2e(small_config(), spec);
    FAIL("expected an error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "synth");
    CHECK(e.code() == ErrorCode::placement);
  }
}

TEST_CASE("report scores equal an independent composition of CLI steps") {
  test::TempDir dir("e2e");
  const auto p = [&](const std::string& rel) { return (dir / rel).string(); };
  REQUIRE(cli_run({"e2e", "--dims", "64,64,64", "--pairs", "10", "--noise", "0.2", "--target-sigma", "2.5", "--patch",
                   "32,32,32", "--out-dir", p("art")}) == 0);
  const auto report = read_json(dir / "art/report.json");
  CHECK(report["config"]["patch"] == json::array({32, 32, 32}));

  // Stage 1 from the stored target renders.
  REQUIRE(cli_run({"detect", "--prob", p("art/target/prob_pre.vol"), "--kind", "pre", "--out", p("s1/pre.json")}) == 0);
  REQUIRE(cli_run({"detect", "--prob", p("art/target/prob_post.vol"), "--kind", "post", "--out", p("s1/post.json")}) ==
          0);
  REQUIRE(cli_run({"match", "--pre", p("s1/pre.json"), "--post", p("s1/post.json"), "--out", p("s1/scene.json")}) == 0);
  REQUIRE(cli_run({"score", "--pred", p("s1/scene.json"), "--gt", p("art/gt/scene.json"), "--paired", "--report",
                   p("s1/report.json")}) == 0);

  // Stage 2 from pseudo labels regenerated by the pseudo subcommand.
  REQUIRE(cli_run({"pseudo", "--prob-pre", p("art/target/prob_pre.vol"), "--prob-post", p("art/target/prob_post.vol"),
                   "--out-dir", p("ps")}) == 0);
  CHECK(load_mask(dir / "ps/mask_pre.vol") == load_mask(dir / "art/pseudo/mask_pre.vol"));
  REQUIRE(cli_run({"detect", "--prob", p("ps/mask_pre.vol"), "--kind", "pre", "--out", p("s2/pre.json")}) == 0);
  REQUIRE(cli_run({"detect", "--prob", p("ps/mask_post.vol"), "--kind", "post", "--out", p("s2/post.json")}) == 0);
  REQUIRE(cli_run({"match", "--pre", p("s2/pre.json"), "--post", p("s2/post.json"), "--out", p("s2/scene.json")}) == 0);
  REQUIRE(cli_run({"score", "--pred", p("s2/scene.json"), "--gt", p("art/gt/scene.json"), "--paired", "--report",
                   p("s2/report.json")}) == 0);

  const auto s1 = read_json(dir / "s1/report.json")["volumes"][0];
  const auto s2 = read_json(dir / "s2/report.json")["volumes"][0];
  for (const char* key : {"f1_pre", "f1_post", "f1"}) {
    CHECK(report["stage1"][key] == s1[key]);
    CHECK(report["stage2"][key] == s2[key]);
  }
  CHECK(report["stage2"]["f1"].get<double>() >= report["stage1"]["f1"].get<double>());
}

TEST_CASE("e2e is deterministic") {
  const auto a = run_e2e(small_config(), small_spec(0.3, 2.0));
  const auto b = run_e2e(small_config(), small_spec(0.3, 2.0));
  CHECK(a.stage1.combined == b.stage1.combined);
  CHECK(a.pseudo.mask_post == b.pseudo.mask_post);
  CHECK(a.stage2.score.f1 == b.stage2.score.f1);
}
