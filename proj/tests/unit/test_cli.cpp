#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "support/oracles.hpp"
#include "synvol/detect.hpp"
#include "synvol/io.hpp"
#include "synvol/pair.hpp"
#include "synvol/raster.hpp"
#include "synvol/synth.hpp"

using namespace synvol;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run synvol_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "synvol");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit 2 with error JSON") {
  for (const auto& args : std::vector<std::vector<std::string>>{{}, {"frobnicate"}, {"detect", "--bogus"}}) {
    const auto r = synvol_cli(args);
    CHECK(r.code == 2);
    CHECK(json::parse(r.err)["error"]["code"] == "usage_error");
  }
  CHECK(synvol_cli({"--help"}).code == 0);
}

TEST_CASE("out of range gamma fails without writing output") {
  test::TempDir dir("cli");
  save_volume(ProbVolume({4, 4, 4}, 0.5f), dir / "p.vol");
  const auto r = synvol_cli({"detect", "--prob", (dir / "p.vol").string(), "--gamma", "1.5", "--out",
                             (dir / "d.json").string()});
  CHECK(r.code == 1);
  const auto e = json::parse(r.err);
  CHECK(e["error"]["code"] == "range_error");
  CHECK_FALSE(std::filesystem::exists(dir / "d.json"));
}

TEST_CASE("missing input reports an io error") {
  const auto r = synvol_cli({"detect", "--prob", "/nonexistent/p.vol", "--out", "/tmp/x.json"});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"]["code"] == "io_error");
}

TEST_CASE("score aggregates a per-volume F1 table") {
  const auto data = std::filesystem::path(SYNVOL_TEST_DATA);
  test::TempDir dir("cli");
  const auto r = synvol_cli({"score", "--from-f1", (data / "published_stage2_f1.json").string(), "--report",
                             (dir / "r.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("f1=0.6159") != std::string::npos);
  const auto report = json::parse(slurp(dir / "r.json"));
  CHECK(std::abs(report["mean"]["f1"].get<double>() - 0.6160) <= 5e-4);
  CHECK(report["volumes"].size() == 9);
  CHECK(report.contains("config"));
}

TEST_CASE("synth, detect, match and score compose like the library") {
  test::TempDir dir("cli");
  const auto d = [&](const std::string& name) { return (dir / name).string(); };
  REQUIRE(synvol_cli({"synth", "--out-dir", d("s"), "--seed", "3", "--noise", "0.1"}).code == 0);
  REQUIRE(synvol_cli({"detect", "--prob", d("s/prob_pre.vol"), "--kind", "pre", "--out", d("pre.json")}).code == 0);
  REQUIRE(synvol_cli({"detect", "--prob", d("s/prob_post.vol"), "--kind", "post", "--out", d("post.json")}).code == 0);
  REQUIRE(synvol_cli({"match", "--pre", d("pre.json"), "--post", d("post.json"), "--out", d("pairs.json"),
                      "--pairs-out", d("list.json")})
              .code == 0);

  // Library composition on the same inputs.
  const auto pre = detect(load_prob(dir / "s/prob_pre.vol"), {0.75, Connectivity::twenty_six, 1});
  const auto post = detect(load_prob(dir / "s/prob_post.vol"), {0.65, Connectivity::twenty_six, 1});
  const Dims dims{64, 64, 64};
  const auto pres = to_annotations(pre, PointKind::pre, dims);
  const auto posts = to_annotations(post, PointKind::post, dims);
  const auto combined =
      combine_pairs(pres, posts, match_nearest(posts.sites(PointKind::post), pres.sites(PointKind::pre)));
  CHECK(slurp(dir / "pairs.json") == points_to_json(combined));
  CHECK(json::parse(slurp(dir / "list.json"))["pairs"].size() == post.size());

  const auto r = synvol_cli({"score", "--pred", d("pairs.json"), "--gt", d("s/points.json"), "--paired", "--report",
                             d("score.json")});
  REQUIRE(r.code == 0);
  const auto report = json::parse(slurp(dir / "score.json"));
  CHECK(report["paired"] == true);
  CHECK(report["mean"]["f1"] == 1.0);
}

TEST_CASE("rasterize writes masks and instance labels") {
  test::TempDir dir("cli");
  const AnnotationSet pts({{1, PointKind::pre, {5, 5, 5}, {}, {}}, {2, PointKind::pre, {5, 5, 7}, {}, {}}});
  save_points(pts, dir / "pts.json");
  REQUIRE(synvol_cli({"rasterize", "--points", (dir / "pts.json").string(), "--dims", "16,16,16", "--out",
                      (dir / "m.vol").string(), "--radius", "2"})
              .code == 0);
  CHECK(load_mask(dir / "m.vol") == rasterize_squares(pts, PointKind::pre, {16, 16, 16}, 2));
  REQUIRE(synvol_cli({"rasterize", "--points", (dir / "pts.json").string(), "--dims", "16,16,16", "--out",
                      (dir / "l.vol").string(), "--instances"})
              .code == 0);
  CHECK(load_labels(dir / "l.vol") == rasterize_instances(pts.sites(PointKind::pre), {16, 16, 16}, 3));
}

TEST_CASE("split then blend reproduces the volume") {
  test::TempDir dir("cli");
  ProbVolume p({20, 24, 28});
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<float>(i % 97) / 96.0f;
  save_volume(p, dir / "p.vol");
  REQUIRE(synvol_cli({"split", "--prob", (dir / "p.vol").string(), "--out-dir", (dir / "patches").string(),
                      "--patch", "8,16,16"})
              .code == 0);
  REQUIRE(synvol_cli({"blend", "--plan-from", "20,24,28", "--inputs", (dir / "patches").string(), "--out",
                      (dir / "b.vol").string(), "--patch", "8,16,16"})
              .code == 0);
  const auto b = load_prob(dir / "b.vol");
  for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(std::abs(b[i] - p[i]) <= 1e-6);
}

TEST_CASE("config file merges under explicit flags") {
  test::TempDir dir("cli");
  ProbVolume p({1, 1, 3});
  p[0] = 0.6f;
  p[2] = 0.8f;
  save_volume(p, dir / "p.vol");
  std::ofstream(dir / "c.cfg") << "gamma_pre = 0.5\n";
  const auto run_count = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"detect", "--prob", (dir / "p.vol").string(), "--out", (dir / "d.json").string()};
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(synvol_cli(args).code == 0);
    return load_points(dir / "d.json").size();
  };
  CHECK(run_count({}) == 1);
  CHECK(run_count({"--config", (dir / "c.cfg").string()}) == 2);
  CHECK(run_count({"--config", (dir / "c.cfg").string(), "--gamma", "0.7"}) == 1);
}

TEST_CASE("pseudo and loss subcommands") {
  test::TempDir dir("cli");
  const std::vector<Coord> pre{{8, 8, 8}}, post{{8, 8, 12}};
  save_volume(render_probability(pre, {16, 16, 16}, 1.5, 0.0, 1), dir / "pre.vol");
  save_volume(render_probability(post, {16, 16, 16}, 1.5, 0.0, 2), dir / "post.vol");
  REQUIRE(synvol_cli({"pseudo", "--prob-pre", (dir / "pre.vol").string(), "--prob-post", (dir / "post.vol").string(),
                      "--out-dir", (dir / "ps").string()})
              .code == 0);
  CHECK(load_mask(dir / "ps/mask_pre.vol") == rasterize_squares(pre, {16, 16, 16}, 3));
  CHECK(load_points(dir / "ps/points_post.json").positions(PointKind::post) == post);
  CHECK(synvol_cli({"pseudo", "--prob-pre", (dir / "pre.vol").string(), "--prob-post", (dir / "post.vol").string(),
                    "--out-dir", (dir / "ps2").string(), "--mode", "blobs"})
            .code == 1);

  save_volume(ProbVolume({16, 16, 16}, 0.5f), dir / "half.vol");
  const auto r = synvol_cli({"loss", "--pred", (dir / "half.vol").string(), "--target",
                             (dir / "ps/mask_pre.vol").string(), "--fg-weight", "1"});
  REQUIRE(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}
