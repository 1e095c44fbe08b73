#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "../oracles.hpp"
#include "../test_util.hpp"
#include "tradescope/corpus.hpp"
#include "tradescope/csv_io.hpp"
#include "tradescope/edsr.hpp"

using namespace tradescope;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run(const testutil::TempDir& dir, const std::string& args) {
  const auto log = dir / "cli.log";
  const std::string cmd = "cd '" + dir.path().string() + "' && '" TRADESCOPE_BIN "' " +
                          args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_crop(const testutil::TempDir& dir) {
  save_raster(synthetic_crop(Geography::Urban, 1, 72, 0.6, 3), dir / "a.png", 16);
}

}  // namespace

TEST_CASE("cli degrade") {
  testutil::TempDir dir;
  write_crop(dir);
  const std::string args =
      "degrade --in a.png --grd 1.9 --snr50 50 --gsd-product 1.8 --seed 7 ";
  Run r = run(dir, args + "--out d1.png");
  REQUIRE(r.code == 0);
  CHECK(run(dir, args + "--out d2.png").code == 0);
  CHECK(slurp(dir / "d1.png") == slurp(dir / "d2.png"));
  CHECK(load_raster(dir / "d1.png").width() == 24);
  CHECK(slurp(dir / "d1.png.json").find("resample_product") != std::string::npos);

  r = run(dir, "degrade --in a.png --out x.png --grd 1.9 --gsd-product 1.8");
  CHECK(r.code == 1);
  CHECK(r.output.find("--snr50") != std::string::npos);
  CHECK(run(dir, "degrade --in a.png --out x.png --grd 1.0 --snr50 5 --gsd-product 1.2").code == 1);
  CHECK(run(dir, "degrade --in nope.png --out x.png --grd 1.9 --snr50 5 --gsd-product 1.8").code == 2);

  std::ofstream(dir / "cfg.toml") << "[degrade]\nsnr50 = 50\ngrd = 1.9\ngsd_product = 1.8\nseed = 7\n";
  CHECK(run(dir, "--config cfg.toml degrade --in a.png --out d3.png").code == 0);
  CHECK(slurp(dir / "d3.png") == slurp(dir / "d1.png"));
  CHECK(run(dir, "--config cfg.toml degrade --in a.png --out d4.png --seed 8").code == 0);
  CHECK(slurp(dir / "d4.png") != slurp(dir / "d1.png"));
}

TEST_CASE("cli upscale and evaluate") {
  testutil::TempDir dir;
  write_crop(dir);
  REQUIRE(run(dir, "upscale --in a.png --out u.png --backend bicubic --scale 2").code == 0);
  CHECK(load_raster(dir / "u.png").width() == 144);

  edsr::ModelConfig cfg;
  cfg.n_blocks = 1;
  cfg.n_feats = 4;
  edsr::save_weights(edsr::random_weights(cfg, 3), cfg, dir / "w.bin");
  CHECK(run(dir, "upscale --in a.png --out e.png --backend edsr --weights w.bin --scale 2").code == 0);
  CHECK(run(dir, "upscale --in a.png --out e.png --backend edsr --weights w.bin --scale 3").code == 4);
  std::filesystem::resize_file(dir / "w.bin", std::filesystem::file_size(dir / "w.bin") - 4);
  CHECK(run(dir, "upscale --in a.png --out e.png --backend edsr --weights w.bin --scale 2").code == 4);

  REQUIRE(run(dir, "upscale --in a.png --out x.png --backend external --adapter '" ECHO_ADAPTER_PATH "' --scale 2").code == 0);
  const Raster ext = load_raster(dir / "x.png");
  const Raster ref = load_raster(dir / "u.png");
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    worst = std::max(worst, std::abs(ext.data()[i] - ref.data()[i]));
  CHECK(worst <= 1.0 / 65535.0 + 1e-15);
  CHECK(run(dir, "upscale --in a.png --out x.png --backend external --adapter /no/such --scale 2").code == 4);

  Run r = run(dir, "evaluate --reference a.png --candidate a.png");
  CHECK(r.code == 0);
  CHECK(r.output.find("psnr_db inf") != std::string::npos);
  CHECK(r.output.find("ssim_global 1\n") != std::string::npos);

  Raster p(16, 16, 1, 1.0), q(16, 16, 1, 1.0);
  for (double& v : p.data()) v = 100.0 / 255.0;
  for (double& v : q.data()) v = 116.0 / 255.0;
  save_raster(p, dir / "p.png", 8);
  save_raster(q, dir / "q.png", 8);
  r = run(dir, "evaluate --reference p.png --candidate q.png --csv m.csv");
  CHECK(r.code == 0);
  CHECK(r.output.find("psnr_db 24.0") != std::string::npos);
  CHECK(slurp(dir / "m.csv").find("reference,candidate,mse") == 0);

  CHECK(run(dir, "evaluate --reference a.png --candidate missing.png").code == 2);
  save_raster(Raster(30, 10, 3, 1.0), dir / "wide.png", 8);
  CHECK(run(dir, "evaluate --reference a.png --candidate wide.png").code == 1);
}

TEST_CASE("cli sweep and report") {
  testutil::TempDir dir;
  REQUIRE(run(dir, "corpus --out-dir c --size 48").code == 0);
  const std::string grid = "--gsd 1.2,2.4 --grd 2.6 --snr50 10,50,100 ";
  REQUIRE(run(dir, "sweep --manifest c/manifest.json --out r1.csv --jobs 1 " + grid).code == 0);
  REQUIRE(run(dir, "sweep --manifest c/manifest.json --out r2.csv --jobs 3 " + grid).code == 0);
  CHECK(slurp(dir / "r1.csv") == slurp(dir / "r2.csv"));
  CHECK(import_records_csv(dir / "r1.csv").size() == 5 * 6);

  Run r = run(dir, "report --records r1.csv --out-dir rep --figure heatmap --snr50 50");
  CHECK(r.code == 0);
  CHECK(r.output.find("heatmap ssim_global snr50=50") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "rep" / "heatmap.csv"));
  CHECK(run(dir, "report --records r1.csv --out-dir rep").code == 0);
  CHECK(std::filesystem::exists(dir / "rep" / "boxstats.csv"));
  CHECK(run(dir, "report --records r1.csv --metric bogus").code == 1);

  std::ofstream(dir / "empty.csv") << kRecordColumns << '\n';
  CHECK(run(dir, "report --records empty.csv").code == 1);
  CHECK(run(dir, "report --records absent.csv").code == 2);
  CHECK(run(dir, "sweep --manifest c/manifest.json --out r3.csv --backend external --adapter /no/such " + grid).code == 3);
  CHECK(run(dir, "sweep --out r4.csv --gsd 3.6 --grd 7.2 --snr50 10 --corpus-size 48").code == 3);
}
