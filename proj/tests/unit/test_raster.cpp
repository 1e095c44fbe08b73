#include <doctest.h>

#include <cmath>
#include <fstream>

#include "../oracles.hpp"
#include "../test_util.hpp"
#include "tradescope/error.hpp"
#include "tradescope/manifest.hpp"
#include "tradescope/raster.hpp"

using namespace tradescope;

TEST_CASE("quantize rounds half up and saturates at full scale") {
  CHECK(quantize(0.5, 8) == 128);
  CHECK(quantize(1.0, 16) == 65535);
  CHECK(quantize(1.0, 8) == 255);
  CHECK(quantize(0.0, 8) == 0);
}

TEST_CASE("8-bit full scale and zero load as 1 and 0") {
  testutil::TempDir tmp;
  Raster r(2, 1, 1, 1.0);
  r.at(0, 0) = 1.0;
  r.at(1, 0) = 0.0;
  save_raster(r, tmp / "a.png", 8);
  CHECK(raster_file_bit_depth(tmp / "a.png") == 8);
  const Raster back = load_raster(tmp / "a.png");
  CHECK(back.at(0, 0) == 1.0);
  CHECK(back.at(1, 0) == 0.0);
}

TEST_CASE("16-bit value 32768 loads as 32768/65535") {
  testutil::TempDir tmp;
  Raster r(1, 1, 1, 1.0);
  r.at(0, 0) = 32768.0 / 65535.0;
  save_raster(r, tmp / "a.png", 16);
  const Raster back = load_raster(tmp / "a.png", 0.6);
  CHECK(back.at(0, 0) == 32768.0 / 65535.0);
  CHECK(back.gsd() == 0.6);
}

TEST_CASE("round trip error bounded by half a code") {
  testutil::TempDir tmp;
  for (int bit : {8, 16}) {
    for (int channels : {1, 3}) {
      const Raster r = oracle::random_raster(37, 23, channels, 5 + bit);
      save_raster(r, tmp / "rt.png", bit);
      const Raster back = load_raster(tmp / "rt.png");
      REQUIRE(back.same_shape(r));
      double worst = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i)
        worst = std::max(worst, std::abs(back.data()[i] - r.data()[i]));
      CHECK(worst <= 0.5 / ((1 << bit) - 1) + 1e-15);
    }
  }
}

TEST_CASE("save rejects out-of-range and non-finite samples") {
  testutil::TempDir tmp;
  Raster r(1, 1, 1, 1.0);
  r.at(0, 0) = 1.01;
  CHECK_THROWS_AS(save_raster(r, tmp / "x.png", 8), PipelineError);
  r.at(0, 0) = std::nan("");
  CHECK_THROWS_AS(save_raster(r, tmp / "x.png", 8), PipelineError);
}

TEST_CASE("load errors are I/O errors") {
  testutil::TempDir tmp;
  CHECK_THROWS_AS(load_raster(tmp / "missing.png"), IoError);
  std::ofstream(tmp / "junk.png") << "not a png";
  CHECK_THROWS_AS(load_raster(tmp / "junk.png"), IoError);
}

TEST_CASE("crop_region") {
  const Raster r = oracle::random_raster(10, 8, 3, 1);
  CHECK(crop_region(r, 0, 0, 10, 8) == r);
  const Raster px = crop_region(r, 0, 0, 1, 1);
  CHECK(px.width() == 1);
  CHECK(px.at(0, 0, 2) == r.at(0, 0, 2));

  // Crops compose: an inner crop of a crop equals the direct crop.
  const Raster outer = crop_region(r, 2, 1, 6, 5);
  CHECK(crop_region(outer, 1, 2, 3, 2) == crop_region(r, 3, 3, 3, 2));
  CHECK_THROWS_AS(crop_region(r, 8, 0, 3, 1), ValidationError);
  CHECK_THROWS_AS(crop_region(r, 0, 0, 0, 1), ValidationError);
}

TEST_CASE("raster constructor validates shape") {
  CHECK_THROWS_AS(Raster(0, 4, 1, 1.0), ValidationError);
  CHECK_THROWS_AS(Raster(4, 4, 2, 1.0), ValidationError);
  CHECK_THROWS_AS(Raster(4, 4, 1, -1.0), ValidationError);
  CHECK_THROWS_AS(Raster(2, 2, 1, 1.0, std::vector<double>(3)),
                  ValidationError);
}

TEST_CASE("clamp_unit clips and rejects NaN") {
  Raster r(2, 1, 1, 1.0);
  r.at(0, 0) = -0.25;
  r.at(1, 0) = 1.5;
  const Raster c = clamp_unit(r);
  CHECK(c.at(0, 0) == 0.0);
  CHECK(c.at(1, 0) == 1.0);
  CHECK(within_unit_range(c));
  CHECK_FALSE(within_unit_range(r));
  r.at(0, 0) = std::nan("");
  CHECK_THROWS_AS(clamp_unit(r), PipelineError);
}

TEST_CASE("checksum tracks content") {
  Raster a = oracle::random_raster(5, 5, 1, 3);
  Raster b = a;
  CHECK(checksum(a) == checksum(b));
  b.at(4, 4) += 1e-12;
  CHECK(checksum(a) != checksum(b));
}

TEST_CASE("manifest round trip and validation") {
  testutil::TempDir tmp;
  save_raster(oracle::random_raster(12, 12, 3, 9, 0.6), tmp / "u1.png", 16);
  DatasetManifest m;
  m.root = tmp.path();
  m.entries.push_back({"u1.png", Geography::RuralUrban, 1, 0.6});
  save_manifest(m, tmp / "manifest.json");

  const DatasetManifest back = load_manifest(tmp / "manifest.json");
  REQUIRE(back.entries.size() == 1);
  CHECK(back.entries[0].geography == Geography::RuralUrban);
  CHECK(back.entries[0].gsd_m == 0.6);
  const auto crops = load_crops(back);
  REQUIRE(crops.size() == 1);
  CHECK(crops[0].raster.gsd() == 0.6);

  DatasetManifest dup = m;
  dup.entries.push_back(m.entries[0]);
  CHECK_THROWS_AS(dup.validate(false), ValidationError);
  DatasetManifest missing = m;
  missing.entries[0].path = "nope.png";
  CHECK_THROWS_AS(missing.validate(true), IoError);

  CHECK(parse_geography("rural_urban") == Geography::RuralUrban);
  CHECK_FALSE(parse_geography("desert").has_value());
}
