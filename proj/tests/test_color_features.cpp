#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "cubecolor/color_features.hpp"
#include "cubecolor/errors.hpp"
#include "test_support.hpp"

using namespace cubecolor;

namespace {

RgbImage random_image(Rng& rng, int w, int h) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.set(x, y, {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
                     static_cast<std::uint8_t>(rng.below(256))});
    }
  }
  return img;
}

FaceQuad rect_quad(double x0, double y0, double x1, double y1) {
  return FaceQuad({{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}});
}

}  // namespace

TEST_CASE("rgb_to_hsv on primaries and grays") {
  const auto red = rgb_to_hsv(Rgb8{255, 0, 0});
  CHECK(red.h == 0.0);
  CHECK(red.s == 1.0);
  CHECK(red.v == 1.0);

  const auto gray = rgb_to_hsv(Rgb8{128, 128, 128});
  CHECK(gray.h == 0.0);
  CHECK(gray.s == 0.0);
  CHECK(gray.v == doctest::Approx(128.0 / 255.0).epsilon(1e-15));

  const auto black = rgb_to_hsv(Rgb8{0, 0, 0});
  CHECK(black == HsvPixel{0, 0, 0});

  CHECK(rgb_to_hsv(Rgb8{0, 255, 0}).h == 120.0);
  CHECK(rgb_to_hsv(Rgb8{0, 0, 255}).h == 240.0);
}

TEST_CASE("rgb_to_hsv inverts exactly over every 8-bit triple") {
  long mismatches = 0;
  for (int r = 0; r < 256; ++r) {
    for (int g = 0; g < 256; ++g) {
      for (int b = 0; b < 256; ++b) {
        const Rgb8 in{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
        const HsvPixel p = rgb_to_hsv(in);
        if (!(p.h >= 0.0 && p.h < 360.0 && p.s >= 0.0 && p.s <= 1.0 && p.v >= 0.0 && p.v <= 1.0)) ++mismatches;
        const Rgb8 back = testing::hsv_to_rgb8(p);
        if (back.r != in.r || back.g != in.g || back.b != in.b) ++mismatches;
      }
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("FaceQuad rejects degenerate corners") {
  CHECK_NOTHROW(rect_quad(0, 0, 10, 10));
  // Collinear corners.
  CHECK_THROWS_AS(FaceQuad({{{0, 0}, {5, 0}, {10, 0}, {0, 10}}}), DegenerateQuad);
  // Bow-tie: winding flips.
  CHECK_THROWS_AS(FaceQuad({{{0, 0}, {10, 10}, {10, 0}, {0, 10}}}), DegenerateQuad);
  // Concave dart.
  CHECK_THROWS_AS(FaceQuad({{{0, 0}, {10, 0}, {3, 3}, {0, 10}}}), DegenerateQuad);
  // Repeated corner.
  CHECK_THROWS_AS(FaceQuad({{{0, 0}, {0, 0}, {10, 10}, {0, 10}}}), DegenerateQuad);
}

TEST_CASE("rectify_face with the image corners is the identity") {
  Rng rng(7);
  const RgbImage img = random_image(rng, 90, 90);
  const auto face = rectify_face(img, rect_quad(0, 0, 90, 90), 90);
  const auto expected = to_hsv(img);
  int differing = 0;
  double max_dv = 0.0;
  for (int y = 0; y < 90; ++y) {
    for (int x = 0; x < 90; ++x) {
      if (!(face.at(x, y) == expected.at(x, y))) ++differing;
      max_dv = std::max(max_dv, std::abs(face.at(x, y).v - expected.at(x, y).v));
    }
  }
  CHECK(differing == 0);
  CHECK(max_dv <= 1.0 / 255.0);
}

TEST_CASE("rectify_face on an axis-aligned rectangle is a bilinear crop and scale") {
  Rng rng(11);
  const RgbImage img = random_image(rng, 120, 90);
  // 60x60 region scaled down to 30x30: every sample sits between 2x2 pixels.
  const auto face = rectify_face(img, rect_quad(30, 15, 90, 75), 30);
  double worst = 0.0;
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 30; ++x) {
      const int sx = 30 + 2 * x, sy = 15 + 2 * y;
      double rgb[3] = {0, 0, 0};
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const Rgb8 p = img.at(sx + dx, sy + dy);
          rgb[0] += p.r / 4.0;
          rgb[1] += p.g / 4.0;
          rgb[2] += p.b / 4.0;
        }
      }
      const double v = std::max({rgb[0], rgb[1], rgb[2]}) / 255.0;
      worst = std::max(worst, std::abs(face.at(x, y).v - v));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("rectify_face recovers a face warped through a known homography") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::array<Rgb8, 9> colors;
    for (auto& c : colors) {
      c = {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
           static_cast<std::uint8_t>(rng.below(256))};
    }
    const RgbImage source = testing::render_stickers(colors, 150, 4);
    const std::array<Point2, 4> quad{{{100 + rng.uniform(-30, 30), 60 + rng.uniform(-30, 30)},
                                      {420 + rng.uniform(-30, 30), 80 + rng.uniform(-30, 30)},
                                      {400 + rng.uniform(-30, 30), 400 + rng.uniform(-30, 30)},
                                      {120 + rng.uniform(-30, 30), 380 + rng.uniform(-30, 30)}}};
    const RgbImage canvas = testing::warp_into(source, quad, 640, 480);
    const auto face = rectify_face(canvas, FaceQuad(quad), 150);
    const auto truth = to_hsv(source);
    double err = 0.0;
    for (int y = 0; y < 150; ++y) {
      for (int x = 0; x < 150; ++x) err += std::abs(face.at(x, y).v - truth.at(x, y).v);
    }
    CHECK(err / (150.0 * 150.0) <= 0.02);
  }
}

TEST_CASE("rectify_face validates the output size") {
  const RgbImage img(30, 30);
  CHECK_THROWS_AS(rectify_face(img, rect_quad(0, 0, 30, 30), 31), DimensionError);
  CHECK_THROWS_AS(rectify_face(img, rect_quad(0, 0, 30, 30), 0), DimensionError);
}

TEST_CASE("rectify_face clamps samples outside the image") {
  RgbImage img(6, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) img.set(x, y, {200, 10, 10});
  }
  const auto face = rectify_face(img, rect_quad(-20, -20, 30, 30), 9);
  for (const auto& p : face.pixels()) CHECK(p.v == doctest::Approx(200.0 / 255.0));
}

TEST_CASE("split_blocks geometry") {
  const RectifiedFace face(240, 240);
  const auto blocks = split_blocks(face, 0.2);
  for (int i = 0; i < 9; ++i) {
    const auto& b = blocks[static_cast<std::size_t>(i)];
    CHECK(b.width() == 48);
    CHECK(b.height() == 48);
    CHECK(b.x0() == 16 + 80 * (i % 3));
    CHECK(b.y0() == 16 + 80 * (i / 3));
    CHECK(b.pixels().size() == 48u * 48u);
  }

  const auto tiles = split_blocks(face, 0.0);
  std::size_t area = 0;
  for (const auto& b : tiles) {
    CHECK(b.width() == 80);
    area += b.pixels().size();
  }
  CHECK(area == 240u * 240u);

  CHECK_THROWS_AS(split_blocks(face, 0.5), DimensionError);
  CHECK_THROWS_AS(split_blocks(RectifiedFace(240, 241), 0.2), DimensionError);
}

TEST_CASE("split_blocks patches are pairwise disjoint and row-major") {
  for (double margin : {0.0, 0.1, 0.2, 0.33, 0.49}) {
    for (int side : {3, 9, 30, 240}) {
      const auto blocks = split_blocks(RectifiedFace(side, side), margin);
      std::set<std::pair<int, int>> covered;
      std::size_t total = 0;
      for (const auto& b : blocks) {
        CHECK(!b.pixels().empty());
        for (int y = b.y0(); y < b.y0() + b.height(); ++y) {
          for (int x = b.x0(); x < b.x0() + b.width(); ++x) covered.emplace(x, y);
        }
        total += static_cast<std::size_t>(b.width() * b.height());
      }
      CHECK(covered.size() == total);
      CHECK(blocks[1].x0() > blocks[0].x0());
      CHECK(blocks[3].y0() > blocks[0].y0());
    }
  }
}

TEST_CASE("feature_3dhsv picks bin centers of the modes") {
  const BlockPatch uniform(std::vector<HsvPixel>(50, HsvPixel{120, 0.9, 0.8}));
  const auto f = feature_3dhsv(uniform);
  CHECK(f.h == 125.0);
  CHECK(f.s == 0.890625);
  CHECK(f.v == 0.796875);

  std::vector<HsvPixel> mixed(60, HsvPixel{40, 0.5, 0.5});
  mixed.insert(mixed.end(), 40, HsvPixel{200, 0.1, 0.9});
  const auto m = feature_3dhsv(BlockPatch(mixed));
  CHECK(m.h == 45.0);
  CHECK(m.s == 0.515625);
  CHECK(m.v == 0.515625);

  // Equal mass in two bins goes to the lower one.
  std::vector<HsvPixel> tie(10, HsvPixel{300, 0.7, 0.7});
  tie.insert(tie.end(), 10, HsvPixel{5, 0.2, 0.2});
  CHECK(feature_3dhsv(BlockPatch(tie)).h == 5.0);

  // s = v = 1 land in the top bin.
  const auto top = feature_3dhsv(BlockPatch({HsvPixel{0, 1.0, 1.0}}));
  CHECK(top.s == 31.5 / 32.0);
  CHECK(top.v == 31.5 / 32.0);

  CHECK_THROWS_AS(feature_3dhsv(uniform, {0, 32, 32}), DimensionError);
  CHECK_THROWS_AS(BlockPatch(std::vector<HsvPixel>{}), DimensionError);
}

TEST_CASE("feature_3dhsv equals the brute-force histogram oracle") {
  Rng rng(1234);
  for (int i = 0; i < 300; ++i) {
    const auto px = testing::random_patch(rng);
    const HistogramBins bins{1 + static_cast<int>(rng.below(40)), 1 + static_cast<int>(rng.below(40)),
                             1 + static_cast<int>(rng.below(40))};
    CHECK(feature_3dhsv(BlockPatch(px), bins) == testing::brute_3dhsv(px, bins));
  }
}

TEST_CASE("feature_3dhsv is invariant to pixel order") {
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    auto px = testing::random_patch(rng);
    const auto before = feature_3dhsv(BlockPatch(px));
    for (std::size_t k = px.size() - 1; k > 0; --k) std::swap(px[k], px[static_cast<std::size_t>(rng.below(k + 1))]);
    CHECK(feature_3dhsv(BlockPatch(px)) == before);
  }
}

TEST_CASE("standard partition layout") {
  const auto part = UnevenPartition::standard();
  REQUIRE(part.cells().size() == 16);
  CHECK(part.cell_of({200, 0.9, 0.1}) == 0);   // dark
  CHECK(part.cell_of({200, 0.05, 0.9}) == 1);  // white / gray
  CHECK(part.cell_of({0, 0.9, 0.9}) == 2);
  CHECK(part.cell_of({359.9, 0.9, 0.9}) == 15);
  CHECK(part.cell_of({120, 1.0, 1.0}) == 8);  // [90, 150)
}

TEST_CASE("feature_16dhsv mass placement") {
  const auto part = UnevenPartition::standard();
  const auto one = feature_16dhsv(BlockPatch(std::vector<HsvPixel>(30, HsvPixel{120, 0.8, 0.7})), part);
  double sum = 0.0;
  for (double x : one) sum += x;
  CHECK(sum == 1.0);
  CHECK(one[8] == 1.0);

  Rng rng(5);
  std::vector<HsvPixel> dark;
  for (int i = 0; i < 100; ++i) dark.push_back({rng.uniform(0, 360), rng.uniform(), rng.uniform(0, 0.1499)});
  const auto d = feature_16dhsv(BlockPatch(dark), part);
  CHECK(d[0] == 1.0);
}

TEST_CASE("feature_16dhsv equals the brute-force cell oracle and sums to one") {
  Rng rng(4321);
  const auto part = UnevenPartition::standard();
  for (int i = 0; i < 300; ++i) {
    const auto px = testing::random_patch(rng);
    const auto f = feature_16dhsv(BlockPatch(px), part);
    CHECK(f == testing::brute_16dhsv(px, part));
    double sum = 0.0;
    for (double x : f) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("UnevenPartition rejects overlaps and gaps") {
  auto cells = UnevenPartition::standard().cells();

  auto overlap = cells;
  overlap[5].hue.hi += 1.0;
  CHECK_THROWS_AS(UnevenPartition{overlap}, InvalidPartition);

  auto gap = cells;
  gap[5].hue.hi -= 1.0;
  CHECK_THROWS_AS(UnevenPartition{gap}, InvalidPartition);

  auto short_list = cells;
  short_list.pop_back();
  CHECK_THROWS_AS(UnevenPartition{short_list}, InvalidPartition);

  auto inverted = cells;
  inverted[3].value = {0.5, 0.2};
  CHECK_THROWS_AS(UnevenPartition{inverted}, InvalidPartition);

  // A different but valid layout: split the white cell by value instead of
  // the dark cell spanning all saturations.
  auto alt = cells;
  alt[0] = {{0, 360}, {0, 1}, {0, 0.2}};
  alt[1] = {{0, 360}, {0, 0.15}, {0.2, 1}};
  for (std::size_t i = 2; i < alt.size(); ++i) alt[i].value = {0.2, 1};
  CHECK_NOTHROW(UnevenPartition{alt});
}

TEST_CASE("UnevenPartition JSON round trip") {
  const auto part = UnevenPartition::standard();
  CHECK(UnevenPartition::from_json(part.to_json()) == part);
  CHECK_THROWS_AS(UnevenPartition::from_json(nlohmann::json{{"cells", 3}}), InvalidPartition);
}
