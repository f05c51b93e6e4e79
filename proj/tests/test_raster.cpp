#include <gtest/gtest.h>

#include <random>

#include "geofence/config.hpp"
#include "geofence/osm_xml.hpp"
#include "geofence/raster.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace geofence;
using namespace geofence::raster;
using testing_support::polygon_of;
using testing_support::square;

namespace {

const BBox kUnit{0, 0, 1, 1};
const Rgba kRed{255, 0, 0, 255};

}  // namespace

TEST(RasterLayer, RejectsBadExtent) {
  try {
    RasterLayer(10, 10, BBox{0, 0, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidExtent);
  }
  EXPECT_THROW(RasterLayer(0, 10, kUnit), Error);
}

TEST(Rasterize, EmptyInputIsTransparent) {
  const auto layer = rasterize({}, kUnit, 50, 40, kRed);
  EXPECT_EQ(layer.painted_count(), 0u);
  EXPECT_EQ(layer.width(), 50);
  EXPECT_EQ(layer.height(), 40);
}

TEST(Rasterize, CoveringPolygonPaintsEverything) {
  const std::vector<PolygonShape> g{square(-1, -1, 3)};
  const auto layer = rasterize(g, kUnit, 64, 64, kRed);
  EXPECT_EQ(layer.painted_count(), 64u * 64u);
  EXPECT_EQ(layer.at(0, 0), kRed);
}

TEST(Rasterize, WestHalfPlane) {
  const std::vector<PolygonShape> g{polygon_of({{-1, -1}, {0.5, -1}, {0.5, 2}, {-1, 2}, {-1, -1}})};
  const auto layer = rasterize(g, kUnit, 100, 80, kRed);
  for (int row = 0; row < 80; ++row)
    for (int col = 0; col < 100; ++col) ASSERT_EQ(layer.at(col, row).a != 0, col < 50) << col << "," << row;
}

TEST(Rasterize, NorthIsRowZero) {
  const std::vector<PolygonShape> g{polygon_of({{-1, 0.5}, {2, 0.5}, {2, 2}, {-1, 2}, {-1, 0.5}})};
  const auto layer = rasterize(g, kUnit, 10, 10, kRed);
  EXPECT_NE(layer.at(3, 0).a, 0);
  EXPECT_EQ(layer.at(3, 9).a, 0);
}

TEST(Rasterize, PixelCentersMatchPointInPolygonOracle) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    const auto ring = oracle::random_star_polygon(rng, {0.5, 0.5}, 0.1, 0.45, 6 + k);
    const std::vector<PolygonShape> g{polygon_of(ring)};
    const auto layer = rasterize(g, kUnit, 80, 80, kRed);
    for (int row = 0; row < 80; ++row)
      for (int col = 0; col < 80; ++col) {
        const auto c = layer.pixel_center(col, row);
        ASSERT_EQ(layer.at(col, row).a != 0, oracle::winding_number({c.lon, c.lat}, ring) != 0);
      }
  }
}

TEST(Rasterize, AreaFractionWithinTwoPercent) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    const auto ring = oracle::random_star_polygon(rng, {0.5, 0.5}, 0.2, 0.45, 5 + k);
    const std::vector<PolygonShape> g{polygon_of(ring)};
    const auto layer = rasterize(g, kUnit, 500, 500, kRed);
    const double frac = static_cast<double>(layer.painted_count()) / (500.0 * 500.0);
    std::vector<LocalXY> xy;
    for (auto p : ring) xy.push_back({p.x, p.y});
    const double area = std::abs(ring_area_signed(xy));
    EXPECT_NEAR(frac, area, 0.02 * area) << k;
  }
}

TEST(Rasterize, AddingPolygonsNeverErases) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<PolygonShape> g;
  std::size_t prev = 0;
  RasterLayer prev_layer(60, 60, kUnit);
  for (int k = 0; k < 25; ++k) {
    g.push_back(polygon_of(oracle::random_star_polygon(rng, {u(rng), u(rng)}, 0.02, 0.2, 7)));
    const auto layer = rasterize(g, kUnit, 60, 60, kRed);
    ASSERT_GE(layer.painted_count(), prev);
    for (std::size_t i = 0; i < layer.pixels().size(); ++i)
      if (prev_layer.pixels()[i].a != 0) ASSERT_NE(layer.pixels()[i].a, 0);
    prev = layer.painted_count();
    prev_layer = layer;
  }
}

TEST(Blend, HalfRedOverWhite) {
  const auto out = blend_over({255, 255, 255, 255}, {255, 0, 0, 128});
  EXPECT_EQ(out.r, 255);
  EXPECT_NEAR(out.g, 127, 1);
  EXPECT_NEAR(out.b, 127, 1);
  EXPECT_EQ(out.a, 255);
}

TEST(Blend, OpaqueAndTransparentShortcuts) {
  const Rgba base{1, 2, 3, 200};
  EXPECT_EQ(blend_over(base, kRed), kRed);
  EXPECT_EQ(blend_over(base, kTransparent), base);
  EXPECT_EQ(blend_over(kTransparent, Rgba{9, 9, 9, 100}), (Rgba{9, 9, 9, 100}));
}

TEST(Composite, AssociativeForBinaryAlpha) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> uc(0, 255), ua(0, 1);
  auto random_layer = [&] {
    RasterLayer l(32, 32, kUnit);
    for (auto& p : l.pixels())
      p = Rgba{static_cast<std::uint8_t>(uc(rng)), static_cast<std::uint8_t>(uc(rng)),
               static_cast<std::uint8_t>(uc(rng)), static_cast<std::uint8_t>(ua(rng) * 255)};
    return l;
  };
  for (int k = 0; k < 20; ++k) {
    const auto a = random_layer(), b = random_layer(), c = random_layer();
    EXPECT_EQ(composite(composite(a, b), c), composite(a, composite(b, c)));
  }
}

TEST(Composite, ApproximatelyAssociativeForPartialAlpha) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> uc(0, 255), ua(32, 255);
  auto rnd = [&] {
    return Rgba{static_cast<std::uint8_t>(uc(rng)), static_cast<std::uint8_t>(uc(rng)),
                static_cast<std::uint8_t>(uc(rng)), static_cast<std::uint8_t>(ua(rng))};
  };
  for (int k = 0; k < 10000; ++k) {
    const Rgba a = rnd(), b = rnd(), c = rnd();
    const Rgba l = blend_over(blend_over(a, b), c), r = blend_over(a, blend_over(b, c));
    ASSERT_NEAR(l.r, r.r, 3);
    ASSERT_NEAR(l.g, r.g, 3);
    ASSERT_NEAR(l.b, r.b, 3);
    ASSERT_NEAR(l.a, r.a, 1);
  }
}

TEST(Composite, FrameMismatch) {
  try {
    composite(RasterLayer(10, 10, kUnit), RasterLayer(10, 11, kUnit));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LayerMismatch);
  }
  EXPECT_THROW(composite(RasterLayer(10, 10, kUnit), RasterLayer(10, 10, BBox{0, 0, 2, 1})), Error);
}

TEST(ExportPng, SinglePixelRoundTrip) {
  RasterLayer l(1, 1, kUnit);
  l.at(0, 0) = Rgba{10, 20, 30, 40};
  const auto bytes = export_png(l);
  EXPECT_EQ(bytes[0], 0x89);
  EXPECT_EQ(bytes[1], 'P');
  const auto d = oracle::decode_png(bytes);
  EXPECT_EQ(d.width, 1u);
  EXPECT_EQ(d.height, 1u);
  EXPECT_EQ(d.rgba, (std::vector<std::uint8_t>{10, 20, 30, 40}));
}

TEST(ExportPng, RandomPixelsRoundTrip) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> u(0, 255);
  RasterLayer l(64, 48, kUnit);
  for (auto& p : l.pixels())
    p = Rgba{static_cast<std::uint8_t>(u(rng)), static_cast<std::uint8_t>(u(rng)), static_cast<std::uint8_t>(u(rng)),
             static_cast<std::uint8_t>(u(rng))};
  const auto d = oracle::decode_png(export_png(l));
  ASSERT_EQ(d.width, 64u);
  ASSERT_EQ(d.height, 48u);
  for (std::size_t i = 0; i < l.pixels().size(); ++i) {
    const auto& p = l.pixels()[i];
    ASSERT_EQ(d.rgba[4 * i], p.r);
    ASSERT_EQ(d.rgba[4 * i + 1], p.g);
    ASSERT_EQ(d.rgba[4 * i + 2], p.b);
    ASSERT_EQ(d.rgba[4 * i + 3], p.a);
  }
}

TEST(TickLayers, CampusFrameIsDisjointAndDecodes) {
  auto parsed = osm::parse_osm_xml_file(testing_support::data_path("cranfield_synthetic.osm"));
  const FeatureStore store(std::move(parsed.features));
  const auto cfg = parse_construction_file(osm::read_file(testing_support::data_path("fence.cfg"))).config;
  const auto snap = evaluate_tick(store, ObstacleRuleSet::from_config(cfg), cfg,
                                  UavState::make({-0.627, 52.073}, 30, 355, 8));
  const ColorScheme scheme;
  const auto layers = render_tick_layers(snap, store, scheme, cfg);
  EXPECT_GT(layers.obstacles.painted_count(), 0u);
  EXPECT_GT(layers.open_area.painted_count(), 0u);
  for (std::size_t i = 0; i < layers.obstacles.pixels().size(); ++i)
    ASSERT_FALSE(layers.obstacles.pixels()[i].a != 0 && layers.open_area.pixels()[i].a != 0);
  const auto comp = composite_layers(layers, scheme);
  const auto d = oracle::decode_png(export_png(comp));
  EXPECT_EQ(d.width, 500u);
  EXPECT_EQ(d.height, 500u);
  // UAV marker at the frame center
  const std::size_t mid = (250u * 500u + 250u) * 4u;
  EXPECT_EQ(d.rgba[mid], 255);
  EXPECT_EQ(d.rgba[mid + 1], 165);
  EXPECT_EQ(d.rgba[mid + 2], 0);
}
