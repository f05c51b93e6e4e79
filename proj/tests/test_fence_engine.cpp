#include <gtest/gtest.h>

#include <random>

#include "geofence/config.hpp"
#include "geofence/fence_engine.hpp"
#include "geofence/osm_xml.hpp"
#include "geofence/session.hpp"
#include "test_support.hpp"

using namespace geofence;
using testing_support::square;

namespace {

MapFeature feature(std::int64_t id, Category cat, std::optional<std::string> ftype, PolygonShape poly) {
  MapFeature f;
  f.osm_id = id;
  f.category = cat;
  f.ftype = std::move(ftype);
  f.geometry = std::move(poly);
  return f;
}

UavState uav_at(double lat, double lon, double heading, double v, double h = 30) {
  return UavState::make({lon, lat}, h, heading, v);
}

const FeatureStore& campus() {
  static const FeatureStore store = [] {
    auto r = osm::parse_osm_xml_file(testing_support::data_path("cranfield_synthetic.osm"));
    return FeatureStore(std::move(r.features));
  }();
  return store;
}

FenceConfig campus_config() {
  return parse_construction_file(osm::read_file(testing_support::data_path("fence.cfg"))).config;
}

}  // namespace

TEST(ObstacleRules, CategoriesFiltersAndWhitelist) {
  FenceConfig cfg;
  cfg.obstacle_type_filters.push_back({"type", "hospital"});
  cfg.whitelist_ids = {3};
  const auto rules = ObstacleRuleSet::from_config(cfg);
  EXPECT_TRUE(rules.is_obstacle(feature(1, Category::Building, "yes", square(0, 0, 1))));
  EXPECT_FALSE(rules.is_obstacle(feature(2, Category::Natural, "wood", square(0, 0, 1))));
  EXPECT_FALSE(rules.is_obstacle(feature(3, Category::Building, "yes", square(0, 0, 1))));
  EXPECT_TRUE(rules.is_obstacle(feature(4, Category::Landuse, "hospital", square(0, 0, 1))));
}

TEST(ObstacleRules, FixtureClassificationMatchesTagScan) {
  auto cfg = campus_config();
  cfg.obstacle_type_filters.push_back({"type", "grass"});
  const auto rules = ObstacleRuleSet::from_config(cfg);
  std::set<std::int64_t> want;
  for (const auto& [id, f] : campus().features()) {
    const bool whitelisted = cfg.whitelist_ids.count(id) > 0;
    const bool by_category = f.category == Category::Building;
    const bool by_type = f.ftype && *f.ftype == "grass";
    if (!whitelisted && (by_category || by_type)) want.insert(id);
  }
  EXPECT_EQ(classify_obstacles(campus(), rules), want);
  EXPECT_TRUE(want.count(3000010));
  EXPECT_FALSE(want.count(3000004));
}

TEST(ObstacleRules, HeightRule) {
  ObstacleRuleSet rules;
  rules.categories = {Category::Building};
  rules.height_rule = true;
  auto low = feature(1, Category::Building, "yes", square(0, 0, 1));
  EXPECT_TRUE(rules.constrains(low, 30));   // default height 30
  EXPECT_FALSE(rules.constrains(low, 31));
  low.height_m = 45;
  EXPECT_TRUE(rules.constrains(low, 44));
  rules.height_rule = false;
  EXPECT_TRUE(rules.constrains(low, 1000));
}

TEST(ConeTest, Examples) {
  EXPECT_TRUE(cone_test(355, 0, 10));
  EXPECT_TRUE(cone_test(355, 350, 10));
  EXPECT_FALSE(cone_test(355, 5, 10));  // exactly on the edge
  EXPECT_FALSE(cone_test(324.4, 307.3, 10));
  EXPECT_NEAR(circular_diff(324.4, 307.3), 17.1, 1e-9);
  EXPECT_TRUE(cone_test(0, 359.5, 10));
  EXPECT_FALSE(cone_test(90, 270, 10));
}

TEST(ConeTest, RotationInvariant) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 360), ucone(1, 80);
  for (int i = 0; i < 10000; ++i) {
    const double h = u(rng), b = u(rng), cone = ucone(rng), rot = u(rng);
    const bool base = cone_test(h, b, cone);
    const double diff = circular_diff(h, b);
    if (std::abs(diff - cone) < 1e-9) continue;
    ASSERT_EQ(cone_test(normalize_heading(h + rot), normalize_heading(b + rot), cone), base);
  }
}

TEST(Eta, Examples) {
  EXPECT_DOUBLE_EQ(*eta_to_object(2000, 8), 250.0);
  EXPECT_FALSE(eta_to_object(100, 0));
  EXPECT_THROW(eta_to_object(-1, 8), Error);
}

TEST(BufferFromSpeed, Examples) {
  const crs::LocalProjection eq({0, 0});
  const auto s20 = buffer_radius_from_speed(128.6, 20, eq);
  EXPECT_NEAR(s20.radius_m, 2572, 1e-9);
  EXPECT_NEAR(s20.radius_deg, s20.radius_m / 111320.0, 1e-12);
  EXPECT_NEAR(buffer_radius_from_speed(128.6, 15, eq).radius_m, 1929, 1e-9);
  EXPECT_NEAR(buffer_radius_from_speed(128.6, 15, eq).radius_m, 1950, 0.02 * 1950);
  EXPECT_EQ(buffer_radius_from_speed(0, 10, eq).radius_m, 0.0);
  EXPECT_THROW(buffer_radius_from_speed(-1, 10, eq), Error);
  EXPECT_THROW(buffer_radius_from_speed(5, 0, eq), Error);
}

TEST(BufferFromSpeed, GrowsTheTickBufferWhenEnabled) {
  FenceConfig cfg;
  cfg.speed_window_s = 20;
  const auto uav = uav_at(52.073, -0.627, 0, 128.6);
  const crs::LocalProjection proj(uav.position);
  EXPECT_GT(effective_buffer_radius_deg(cfg, uav, proj), cfg.buffer_radius_deg);
  const auto slow = uav_at(52.073, -0.627, 0, 1);
  EXPECT_EQ(effective_buffer_radius_deg(cfg, slow, proj), cfg.buffer_radius_deg);
}

TEST(Formatting, ExactText) {
  EXPECT_EQ(format_situation_line({3000001, 245.04, 357.46}),
            "Object OSM ID: 3000001 at degree:357.5 with distance of 245.0 meter");
  EXPECT_EQ(format_situation_line({-4000001, 0.0, 0.0}), "Object OSM ID: -4000001 at degree:0.0 with distance of 0.0 meter");
  EXPECT_EQ(format_advisory_message(357.46), "Make diversion to avoid going 357.5 degree");
}

TEST(Advise, SeventeenDegreesOffHeadingGivesNone) {
  const std::vector<SituationEntry> sit{{1, 300, 307.3}};
  const auto adv = advise(sit, uav_at(52.073, -0.627, 324.4, 8), FenceConfig{});
  EXPECT_EQ(adv.level, AlertLevel::None);
  EXPECT_TRUE(adv.messages.empty());
  EXPECT_FALSE(adv.eta_s);
}

TEST(Advise, CautionWithEta) {
  const std::vector<SituationEntry> sit{{7, 2000, 2.0}};
  const auto adv = advise(sit, uav_at(52.073, -0.627, 0, 8), FenceConfig{});
  EXPECT_EQ(adv.level, AlertLevel::Caution);
  EXPECT_DOUBLE_EQ(*adv.eta_s, 250.0);
  EXPECT_EQ(adv.triggering_ids, std::vector<std::int64_t>{7});
  EXPECT_EQ(adv.messages, std::vector<std::string>{"Make diversion to avoid going 2.0 degree"});
  EXPECT_FALSE(adv.alert_event);
}

TEST(Advise, StopWithinSeparation) {
  const std::vector<SituationEntry> sit{{7, 30, 0.0}};
  const auto adv = advise(sit, uav_at(52.073, -0.627, 0, 8), FenceConfig{});
  EXPECT_EQ(adv.level, AlertLevel::Stop);
  EXPECT_TRUE(adv.alert_event);
  // 20 m/s * 5 s = 100 m stop distance
  const std::vector<SituationEntry> far{{7, 90, 0.0}};
  EXPECT_EQ(advise(far, uav_at(52.073, -0.627, 0, 20), FenceConfig{}).level, AlertLevel::Stop);
  EXPECT_EQ(advise(far, uav_at(52.073, -0.627, 0, 8), FenceConfig{}).level, AlertLevel::Caution);
}

TEST(Advise, LevelNeverDropsAsObjectGetsCloser) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(0, 3000), uv(0, 40);
  for (int i = 0; i < 5000; ++i) {
    double a = ud(rng), b = ud(rng);
    if (a > b) std::swap(a, b);
    const auto uav = uav_at(52, 0, 0, uv(rng));
    const std::vector<SituationEntry> near{{1, a, 0.0}}, far{{1, b, 0.0}};
    ASSERT_GE(static_cast<int>(advise(near, uav, FenceConfig{}).level),
              static_cast<int>(advise(far, uav, FenceConfig{}).level));
  }
}

TEST(SituationReport, SortedByDistanceThenId) {
  const GeoPoint c{-0.627, 52.073};
  const crs::LocalProjection proj(c);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  std::vector<MapFeature> fs;
  for (int i = 0; i < 60; ++i) {
    const double x = c.lon + u(rng), y = c.lat + u(rng);
    fs.push_back(feature(1000 - i, Category::Building, "yes", square(x, y, 0.0002)));
  }
  // two identical squares: equal distance, tie broken by id
  fs.push_back(feature(5, Category::Building, "yes", square(c.lon + 0.003, c.lat, 0.0002)));
  fs.push_back(feature(4, Category::Building, "yes", square(c.lon + 0.003, c.lat, 0.0002)));
  std::vector<const MapFeature*> ptrs;
  for (const auto& f : fs) ptrs.push_back(&f);
  const auto uav = UavState::make(c, 30, 0, 5);
  const auto rep = situation_report(ptrs, uav, proj);
  ASSERT_EQ(rep.size(), fs.size());
  for (std::size_t i = 1; i < rep.size(); ++i) {
    ASSERT_TRUE(rep[i - 1].distance_m < rep[i].distance_m ||
                (rep[i - 1].distance_m == rep[i].distance_m && rep[i - 1].osm_id < rep[i].osm_id));
  }
  const auto it = std::find_if(rep.begin(), rep.end(), [](const auto& e) { return e.osm_id == 4; });
  ASSERT_NE(it + 1, rep.end());
  EXPECT_EQ((it + 1)->osm_id, 5);
}

TEST(SituationReport, UavOnCentroidUsesHeading) {
  const auto sq = feature(1, Category::Building, "yes", square(0, 0, 0.0002));
  const GeoPoint c = geometry_centroid(sq.geometry);
  const MapFeature* ptr = &sq;
  const auto rep = situation_report(std::span(&ptr, 1), UavState::make(c, 0, 123, 1), crs::LocalProjection(c));
  ASSERT_EQ(rep.size(), 1u);
  EXPECT_EQ(rep[0].distance_m, 0.0);
  EXPECT_NEAR(rep[0].bearing_deg, 123.0, 1e-9);
}

TEST(EvaluateTick, CampusTestOneRaisesAdvisory) {
  const auto cfg = campus_config();
  const auto snap = evaluate_tick(campus(), ObstacleRuleSet::from_config(cfg), cfg, uav_at(52.073, -0.627, 355, 8));
  EXPECT_FALSE(snap.situation.empty());
  EXPECT_NE(snap.advisory.level, AlertLevel::None);
  EXPECT_NE(std::find(snap.advisory.triggering_ids.begin(), snap.advisory.triggering_ids.end(), 3000001),
            snap.advisory.triggering_ids.end());
  EXPECT_EQ(std::count(snap.obstacles_in_zone.begin(), snap.obstacles_in_zone.end(), 3000004), 0);
  for (const auto& e : snap.situation) EXPECT_TRUE(within_buffer(campus().at(e.osm_id).geometry, snap.zone));
}

TEST(EvaluateTick, CampusTestTwoIsClear) {
  const auto cfg = campus_config();
  const auto snap = evaluate_tick(campus(), ObstacleRuleSet::from_config(cfg), cfg, uav_at(52.080, -0.625, 355, 10));
  EXPECT_EQ(snap.advisory.level, AlertLevel::None);
  EXPECT_TRUE(snap.advisory.messages.empty());
}

TEST(EvaluateTick, Deterministic) {
  const auto cfg = campus_config();
  const auto rules = ObstacleRuleSet::from_config(cfg);
  const auto uav = uav_at(52.073, -0.627, 355, 8);
  const auto a = evaluate_tick(campus(), rules, cfg, uav);
  for (int i = 0; i < 3; ++i) {
    const auto b = evaluate_tick(campus(), rules, cfg, uav);
    EXPECT_EQ(a.situation, b.situation);
    EXPECT_EQ(a.advisory, b.advisory);
  }
}

TEST(EvaluateTick, WhitelistedIdsNeverReported) {
  const auto corpus = make_synthetic_corpus(2000, {-0.627, 52.073}, 0.02, 5);
  const FeatureStore store(corpus);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-0.015, 0.015), uh(0, 360);
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    FenceConfig cfg;
    for (int k = 0; k < 200; ++k) cfg.whitelist_ids.insert(corpus[pick(rng)].osm_id);
    const auto snap = evaluate_tick(store, ObstacleRuleSet::from_config(cfg), cfg,
                                    uav_at(52.073 + u(rng), -0.627 + u(rng), uh(rng), 8));
    for (auto id : snap.obstacles_in_zone) ASSERT_FALSE(cfg.whitelist_ids.count(id));
    for (const auto& e : snap.situation) ASSERT_FALSE(cfg.whitelist_ids.count(e.osm_id));
    for (auto id : snap.advisory.triggering_ids) ASSERT_FALSE(cfg.whitelist_ids.count(id));
  }
}
