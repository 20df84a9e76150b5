#include <doctest.h>

#include <cmath>
#include <random>

#include "roadwatch/errors.hpp"
#include "roadwatch/lane_map.hpp"
#include "test_util.hpp"

using namespace roadwatch;

namespace {

// Independent dense-sampling oracle: walk every centerline in 1 cm steps and
// pick the nearest sample, then apply the same on-lane / closest-lane /
// lowest-id selection.
struct OracleResult {
    LaneId lane_id;
    double s;
    double distance;
};

std::optional<OracleResult> oracle_assign(const Vec2& p, const LaneMap& map, double step = 0.01) {
    std::optional<OracleResult> best;
    for (const Lane& lane : map.lanes()) {
        double best_dist = std::numeric_limits<double>::infinity();
        double best_s = 0.0;
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < lane.centerline.size(); ++i) {
            const Vec2 a = lane.centerline[i];
            const Vec2 b = lane.centerline[i + 1];
            const double seg_len = distance(a, b);
            const int samples = static_cast<int>(std::ceil(seg_len / step));
            for (int k = 0; k <= samples; ++k) {
                const double t = std::min(1.0, k * step / seg_len);
                const Vec2 q = a + (b - a) * t;
                const double d = distance(p, q);
                if (d < best_dist) {
                    best_dist = d;
                    best_s = cum + t * seg_len;
                }
            }
            cum += seg_len;
        }
        if (best_dist > lane.width / 2.0) continue;
        if (!best || best_dist < best->distance) {
            best = OracleResult{lane.lane_id, best_s, best_dist};
        }
    }
    return best;
}

// Points whose oracle decision sits within eps of an on-lane boundary or of a
// tie between two lanes are ambiguous at sampling resolution; skip those.
bool oracle_decision_clear(const Vec2& p, const LaneMap& map, double eps = 0.002) {
    std::vector<double> dists;
    for (const Lane& lane : map.lanes()) {
        double best = std::numeric_limits<double>::infinity();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < lane.centerline.size(); ++i) {
            const Vec2 a = lane.centerline[i];
            const Vec2 b = lane.centerline[i + 1];
            const double seg_len = distance(a, b);
            const int samples = static_cast<int>(std::ceil(seg_len / 0.01));
            for (int k = 0; k <= samples; ++k) {
                const double t = std::min(1.0, k * 0.01 / seg_len);
                best = std::min(best, distance(p, a + (b - a) * t));
            }
            cum += seg_len;
        }
        if (std::abs(best - lane.width / 2.0) < eps) return false;
        dists.push_back(best);
    }
    std::sort(dists.begin(), dists.end());
    // Points almost on a centerline cannot be resolved at sampling resolution.
    if (!dists.empty() && dists.front() < 0.02) return false;
    return dists.size() < 2 || dists[1] - dists[0] > eps;
}

}  // namespace

TEST_SUITE("lane_map") {

TEST_CASE("point on the first vertex of lane 1 projects to s=0, offset=0") {
    const LaneMap map = testutil::bent_map();
    const auto a = assign_lane({0.0, 0.0}, map);
    REQUIRE(a.has_value());
    CHECK(a->lane_id == 1);
    CHECK(a->s == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a->lateral_offset == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a->on_lane);
}

TEST_CASE("equidistant overlapping lanes tie-break to the lower lane id") {
    std::vector<Lane> lanes;
    lanes.push_back({5, LaneType::kDriving, {{0.0, 2.0}, {100.0, 2.0}}, 4.0});
    lanes.push_back({2, LaneType::kDriving, {{0.0, 0.0}, {100.0, 0.0}}, 4.0});
    const LaneMap map(std::move(lanes));
    // y = 1 is exactly 1 m from both centerlines and inside both widths.
    const auto a = assign_lane({50.0, 1.0}, map);
    REQUIRE(a.has_value());
    CHECK(a->lane_id == 2);
}

TEST_CASE("lateral offset is signed positive to the left of travel") {
    const LaneMap map = testutil::straight_map();
    // Travel along +x: left is +y.
    const auto left = assign_lane({10.0, 0.5}, map);
    const auto right = assign_lane({10.0, -0.5}, map);
    REQUIRE(left.has_value());
    REQUIRE(right.has_value());
    CHECK(left->lateral_offset == doctest::Approx(0.5));
    CHECK(right->lateral_offset == doctest::Approx(-0.5));
}

TEST_CASE("off-road point yields no assignment") {
    const LaneMap map = testutil::straight_map();
    CHECK_FALSE(assign_lane({10.0, 100.0}, map).has_value());
    CHECK_FALSE(assign_lane({10.0, -50.0}, map).has_value());
}

TEST_CASE("empty lane map is rejected") {
    const LaneMap map;
    CHECK_THROWS_AS(assign_lane({0.0, 0.0}, map), ValidationError);
}

TEST_CASE("100 random points match the dense-sampling oracle") {
    const LaneMap map = testutil::bent_map();
    std::mt19937_64 rng(20240901);
    int tested = 0;
    int attempts = 0;
    while (tested < 100 && attempts < 1000) {
        ++attempts;
        const Vec2 p{testutil::uniform(rng, -5.0, 95.0), testutil::uniform(rng, -4.0, 26.0)};
        if (!oracle_decision_clear(p, map)) continue;
        const auto expected = oracle_assign(p, map);
        const auto actual = assign_lane(p, map);
        REQUIRE(expected.has_value() == actual.has_value());
        if (expected) {
            CHECK(actual->lane_id == expected->lane_id);
            CHECK(std::abs(actual->s - expected->s) <= 0.02);
            CHECK(std::abs(std::abs(actual->lateral_offset) - expected->distance) <= 0.001);
        }
        ++tested;
    }
    CHECK(tested == 100);
}

TEST_CASE("assignment is invariant under joint rigid translation") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec2 p{testutil::uniform(rng, 0.0, 90.0), testutil::uniform(rng, -2.0, 24.0)};
        const Vec2 shift{testutil::uniform(rng, -500.0, 500.0),
                         testutil::uniform(rng, -500.0, 500.0)};
        const LaneMap map = testutil::bent_map();
        std::vector<Lane> shifted_lanes;
        for (Lane lane : map.lanes()) {
            for (Vec2& pt : lane.centerline) pt = pt + shift;
            shifted_lanes.push_back(std::move(lane));
        }
        const LaneMap shifted(std::move(shifted_lanes));
        const auto a = assign_lane(p, map);
        const auto b = assign_lane(p + shift, shifted);
        REQUIRE(a.has_value() == b.has_value());
        if (a) {
            CHECK(a->lane_id == b->lane_id);
            CHECK(a->s == doctest::Approx(b->s).epsilon(1e-9));
            CHECK(a->lateral_offset == doctest::Approx(b->lateral_offset).epsilon(1e-9));
        }
    }
}

TEST_CASE("re-projecting the foot point gives zero lateral offset") {
    const LaneMap map = testutil::bent_map();
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec2 p{testutil::uniform(rng, 0.0, 90.0), testutil::uniform(rng, -1.5, 23.5)};
        const auto a = assign_lane(p, map);
        if (!a) continue;
        // Recover the foot point by walking the assigned lane to arc length s.
        const Lane* lane = map.find(a->lane_id);
        REQUIRE(lane != nullptr);
        double remaining = a->s;
        Vec2 foot = lane->centerline.front();
        for (std::size_t i = 0; i + 1 < lane->centerline.size(); ++i) {
            const double seg = distance(lane->centerline[i], lane->centerline[i + 1]);
            if (remaining <= seg) {
                const Vec2 d = lane->centerline[i + 1] - lane->centerline[i];
                foot = lane->centerline[i] + d * (remaining / seg);
                break;
            }
            remaining -= seg;
            foot = lane->centerline[i + 1];
        }
        const auto b = assign_lane(foot, map);
        REQUIRE(b.has_value());
        CHECK(std::abs(b->lateral_offset) <= 1e-6);
    }
}

TEST_CASE("lane map json round-trips") {
    const LaneMap map = testutil::bent_map();
    const LaneMap parsed = LaneMap::from_json(map.to_json());
    REQUIRE(parsed.lanes().size() == map.lanes().size());
    for (std::size_t i = 0; i < map.lanes().size(); ++i) {
        CHECK(parsed.lanes()[i].lane_id == map.lanes()[i].lane_id);
        CHECK(parsed.lanes()[i].lane_type == map.lanes()[i].lane_type);
        CHECK(parsed.lanes()[i].width == map.lanes()[i].width);
        CHECK(parsed.lanes()[i].centerline == map.lanes()[i].centerline);
    }
}

TEST_CASE("invalid lane maps are rejected") {
    CHECK_THROWS_AS(LaneMap({{1, LaneType::kDriving, {{0, 0}, {1, 0}}, 0.0}}), ValidationError);
    CHECK_THROWS_AS(LaneMap({{1, LaneType::kDriving, {{0, 0}}, 3.5}}), ValidationError);
    CHECK_THROWS_AS(LaneMap({{1, LaneType::kDriving, {{0, 0}, {0, 0}}, 3.5}}), ValidationError);
    CHECK_THROWS_AS(LaneMap({{1, LaneType::kDriving, {{0, 0}, {1, 0}}, 3.5},
                             {1, LaneType::kDriving, {{0, 5}, {1, 5}}, 3.5}}),
                    ValidationError);
    CHECK_THROWS_AS(LaneMap::from_json("{\"lanes\": ["), ParseError);
    CHECK_THROWS_AS(LaneMap::from_json("{}"), FormatError);
    CHECK_THROWS_AS(
        LaneMap::from_json(
            "{\"lanes\": [{\"id\": 1, \"type\": \"lava\", \"width\": 3.5, "
            "\"centerline\": [[0,0],[1,0]]}]}"),
        FormatError);
}

}  // TEST_SUITE
