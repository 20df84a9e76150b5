#pragma once

// Independent brute-force re-implementation of the six maneuver rules with an
// all-pairs lead search, used as the reference for the rule engine. Lane
// geometry comes from assign_lane (checked elsewhere against a dense-sampling
// oracle); everything downstream of it is recomputed from scratch here.

#include <array>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "roadwatch/lane_map.hpp"
#include "roadwatch/rules.hpp"
#include "roadwatch/types.hpp"
#include "test_util.hpp"

namespace roadwatch::testutil {

struct OracleEval {
    TrackId track_id = 0;
    std::array<bool, 6> flags{};
    bool accident = false;
    std::optional<TrackId> lead_id;
    double gap = 0.0;
    std::size_t vehicles_ahead = 0;
};

inline std::vector<OracleEval> oracle_evaluate_frame(const Frame& frame, const LaneMap& map,
                                                     const RuleConfig& cfg) {
    struct Placed {
        const TrackedObject* obj;
        LaneId lane;
        double s;
    };
    std::vector<Placed> placed;
    for (const TrackedObject& obj : frame.objects) {
        if (obj.category == Category::kPedestrian || obj.category == Category::kBicycle) continue;
        const auto a = assign_lane(obj.position.xy(), map);
        if (!a) continue;
        placed.push_back({&obj, a->lane_id, a->s});
    }

    std::vector<OracleEval> evals;
    for (const Placed& me : placed) {
        OracleEval eval;
        eval.track_id = me.obj->track_id;
        const double speed = me.obj->velocity ? norm(*me.obj->velocity) : 0.0;
        eval.flags[0] = speed >= cfg.min_speed;

        // All-pairs scan for vehicles ahead in the same lane within the horizon.
        const Placed* lead = nullptr;
        for (const Placed& other : placed) {
            if (other.obj == me.obj) continue;
            if (other.lane != me.lane) continue;
            if (!(other.s > me.s)) continue;
            if (other.s - me.s > cfg.lead_horizon) continue;
            eval.vehicles_ahead += 1;
            if (!lead || other.s < lead->s ||
                (other.s == lead->s && other.obj->track_id < lead->obj->track_id)) {
                lead = &other;
            }
        }
        if (lead) {
            const double lead_speed = lead->obj->velocity ? norm(*lead->obj->velocity) : 0.0;
            const double center_gap = lead->s - me.s;
            const double gap = std::max(
                0.0, center_gap - (me.obj->dimensions.length + lead->obj->dimensions.length) / 2.0);
            eval.lead_id = lead->obj->track_id;
            eval.gap = gap;
            eval.flags[1] = speed > lead_speed;
            bool all_slower_or_equal = true;
            for (const Placed& other : placed) {
                if (other.obj == me.obj || other.lane != me.lane) continue;
                if (!(other.s > me.s) || other.s - me.s > cfg.lead_horizon) continue;
                const double other_speed = other.obj->velocity ? norm(*other.obj->velocity) : 0.0;
                if (!(speed >= other_speed)) all_slower_or_equal = false;
            }
            eval.flags[2] = all_slower_or_equal;
            eval.flags[3] = gap >= cfg.distance_threshold;
            const double dv_kmh = speed * 3.6 - lead_speed * 3.6;
            eval.flags[4] = gap < (dv_kmh / 30.0) * (dv_kmh / 30.0);
            const double closing = speed - lead_speed;
            const double ttc =
                closing > 0.0 ? gap / closing : std::numeric_limits<double>::infinity();
            eval.flags[5] = ttc <= cfg.ttc_threshold;
        }
        eval.accident = eval.flags[0] && eval.flags[1] && eval.flags[2] && eval.flags[3] &&
                        eval.flags[4] && eval.flags[5];
        evals.push_back(eval);
    }
    return evals;
}

// Random frame over the straight 3-lane fixture: up to max_vehicles objects,
// mixed on/off lane, occasional pedestrians and bicycles, varied speeds.
inline Frame random_rule_frame(std::mt19937_64& rng, FrameIndex index, int max_vehicles = 20) {
    Frame frame;
    frame.frame_index = index;
    frame.timestamp = 0.04 * static_cast<double>(index);
    frame.sensor_id = "rng";
    const int count = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_vehicles));
    for (int i = 0; i < count; ++i) {
        const double lane_y = 3.5 * static_cast<double>(rng() % 3);
        const double y = lane_y + uniform(rng, -2.2, 2.2);  // sometimes off-lane
        const double x = uniform(rng, -150.0, 1900.0);
        Category cat = Category::kCar;
        const auto roll = rng() % 10;
        if (roll == 0) cat = Category::kPedestrian;
        if (roll == 1) cat = Category::kBicycle;
        if (roll == 2) cat = Category::kTruck;
        double speed = uniform(rng, 0.0, 45.0);
        if (rng() % 5 == 0) speed = 0.0;
        TrackedObject obj = make_vehicle(static_cast<TrackId>(i + 1), x, y, {speed, 0.0}, cat,
                                         uniform(rng, 3.5, 12.0));
        frame.objects.push_back(std::move(obj));
    }
    return frame;
}

inline RuleConfig random_rule_config(std::mt19937_64& rng) {
    RuleConfig cfg;
    cfg.min_speed = uniform(rng, 1.0, 10.0);
    cfg.distance_threshold = uniform(rng, 0.5, 5.0);
    cfg.ttc_threshold = uniform(rng, 0.5, 3.0);
    cfg.lead_horizon = uniform(rng, 30.0, 300.0);
    return cfg;
}

// Exact comparison of engine output against the oracle; returns the number of
// disagreeing evaluations.
inline int compare_rule_evals(const std::vector<RuleEvaluation>& engine,
                              const std::vector<OracleEval>& oracle) {
    if (engine.size() != oracle.size()) return static_cast<int>(engine.size() + oracle.size());
    int mismatches = 0;
    for (std::size_t i = 0; i < engine.size(); ++i) {
        const RuleEvaluation& e = engine[i];
        const OracleEval& o = oracle[i];
        bool ok = e.track_id == o.track_id && e.rule_flags == o.flags &&
                  e.accident == o.accident && e.vehicles_ahead_considered == o.vehicles_ahead;
        const bool engine_lead = e.lead.has_value();
        ok = ok && engine_lead == o.lead_id.has_value();
        if (engine_lead && o.lead_id) {
            ok = ok && e.lead->lead_id == *o.lead_id && e.lead->gap == o.gap;
        }
        if (!ok) ++mismatches;
    }
    return mismatches;
}

}  // namespace roadwatch::testutil
