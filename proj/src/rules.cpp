#include "roadwatch/rules.hpp"

#include <algorithm>
#include <limits>

#include "roadwatch/errors.hpp"

namespace roadwatch {

namespace {

constexpr double kMsToKmh = 3.6;

struct LanePeer {
    const TrackedObject* obj;
    double s;
    double speed;
};

// On-lane vehicles grouped per lane, sorted by arc length, plus the lane
// assignment of every on-lane vehicle in frame order.
struct FrameContext {
    std::vector<std::pair<LaneId, std::vector<LanePeer>>> lanes;
    std::vector<std::pair<const TrackedObject*, LaneAssignment>> assigned;

    const std::vector<LanePeer>* peers(LaneId id) const {
        for (const auto& [lane_id, list] : lanes) {
            if (lane_id == id) return &list;
        }
        return nullptr;
    }
};

FrameContext build_context(const Frame& frame, const LaneMap& lane_map) {
    FrameContext ctx;
    for (const TrackedObject& obj : frame.objects) {
        if (!is_vehicle(obj.category)) continue;
        const auto assignment = assign_lane(obj.position.xy(), lane_map);
        if (!assignment) continue;
        ctx.assigned.emplace_back(&obj, *assignment);
        auto it = std::find_if(ctx.lanes.begin(), ctx.lanes.end(),
                               [&](const auto& e) { return e.first == assignment->lane_id; });
        if (it == ctx.lanes.end()) {
            ctx.lanes.emplace_back(assignment->lane_id, std::vector<LanePeer>{});
            it = std::prev(ctx.lanes.end());
        }
        it->second.push_back({&obj, assignment->s, obj.speed()});
    }
    for (auto& [lane_id, peers] : ctx.lanes) {
        std::sort(peers.begin(), peers.end(), [](const LanePeer& a, const LanePeer& b) {
            if (a.s != b.s) return a.s < b.s;
            return a.obj->track_id < b.obj->track_id;
        });
    }
    return ctx;
}

// Vehicles strictly ahead of `s` in the peer list, within the horizon.
std::span<const LanePeer> peers_ahead(const std::vector<LanePeer>& peers, double s,
                                      double horizon) {
    auto first = std::upper_bound(peers.begin(), peers.end(), s,
                                  [](double value, const LanePeer& p) { return value < p.s; });
    auto last = first;
    while (last != peers.end() && last->s - s <= horizon) ++last;
    if (first == last) return {};
    return {&*first, static_cast<std::size_t>(last - first)};
}

std::optional<LeadRelation> lead_from_context(const TrackedObject& vehicle,
                                              const LaneAssignment& assignment,
                                              const FrameContext& ctx,
                                              const RuleConfig& config) {
    const auto* peers = ctx.peers(assignment.lane_id);
    if (!peers) return std::nullopt;
    const auto ahead = peers_ahead(*peers, assignment.s, config.lead_horizon);
    if (ahead.empty()) return std::nullopt;

    const LanePeer& lead = ahead.front();
    const double center_gap = lead.s - assignment.s;
    const double gap = std::max(
        0.0, center_gap - (vehicle.dimensions.length + lead.obj->dimensions.length) / 2.0);
    return LeadRelation::make(vehicle.track_id, lead.obj->track_id, gap, vehicle.speed(),
                              lead.speed);
}

RuleEvaluation evaluate_with_context(const TrackedObject& vehicle,
                                     const LaneAssignment& assignment, const FrameContext& ctx,
                                     const LaneMap& lane_map, const RuleConfig& config) {
    RuleEvaluation eval;
    eval.track_id = vehicle.track_id;
    const double speed = vehicle.speed();
    eval.speed = speed;
    eval.lane = assignment;
    if (const Lane* lane = lane_map.find(assignment.lane_id)) {
        eval.lane_type = lane->lane_type;
    }
    eval.rule_flags[0] = speed >= config.min_speed;

    const auto* peers = ctx.peers(assignment.lane_id);
    const auto ahead =
        peers ? peers_ahead(*peers, assignment.s, config.lead_horizon) : std::span<const LanePeer>{};
    eval.vehicles_ahead_considered = ahead.size();
    eval.lead = lead_from_context(vehicle, assignment, ctx, config);
    if (eval.lead) {
        const LeadRelation& lead = *eval.lead;
        eval.rule_flags[1] = speed > lead.lead_speed;
        eval.rule_flags[2] = std::all_of(ahead.begin(), ahead.end(),
                                         [&](const LanePeer& p) { return speed >= p.speed; });
        eval.rule_flags[3] = lead.gap >= config.distance_threshold;
        const double dv_kmh = speed * kMsToKmh - lead.lead_speed * kMsToKmh;
        const double braking_bound = (dv_kmh / 30.0) * (dv_kmh / 30.0);
        eval.rule_flags[4] = lead.gap < braking_bound;
        eval.rule_flags[5] = lead.ttc <= config.ttc_threshold;
    }
    eval.accident = std::all_of(eval.rule_flags.begin(), eval.rule_flags.end(),
                                [](bool f) { return f; });
    return eval;
}

}  // namespace

void RuleConfig::validate() const {
    if (min_speed <= 0.0 || distance_threshold <= 0.0 || ttc_threshold <= 0.0 ||
        lead_horizon <= 0.0) {
        throw ConfigError("rule config values must be strictly positive");
    }
}

LeadRelation LeadRelation::make(TrackId follower, TrackId lead, double gap, double follower_speed,
                                double lead_speed) {
    LeadRelation rel;
    rel.follower_id = follower;
    rel.lead_id = lead;
    rel.gap = gap;
    rel.follower_speed = follower_speed;
    rel.lead_speed = lead_speed;
    rel.closing_speed = follower_speed - lead_speed;
    rel.ttc = rel.closing_speed > 0.0 ? gap / rel.closing_speed
                                      : std::numeric_limits<double>::infinity();
    return rel;
}

std::optional<LeadRelation> find_lead(const TrackedObject& vehicle, const Frame& frame,
                                      const LaneMap& lane_map, const RuleConfig& config) {
    config.validate();
    const auto assignment = assign_lane(vehicle.position.xy(), lane_map);
    if (!assignment) return std::nullopt;
    const FrameContext ctx = build_context(frame, lane_map);
    return lead_from_context(vehicle, *assignment, ctx, config);
}

RuleEvaluation evaluate_rules(const TrackedObject& vehicle, const Frame& frame,
                              const LaneMap& lane_map, const RuleConfig& config) {
    config.validate();
    const auto assignment = assign_lane(vehicle.position.xy(), lane_map);
    if (!assignment) {
        RuleEvaluation eval;
        eval.track_id = vehicle.track_id;
        eval.speed = vehicle.speed();
        eval.rule_flags[0] = eval.speed >= config.min_speed;
        return eval;
    }
    const FrameContext ctx = build_context(frame, lane_map);
    return evaluate_with_context(vehicle, *assignment, ctx, lane_map, config);
}

std::vector<RuleEvaluation> evaluate_frame(const Frame& frame, const LaneMap& lane_map,
                                           const RuleConfig& config) {
    config.validate();
    const FrameContext ctx = build_context(frame, lane_map);
    std::vector<RuleEvaluation> evals;
    evals.reserve(ctx.assigned.size());
    for (const auto& [obj, assignment] : ctx.assigned) {
        evals.push_back(evaluate_with_context(*obj, assignment, ctx, lane_map, config));
    }
    return evals;
}

}  // namespace roadwatch
