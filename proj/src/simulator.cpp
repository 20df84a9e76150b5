#include "roadwatch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "roadwatch/errors.hpp"

namespace roadwatch {

namespace {

// Fixture road: two driving lanes plus a shoulder, all running along +x.
constexpr double kLaneWidth = 3.5;
constexpr double kLane1Y = 0.0;
constexpr double kLane2Y = 3.5;
constexpr double kShoulderY = 7.0;
// Midline between lane 2 and the shoulder; beyond it the shoulder wins.
constexpr double kShoulderBoundaryY = (kLane2Y + kShoulderY) / 2.0;

constexpr TrackId kBackgroundIdBase = 100;

// Deterministic engine-independent RNG so identical seeds give identical
// streams on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform01() {  // (0, 1]
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double gaussian() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    SplitMix64 rng(a ^ (b * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull));
    return rng.next();
}

}  // namespace

std::string_view scenario_type_name(ScenarioType t) {
    switch (t) {
        case ScenarioType::kFreeFlow: return "free_flow";
        case ScenarioType::kRearEnd: return "rear_end";
        case ScenarioType::kShoulderStop: return "shoulder_stop";
        case ScenarioType::kStandingQueue: return "standing_queue";
    }
    return "free_flow";
}

std::optional<ScenarioType> parse_scenario_type(std::string_view name) {
    if (name == "free_flow") return ScenarioType::kFreeFlow;
    if (name == "rear_end") return ScenarioType::kRearEnd;
    if (name == "shoulder_stop") return ScenarioType::kShoulderStop;
    if (name == "standing_queue") return ScenarioType::kStandingQueue;
    return std::nullopt;
}

void Scenario::validate() const {
    if (frame_rate <= 0.0) throw ConfigError("scenario frame_rate must be positive");
    if (duration <= 0.0) throw ConfigError("scenario duration must be positive");
    if (vehicle_count < 0) throw ConfigError("scenario vehicle_count must be >= 0");
    if (noise_sigma < 0.0) throw ConfigError("scenario noise_sigma must be >= 0");
    if (rear_end.follower_speed <= 0.0 || rear_end.lead_initial_speed < 0.0 ||
        rear_end.lead_deceleration <= 0.0 || rear_end.initial_gap <= 0.0) {
        throw ConfigError("rear-end parameters must be positive");
    }
    if (shoulder.approach_speed <= 0.0 || shoulder.cruise_time < 0.0 ||
        shoulder.shift_duration <= 0.0 || shoulder.deceleration <= 0.0) {
        throw ConfigError("shoulder-stop parameters must be positive");
    }
    if (queue.queue_size < 1 || queue.queue_gap < 0.0) {
        throw ConfigError("queue parameters out of range");
    }
}

std::string Scenario::to_json() const {
    nlohmann::ordered_json doc;
    doc["type"] = scenario_type_name(type);
    doc["seed"] = seed;
    doc["frame_rate"] = frame_rate;
    doc["duration"] = duration;
    doc["vehicle_count"] = vehicle_count;
    doc["noise_sigma"] = noise_sigma;
    switch (type) {
        case ScenarioType::kRearEnd:
            doc["rear_end"] = {{"follower_speed", rear_end.follower_speed},
                               {"lead_initial_speed", rear_end.lead_initial_speed},
                               {"lead_deceleration", rear_end.lead_deceleration},
                               {"initial_gap", rear_end.initial_gap}};
            break;
        case ScenarioType::kShoulderStop:
            doc["shoulder"] = {{"approach_speed", shoulder.approach_speed},
                               {"cruise_time", shoulder.cruise_time},
                               {"shift_duration", shoulder.shift_duration},
                               {"deceleration", shoulder.deceleration}};
            break;
        case ScenarioType::kStandingQueue:
            doc["queue"] = {{"queue_size", queue.queue_size}, {"queue_gap", queue.queue_gap}};
            break;
        case ScenarioType::kFreeFlow:
            break;
    }
    return doc.dump();
}

Scenario Scenario::randomized(ScenarioType type, std::uint64_t seed) {
    SplitMix64 rng(mix(seed, static_cast<std::uint64_t>(type) + 1));
    Scenario sc;
    sc.type = type;
    sc.seed = seed;
    switch (type) {
        case ScenarioType::kFreeFlow:
            sc.duration = 40.0;
            sc.vehicle_count = 6 + static_cast<int>(rng.next() % 5);
            break;
        case ScenarioType::kRearEnd:
            // Envelopes keep the all-rules window at least ~6 frames long at
            // 25 Hz, comfortably above the 3-frame confirmation.
            sc.duration = 60.0;
            sc.vehicle_count = 6;
            sc.rear_end.follower_speed = rng.uniform(20.0, 40.0);
            sc.rear_end.lead_initial_speed = rng.uniform(12.0, 30.0);
            sc.rear_end.lead_deceleration = rng.uniform(2.5, 6.0);
            sc.rear_end.initial_gap = rng.uniform(120.0, 250.0);
            break;
        case ScenarioType::kShoulderStop: {
            sc.duration = 150.0;  // long enough for the breakdown upgrade
            sc.vehicle_count = 5;
            sc.shoulder.approach_speed = rng.uniform(15.0, 30.0);
            sc.shoulder.cruise_time = rng.uniform(1.0, 3.0);
            sc.shoulder.shift_duration = rng.uniform(2.0, 4.0);
            // Keep the vehicle clearly moving until it is fully on the shoulder.
            const double max_decel =
                (sc.shoulder.approach_speed - 3.0) / sc.shoulder.shift_duration;
            sc.shoulder.deceleration = std::min(rng.uniform(2.0, 4.0), max_decel);
            break;
        }
        case ScenarioType::kStandingQueue:
            sc.duration = 30.0;
            sc.vehicle_count = 6;
            sc.queue.queue_size = 3 + static_cast<int>(rng.next() % 4);
            sc.queue.queue_gap = rng.uniform(1.5, 3.0);
            break;
    }
    return sc;
}

void ScenarioEngine::Profile::state_at(double t, Vec2& pos, Vec2& vel) const {
    // Longitudinal: cruise, then constant deceleration to standstill.
    double x = x0;
    double vx = v0;
    if (brake_time >= 0.0 && decel > 0.0 && t > brake_time) {
        const double stop_tau = v0 / decel;
        const double tau = std::min(t - brake_time, stop_tau);
        x += v0 * brake_time + v0 * tau - 0.5 * decel * tau * tau;
        vx = std::max(0.0, v0 - decel * (t - brake_time));
    } else {
        x += v0 * t;
    }
    // Lateral: optional linear shift from y0 to y1.
    double y = y0;
    double vy = 0.0;
    if (lat_duration > 0.0 && t > lat_start) {
        if (t >= lat_start + lat_duration) {
            y = y1;
        } else {
            y = y0 + (y1 - y0) * (t - lat_start) / lat_duration;
            vy = (y1 - y0) / lat_duration;
        }
    }
    pos = {x, y};
    vel = {vx, vy};
}

ScenarioEngine::ScenarioEngine(const Scenario& scenario) : scenario_(scenario) {
    scenario_.validate();
    frame_count_ = static_cast<FrameIndex>(std::llround(scenario_.duration * scenario_.frame_rate));
    if (frame_count_ == 0) frame_count_ = 1;

    SplitMix64 rng(mix(scenario_.seed, 0xF1EEDull));
    auto add_flow = [&](double lane_y, int count, TrackId id_base) {
        // Same speed per lane and generous spacing: such traffic never fires a
        // rule or a standing condition.
        const double speed = rng.uniform(22.0, 32.0);
        double x = lane_y == kLane1Y ? -50.0 : -80.0;
        for (int i = 0; i < count; ++i) {
            Profile p;
            p.id = id_base + static_cast<TrackId>(i);
            p.x0 = x;
            p.v0 = speed;
            p.y0 = p.y1 = lane_y;
            vehicles_.push_back(p);
            x -= 110.0 + rng.uniform(0.0, 60.0);
        }
    };

    switch (scenario_.type) {
        case ScenarioType::kFreeFlow: {
            const int lane1 = (scenario_.vehicle_count + 1) / 2;
            const int lane2 = scenario_.vehicle_count / 2;
            add_flow(kLane1Y, lane1, kBackgroundIdBase);
            add_flow(kLane2Y, lane2, kBackgroundIdBase + 50);
            break;
        }
        case ScenarioType::kRearEnd: {
            const RearEndParams& p = scenario_.rear_end;
            Profile follower;
            follower.id = 1;
            follower.x0 = 0.0;
            follower.v0 = p.follower_speed;
            follower.y0 = follower.y1 = kLane1Y;
            Profile lead;
            lead.id = 2;
            lead.x0 = p.initial_gap + (follower.dims.length + lead.dims.length) / 2.0;
            lead.v0 = p.lead_initial_speed;
            lead.brake_time = 0.0;
            lead.decel = p.lead_deceleration;
            lead.y0 = lead.y1 = kLane1Y;
            vehicles_.push_back(follower);
            vehicles_.push_back(lead);
            add_flow(kLane2Y, std::max(0, scenario_.vehicle_count - 2), kBackgroundIdBase);
            break;
        }
        case ScenarioType::kShoulderStop: {
            const ShoulderStopParams& p = scenario_.shoulder;
            Profile subject;
            subject.id = 1;
            subject.x0 = 0.0;
            subject.v0 = p.approach_speed;
            subject.brake_time = p.cruise_time;
            subject.decel = p.deceleration;
            subject.y0 = kLane2Y;
            subject.y1 = kShoulderY;
            subject.lat_start = p.cruise_time;
            subject.lat_duration = p.shift_duration;
            vehicles_.push_back(subject);
            add_flow(kLane1Y, std::max(0, scenario_.vehicle_count - 1), kBackgroundIdBase);
            break;
        }
        case ScenarioType::kStandingQueue: {
            const QueueParams& p = scenario_.queue;
            double x = 120.0;
            for (int i = 0; i < p.queue_size; ++i) {
                Profile stopped;
                stopped.id = 1 + static_cast<TrackId>(i);
                stopped.x0 = x;
                stopped.v0 = 0.0;
                stopped.y0 = stopped.y1 = kLane1Y;
                vehicles_.push_back(stopped);
                x -= stopped.dims.length + p.queue_gap;
            }
            add_flow(kLane2Y, std::max(0, scenario_.vehicle_count - p.queue_size),
                     kBackgroundIdBase);
            break;
        }
    }

    std::sort(vehicles_.begin(), vehicles_.end(),
              [](const Profile& a, const Profile& b) { return a.id < b.id; });

    // Size the map to cover every vehicle for the whole run.
    double x_min = -150.0;
    double x_max = 300.0;
    for (const Profile& v : vehicles_) {
        Vec2 pos, vel;
        v.state_at(scenario_.duration, pos, vel);
        x_min = std::min(x_min, v.x0 - 50.0);
        x_max = std::max(x_max, pos.x + 200.0);
    }
    std::vector<Lane> lanes;
    lanes.push_back({1, LaneType::kDriving, {{x_min, kLane1Y}, {x_max, kLane1Y}}, kLaneWidth});
    lanes.push_back({2, LaneType::kDriving, {{x_min, kLane2Y}, {x_max, kLane2Y}}, kLaneWidth});
    lanes.push_back({3, LaneType::kShoulder, {{x_min, kShoulderY}, {x_max, kShoulderY}}, kLaneWidth});
    lane_map_ = LaneMap(std::move(lanes));
}

Frame ScenarioEngine::frame_at(FrameIndex k) const {
    Frame frame;
    frame.frame_index = k;
    frame.timestamp = time_at(k);
    frame.sensor_id = "sim";
    frame.objects.reserve(vehicles_.size());
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        const Profile& v = vehicles_[i];
        Vec2 pos, vel;
        v.state_at(frame.timestamp, pos, vel);
        TrackedObject obj;
        obj.track_id = v.id;
        obj.category = v.category;
        obj.dimensions = v.dims;
        obj.position = {pos.x, pos.y, v.dims.height / 2.0};
        obj.yaw = 0.0;
        obj.velocity = vel;
        if (scenario_.noise_sigma > 0.0) {
            SplitMix64 noise(mix(mix(scenario_.seed, k + 1), i + 1));
            obj.position.x += scenario_.noise_sigma * noise.gaussian();
            obj.position.y += scenario_.noise_sigma * noise.gaussian();
        }
        frame.objects.push_back(std::move(obj));
    }
    return frame;
}

GroundTruth ScenarioEngine::ground_truth(const RuleConfig& rules,
                                         const ClassifierConfig& classifier) const {
    rules.validate();
    classifier.validate();
    GroundTruth gt;
    const FrameIndex last_frame = frame_count_ - 1;

    // Standing/breakdown expectation for one vehicle. The condition, once it
    // holds, holds to the end of the stream in every scenario here.
    auto append_standing = [&](const Profile& v, bool on_shoulder, LaneId lane) {
        std::optional<FrameIndex> cond_start;
        for (FrameIndex k = 0; k < frame_count_; ++k) {
            Vec2 pos, vel;
            v.state_at(time_at(k), pos, vel);
            const bool shoulder_side = pos.y > kShoulderBoundaryY;
            if (norm(vel) < classifier.standing_speed && shoulder_side == on_shoulder) {
                cond_start = k;
                break;
            }
        }
        if (!cond_start) return false;
        const double t_cond = time_at(*cond_start);
        if (time_at(last_frame) - t_cond < classifier.standing_duration) {
            return false;  // never held long enough to open
        }
        EventType type = on_shoulder ? EventType::kStandingShoulder : EventType::kStandingActiveLane;
        if (on_shoulder && time_at(last_frame) - t_cond >= classifier.breakdown_duration) {
            type = EventType::kBreakdown;
        }
        gt.events.push_back({type, {v.id}, *cond_start, last_frame, lane});
        return true;
    };

    switch (scenario_.type) {
        case ScenarioType::kFreeFlow:
            break;
        case ScenarioType::kRearEnd: {
            const Profile& follower = vehicles_[0];
            const Profile& lead = vehicles_[1];
            auto& flags = gt.rule_flags[follower.id];
            flags.resize(frame_count_);
            std::optional<FrameIndex> run_start;
            FrameIndex run_last = 0;
            bool run_done = false;
            for (FrameIndex k = 0; k < frame_count_; ++k) {
                const double t = time_at(k);
                Vec2 fp, fv, lp, lv;
                follower.state_at(t, fp, fv);
                lead.state_at(t, lp, lv);
                const double speed_f = norm(fv);
                const double speed_l = norm(lv);
                std::array<bool, 6> f{};
                f[0] = speed_f >= rules.min_speed;
                const double center_gap = lp.x - fp.x;
                if (center_gap > 0.0 && center_gap <= rules.lead_horizon) {
                    const double gap = std::max(
                        0.0,
                        center_gap - (follower.dims.length + lead.dims.length) / 2.0);
                    f[1] = speed_f > speed_l;
                    f[2] = speed_f >= speed_l;  // the lead is the only vehicle ahead
                    f[3] = gap >= rules.distance_threshold;
                    const double dv_kmh = speed_f * 3.6 - speed_l * 3.6;
                    f[4] = gap < (dv_kmh / 30.0) * (dv_kmh / 30.0);
                    const double closing = speed_f - speed_l;
                    const double ttc = closing > 0.0
                                           ? gap / closing
                                           : std::numeric_limits<double>::infinity();
                    f[5] = ttc <= rules.ttc_threshold;
                }
                flags[k] = f;
                const bool all = std::all_of(f.begin(), f.end(), [](bool b) { return b; });
                if (all && !run_done) {
                    if (!run_start) run_start = k;
                    run_last = k;
                } else if (run_start && !run_done) {
                    run_done = true;
                }
            }
            if (run_start && run_last - *run_start + 1 >=
                                 static_cast<FrameIndex>(classifier.confirm_frames)) {
                const FrameIndex end =
                    run_last + static_cast<FrameIndex>(classifier.release_frames) <= last_frame
                        ? run_last
                        : last_frame;
                gt.events.push_back(
                    {EventType::kAccident, {follower.id, lead.id}, *run_start, end, LaneId{1}});
            } else {
                gt.notice = "follower never satisfies all six rules for these parameters";
            }
            append_standing(lead, false, LaneId{1});
            break;
        }
        case ScenarioType::kShoulderStop: {
            if (!append_standing(vehicles_[0], true, LaneId{3})) {
                gt.notice = "vehicle never stands on the shoulder long enough";
            }
            break;
        }
        case ScenarioType::kStandingQueue: {
            bool any = false;
            for (const Profile& v : vehicles_) {
                if (v.id >= kBackgroundIdBase) continue;
                any = append_standing(v, false, LaneId{1}) || any;
            }
            if (!any) {
                gt.notice = "queue never stands long enough";
            }
            break;
        }
    }
    return gt;
}

std::string GroundTruth::to_json() const {
    nlohmann::ordered_json doc;
    doc["notice"] = notice;
    auto& events_json = doc["events"] = nlohmann::ordered_json::array();
    for (const ExpectedEvent& e : events) {
        nlohmann::ordered_json entry;
        entry["type"] = event_type_name(e.type);
        entry["tracks"] = e.track_ids;
        entry["trigger_frame"] = e.trigger_frame;
        entry["last_frame"] = e.last_frame;
        if (e.lane_id) entry["lane"] = *e.lane_id;
        events_json.push_back(std::move(entry));
    }
    auto& flags_json = doc["rule_flags"] = nlohmann::ordered_json::object();
    for (const auto& [track, table] : rule_flags) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : table) {
            std::string bits(6, '0');
            for (int i = 0; i < 6; ++i) {
                if (row[i]) bits[i] = '1';
            }
            rows.push_back(bits);
        }
        flags_json[std::to_string(track)] = std::move(rows);
    }
    return doc.dump();
}

std::vector<TrafficEvent> GroundTruth::as_events(const std::string& sensor_id) const {
    std::vector<TrafficEvent> out;
    out.reserve(events.size());
    for (const ExpectedEvent& e : events) {
        TrafficEvent event;
        event.event_type = e.type;
        event.track_ids = e.track_ids;
        event.start_frame = e.trigger_frame;
        event.end_frame = e.last_frame;
        event.lane_id = e.lane_id;
        event.confidence = 1.0;
        event.sensor_ids = {sensor_id};
        out.push_back(std::move(event));
    }
    return out;
}

SimulationResult generate(const Scenario& scenario, const RuleConfig& rules,
                          const ClassifierConfig& classifier) {
    ScenarioEngine engine(scenario);
    SimulationResult result;
    result.frames.reserve(engine.frame_count());
    for (FrameIndex k = 0; k < engine.frame_count(); ++k) {
        result.frames.push_back(engine.frame_at(k));
    }
    result.truth = engine.ground_truth(rules, classifier);
    result.lane_map = engine.lane_map();
    return result;
}

}  // namespace roadwatch
