#include "roadwatch/velocity.hpp"

#include <vector>

#include "roadwatch/errors.hpp"

namespace roadwatch {

Vec2 estimate_velocity(std::span<const TrackSample> history, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) {
        throw ValidationError("estimate_velocity: alpha must be in (0, 1]");
    }
    std::optional<Vec2> v;
    std::size_t prev = 0;
    for (std::size_t k = 1; k < history.size(); ++k) {
        const double dt = history[k].first - history[prev].first;
        if (dt == 0.0) {
            continue;  // repeated timestamp, skip sample
        }
        const Vec2 step = history[k].second - history[prev].second;
        const Vec2 diff = {step.x / dt, step.y / dt};
        v = v ? Vec2{alpha * diff.x + (1.0 - alpha) * v->x,
                     alpha * diff.y + (1.0 - alpha) * v->y}
              : diff;
        prev = k;
    }
    if (!v) {
        throw ValidationError(
            "estimate_velocity: need at least 2 samples with distinct timestamps");
    }
    return *v;
}

void VelocityResolver::resolve(Frame& frame) {
    for (TrackedObject& obj : frame.objects) {
        auto [it, inserted] = states_.try_emplace(obj.track_id);
        TrackState& st = it->second;
        const Vec2 pos = obj.position.xy();
        if (!inserted) {
            const double dt = frame.timestamp - st.last_t;
            if (obj.velocity) {
                st.last_v = obj.velocity;  // ingested velocity wins and primes the chain
            } else if (dt > 0.0) {
                const Vec2 step = pos - st.last_pos;
                const Vec2 diff = {step.x / dt, step.y / dt};
                st.last_v = st.last_v ? Vec2{alpha_ * diff.x + (1.0 - alpha_) * st.last_v->x,
                                             alpha_ * diff.y + (1.0 - alpha_) * st.last_v->y}
                                      : diff;
                obj.velocity = st.last_v;
            } else {
                // Zero time delta: skip the sample, keep the previous estimate.
                obj.velocity = st.last_v ? *st.last_v : Vec2{};
            }
            if (dt > 0.0) {
                st.last_t = frame.timestamp;
                st.last_pos = pos;
            }
        } else {
            st.last_t = frame.timestamp;
            st.last_pos = pos;
            if (obj.velocity) {
                st.last_v = obj.velocity;
            } else {
                obj.velocity = Vec2{};  // unknown until a second sample arrives
            }
        }
        st.last_seen = frame.frame_index;
    }
}

void VelocityResolver::evict_stale(FrameIndex seen_before) {
    for (auto it = states_.begin(); it != states_.end();) {
        if (it->second.last_seen < seen_before) {
            it = states_.erase(it);
        } else {
            ++it;
        }
    }
}

}  // namespace roadwatch
