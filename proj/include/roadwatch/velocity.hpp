#pragma once

#include <span>
#include <unordered_map>
#include <utility>

#include "roadwatch/geometry.hpp"
#include "roadwatch/types.hpp"

namespace roadwatch {

// One (timestamp, position) sample of a track, seconds / meters.
using TrackSample = std::pair<double, Vec2>;

// Exponentially smoothed finite-difference velocity over a track history:
//   v_1 = (p_1 - p_0) / (t_1 - t_0)
//   v_k = alpha * (p_k - p_{k-1}) / (t_k - t_{k-1}) + (1 - alpha) * v_{k-1}
// Samples with zero time delta are skipped. Requires at least two samples with
// distinct timestamps (throws ValidationError otherwise) and alpha in (0, 1].
Vec2 estimate_velocity(std::span<const TrackSample> history, double alpha);

constexpr double kDefaultVelocityAlpha = 0.5;

// Streaming per-track velocity resolution for frames whose objects may lack
// velocity annotations. Ingested velocities win when present; otherwise the
// smoothed finite difference over the track's running history is used. A track
// seen only once so far reports zero velocity until a second sample arrives.
class VelocityResolver {
public:
    explicit VelocityResolver(double alpha = kDefaultVelocityAlpha) : alpha_(alpha) {}

    // Fills in missing object velocities in place and updates track state.
    void resolve(Frame& frame);

    // Drops state for tracks last seen at or before the given frame index.
    void evict_stale(FrameIndex seen_before);

    std::size_t tracked_count() const { return states_.size(); }

private:
    struct TrackState {
        double last_t = 0.0;
        Vec2 last_pos;
        std::optional<Vec2> last_v;
        FrameIndex last_seen = 0;
    };

    double alpha_;
    std::unordered_map<TrackId, TrackState> states_;
};

}  // namespace roadwatch
