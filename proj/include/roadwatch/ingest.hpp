#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "roadwatch/types.hpp"

namespace roadwatch {

// Annotation counts gathered while parsing a document, including objects that
// never make it into Frames (2D-only annotations).
struct RawAnnotationCounts {
    std::uint64_t box2d_count = 0;
    std::uint64_t box3d_count = 0;
    std::array<std::uint64_t, kCategoryCount> per_class{};  // all object observations
    std::set<TrackId> tracks;
};

struct DatasetStats {
    std::uint64_t frame_count = 0;
    std::uint64_t box2d_count = 0;
    std::uint64_t box3d_count = 0;
    std::uint64_t track_count = 0;
    std::map<Category, std::uint64_t> per_class;

    std::string to_json() const;
    // Aligned two-column table for terminal output.
    std::string to_table() const;
};

// Result of parsing an OpenLABEL annotation document: the trajectory-relevant
// frames (objects with cuboids only) plus raw counts over everything seen.
struct OpenLabelData {
    std::vector<Frame> frames;
    RawAnnotationCounts counts;
};

// Parses the trajectory-relevant subset of an OpenLABEL JSON document: frame
// entries under "openlabel.frames", per-frame objects with cuboid geometry.
// Cuboids are center-origin; both the 10-value quaternion layout
// [x y z qx qy qz qw l w h] and the 9-value Euler layout [x y z rx ry rz l w h]
// are accepted. Objects without a cuboid are counted but not turned into
// trajectory observations. Numeric object keys become track ids directly;
// non-numeric keys (UUID-style) are interned in encounter order.
OpenLabelData parse_openlabel(const std::string& document);
OpenLabelData parse_openlabel(std::istream& in);
OpenLabelData load_openlabel(const std::string& path);

// Exact dataset statistics over parsed frames. When raw counts from the
// source document are supplied they take precedence for the annotation
// tallies; otherwise every frame object counts as one 3D observation.
DatasetStats compute_stats(std::span<const Frame> frames,
                           const RawAnnotationCounts* raw = nullptr);

// Streaming reader for the line-delimited trajectory format, one frame per
// line. Validates frame invariants incrementally and reports violations as
// StreamError carrying the offending line number.
class TrajectoryReader {
public:
    explicit TrajectoryReader(std::istream& in) : in_(in) {}

    // Next frame, or nullopt at end of stream.
    std::optional<Frame> next();

    std::uint64_t line_number() const { return line_number_; }

private:
    std::istream& in_;
    std::uint64_t line_number_ = 0;
    bool have_prev_ = false;
    FrameIndex prev_index_ = 0;
    double prev_timestamp_ = 0.0;
    double nominal_period_ = 0.0;  // first positive timestamp delta
};

std::vector<Frame> read_trajectory_file(const std::string& path);

// One-line JSON encoding of a frame (no trailing newline). Floats are written
// with round-trip precision, so parse(write(frame)) is bit-exact.
std::string write_trajectory_line(const Frame& frame);
void write_trajectory_stream(std::ostream& out, std::span<const Frame> frames);

// Shared single-frame structural checks (duplicate track ids, dimensions,
// yaw range). Throws StreamError naming the given line on violation.
void validate_frame_objects(const Frame& frame, std::uint64_t line);

}  // namespace roadwatch
