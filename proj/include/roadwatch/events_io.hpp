#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "roadwatch/classifier.hpp"

namespace roadwatch {

// One-line JSON encoding of an event:
//   {"type": "...", "tracks": [...], "start": u, "end": u, "lane": u,
//    "confidence": f, "sensors": [...]}
// "lane" is omitted when unknown; "verified"/"rule_support" appear only when
// the hybrid merge has tagged the event.
std::string write_event_line(const TrafficEvent& event);
void write_event_stream(std::ostream& out, std::span<const TrafficEvent> events);

std::vector<TrafficEvent> read_event_stream(std::istream& in);
std::vector<TrafficEvent> read_event_file(const std::string& path);

}  // namespace roadwatch
