#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roadwatch/classifier.hpp"

namespace roadwatch {

enum class MatchMode { kEventLevel, kFrameLevel };

std::string_view match_mode_name(MatchMode m);
std::optional<MatchMode> parse_match_mode(std::string_view name);

struct MetricReport {
    std::uint64_t true_positives = 0;
    std::uint64_t false_positives = 0;
    std::uint64_t false_negatives = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double average_precision = 0.0;
    MatchMode mode = MatchMode::kEventLevel;

    std::string to_json() const;
    std::string to_table() const;
};

// One ranked prediction outcome feeding the average-precision curve.
struct ScoredPrediction {
    double confidence = 0.0;
    bool is_true_positive = false;

    bool operator==(const ScoredPrediction&) const = default;
};

struct MatchResult {
    std::uint64_t true_positives = 0;
    std::uint64_t false_positives = 0;
    std::uint64_t false_negatives = 0;
    std::uint64_t total_truth = 0;
    // Descending confidence with deterministic tie-breaks (earlier start
    // first, then lower track id).
    std::vector<ScoredPrediction> scored;
};

// Matches predicted events against ground truth, per event type.
//
// Event level: greedy one-to-one matching in descending prediction
// confidence; a match needs temporal IoU >= overlap_threshold and, when both
// sides carry track ids, a nonempty track intersection. Frame level: the
// per-frame binary labels implied by the event spans are compared directly.
MatchResult match_events(std::span<const TrafficEvent> predicted,
                         std::span<const TrafficEvent> truth, MatchMode mode,
                         double overlap_threshold = 0.1);

struct Rates {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// precision = TP/(TP+FP), recall = TP/(TP+FN), f1 = 2PR/(P+R); each 0 when
// its denominator is 0.
Rates compute_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn);

// All-point interpolated average precision: sort by descending confidence
// (stable across equal confidences), AP = sum over ranks of
// (R_k - R_{k-1}) * max_{j>=k} P_j. Zero when total_truth is 0.
double average_precision(std::span<const ScoredPrediction> scored, std::uint64_t total_truth);

// Full report for a prediction/truth pair.
MetricReport evaluate_events(std::span<const TrafficEvent> predicted,
                             std::span<const TrafficEvent> truth, MatchMode mode,
                             double overlap_threshold = 0.1);

}  // namespace roadwatch
