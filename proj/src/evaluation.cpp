#include "roadwatch/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "roadwatch/errors.hpp"

namespace roadwatch {

std::string_view match_mode_name(MatchMode m) {
    return m == MatchMode::kEventLevel ? "event_level" : "frame_level";
}

std::optional<MatchMode> parse_match_mode(std::string_view name) {
    if (name == "event_level" || name == "event") return MatchMode::kEventLevel;
    if (name == "frame_level" || name == "frame") return MatchMode::kFrameLevel;
    return std::nullopt;
}

namespace {

double temporal_iou(const TrafficEvent& a, const TrafficEvent& b) {
    const FrameIndex inter_start = std::max(a.start_frame, b.start_frame);
    const FrameIndex inter_end = std::min(a.end_frame, b.end_frame);
    if (inter_end < inter_start) return 0.0;
    const double inter = static_cast<double>(inter_end - inter_start + 1);
    const double len_a = static_cast<double>(a.end_frame - a.start_frame + 1);
    const double len_b = static_cast<double>(b.end_frame - b.start_frame + 1);
    return inter / (len_a + len_b - inter);
}

bool tracks_compatible(const TrafficEvent& a, const TrafficEvent& b) {
    if (a.track_ids.empty() || b.track_ids.empty()) return true;
    return std::any_of(a.track_ids.begin(), a.track_ids.end(),
                       [&](TrackId id) { return b.track_ids.contains(id); });
}

TrackId min_track(const TrafficEvent& e) {
    return e.track_ids.empty() ? std::numeric_limits<TrackId>::max() : *e.track_ids.begin();
}

// Deterministic ranking: confidence desc, then start asc, then track asc.
std::vector<std::size_t> ranked_order(std::span<const TrafficEvent> events) {
    std::vector<std::size_t> order(events.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const TrafficEvent& a = events[i];
        const TrafficEvent& b = events[j];
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.start_frame != b.start_frame) return a.start_frame < b.start_frame;
        return min_track(a) < min_track(b);
    });
    return order;
}

MatchResult match_event_level(std::span<const TrafficEvent> predicted,
                              std::span<const TrafficEvent> truth, double overlap_threshold) {
    MatchResult result;
    result.total_truth = truth.size();
    std::vector<bool> truth_used(truth.size(), false);

    for (std::size_t pi : ranked_order(predicted)) {
        const TrafficEvent& pred = predicted[pi];
        std::optional<std::size_t> best;
        double best_iou = 0.0;
        for (std::size_t ti = 0; ti < truth.size(); ++ti) {
            if (truth_used[ti]) continue;
            const TrafficEvent& gt = truth[ti];
            if (gt.event_type != pred.event_type) continue;
            if (!tracks_compatible(pred, gt)) continue;
            const double iou = temporal_iou(pred, gt);
            if (iou < overlap_threshold) continue;
            const bool better =
                !best || iou > best_iou ||
                (iou == best_iou && (gt.start_frame < truth[*best].start_frame ||
                                     (gt.start_frame == truth[*best].start_frame &&
                                      min_track(gt) < min_track(truth[*best]))));
            if (better) {
                best = ti;
                best_iou = iou;
            }
        }
        if (best) {
            truth_used[*best] = true;
            result.true_positives += 1;
            result.scored.push_back({pred.confidence, true});
        } else {
            result.false_positives += 1;
            result.scored.push_back({pred.confidence, false});
        }
    }
    result.false_negatives = truth.size() - result.true_positives;
    return result;
}

MatchResult match_frame_level(std::span<const TrafficEvent> predicted,
                              std::span<const TrafficEvent> truth) {
    using Key = std::pair<EventType, FrameIndex>;
    std::set<Key> truth_frames;
    for (const TrafficEvent& gt : truth) {
        for (FrameIndex k = gt.start_frame; k <= gt.end_frame; ++k) {
            truth_frames.insert({gt.event_type, k});
        }
    }
    std::map<Key, double> predicted_frames;  // frame -> best confidence
    for (const TrafficEvent& pred : predicted) {
        for (FrameIndex k = pred.start_frame; k <= pred.end_frame; ++k) {
            auto [it, inserted] = predicted_frames.try_emplace({pred.event_type, k},
                                                               pred.confidence);
            if (!inserted) it->second = std::max(it->second, pred.confidence);
        }
    }

    MatchResult result;
    result.total_truth = truth_frames.size();
    std::vector<std::pair<Key, double>> ranked(predicted_frames.begin(), predicted_frames.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [key, confidence] : ranked) {
        const bool hit = truth_frames.contains(key);
        result.scored.push_back({confidence, hit});
        if (hit) {
            result.true_positives += 1;
        } else {
            result.false_positives += 1;
        }
    }
    result.false_negatives = result.total_truth - result.true_positives;
    return result;
}

}  // namespace

MatchResult match_events(std::span<const TrafficEvent> predicted,
                         std::span<const TrafficEvent> truth, MatchMode mode,
                         double overlap_threshold) {
    if (overlap_threshold <= 0.0 || overlap_threshold > 1.0) {
        throw ConfigError("overlap threshold must be in (0, 1]");
    }
    return mode == MatchMode::kEventLevel
               ? match_event_level(predicted, truth, overlap_threshold)
               : match_frame_level(predicted, truth);
}

Rates compute_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
    Rates rates;
    if (tp + fp > 0) {
        rates.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn > 0) {
        rates.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    if (rates.precision + rates.recall > 0.0) {
        rates.f1 = 2.0 * rates.precision * rates.recall / (rates.precision + rates.recall);
    }
    return rates;
}

double average_precision(std::span<const ScoredPrediction> scored, std::uint64_t total_truth) {
    if (total_truth == 0 || scored.empty()) {
        return 0.0;
    }
    std::vector<ScoredPrediction> ranked(scored.begin(), scored.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.confidence > b.confidence;
    });

    const std::size_t n = ranked.size();
    std::vector<double> precision(n), recall(n);
    std::uint64_t tp = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (ranked[k].is_true_positive) ++tp;
        precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
        recall[k] = static_cast<double>(tp) / static_cast<double>(total_truth);
    }
    // Interpolated precision: running max from the right.
    for (std::size_t k = n - 1; k-- > 0;) {
        precision[k] = std::max(precision[k], precision[k + 1]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        ap += (recall[k] - prev_recall) * precision[k];
        prev_recall = recall[k];
    }
    return ap;
}

MetricReport evaluate_events(std::span<const TrafficEvent> predicted,
                             std::span<const TrafficEvent> truth, MatchMode mode,
                             double overlap_threshold) {
    const MatchResult match = match_events(predicted, truth, mode, overlap_threshold);
    const Rates rates = compute_metrics(match.true_positives, match.false_positives,
                                        match.false_negatives);
    MetricReport report;
    report.true_positives = match.true_positives;
    report.false_positives = match.false_positives;
    report.false_negatives = match.false_negatives;
    report.precision = rates.precision;
    report.recall = rates.recall;
    report.f1 = rates.f1;
    report.average_precision = average_precision(match.scored, match.total_truth);
    report.mode = mode;
    return report;
}

std::string MetricReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["mode"] = match_mode_name(mode);
    doc["true_positives"] = true_positives;
    doc["false_positives"] = false_positives;
    doc["false_negatives"] = false_negatives;
    doc["precision"] = precision;
    doc["recall"] = recall;
    doc["f1"] = f1;
    doc["average_precision"] = average_precision;
    return doc.dump(2);
}

std::string MetricReport::to_table() const {
    std::ostringstream out;
    out << "evaluation (" << match_mode_name(mode) << ")\n";
    auto count_row = [&out](std::string_view label, std::uint64_t value) {
        out << "  " << std::left << std::setw(18) << label << std::right << std::setw(10) << value
            << '\n';
    };
    auto rate_row = [&out](std::string_view label, double value) {
        out << "  " << std::left << std::setw(18) << label << std::right << std::setw(10)
            << std::fixed << std::setprecision(3) << value << '\n';
    };
    count_row("true positives", true_positives);
    count_row("false positives", false_positives);
    count_row("false negatives", false_negatives);
    rate_row("precision", precision);
    rate_row("recall", recall);
    rate_row("f1", f1);
    rate_row("average precision", average_precision);
    return out.str();
}

}  // namespace roadwatch
