#include <doctest.h>

#include <random>

#include "roadwatch/classifier.hpp"
#include "roadwatch/errors.hpp"
#include "test_util.hpp"

using namespace roadwatch;
using namespace roadwatch::testutil;

namespace {

Frame stub_frame(FrameIndex k, double fps = 25.0) {
    Frame frame;
    frame.frame_index = k;
    frame.timestamp = static_cast<double>(k) / fps;
    frame.sensor_id = "cam";
    return frame;
}

RuleEvaluation stub_eval(TrackId id, bool accident, double speed = 20.0, LaneId lane = 1,
                         LaneType lane_type = LaneType::kDriving,
                         std::optional<TrackId> lead_id = std::nullopt) {
    RuleEvaluation eval;
    eval.track_id = id;
    eval.rule_flags = {accident, accident, accident, accident, accident, accident};
    eval.accident = accident;
    if (lead_id) {
        eval.lead = LeadRelation::make(id, *lead_id, 5.0, speed, 0.0);
    }
    eval.speed = speed;
    eval.lane = LaneAssignment{lane, 0.0, 0.0, true};
    eval.lane_type = lane_type;
    return eval;
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("free-flowing traffic produces no events") {
    ScenarioClassifier classifier;
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 500; ++k) {
        std::vector<RuleEvaluation> evals = {stub_eval(1, false, 25.0),
                                             stub_eval(2, false, 27.0)};
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    const auto out = classifier.finalize();
    events.insert(events.end(), out.begin(), out.end());
    CHECK(events.empty());
}

TEST_CASE("two positive frames are not enough to confirm an accident") {
    ScenarioClassifier classifier;
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 200; ++k) {
        const bool positive = k == 10 || k == 11;  // exactly two consecutive
        std::vector<RuleEvaluation> evals = {stub_eval(1, positive)};
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    const auto out = classifier.finalize();
    events.insert(events.end(), out.begin(), out.end());
    CHECK(events.empty());
}

TEST_CASE("three consecutive positives open an accident at the run start") {
    ScenarioClassifier classifier;
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 100; ++k) {
        const bool positive = k >= 10 && k <= 14;
        std::vector<RuleEvaluation> evals = {stub_eval(1, positive, 30.0, 1,
                                                       LaneType::kDriving, TrackId{2})};
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    // Flag last positive at 14; the event closes 25 negative frames later.
    REQUIRE(events.size() == 1);
    const TrafficEvent& event = events[0];
    CHECK(event.event_type == EventType::kAccident);
    CHECK(event.start_frame == 10);
    CHECK(event.end_frame == 14);
    CHECK(event.track_ids == std::set<TrackId>{1, 2});
    CHECK(event.lane_id == LaneId{1});
    CHECK(event.confidence == doctest::Approx(1.0));
    CHECK(event.sensor_ids == std::set<std::string>{"cam"});
    CHECK(classifier.finalize().empty());
}

TEST_CASE("a short dropout inside an open accident keeps one event and lowers confidence") {
    ScenarioClassifier classifier;
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 200; ++k) {
        // Positive 10..14, a 5-frame hole, positive again 20..24.
        const bool positive = (k >= 10 && k <= 14) || (k >= 20 && k <= 24);
        std::vector<RuleEvaluation> evals = {stub_eval(1, positive)};
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    REQUIRE(events.size() == 1);
    CHECK(events[0].start_frame == 10);
    CHECK(events[0].end_frame == 24);
    CHECK(events[0].confidence == doctest::Approx(10.0 / 15.0));
}

TEST_CASE("standing on a driving lane opens after the configured duration") {
    ScenarioClassifier classifier;  // standing_duration 5 s at 25 fps = 125 frames
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 200; ++k) {
        std::vector<RuleEvaluation> evals = {stub_eval(7, false, 0.2)};
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    CHECK(events.empty());  // still open
    const auto final_events = classifier.finalize();
    REQUIRE(final_events.size() == 1);
    CHECK(final_events[0].event_type == EventType::kStandingActiveLane);
    CHECK(final_events[0].start_frame == 0);
    CHECK(final_events[0].end_frame == 199);
    CHECK(final_events[0].track_ids == std::set<TrackId>{7});
}

TEST_CASE("standing closes as soon as the vehicle moves again") {
    ScenarioClassifier classifier;
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 300; ++k) {
        const double speed = k < 200 ? 0.0 : 15.0;
        std::vector<RuleEvaluation> evals = {stub_eval(7, false, speed)};
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    REQUIRE(events.size() == 1);
    CHECK(events[0].event_type == EventType::kStandingActiveLane);
    CHECK(events[0].start_frame == 0);
    CHECK(events[0].end_frame == 199);  // last frame the condition held
    CHECK(classifier.finalize().empty());
}

TEST_CASE("short stops below the duration threshold never open an event") {
    ScenarioClassifier classifier;
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 400; ++k) {
        // 4-second stops separated by movement; never reaches 5 s.
        const double speed = (k / 100) % 2 == 0 ? 0.0 : 10.0;
        std::vector<RuleEvaluation> evals = {stub_eval(7, false, speed)};
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    const auto final_events = classifier.finalize();
    CHECK(events.empty());
    CHECK(final_events.empty());
}

TEST_CASE("prolonged shoulder standing upgrades to a breakdown") {
    ClassifierConfig cfg;
    cfg.breakdown_duration = 10.0;  // shortened for the test
    ScenarioClassifier classifier(cfg);
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 500; ++k) {
        std::vector<RuleEvaluation> evals = {
            stub_eval(3, false, 0.0, 3, LaneType::kShoulder)};
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    const auto final_events = classifier.finalize();
    CHECK(events.empty());
    REQUIRE(final_events.size() == 1);
    CHECK(final_events[0].event_type == EventType::kBreakdown);
    CHECK(final_events[0].start_frame == 0);
    CHECK(final_events[0].lane_id == LaneId{3});
}

TEST_CASE("shoulder standing below the breakdown duration stays a standing event") {
    ScenarioClassifier classifier;  // breakdown at 120 s; run only 10 s
    for (FrameIndex k = 0; k < 250; ++k) {
        std::vector<RuleEvaluation> evals = {
            stub_eval(3, false, 0.0, 3, LaneType::kShoulder)};
        CHECK(classifier.step(stub_frame(k), evals).empty());
    }
    const auto final_events = classifier.finalize();
    REQUIRE(final_events.size() == 1);
    CHECK(final_events[0].event_type == EventType::kStandingShoulder);
}

TEST_CASE("a lane-type change restarts the standing clock") {
    ScenarioClassifier classifier;
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 260; ++k) {
        // 4 s standing on driving lane, then standing on the shoulder.
        const bool driving = k < 100;
        std::vector<RuleEvaluation> evals = {
            stub_eval(3, false, 0.0, driving ? LaneId{1} : LaneId{3},
                      driving ? LaneType::kDriving : LaneType::kShoulder)};
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    const auto final_events = classifier.finalize();
    CHECK(events.empty());
    REQUIRE(final_events.size() == 1);
    CHECK(final_events[0].event_type == EventType::kStandingShoulder);
    CHECK(final_events[0].start_frame == 100);  // clock restarted at the switch
}

TEST_CASE("tracks unseen for stale_frames close their events") {
    ScenarioClassifier classifier;
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 400; ++k) {
        std::vector<RuleEvaluation> evals;
        if (k < 200) {
            evals.push_back(stub_eval(9, false, 0.0));
        }
        // Another track keeps the stream alive after track 9 disappears.
        evals.push_back(stub_eval(1, false, 20.0));
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    REQUIRE(events.size() == 1);
    CHECK(events[0].event_type == EventType::kStandingActiveLane);
    CHECK(events[0].end_frame == 199);  // last frame the track was seen standing
    CHECK(classifier.finalize().empty());
}

TEST_CASE("occlusion shorter than stale_frames does not restart the standing clock") {
    ScenarioClassifier classifier;
    std::vector<TrafficEvent> events;
    for (FrameIndex k = 0; k < 200; ++k) {
        std::vector<RuleEvaluation> evals;
        const bool occluded = k >= 50 && k < 70;
        if (!occluded) evals.push_back(stub_eval(9, false, 0.0));
        evals.push_back(stub_eval(1, false, 20.0));
        const auto out = classifier.step(stub_frame(k), evals);
        events.insert(events.end(), out.begin(), out.end());
    }
    const auto final_events = classifier.finalize();
    REQUIRE(final_events.size() == 1);
    CHECK(final_events[0].start_frame == 0);
}

TEST_CASE("out-of-order frames are rejected") {
    ScenarioClassifier classifier;
    std::vector<RuleEvaluation> no_evals;
    classifier.step(stub_frame(5), no_evals);
    CHECK_THROWS_AS(classifier.step(stub_frame(5), no_evals), OrderingError);
    CHECK_THROWS_AS(classifier.step(stub_frame(3), no_evals), OrderingError);
}

TEST_CASE("no accident event ever comes from fewer than confirm_frames positives") {
    // Adversarial flicker: random accident flags, checked against a direct
    // scan for runs of >= 3 consecutive positives.
    std::mt19937_64 rng(909090);
    for (int trial = 0; trial < 50; ++trial) {
        ScenarioClassifier classifier;
        std::vector<bool> flags;
        std::vector<TrafficEvent> events;
        const int frames = 300;
        for (FrameIndex k = 0; k < static_cast<FrameIndex>(frames); ++k) {
            const bool positive = rng() % 3 == 0;
            flags.push_back(positive);
            std::vector<RuleEvaluation> evals = {stub_eval(1, positive)};
            const auto out = classifier.step(stub_frame(k), evals);
            events.insert(events.end(), out.begin(), out.end());
        }
        const auto final_events = classifier.finalize();
        events.insert(events.end(), final_events.begin(), final_events.end());

        int run = 0;
        bool any_confirmable = false;
        for (bool f : flags) {
            run = f ? run + 1 : 0;
            if (run >= 3) any_confirmable = true;
        }
        if (!any_confirmable) {
            CHECK(events.empty());
        } else {
            CHECK_FALSE(events.empty());
            for (const TrafficEvent& event : events) {
                // Every reported start frame begins a 3-frame positive run.
                REQUIRE(event.start_frame + 2 < flags.size());
                CHECK(flags[event.start_frame]);
                CHECK(flags[event.start_frame + 1]);
                CHECK(flags[event.start_frame + 2]);
            }
        }
    }
}

TEST_CASE("splitting a stream and resuming a copied classifier is lossless") {
    std::mt19937_64 rng(13579);
    for (int trial = 0; trial < 25; ++trial) {
        const int frames = 400;
        const FrameIndex split = 1 + rng() % (frames - 2);

        // Pre-generate a random multi-track evaluation stream.
        std::vector<std::vector<RuleEvaluation>> stream;
        for (int k = 0; k < frames; ++k) {
            std::vector<RuleEvaluation> evals;
            for (TrackId id = 1; id <= 3; ++id) {
                if (rng() % 10 == 0) continue;  // occasional dropout
                const bool positive = rng() % 4 == 0;
                const double speed = rng() % 5 == 0 ? 0.0 : 20.0;
                evals.push_back(stub_eval(id, positive, speed));
            }
            stream.push_back(std::move(evals));
        }

        ScenarioClassifier unsplit;
        std::vector<TrafficEvent> expected;
        for (int k = 0; k < frames; ++k) {
            const auto out = unsplit.step(stub_frame(static_cast<FrameIndex>(k)), stream[k]);
            expected.insert(expected.end(), out.begin(), out.end());
        }
        const auto tail = unsplit.finalize();
        expected.insert(expected.end(), tail.begin(), tail.end());

        ScenarioClassifier first;
        std::vector<TrafficEvent> actual;
        for (FrameIndex k = 0; k < split; ++k) {
            const auto out = first.step(stub_frame(k), stream[k]);
            actual.insert(actual.end(), out.begin(), out.end());
        }
        ScenarioClassifier resumed = first;  // checkpoint: copy the state
        for (FrameIndex k = split; k < static_cast<FrameIndex>(frames); ++k) {
            const auto out = resumed.step(stub_frame(k), stream[k]);
            actual.insert(actual.end(), out.begin(), out.end());
        }
        const auto resumed_tail = resumed.finalize();
        actual.insert(actual.end(), resumed_tail.begin(), resumed_tail.end());

        CHECK(actual == expected);
    }
}

TEST_CASE("invalid configs are rejected") {
    ClassifierConfig cfg;
    cfg.confirm_frames = 0;
    CHECK_THROWS_AS(ScenarioClassifier{cfg}, ConfigError);
    cfg = ClassifierConfig{};
    cfg.standing_duration = -2.0;
    CHECK_THROWS_AS(ScenarioClassifier{cfg}, ConfigError);
}

}  // TEST_SUITE
