#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hgtpp/model.hpp"
#include "hgtpp/sampling.hpp"

namespace hgtpp {

struct EvalConfig {
    std::size_t negatives = 20;
    std::uint64_t seed = 0x5eed;
    bool durations = true;
    std::size_t grid = 256;
    double horizon_factor = 20.0;
    double time_unit = 1.0;  // median interevent gap in the stream's time units
    std::size_t threads = 1;
};

/// Events sharing a timestamp, as [begin, end) index ranges of a time-sorted stream.
std::vector<std::pair<std::size_t, std::size_t>> group_by_time(std::span<const EventRecord> events);

/// Pessimistic 0-based rank: candidates scoring strictly higher plus exact ties.
std::size_t rank_of(double true_score, std::span<const double> negative_scores);

inline double reciprocal_rank(std::size_t rank) { return 1.0 / static_cast<double>(rank + 1); }

/// Bucket for hyperedge size k: 0 → k=2, 1 → 3..4, 2 → 5..8, 3 → k≥9.
std::size_t size_bucket(std::size_t k);
inline constexpr std::array<const char*, 4> kBucketLabels = {"k=2", "3<=k<=4", "5<=k<=8", "k>=9"};

struct EventOutcome {
    std::size_t index = 0;  // position in the evaluated split
    std::size_t size = 0;
    std::size_t rank = 0;
    std::size_t candidates = 1;
    double predicted = std::numeric_limits<double>::quiet_NaN();  // t̂ − t_h^p
    double truth = std::numeric_limits<double>::quiet_NaN();      // t_i − t_h^p
    bool duration_fallback = false;
};

struct BucketMetrics {
    std::size_t count = 0;
    double mrr = 0.0;
    double mae = 0.0;
    std::size_t mae_count = 0;
};

struct Metrics {
    std::size_t count = 0;
    double mrr = 0.0;
    double mae = 0.0;  // in the evaluated stream's time units
    std::size_t mae_count = 0;
    std::size_t duration_fallbacks = 0;
    std::array<BucketMetrics, 4> buckets{};
};

/// Aggregates outcomes; events without a duration prediction are left out of MAE only.
Metrics summarize(std::span<const EventOutcome> outcomes);

struct RankResult {
    std::size_t rank = 0;
    std::size_t candidates = 1;
    double true_score = 0.0;
    std::vector<double> negative_scores;
};

/// Scores the true edge and negatives at time t on `ctx` and ranks the true edge.
RankResult predict_type(StepContext& ctx, const Hyperedge& h, double t, std::span<const Hyperedge> negatives);

/// Expected t̂ − t_h^p for h from the context's state. Rayleigh: closed form; neural:
/// truncated grid expectation; clique-decomposed: mean of per-pair predicted times.
/// Throws std::domain_error when the intensity has no mass on the horizon.
double predict_duration(StepContext& ctx, const Hyperedge& h, const EvalConfig& cfg);

/// Advances `state` through `events` without scoring.
void replay(const AssembledModel& model, StreamState& state, std::span<const EventRecord> events);

struct StreamEvaluation {
    Metrics metrics;
    std::vector<EventOutcome> outcomes;
};

/// Streaming evaluation: every event is scored against fresh negatives from
/// the pre-event state, then consumed as history.
StreamEvaluation evaluate_stream(const AssembledModel& model, StreamState& state, std::span<const EventRecord> events,
                                 const NegativeSampler& sampler, const EvalConfig& cfg);

/// model,MRR,MAE header plus one row; `time_scale` converts MAE to original units.
void write_metrics_csv(std::ostream& os, const std::string& model, const Metrics& m, double time_scale);
void write_bucket_csv(std::ostream& os, const std::string& model, const Metrics& m, double time_scale);
/// Aligned text table, one row per (model, metrics) pair.
void write_metrics_table(std::ostream& os, std::span<const std::pair<std::string, Metrics>> rows, double time_scale);

}  // namespace hgtpp
