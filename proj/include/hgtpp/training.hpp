#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hgtpp/evaluation.hpp"
#include "hgtpp/model.hpp"
#include "hgtpp/sampling.hpp"

namespace hgtpp {

struct TrainConfig {
    double lr = 0.001;
    std::size_t segment = 128;      // M_seg, events per segment
    std::size_t negatives = 20;     // 𝓑
    std::size_t mc_samples = 20;    // N
    std::size_t epochs = 100;
    std::uint64_t seed = 0;
    bool best_by_validation = true;
    bool validate = true;
    EvalConfig validation{.negatives = 20, .seed = 0x5eed, .durations = true, .grid = 64};
};

/// Throws std::invalid_argument on a zero segment, fewer than 2 MC samples, or a negative lr.
void check_train_config(const TrainConfig& cfg);

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Floor on t − t_h^p inside the Rayleigh log term.
inline constexpr double kMinRayleighElapsed = 1e-9;

struct SegmentLoss {
    Var total;
    std::vector<double> positive;  // −log λ_{h_i}(t_i) per event
    std::vector<double> survival;  // Σ over the true edge and negatives per event
    std::vector<double> terms;     // positive + survival, summed into total in this order
    std::size_t negatives_drawn = 0;
};

/// Loss of one segment starting from `state`; advances the state to the
/// segment end. `t_prev` for the first event is state.last_event_time.
SegmentLoss segment_loss(const AssembledModel& model, StreamState& state, Tape& tape,
                         std::span<const EventRecord> segment, const NegativeSampler* sampler,
                         std::size_t negatives, std::size_t mc_samples, Rng& rng);

/// Adam with decay rates 0.9 / 0.999 and ε = 1e-8.
class Adam {
public:
    Adam(std::vector<Parameter*> params, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step();
    std::size_t steps() const noexcept { return t_; }

private:
    std::vector<Parameter*> params_;
    std::vector<Tensor> m_, v_;
    double lr_, beta1_, beta2_, eps_;
    std::size_t t_ = 0;
};

/// Consecutive event-group-aligned segments of about `length` events.
std::vector<std::pair<std::size_t, std::size_t>> make_segments(std::span<const EventRecord> events,
                                                               std::size_t length);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;  // mean per event
    double val_mrr = 0.0;
    double val_mae = 0.0;
};

struct TrainResult {
    std::vector<EpochRecord> trace;
    std::size_t best_epoch = 0;  // 0: initial parameters
    double best_val_mrr = -1.0;
};

/// Epochs × segments of truncated backpropagation; keeps the parameters of the
/// best validation MRR when enabled. `origin` is the stream's first timestamp.
TrainResult train(AssembledModel& model, std::span<const EventRecord> train_events,
                  std::span<const EventRecord> val_events, double origin, const TrainConfig& cfg,
                  const NegativeSampler& sampler, const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Validation/test protocol: replay `history` from a cold state, then evaluate `events`.
StreamEvaluation evaluate_after(const AssembledModel& model, double origin, std::span<const EventRecord> history,
                                std::span<const EventRecord> events, const NegativeSampler& sampler,
                                const EvalConfig& cfg);

}  // namespace hgtpp
