#pragma once

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hgtpp/autodiff.hpp"
#include "hgtpp/event.hpp"
#include "hgtpp/rng.hpp"

namespace hgtpp {

struct DynamicsFlags {
    bool temporal_drift = false;
    bool history_aggregation = false;
    bool interaction_update = false;

    bool any() const noexcept { return temporal_drift || history_aggregation || interaction_update; }
};

/// Weights of the node-embedding dynamics for one node universe. Blocks of
/// disabled stages are absent (null), never zero-filled.
struct DynamicsParams {
    std::size_t dim = 0;
    Parameter* initial = nullptr;  // |V|×d cold-start embeddings

    Parameter* w0 = nullptr;  // present whenever any stage is enabled
    Parameter* b0 = nullptr;

    Parameter* w1 = nullptr;  // temporal drift
    Parameter* w4 = nullptr;
    Parameter* omega = nullptr;
    Parameter* theta = nullptr;

    Parameter* w2 = nullptr;  // history aggregation
    Parameter* hgnn = nullptr;

    Parameter* w3 = nullptr;  // interaction update
    Parameter* w5 = nullptr;
    Parameter* b1 = nullptr;

    bool temporal_drift() const noexcept { return w1 != nullptr; }
    bool history_aggregation() const noexcept { return w2 != nullptr; }
    bool interaction_update() const noexcept { return w3 != nullptr; }
    bool static_embeddings() const noexcept { return w0 == nullptr; }
};

/// Registers the enabled blocks under `prefix` (e.g. "left.W0").
DynamicsParams make_dynamics(ParameterStore& store, const std::string& prefix, std::size_t num_nodes, std::size_t d,
                             DynamicsFlags flags, Rng& rng);

/// Per-node snapshot just after its previous interaction.
struct NodeState {
    NodeId id = 0;
    Tensor embedding;        // v(t_v^p⁺); the cold-start row until the first update
    double last_time = 0.0;  // t_v^p
    bool updated = false;    // embedding produced by an interaction update
};

/// The last `capacity` events (one side's node sets) in time order.
class HistoryWindow {
public:
    struct Entry {
        std::vector<NodeId> nodes;
        double time;
    };

    explicit HistoryWindow(std::size_t capacity = 128) : capacity_(capacity) {}

    void push(std::vector<NodeId> nodes, double time);
    std::size_t size() const noexcept { return events_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return events_.empty(); }
    const std::deque<Entry>& events() const noexcept { return events_; }

    /// Dense |V| × size() incidence matrix, H(v, j) = 1 iff v ∈ event j.
    Tensor incidence(std::size_t num_nodes) const;

private:
    std::size_t capacity_;
    std::deque<Entry> events_;
};

/// Φ(dt) = cos(ω·dt + θ).
Var time_features(Var omega, Var theta, double dt);

/// Output of one normalized hypergraph convolution over the window.
class HistoryAggregate {
public:
    HistoryAggregate() = default;
    HistoryAggregate(std::vector<std::pair<NodeId, Var>> rows, Var zero) : rows_(std::move(rows)), zero_(zero) {}

    /// v^s for `node`; the zero vector for nodes absent from the window.
    Var at(NodeId node) const;
    const std::vector<std::pair<NodeId, Var>>& rows() const noexcept { return rows_; }

private:
    std::vector<std::pair<NodeId, Var>> rows_;  // sorted by node
    Var zero_;
};

/// X_out = D_v^{-1/2} H D_e^{-1} Hᵀ D_v^{-1/2} X Θ with unit hyperedge weights, X rows
/// given by `post_embedding`. Only nodes present in the window are materialized.
HistoryAggregate history_aggregate(Tape& tape, const HistoryWindow& window,
                                   const std::function<Var(NodeId)>& post_embedding, Var hgnn_weight,
                                   std::size_t dim);

/// W₀ v(t_v^p⁺) + W₂ v^s + b₀: the time-independent part of the embedding at any t.
Var embedding_base(Tape& tape, const DynamicsParams& params, Var post, const Var* history);

/// tanh(base + W₁ Φ(elapsed)); the drift term is skipped when drift is disabled.
Var embedding_from_base(Tape& tape, const DynamicsParams& params, Var base, double elapsed);

/// v(t) = tanh(W₀ v(t_v^p⁺) + W₁ Φ(t − t_v^p) + W₂ v^s + b₀), with disabled terms omitted.
Var embedding_at(Tape& tape, const DynamicsParams& params, Var post, const Var* history, double last_time, double t);

/// v(t⁺) = tanh(W₃ v(t_v^p⁺) + W₄ Φ(elapsed) + W₅ mean(dynamic) + b₁).
Var interaction_update(Tape& tape, const DynamicsParams& params, Var post, std::span<const Var> dynamic,
                       double elapsed);

}  // namespace hgtpp
