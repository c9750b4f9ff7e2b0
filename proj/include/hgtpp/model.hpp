#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hgtpp/autodiff.hpp"
#include "hgtpp/dynamics.hpp"
#include "hgtpp/encoders.hpp"
#include "hgtpp/event.hpp"

namespace hgtpp {

enum class IntensityFamily { neural, rayleigh };

/// Feature flags of one named model variant.
struct ModelConfig {
    std::string name;
    bool temporal_drift = false;
    bool history_aggregation = false;
    bool interaction_update = false;
    bool hyperedge = true;  // false: clique-decomposed pairwise intensities
    bool bipartite = false;
    IntensityFamily family = IntensityFamily::neural;
    std::size_t d = 64;
    std::size_t history_window = 128;

    DynamicsFlags dynamics_flags() const { return {temporal_drift, history_aggregation, interaction_update}; }
};

class UnknownModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// RHE, RDHE, DE-drift, DE, DHE-drift, DHE, HGDHE-hist, HGDHE, BDE, BDHE, HGBDHE.
const std::vector<std::string>& model_names();
std::string model_names_joined();

/// Flags for `name` exactly as listed in the model property table.
ModelConfig model_config(std::string_view name, std::size_t d = 64, std::size_t history_window = 128);

/// Throws std::invalid_argument if the flags disagree with the named row.
void validate_config(const ModelConfig& config);

struct SideState {
    std::vector<NodeState> nodes;
    HistoryWindow window;
    std::vector<Var> live;  // differentiable v(t_v^p⁺) on the current tape, if any
};

/// Mutable per-stream state: node tables and history windows for each side.
struct StreamState {
    std::array<SideState, 2> sides;
    double last_event_time = 0.0;

    SideState& side(Side s) { return sides[static_cast<std::size_t>(s)]; }
    const SideState& side(Side s) const { return sides[static_cast<std::size_t>(s)]; }

    /// Drops every tape reference; values are kept. Used between training segments.
    void detach();
};

class StepContext;

/// One assembled model variant: parameters plus the stage/encoder wiring.
class AssembledModel {
public:
    static AssembledModel assemble(const ModelConfig& config, std::size_t num_left, std::size_t num_right,
                                   std::uint64_t seed);

    AssembledModel(AssembledModel&&) = default;
    AssembledModel& operator=(AssembledModel&&) = default;

    const ModelConfig& config() const noexcept { return config_; }
    ParameterStore& parameters() noexcept { return params_; }
    const ParameterStore& parameters() const noexcept { return params_; }
    std::size_t num_nodes(Side s) const noexcept { return num_nodes_[static_cast<std::size_t>(s)]; }
    const DynamicsParams& dynamics(Side s) const { return dynamics_[static_cast<std::size_t>(s)]; }
    const std::optional<HomogeneousEncoderParams>& homogeneous_encoder() const noexcept { return homogeneous_; }
    const std::optional<BipartiteEncoderParams>& bipartite_encoder() const noexcept { return bipartite_; }

    /// Cold-start state: every t_v^p = origin, empty windows.
    StreamState initial_state(double origin = 0.0) const;

    /// Throws if `h` has the wrong arity or references unknown nodes.
    void check_hyperedge(const Hyperedge& h) const;

private:
    AssembledModel() = default;

    ModelConfig config_;
    ParameterStore params_;
    std::array<std::size_t, 2> num_nodes_{0, 0};
    std::array<DynamicsParams, 2> dynamics_;
    std::optional<HomogeneousEncoderParams> homogeneous_;
    std::optional<BipartiteEncoderParams> bipartite_;
};

/// Dynamic embeddings produced while scoring a hyperedge, keyed by member.
struct MemberDynamic {
    Side side;
    NodeId node;
    Var dynamic;
};

/// Evaluates a model against a fixed stream state (all events before `now`)
/// on one tape. Caches embeddings and encodings; use one context per event
/// group and discard it after advance().
class StepContext {
public:
    StepContext(const AssembledModel& model, StreamState& state, Tape& tape);

    Tape& tape() noexcept { return tape_; }
    const AssembledModel& model() const noexcept { return model_; }

    /// v(t_v^p⁺): live tape value, cold-start row, or detached snapshot.
    Var post_embedding(Side side, NodeId node);
    /// History aggregate v^s(t_{i−1}) for `node` (zero if the stage is off or the node is absent).
    Var history(Side side, NodeId node);
    /// v(t) with the enabled stages. Rayleigh-family models use elapsed 0 (piecewise constant).
    Var embedding(Side side, NodeId node, double t);

    /// t_h^p = max over members of t_v^p.
    double anchor(const Hyperedge& h) const;

    /// λ_h(t) > 0.
    Var intensity(const Hyperedge& h, double t);
    /// Rayleigh weight α = f(embeddings) at the hyperedge anchor; rayleigh family only.
    Var rayleigh_weight(const Hyperedge& h);
    /// Pairwise intensities λ_{a,b}(t) for clique-decomposed models, with their pair anchors.
    std::vector<std::pair<Var, double>> pairwise_intensities(const Hyperedge& h, double t);

    /// ∫ λ_h over [t_prev, t_i]: closed form for the rayleigh family, otherwise the
    /// sorted-sample estimator Σ_{j≥2} (s_j − s_{j−1}) λ_h(s_j).
    Var survival_term(const Hyperedge& h, std::span<const double> samples, double t_prev, double t_i);

    /// Applies the interaction update for all events sharing timestamp `t`
    /// (concurrent mean), advances t_v^p and pushes the events into the windows.
    void advance(std::span<const EventRecord> group, double t);

private:
    struct Encoded {
        Var intensity;
        std::vector<MemberDynamic> dynamics;
    };
    const Encoded& encode(const Hyperedge& h, double t);
    std::vector<Var> member_embeddings(Side side, const std::vector<NodeId>& nodes, double t);
    Var base(Side side, NodeId node);
    const DynamicsParams& dyn(Side s) const { return model_.dynamics(s); }
    void check_node(Side side, NodeId node) const;

    const AssembledModel& model_;
    StreamState& state_;
    Tape& tape_;
    bool advanced_ = false;

    std::array<std::optional<HistoryAggregate>, 2> history_;
    std::array<std::unordered_map<NodeId, Var>, 2> post_cache_;
    std::array<std::unordered_map<NodeId, Var>, 2> base_cache_;
    std::map<std::tuple<int, NodeId, double>, Var> embedding_cache_;
    std::map<std::pair<Hyperedge, double>, Encoded> encode_cache_;
};

}  // namespace hgtpp
