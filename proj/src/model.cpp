#include "hgtpp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hgtpp {

namespace {

struct Row {
    const char* name;
    bool drift, history, update, hyperedge, bipartite;
    IntensityFamily family;
};

constexpr IntensityFamily kNeural = IntensityFamily::neural;
constexpr IntensityFamily kRayleigh = IntensityFamily::rayleigh;

// model property table
constexpr Row kRows[] = {
    {"RHE", false, false, false, true, false, kRayleigh},
    {"RDHE", true, false, true, true, false, kRayleigh},
    {"DE-drift", true, false, false, false, false, kNeural},
    {"DE", true, false, true, false, false, kNeural},
    {"DHE-drift", true, false, false, true, false, kNeural},
    {"DHE", true, false, true, true, false, kNeural},
    {"HGDHE-hist", true, true, false, true, false, kNeural},
    {"HGDHE", true, true, true, true, false, kNeural},
    {"BDE", true, false, true, false, true, kNeural},
    {"BDHE", true, false, true, true, true, kNeural},
    {"HGBDHE", true, true, true, true, true, kNeural},
};

const Row* find_row(std::string_view name) {
    for (const auto& r : kRows) {
        if (name == r.name) return &r;
    }
    return nullptr;
}

}  // namespace

const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& r : kRows) out.emplace_back(r.name);
        return out;
    }();
    return names;
}

std::string model_names_joined() {
    std::string out;
    for (const auto& n : model_names()) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

ModelConfig model_config(std::string_view name, std::size_t d, std::size_t history_window) {
    const Row* r = find_row(name);
    if (r == nullptr) {
        throw UnknownModelError("unknown model '" + std::string(name) + "'; valid names: " + model_names_joined());
    }
    ModelConfig c;
    c.name = r->name;
    c.temporal_drift = r->drift;
    c.history_aggregation = r->history;
    c.interaction_update = r->update;
    c.hyperedge = r->hyperedge;
    c.bipartite = r->bipartite;
    c.family = r->family;
    c.d = d;
    c.history_window = history_window;
    return c;
}

void validate_config(const ModelConfig& c) {
    const Row* r = find_row(c.name);
    if (r == nullptr) {
        throw UnknownModelError("unknown model '" + c.name + "'; valid names: " + model_names_joined());
    }
    if (c.temporal_drift != r->drift || c.history_aggregation != r->history || c.interaction_update != r->update ||
        c.hyperedge != r->hyperedge || c.bipartite != r->bipartite || c.family != r->family) {
        throw std::invalid_argument("model '" + c.name + "': feature flags do not match its definition");
    }
    if (c.d == 0) throw std::invalid_argument("embedding size must be positive");
}

void StreamState::detach() {
    for (auto& s : sides) std::fill(s.live.begin(), s.live.end(), Var{});
}

// ------------------------------------------------------------- assembly

AssembledModel AssembledModel::assemble(const ModelConfig& config, std::size_t num_left, std::size_t num_right,
                                        std::uint64_t seed) {
    validate_config(config);
    if (num_left + (config.bipartite ? num_right : 0) < 2) {
        throw std::invalid_argument("assemble: need at least 2 nodes");
    }
    if (config.bipartite && (num_left == 0 || num_right == 0)) {
        throw std::invalid_argument("assemble: bipartite models need nodes on both sides");
    }
    AssembledModel m;
    m.config_ = config;
    m.num_nodes_ = {num_left, config.bipartite ? num_right : 0};
    Rng rng(seed);
    const auto flags = config.dynamics_flags();
    if (config.bipartite) {
        m.dynamics_[0] = make_dynamics(m.params_, "left.", num_left, config.d, flags, rng);
        m.dynamics_[1] = make_dynamics(m.params_, "right.", num_right, config.d, flags, rng);
        if (config.hyperedge) m.bipartite_ = make_bipartite_encoder(m.params_, "enc.", config.d, rng);
    } else {
        m.dynamics_[0] = make_dynamics(m.params_, "", num_left, config.d, flags, rng);
        if (config.hyperedge) m.homogeneous_ = make_homogeneous_encoder(m.params_, "enc.", config.d, rng);
    }
    return m;
}

StreamState AssembledModel::initial_state(double origin) const {
    StreamState s;
    s.last_event_time = origin;
    for (std::size_t side = 0; side < 2; ++side) {
        auto& st = s.sides[side];
        st.window = HistoryWindow(config_.history_aggregation ? config_.history_window : 0);
        const std::size_t n = num_nodes_[side];
        st.nodes.resize(n);
        st.live.assign(n, Var{});
        if (n == 0) continue;
        const Tensor& init = dynamics_[side].initial->value;
        for (std::size_t v = 0; v < n; ++v) {
            auto& ns = st.nodes[v];
            ns.id = static_cast<NodeId>(v);
            ns.embedding = Tensor(Shape::vector(config_.d));
            for (std::size_t j = 0; j < config_.d; ++j) ns.embedding[j] = init.at(v, j);
            ns.last_time = origin;
        }
    }
    return s;
}

void AssembledModel::check_hyperedge(const Hyperedge& h) const {
    if (config_.bipartite) {
        if (h.left.empty() || h.right.empty()) {
            throw std::invalid_argument("bipartite model needs nonempty left and right node sets: " + to_string(h));
        }
    } else {
        if (!h.right.empty()) throw std::invalid_argument("homogeneous model given a bipartite hyperedge");
        if (h.left.size() < 2) {
            throw std::invalid_argument("homogeneous hyperedge needs at least 2 nodes: " + to_string(h));
        }
    }
    for (std::size_t s = 0; s < 2; ++s) {
        for (NodeId v : h.side(static_cast<Side>(s))) {
            if (v >= num_nodes_[s]) throw std::out_of_range("unknown node id " + std::to_string(v));
        }
    }
}

// ---------------------------------------------------------- step context

StepContext::StepContext(const AssembledModel& model, StreamState& state, Tape& tape)
    : model_(model), state_(state), tape_(tape) {}

void StepContext::check_node(Side side, NodeId node) const {
    if (node >= model_.num_nodes(side)) throw std::out_of_range("unknown node id " + std::to_string(node));
}

Var StepContext::post_embedding(Side side, NodeId node) {
    check_node(side, node);
    const auto s = static_cast<std::size_t>(side);
    if (auto it = post_cache_[s].find(node); it != post_cache_[s].end()) return it->second;
    const SideState& st = state_.side(side);
    Var out;
    if (st.live[node].valid() && st.live[node].tape == &tape_) {
        out = st.live[node];
    } else if (!st.nodes[node].updated) {
        Parameter& init = *dyn(side).initial;
        if (tape_.recording()) {
            out = ad::row(tape_.parameter(init), node);
        } else {
            Tensor r(Shape::vector(init.value.cols()));
            for (std::size_t j = 0; j < r.size(); ++j) r[j] = init.value.at(node, j);
            out = tape_.constant(std::move(r));
        }
    } else {
        out = tape_.constant(st.nodes[node].embedding);
    }
    post_cache_[s].emplace(node, out);
    return out;
}

Var StepContext::history(Side side, NodeId node) {
    const auto s = static_cast<std::size_t>(side);
    const DynamicsParams& p = dyn(side);
    if (!history_[s]) {
        if (!p.history_aggregation()) {
            history_[s] = HistoryAggregate({}, tape_.constant(Tensor(Shape::vector(p.dim))));
        } else {
            history_[s] = history_aggregate(
                tape_, state_.side(side).window, [&](NodeId v) { return post_embedding(side, v); },
                tape_.parameter(*p.hgnn), p.dim);
        }
    }
    return history_[s]->at(node);
}

Var StepContext::base(Side side, NodeId node) {
    const auto s = static_cast<std::size_t>(side);
    if (auto it = base_cache_[s].find(node); it != base_cache_[s].end()) return it->second;
    const DynamicsParams& p = dyn(side);
    Var post = post_embedding(side, node);
    Var b;
    if (p.history_aggregation()) {
        Var vs = history(side, node);
        b = embedding_base(tape_, p, post, &vs);
    } else {
        b = embedding_base(tape_, p, post, nullptr);
    }
    base_cache_[s].emplace(node, b);
    return b;
}

Var StepContext::embedding(Side side, NodeId node, double t) {
    check_node(side, node);
    const DynamicsParams& p = dyn(side);
    if (p.static_embeddings()) return post_embedding(side, node);
    const double last = state_.side(side).nodes[node].last_time;
    double elapsed = t - last;
    if (model_.config().family == IntensityFamily::rayleigh) {
        elapsed = 0.0;
    } else if (elapsed < 0.0) {
        throw std::invalid_argument("embedding: query time precedes the node's last interaction");
    }
    // drift-free embeddings do not depend on t
    const double key_time = p.temporal_drift() ? elapsed : 0.0;
    const auto key = std::make_tuple(static_cast<int>(side), node, key_time);
    if (auto it = embedding_cache_.find(key); it != embedding_cache_.end()) return it->second;
    Var v = embedding_from_base(tape_, p, base(side, node), elapsed);
    embedding_cache_.emplace(key, v);
    return v;
}

std::vector<Var> StepContext::member_embeddings(Side side, const std::vector<NodeId>& nodes, double t) {
    std::vector<Var> out;
    out.reserve(nodes.size());
    for (NodeId v : nodes) out.push_back(embedding(side, v, t));
    return out;
}

double StepContext::anchor(const Hyperedge& h) const {
    double a = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < 2; ++s) {
        for (NodeId v : h.side(static_cast<Side>(s))) a = std::max(a, state_.sides[s].nodes.at(v).last_time);
    }
    return a;
}

Var StepContext::rayleigh_weight(const Hyperedge& h) {
    if (model_.config().family != IntensityFamily::rayleigh) {
        throw std::logic_error("rayleigh_weight: model is not in the Rayleigh family");
    }
    model_.check_hyperedge(h);
    const double a = anchor(h);
    auto embs = member_embeddings(Side::left, h.left, a);
    return encode_homogeneous(*model_.homogeneous_encoder(), embs).score;
}

std::vector<std::pair<Var, double>> StepContext::pairwise_intensities(const Hyperedge& h, double t) {
    model_.check_hyperedge(h);
    std::vector<std::pair<Var, double>> out;
    auto last = [&](Side s, NodeId v) { return state_.side(s).nodes[v].last_time; };
    if (model_.config().bipartite) {
        for (NodeId a : h.left) {
            for (NodeId b : h.right) {
                out.emplace_back(encode_pairwise(embedding(Side::left, a, t), embedding(Side::right, b, t)),
                                 std::max(last(Side::left, a), last(Side::right, b)));
            }
        }
    } else {
        for (auto [a, b] : clique_decompose(h.left)) {
            out.emplace_back(encode_pairwise(embedding(Side::left, a, t), embedding(Side::left, b, t)),
                             std::max(last(Side::left, a), last(Side::left, b)));
        }
    }
    return out;
}

const StepContext::Encoded& StepContext::encode(const Hyperedge& h, double t) {
    auto key = std::make_pair(h, t);
    if (auto it = encode_cache_.find(key); it != encode_cache_.end()) return it->second;
    model_.check_hyperedge(h);
    const ModelConfig& cfg = model_.config();
    Encoded enc;
    if (!cfg.hyperedge) {
        // clique-decomposed: product of pairwise intensities, partner means as dynamic embeddings
        auto pairs = pairwise_intensities(h, t);
        Var prod = pairs[0].first;
        for (std::size_t i = 1; i < pairs.size(); ++i) prod = ad::mul(prod, pairs[i].first);
        enc.intensity = prod;
        if (cfg.bipartite) {
            auto le = member_embeddings(Side::left, h.left, t);
            auto re = member_embeddings(Side::right, h.right, t);
            Var lm = re.size() == 1 ? re[0] : ad::mean(re);
            Var rm = le.size() == 1 ? le[0] : ad::mean(le);
            for (NodeId v : h.left) enc.dynamics.push_back({Side::left, v, lm});
            for (NodeId v : h.right) enc.dynamics.push_back({Side::right, v, rm});
        } else {
            auto embs = member_embeddings(Side::left, h.left, t);
            for (std::size_t i = 0; i < embs.size(); ++i) {
                std::vector<Var> others;
                for (std::size_t j = 0; j < embs.size(); ++j) {
                    if (j != i) others.push_back(embs[j]);
                }
                enc.dynamics.push_back({Side::left, h.left[i], others.size() == 1 ? others[0] : ad::mean(others)});
            }
        }
    } else if (cfg.bipartite) {
        auto le = member_embeddings(Side::left, h.left, t);
        auto re = member_embeddings(Side::right, h.right, t);
        EncodeResult r = encode_bipartite(*model_.bipartite_encoder(), le, re);
        enc.intensity = r.score;
        for (std::size_t i = 0; i < h.left.size(); ++i) enc.dynamics.push_back({Side::left, h.left[i], r.dynamic[i]});
        for (std::size_t i = 0; i < h.right.size(); ++i) {
            enc.dynamics.push_back({Side::right, h.right[i], r.dynamic_right[i]});
        }
    } else {
        auto embs = member_embeddings(Side::left, h.left, t);
        EncodeResult r = encode_homogeneous(*model_.homogeneous_encoder(), embs);
        if (cfg.family == IntensityFamily::rayleigh) {
            const double elapsed = std::max(0.0, t - anchor(h));
            enc.intensity = ad::scale(r.score, elapsed);
        } else {
            enc.intensity = r.score;
        }
        for (std::size_t i = 0; i < h.left.size(); ++i) enc.dynamics.push_back({Side::left, h.left[i], r.dynamic[i]});
    }
    return encode_cache_.emplace(std::move(key), std::move(enc)).first->second;
}

Var StepContext::intensity(const Hyperedge& h, double t) { return encode(h, t).intensity; }

Var StepContext::survival_term(const Hyperedge& h, std::span<const double> samples, double t_prev, double t_i) {
    if (model_.config().family == IntensityFamily::rayleigh) {
        const double tp = anchor(h);
        const double b = std::max(0.0, t_i - tp);
        const double a = std::max(0.0, t_prev - tp);
        return ad::scale(rayleigh_weight(h), 0.5 * (b * b - a * a));
    }
    if (samples.size() < 2) return tape_.constant(0.0);
    std::vector<Var> lams;
    Tensor widths(Shape::vector(samples.size() - 1));
    lams.reserve(samples.size() - 1);
    for (std::size_t j = 1; j < samples.size(); ++j) {
        lams.push_back(intensity(h, samples[j]));
        widths[j - 1] = samples[j] - samples[j - 1];
    }
    return ad::dot(ad::stack(lams), tape_.constant(std::move(widths)));
}

void StepContext::advance(std::span<const EventRecord> group, double t) {
    if (advanced_) throw std::logic_error("StepContext::advance called twice");
    advanced_ = true;
    if (group.empty()) return;
    const ModelConfig& cfg = model_.config();
    std::map<std::pair<int, NodeId>, std::vector<Var>> collected;
    for (const auto& e : group) {
        if (e.time != t) throw std::invalid_argument("advance: events in a group must share one timestamp");
        model_.check_hyperedge(e.edge);
        if (cfg.interaction_update) {
            for (const auto& md : encode(e.edge, t).dynamics) {
                collected[{static_cast<int>(md.side), md.node}].push_back(md.dynamic);
            }
        } else {
            for (std::size_t s = 0; s < 2; ++s) {
                for (NodeId v : e.edge.side(static_cast<Side>(s))) collected[{static_cast<int>(s), v}];
            }
        }
    }
    for (const auto& [key, _] : collected) {
        const auto& ns = state_.sides[key.first].nodes[key.second];
        if (t < ns.last_time) throw std::invalid_argument("advance: event precedes a node's last interaction");
    }

    // all updates read the pre-group state
    std::vector<std::pair<std::pair<int, NodeId>, Var>> updates;
    if (cfg.interaction_update) {
        for (const auto& [key, dyns] : collected) {
            const Side side = static_cast<Side>(key.first);
            const double elapsed = t - state_.sides[key.first].nodes[key.second].last_time;
            updates.emplace_back(key, interaction_update(tape_, dyn(side), post_embedding(side, key.second), dyns,
                                                         elapsed));
        }
    }
    for (const auto& [key, v] : updates) {
        SideState& st = state_.sides[key.first];
        st.live[key.second] = tape_.recording() ? v : Var{};
        st.nodes[key.second].embedding = v.value();
        st.nodes[key.second].updated = true;
    }
    for (const auto& [key, _] : collected) state_.sides[key.first].nodes[key.second].last_time = t;
    if (cfg.history_aggregation) {
        for (const auto& e : group) {
            state_.side(Side::left).window.push(e.edge.left, t);
            if (cfg.bipartite) state_.side(Side::right).window.push(e.edge.right, t);
        }
    }
    state_.last_event_time = t;
}

}  // namespace hgtpp
