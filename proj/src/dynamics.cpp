#include "hgtpp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hgtpp/init.hpp"

namespace hgtpp {

DynamicsParams make_dynamics(ParameterStore& store, const std::string& prefix, std::size_t num_nodes, std::size_t d,
                             DynamicsFlags flags, Rng& rng) {
    DynamicsParams p;
    p.dim = d;
    {
        // cold-start rows span the full tanh range so nodes start distinguishable
        const double bound = 1.0;
        Tensor init(Shape::matrix(num_nodes, d));
        for (auto& x : init.values()) x = rng.uniform(-bound, bound);
        p.initial = &store.add(prefix + "embedding", std::move(init));
    }
    if (!flags.any()) return p;

    p.w0 = &store.add(prefix + "W0", uniform_weight(d, d, rng));
    p.b0 = &store.add(prefix + "b0", Tensor(Shape::vector(d)));
    if (flags.temporal_drift) {
        p.w1 = &store.add(prefix + "W1", uniform_weight(d, d, rng));
        p.w4 = &store.add(prefix + "W4", uniform_weight(d, d, rng));
        // log-spaced frequencies covering elapsed times from ~1 to ~1e4 median gaps
        Tensor omega(Shape::vector(d));
        for (std::size_t i = 0; i < d; ++i) {
            const double frac = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
            omega[i] = std::pow(10.0, -4.0 * frac);
        }
        p.omega = &store.add(prefix + "omega", std::move(omega));
        p.theta = &store.add(prefix + "theta", Tensor(Shape::vector(d)));
    }
    if (flags.history_aggregation) {
        p.w2 = &store.add(prefix + "W2", uniform_weight(d, d, rng));
        p.hgnn = &store.add(prefix + "Theta", uniform_weight(d, d, rng));
    }
    if (flags.interaction_update) {
        p.w3 = &store.add(prefix + "W3", uniform_weight(d, d, rng));
        p.w5 = &store.add(prefix + "W5", uniform_weight(d, d, rng));
        p.b1 = &store.add(prefix + "b1", Tensor(Shape::vector(d)));
    }
    return p;
}

// --------------------------------------------------------------- window

void HistoryWindow::push(std::vector<NodeId> nodes, double time) {
    if (capacity_ == 0) return;
    if (!events_.empty() && time < events_.back().time) {
        throw std::invalid_argument("HistoryWindow: events must arrive in nondecreasing time order");
    }
    events_.push_back({std::move(nodes), time});
    if (events_.size() > capacity_) events_.pop_front();
}

Tensor HistoryWindow::incidence(std::size_t num_nodes) const {
    Tensor h(Shape::matrix(num_nodes, events_.size()));
    for (std::size_t j = 0; j < events_.size(); ++j) {
        for (NodeId v : events_[j].nodes) {
            if (v >= num_nodes) throw std::out_of_range("HistoryWindow: node id out of range");
            h.at(v, j) = 1.0;
        }
    }
    return h;
}

// --------------------------------------------------------------- stages

Var time_features(Var omega, Var theta, double dt) {
    if (dt < 0.0) throw std::invalid_argument("time_features: negative duration");
    return ad::cos(ad::add(ad::scale(omega, dt), theta));
}

Var HistoryAggregate::at(NodeId node) const {
    auto it = std::lower_bound(rows_.begin(), rows_.end(), node,
                               [](const auto& r, NodeId n) { return r.first < n; });
    if (it != rows_.end() && it->first == node) return it->second;
    return zero_;
}

HistoryAggregate history_aggregate(Tape& tape, const HistoryWindow& window,
                                   const std::function<Var(NodeId)>& post_embedding, Var hgnn_weight,
                                   std::size_t dim) {
    Var zero = tape.constant(Tensor(Shape::vector(dim)));
    if (window.empty()) return {{}, zero};

    // compact index over nodes present in the window
    std::map<NodeId, std::size_t> index;
    for (const auto& e : window.events()) {
        for (NodeId v : e.nodes) index.emplace(v, 0);
    }
    std::vector<NodeId> active;
    active.reserve(index.size());
    for (auto& [v, i] : index) {
        i = active.size();
        active.push_back(v);
    }
    const std::size_t n = active.size();

    std::vector<double> degree(n, 0.0);
    for (const auto& e : window.events()) {
        for (NodeId v : e.nodes) degree[index[v]] += 1.0;
    }
    // P = D_v^{-1/2} H D_e^{-1} Hᵀ D_v^{-1/2} restricted to active nodes
    Tensor prop(Shape::matrix(n, n));
    for (const auto& e : window.events()) {
        if (e.nodes.empty()) continue;
        const double inv_edge = 1.0 / static_cast<double>(e.nodes.size());
        for (NodeId u : e.nodes) {
            const std::size_t iu = index[u];
            for (NodeId w : e.nodes) {
                const std::size_t iw = index[w];
                prop.at(iu, iw) += inv_edge / std::sqrt(degree[iu] * degree[iw]);
            }
        }
    }

    std::vector<Var> xs;
    xs.reserve(n);
    for (NodeId v : active) xs.push_back(post_embedding(v));
    Var out = ad::matmul(ad::matmul(tape.constant(std::move(prop)), ad::stack(xs)), hgnn_weight);

    std::vector<std::pair<NodeId, Var>> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) rows.emplace_back(active[i], ad::row(out, i));
    return {std::move(rows), zero};
}

Var embedding_base(Tape& tape, const DynamicsParams& params, Var post, const Var* history) {
    Var acc = ad::matmul(tape.parameter(*params.w0), post);
    if (params.history_aggregation()) {
        if (history == nullptr) throw std::invalid_argument("embedding_base: history aggregate required");
        acc = ad::add(acc, ad::matmul(tape.parameter(*params.w2), *history));
    }
    return ad::add(acc, tape.parameter(*params.b0));
}

Var embedding_from_base(Tape& tape, const DynamicsParams& params, Var base, double elapsed) {
    if (!params.temporal_drift()) return ad::tanh(base);
    Var phi = time_features(tape.parameter(*params.omega), tape.parameter(*params.theta), elapsed);
    return ad::tanh(ad::add(base, ad::matmul(tape.parameter(*params.w1), phi)));
}

Var embedding_at(Tape& tape, const DynamicsParams& params, Var post, const Var* history, double last_time, double t) {
    if (t < last_time) throw std::invalid_argument("embedding_at: query time precedes the last interaction");
    if (params.static_embeddings()) return post;
    return embedding_from_base(tape, params, embedding_base(tape, params, post, history), t - last_time);
}

Var interaction_update(Tape& tape, const DynamicsParams& params, Var post, std::span<const Var> dynamic,
                       double elapsed) {
    if (dynamic.empty()) throw std::invalid_argument("interaction_update: no dynamic embeddings supplied");
    if (!params.interaction_update()) throw std::logic_error("interaction_update: stage disabled for this model");
    if (elapsed < 0.0) throw std::invalid_argument("interaction_update: negative elapsed time");
    Var acc = ad::matmul(tape.parameter(*params.w3), post);
    if (params.temporal_drift()) {
        Var phi = time_features(tape.parameter(*params.omega), tape.parameter(*params.theta), elapsed);
        acc = ad::add(acc, ad::matmul(tape.parameter(*params.w4), phi));
    }
    Var d = dynamic.size() == 1 ? dynamic[0] : ad::mean(dynamic);
    acc = ad::add(acc, ad::matmul(tape.parameter(*params.w5), d));
    return ad::tanh(ad::add(acc, tape.parameter(*params.b1)));
}

}  // namespace hgtpp
