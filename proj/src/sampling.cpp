#include "hgtpp/sampling.hpp"

#include <algorithm>
#include <map>

namespace hgtpp {

SizeDistribution SizeDistribution::fit(std::span<const EventRecord> events, Side side) {
    if (events.empty()) throw std::invalid_argument("fit_size_distribution: empty training split");
    std::map<std::size_t, std::size_t> counts;
    for (const auto& e : events) ++counts[e.edge.side(side).size()];
    return from_counts({counts.begin(), counts.end()});
}

SizeDistribution SizeDistribution::from_counts(std::vector<std::pair<std::size_t, std::size_t>> size_counts) {
    std::sort(size_counts.begin(), size_counts.end());
    std::size_t total = 0;
    for (auto [k, c] : size_counts) total += c;
    if (total == 0) throw std::invalid_argument("SizeDistribution: no observations");
    SizeDistribution d;
    double acc = 0.0;
    for (auto [k, c] : size_counts) {
        if (c == 0) continue;
        if (k == 0) throw std::invalid_argument("SizeDistribution: size 0 observed");
        d.sizes_.push_back(k);
        d.probs_.push_back(static_cast<double>(c) / static_cast<double>(total));
        acc += d.probs_.back();
        d.cumulative_.push_back(acc);
    }
    d.cumulative_.back() = 1.0;
    return d;
}

std::size_t SizeDistribution::sample(Rng& rng) const {
    if (sizes_.empty()) throw std::logic_error("SizeDistribution::sample on an empty distribution");
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), sizes_.size() - 1);
    return sizes_[i];
}

double SizeDistribution::probability(std::size_t k) const {
    const auto it = std::lower_bound(sizes_.begin(), sizes_.end(), k);
    if (it == sizes_.end() || *it != k) return 0.0;
    return probs_[static_cast<std::size_t>(it - sizes_.begin())];
}

// --------------------------------------------------------------- draws

namespace {

bool contains(std::span<const NodeId> sorted, NodeId v) { return std::binary_search(sorted.begin(), sorted.end(), v); }

}  // namespace

std::vector<NodeId> draw_homogeneous(std::span<const NodeId> h, std::size_t num_nodes, std::size_t k, Rng& rng) {
    if (k == 0) throw SamplerError("negative size must be positive");
    const std::size_t s = std::min((k + 1) / 2, h.size());
    const std::size_t outside = num_nodes - std::min(num_nodes, h.size());
    if (k - s > outside) {
        throw SamplerError("negative of size " + std::to_string(k) + " needs " + std::to_string(k - s) +
                           " nodes outside the hyperedge but only " + std::to_string(outside) + " exist");
    }
    std::vector<NodeId> sorted_h(h.begin(), h.end());
    std::sort(sorted_h.begin(), sorted_h.end());

    // partial Fisher-Yates over the members
    std::vector<NodeId> pool = sorted_h;
    std::vector<NodeId> out;
    out.reserve(k);
    for (std::size_t i = 0; i < s; ++i) {
        const std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    // rejection over the complement; the complement holds at least k − s nodes
    std::vector<NodeId> chosen;
    while (chosen.size() < k - s) {
        const auto v = static_cast<NodeId>(rng.below(num_nodes));
        if (contains(sorted_h, v) || std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
        chosen.push_back(v);
    }
    out.insert(out.end(), chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NodeId> draw_subset(std::size_t num_nodes, std::size_t k, Rng& rng) {
    if (k == 0 || k > num_nodes) {
        throw SamplerError("cannot draw " + std::to_string(k) + " of " + std::to_string(num_nodes) + " nodes");
    }
    std::vector<NodeId> out;
    out.reserve(k);
    if (2 * k > num_nodes) {
        std::vector<NodeId> pool(num_nodes);
        for (std::size_t i = 0; i < num_nodes; ++i) pool[i] = static_cast<NodeId>(i);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + rng.below(num_nodes - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
    } else {
        while (out.size() < k) {
            const auto v = static_cast<NodeId>(rng.below(num_nodes));
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Hyperedge> sample_negative_homogeneous(const Hyperedge& h, std::size_t num_nodes,
                                                     const SizeDistribution& dist, Rng& rng) {
    for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        Hyperedge neg;
        neg.left = draw_homogeneous(h.left, num_nodes, dist.sample(rng), rng);
        if (neg != h) return neg;
    }
    return std::nullopt;
}

std::optional<Hyperedge> sample_negative_bipartite(const Hyperedge& h, std::size_t universe,
                                                   const SizeDistribution& dist, Side corrupt, Rng& rng) {
    for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        Hyperedge neg = h;
        neg.side(corrupt) = draw_subset(universe, dist.sample(rng), rng);
        if (neg != h) return neg;
    }
    return std::nullopt;
}

// ------------------------------------------------------------- sampler

NegativeSampler::NegativeSampler(SizeDistribution dist, std::size_t num_nodes) : bipartite_(false) {
    dist_[0] = std::move(dist);
    num_[0] = num_nodes;
}

NegativeSampler::NegativeSampler(SizeDistribution left, SizeDistribution right, std::size_t num_left,
                                 std::size_t num_right)
    : bipartite_(true) {
    dist_[0] = std::move(left);
    dist_[1] = std::move(right);
    num_[0] = num_left;
    num_[1] = num_right;
}

NegativeSampler NegativeSampler::fit(std::span<const EventRecord> train, bool bipartite, std::size_t num_left,
                                     std::size_t num_right) {
    if (bipartite) {
        return NegativeSampler(SizeDistribution::fit(train, Side::left), SizeDistribution::fit(train, Side::right),
                               num_left, num_right);
    }
    return NegativeSampler(SizeDistribution::fit(train, Side::left), num_left);
}

std::optional<Hyperedge> NegativeSampler::draw_one(const Hyperedge& h, Rng& rng) const {
    // a size the pool cannot realize is redrawn; the attempt cap bounds pathological cases
    for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        try {
            if (!bipartite_) return sample_negative_homogeneous(h, num_[0], dist_[0], rng);
            const auto side = rng.below(2) == 0 ? Side::left : Side::right;
            const auto s = static_cast<std::size_t>(side);
            return sample_negative_bipartite(h, num_[s], dist_[s], side, rng);
        } catch (const SamplerError&) {
        }
    }
    return std::nullopt;
}

std::vector<Hyperedge> NegativeSampler::draw(const Hyperedge& h, std::size_t count, Rng& rng) const {
    std::vector<Hyperedge> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (auto neg = draw_one(h, rng)) out.push_back(std::move(*neg));
    }
    return out;
}

}  // namespace hgtpp
