#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hgtpp/event.hpp"
#include "hgtpp/rng.hpp"

namespace hgtpp {

/// Categorical distribution over observed hyperedge sizes.
class SizeDistribution {
public:
    SizeDistribution() = default;
    /// Empirical frequencies of side `side` sizes. Throws on an empty event list.
    static SizeDistribution fit(std::span<const EventRecord> events, Side side = Side::left);
    static SizeDistribution from_counts(std::vector<std::pair<std::size_t, std::size_t>> size_counts);

    std::size_t sample(Rng& rng) const;
    double probability(std::size_t k) const;
    const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
    const std::vector<double>& probabilities() const noexcept { return probs_; }
    std::size_t max_size() const { return sizes_.empty() ? 0 : sizes_.back(); }
    bool empty() const noexcept { return sizes_.empty(); }

private:
    std::vector<std::size_t> sizes_;  // ascending
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

class SamplerError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// k nodes: min(⌈k/2⌉, |h|) drawn from h, the rest from outside h; sorted.
/// Throws SamplerError if the outside pool is too small. May equal h.
std::vector<NodeId> draw_homogeneous(std::span<const NodeId> h, std::size_t num_nodes, std::size_t k, Rng& rng);

/// Uniform k-subset of {0..num_nodes−1}; sorted. Throws SamplerError if k > num_nodes.
std::vector<NodeId> draw_subset(std::size_t num_nodes, std::size_t k, Rng& rng);

inline constexpr int kMaxSampleAttempts = 100;

/// One negative for a homogeneous h; resamples collisions with h up to
/// kMaxSampleAttempts times and returns nullopt if every attempt collided.
std::optional<Hyperedge> sample_negative_homogeneous(const Hyperedge& h, std::size_t num_nodes,
                                                     const SizeDistribution& dist, Rng& rng);

/// One negative for a bipartite h with side `corrupt` replaced by a random subset.
std::optional<Hyperedge> sample_negative_bipartite(const Hyperedge& h, std::size_t universe,
                                                   const SizeDistribution& dist, Side corrupt, Rng& rng);

/// Draws negatives for training and evaluation. Sizes that cannot be
/// realized (pool too small) are redrawn.
class NegativeSampler {
public:
    /// Homogeneous sampler.
    NegativeSampler(SizeDistribution dist, std::size_t num_nodes);
    /// Bipartite sampler; each negative corrupts a side chosen uniformly.
    NegativeSampler(SizeDistribution left, SizeDistribution right, std::size_t num_left, std::size_t num_right);

    static NegativeSampler fit(std::span<const EventRecord> train, bool bipartite, std::size_t num_left,
                               std::size_t num_right);

    bool bipartite() const noexcept { return bipartite_; }
    std::vector<Hyperedge> draw(const Hyperedge& h, std::size_t count, Rng& rng) const;
    std::optional<Hyperedge> draw_one(const Hyperedge& h, Rng& rng) const;

private:
    bool bipartite_ = false;
    SizeDistribution dist_[2];
    std::size_t num_[2] = {0, 0};
};

}  // namespace hgtpp
