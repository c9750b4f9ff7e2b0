#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hgtpp {

using NodeId = std::uint32_t;

enum class Side : std::uint8_t { left = 0, right = 1 };

/// A node set (homogeneous) or a pair of node sets from disjoint universes
/// (bipartite). Homogeneous hyperedges leave `right` empty. Each side is kept
/// sorted ascending with unique ids.
struct Hyperedge {
    std::vector<NodeId> left;
    std::vector<NodeId> right;

    bool bipartite() const noexcept { return !right.empty(); }
    std::size_t size() const noexcept { return left.size() + right.size(); }
    const std::vector<NodeId>& side(Side s) const { return s == Side::left ? left : right; }
    std::vector<NodeId>& side(Side s) { return s == Side::left ? left : right; }

    friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
    friend auto operator<=>(const Hyperedge&, const Hyperedge&) = default;
};

/// Sorts and deduplicates a node list in place; returns the number of duplicates removed.
std::size_t canonicalize(std::vector<NodeId>& nodes);

/// Timestamped hyperedge.
struct EventRecord {
    Hyperedge edge;
    double time = 0.0;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

std::string to_string(const Hyperedge& h);

}  // namespace hgtpp
