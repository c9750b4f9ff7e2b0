#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "hgtpp/dataset.hpp"
#include "hgtpp/rng.hpp"

namespace fixture {

/// Email-style corpus with a chosen node count, event count and number of
/// distinct hyperedges. Original ids are sparse so remapping is exercised.
inline hgtpp::Dataset email_shaped(std::size_t nodes, std::size_t events, std::size_t distinct, std::uint64_t seed) {
    hgtpp::Rng rng(seed);
    std::set<std::vector<std::uint64_t>> seen;
    std::vector<std::vector<std::uint64_t>> sets;
    auto orig = [](std::size_t v) { return static_cast<std::uint64_t>(v * 7 + 3); };
    auto add = [&](std::vector<std::uint64_t> s) {
        std::sort(s.begin(), s.end());
        if (seen.insert(s).second) sets.push_back(std::move(s));
    };
    for (std::size_t i = 0; i < nodes && sets.size() < distinct; ++i) add({orig(i), orig((i + 1) % nodes)});
    while (sets.size() < distinct) {
        const std::size_t k = rng.uniform() < 0.6 ? 2 : 3 + rng.below(4);
        std::set<std::uint64_t> s;
        while (s.size() < k) s.insert(orig(rng.below(nodes)));
        add({s.begin(), s.end()});
    }
    std::vector<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> sides;
    std::vector<double> times;
    double t = 1.0e9;  // epoch seconds, like the public corpora
    for (std::size_t i = 0; i < events; ++i) {
        const auto& s = i < distinct ? sets[i] : sets[rng.below(distinct)];
        sides.push_back({s, {}});
        if (rng.uniform() > 0.2) t += static_cast<double>(1 + rng.below(3600));
        times.push_back(t);
    }
    return hgtpp::make_dataset("email-Enron", false, std::move(sides), std::move(times));
}

/// Small bipartite corpus with fractional times.
inline hgtpp::Dataset bipartite_small(std::size_t events, std::uint64_t seed) {
    hgtpp::Rng rng(seed);
    std::vector<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> sides;
    std::vector<double> times;
    double t = 0.0;
    for (std::size_t i = 0; i < events; ++i) {
        std::vector<std::uint64_t> l, r;
        for (std::size_t k = 0, n = 1 + rng.below(3); k < n; ++k) l.push_back(100 + rng.below(12));
        for (std::size_t k = 0, n = 1 + rng.below(4); k < n; ++k) r.push_back(5000 + 3 * rng.below(20));
        sides.push_back({l, r});
        t += rng.exponential(0.7);
        times.push_back(t);
    }
    return hgtpp::make_dataset("tags", true, std::move(sides), std::move(times));
}

}  // namespace fixture
