#include "hgtpp/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "hgtpp/sampling.hpp"
#include "hgtpp/tpp.hpp"

namespace hgtpp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw SpecError(key + ": not a number: '" + v + "'");
    return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw SpecError(key + ": not a count: '" + v + "'");
    return out;
}

std::vector<NodeId> parse_nodes(const std::string& s) {
    std::vector<NodeId> out;
    for (const auto& tok : split(s, ',')) out.push_back(static_cast<NodeId>(to_count("edges", tok)));
    canonicalize(out);
    return out;
}

}  // namespace

SyntheticSpec parse_synthetic_spec(std::istream& in) {
    SyntheticSpec spec;
    std::string line;
    std::size_t n = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++n;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw SpecError("line " + std::to_string(n) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw SpecError("line " + std::to_string(n) + ": duplicate key '" + key + "'");
        if (key == "name") {
            spec.name = val;
        } else if (key == "process") {
            if (val == "poisson") spec.process = ProcessKind::poisson;
            else if (val == "hawkes") spec.process = ProcessKind::hawkes;
            else throw SpecError("process must be poisson or hawkes, got '" + val + "'");
        } else if (key == "mode") {
            if (val == "planted") spec.clique_confusable = false;
            else if (val == "clique-confusable") spec.clique_confusable = true;
            else throw SpecError("mode must be planted or clique-confusable, got '" + val + "'");
        } else if (key == "nodes") {
            spec.nodes = to_count(key, val);
        } else if (key == "right_nodes") {
            spec.right_nodes = to_count(key, val);
        } else if (key == "horizon") {
            spec.horizon = to_double(key, val);
        } else if (key == "rate") {
            spec.rate = to_double(key, val);
        } else if (key == "alpha") {
            spec.alpha = to_double(key, val);
        } else if (key == "beta") {
            spec.beta = to_double(key, val);
        } else if (key == "random_edges") {
            spec.random_edges = to_count(key, val);
        } else if (key == "min_size") {
            spec.min_size = to_count(key, val);
        } else if (key == "max_size") {
            spec.max_size = to_count(key, val);
        } else if (key == "gadgets") {
            spec.gadgets = to_count(key, val);
        } else if (key == "edges") {
            for (const auto& e : split(val, ';')) {
                if (e.empty()) continue;
                const auto sides = split(e, '|');
                if (sides.size() > 2) throw SpecError("edges: too many '|' in '" + e + "'");
                Hyperedge h;
                h.left = parse_nodes(sides[0]);
                if (sides.size() == 2) h.right = parse_nodes(sides[1]);
                spec.edges.push_back(std::move(h));
            }
        } else if (key == "rates") {
            std::string list = val;
            std::replace(list.begin(), list.end(), ',', ';');
            for (const auto& r : split(list, ';')) {
                if (!r.empty()) spec.rates.push_back(to_double(key, r));
            }
        } else {
            throw SpecError("line " + std::to_string(n) + ": unknown key '" + key + "'");
        }
    }
    check_spec(spec);
    return spec;
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
    std::istringstream in(text);
    return parse_synthetic_spec(in);
}

void check_spec(const SyntheticSpec& spec) {
    const bool bip = spec.right_nodes > 0;
    if (spec.nodes < 2 && !bip) throw SpecError("need at least 2 nodes");
    if (!(spec.horizon > 0.0)) throw SpecError("horizon must be positive");
    if (!(spec.rate >= 0.0)) throw SpecError("rate must be >= 0");
    for (double r : spec.rates) {
        if (!(r >= 0.0)) throw SpecError("rates must be >= 0");
    }
    if (!spec.rates.empty() && spec.rates.size() != spec.edges.size()) {
        throw SpecError("rates lists " + std::to_string(spec.rates.size()) + " values for " +
                        std::to_string(spec.edges.size()) + " edges");
    }
    if (spec.process == ProcessKind::hawkes) {
        if (!(spec.beta > 0.0) || !(spec.alpha >= 0.0)) throw SpecError("hawkes needs alpha >= 0 and beta > 0");
        if (spec.alpha / spec.beta >= 1.0) {
            throw SpecError("unstable Hawkes process: branching ratio alpha/beta = " +
                            std::to_string(spec.alpha / spec.beta) + " must be < 1");
        }
    }
    for (const auto& e : spec.edges) {
        if (bip != !e.right.empty()) throw SpecError("edge " + to_string(e) + " does not match the node universes");
        if (e.left.empty() || (!bip && e.left.size() < 2)) throw SpecError("edge " + to_string(e) + " is too small");
        for (NodeId v : e.left) {
            if (v >= spec.nodes) throw SpecError("edge " + to_string(e) + " uses an unknown node");
        }
        for (NodeId v : e.right) {
            if (v >= spec.right_nodes) throw SpecError("edge " + to_string(e) + " uses an unknown right node");
        }
    }
    if (spec.clique_confusable) {
        if (bip) throw SpecError("clique-confusable mode is homogeneous only");
        if (spec.gadgets == 0 || 6 * spec.gadgets > spec.nodes) {
            throw SpecError("clique-confusable mode needs 6 nodes per gadget");
        }
    }
    if (spec.random_edges > 0) {
        if (spec.min_size == 0 || spec.min_size > spec.max_size) throw SpecError("bad min_size/max_size");
        if (!bip && (spec.min_size < 2 || spec.max_size > spec.nodes)) throw SpecError("random edge sizes out of range");
        if (bip && spec.max_size > std::min(spec.nodes, spec.right_nodes)) {
            throw SpecError("random edge sizes exceed a side");
        }
    }
}

std::vector<std::vector<NodeId>> confusable_block(NodeId o) {
    return {{o, NodeId(o + 1), NodeId(o + 3)},
            {NodeId(o + 1), NodeId(o + 2), NodeId(o + 4)},
            {o, NodeId(o + 2), NodeId(o + 5)},
            {NodeId(o + 3), NodeId(o + 4), NodeId(o + 5)}};
}

std::vector<std::vector<NodeId>> confusable_alternative(NodeId o) {
    return {{o, NodeId(o + 1), NodeId(o + 2)},
            {o, NodeId(o + 3)},
            {NodeId(o + 1), NodeId(o + 3)},
            {NodeId(o + 1), NodeId(o + 4)},
            {NodeId(o + 2), NodeId(o + 4)},
            {o, NodeId(o + 5)},
            {NodeId(o + 2), NodeId(o + 5)},
            {NodeId(o + 3), NodeId(o + 4), NodeId(o + 5)}};
}

std::vector<Hyperedge> planted_edges(const SyntheticSpec& spec, Rng& rng) {
    check_spec(spec);
    std::vector<Hyperedge> out = spec.edges;
    if (spec.clique_confusable) {
        for (std::size_t g = 0; g < spec.gadgets; ++g) {
            for (auto& nodes : confusable_block(static_cast<NodeId>(6 * g))) out.push_back({std::move(nodes), {}});
        }
    }
    for (std::size_t i = 0; i < spec.random_edges; ++i) {
        const std::size_t k = spec.min_size + rng.below(spec.max_size - spec.min_size + 1);
        Hyperedge h;
        h.left = draw_subset(spec.nodes, k, rng);
        if (spec.right_nodes > 0) {
            h.right = draw_subset(spec.right_nodes, spec.min_size + rng.below(spec.max_size - spec.min_size + 1), rng);
        }
        out.push_back(std::move(h));
    }
    return out;
}

Dataset generate_synthetic(const SyntheticSpec& spec, Rng& rng) {
    const auto edges = planted_edges(spec, rng);
    std::vector<std::pair<double, std::size_t>> stamps;  // (time, edge index)
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double rate = i < spec.rates.size() ? spec.rates[i] : spec.rate;
        Rng stream = rng.split(i);
        std::vector<double> times;
        if (spec.process == ProcessKind::poisson) {
            ConstantIntensity f(rate);
            times = simulate_thinning(f, 0.0, spec.horizon, stream);
        } else {
            HawkesIntensity f(rate, spec.alpha, spec.beta);
            times = simulate_thinning(f, 0.0, spec.horizon, stream);
        }
        for (double t : times) stamps.emplace_back(t, i);
    }
    std::stable_sort(stamps.begin(), stamps.end());

    Dataset d;
    d.name = spec.name;
    d.bipartite = spec.right_nodes > 0;
    d.num_left = spec.nodes;
    d.num_right = spec.right_nodes;
    d.left_ids.resize(d.num_left);
    d.right_ids.resize(d.num_right);
    for (std::size_t v = 0; v < d.num_left; ++v) d.left_ids[v] = v;
    for (std::size_t v = 0; v < d.num_right; ++v) d.right_ids[v] = v;
    d.events.reserve(stamps.size());
    for (auto [t, i] : stamps) d.events.push_back({edges[i], t});
    return d;
}

}  // namespace hgtpp
