#include "hgtpp/event.hpp"

#include <algorithm>

namespace hgtpp {

std::size_t canonicalize(std::vector<NodeId>& nodes) {
    std::sort(nodes.begin(), nodes.end());
    const auto last = std::unique(nodes.begin(), nodes.end());
    const auto removed = static_cast<std::size_t>(nodes.end() - last);
    nodes.erase(last, nodes.end());
    return removed;
}

namespace {

void append_ids(std::string& out, const std::vector<NodeId>& ids) {
    out += '{';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ids[i]);
    }
    out += '}';
}

}  // namespace

std::string to_string(const Hyperedge& h) {
    std::string out;
    append_ids(out, h.left);
    if (h.bipartite()) {
        out += '|';
        append_ids(out, h.right);
    }
    return out;
}

}  // namespace hgtpp
