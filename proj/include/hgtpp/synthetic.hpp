#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hgtpp/dataset.hpp"
#include "hgtpp/rng.hpp"

namespace hgtpp {

class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ProcessKind { poisson, hawkes };

/// Planted-hyperedge stream description. Every planted hyperedge runs its own
/// process (Poisson at `rate`, or Hawkes with base `rate`, jump `alpha`, decay `beta`).
struct SyntheticSpec {
    std::string name = "synthetic";
    ProcessKind process = ProcessKind::poisson;
    std::size_t nodes = 10;
    std::size_t right_nodes = 0;  // > 0: bipartite
    double horizon = 100.0;
    double rate = 1.0;
    double alpha = 0.0;
    double beta = 1.0;
    std::vector<Hyperedge> edges;  // explicit planted hyperedges
    std::vector<double> rates;     // optional per-edge rates, same length as edges
    std::size_t random_edges = 0;  // additional uniformly drawn hyperedges
    std::size_t min_size = 2;
    std::size_t max_size = 3;
    bool clique_confusable = false;
    std::size_t gadgets = 1;  // six-node confusable blocks
};

/// Parses `key = value` lines; '#' starts a comment. Rates are separated by ',' or ';'. Edge lists use ',' between
/// nodes, ';' between hyperedges and '|' between the sides of a bipartite hyperedge.
SyntheticSpec parse_synthetic_spec(std::istream& in);
SyntheticSpec parse_synthetic_spec(const std::string& text);
void check_spec(const SyntheticSpec& spec);

/// Six-node confusable block at node offset `o`: four triangles whose pairwise
/// projection also contains the unplanted triangle {o, o+1, o+2}.
std::vector<std::vector<NodeId>> confusable_block(NodeId o);
/// A different hyperedge set with the same pairwise projection as confusable_block(o).
std::vector<std::vector<NodeId>> confusable_alternative(NodeId o);

/// All planted hyperedges a SyntheticSpec resolves to (explicit, gadget and random).
std::vector<Hyperedge> planted_edges(const SyntheticSpec& spec, Rng& rng);

/// Simulates each planted hyperedge by thinning on [0, horizon] and merges the
/// streams in time order. Node ids are the dense ids themselves.
Dataset generate_synthetic(const SyntheticSpec& spec, Rng& rng);

}  // namespace hgtpp
