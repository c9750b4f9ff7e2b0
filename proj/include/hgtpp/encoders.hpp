#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hgtpp/autodiff.hpp"
#include "hgtpp/event.hpp"
#include "hgtpp/rng.hpp"

namespace hgtpp {

/// Self-attention scorer weights. W_Q, W_K, W_V, W_s are d×d, W_o is d×1, b_o a scalar.
struct HomogeneousEncoderParams {
    Parameter* w_q = nullptr;
    Parameter* w_k = nullptr;
    Parameter* w_v = nullptr;
    Parameter* w_s = nullptr;
    Parameter* w_o = nullptr;
    Parameter* b_o = nullptr;

    std::size_t dim() const { return w_q->value.rows(); }
};

/// Cross-attention scorer: one full weight set per side, stored separately.
struct BipartiteEncoderParams {
    HomogeneousEncoderParams left;
    HomogeneousEncoderParams right;
};

/// Registers `<prefix>W_Q` … `<prefix>b_o` in `store`; weights uniform(±1/√d), bias zero.
HomogeneousEncoderParams make_homogeneous_encoder(ParameterStore& store, const std::string& prefix, std::size_t d,
                                                  Rng& rng);
BipartiteEncoderParams make_bipartite_encoder(ParameterStore& store, const std::string& prefix, std::size_t d, Rng& rng);

struct EncodeResult {
    Var score;                       // 𝒫^h > 0
    std::vector<Var> dynamic;        // d_i^h, one per left/homogeneous member
    std::vector<Var> dynamic_right;  // d_i'^h for bipartite
    std::vector<Var> attention;      // softmax weights per member (left first, then right)
};

/// Hyperedge score from k ≥ 2 member embeddings (self-attention over peers j ≠ i).
EncodeResult encode_homogeneous(const HomogeneousEncoderParams& params, std::span<const Var> embeddings);

/// Bipartite score; each side attends over the other side, k, k' ≥ 1.
EncodeResult encode_bipartite(const BipartiteEncoderParams& params, std::span<const Var> left,
                              std::span<const Var> right);

/// softplus(v1·v2): positive pairwise intensity used by the clique-decomposed baselines.
Var encode_pairwise(Var v1, Var v2);

/// All C(|h|, 2) pairs of `h` in lexicographic order.
std::vector<std::pair<NodeId, NodeId>> clique_decompose(std::span<const NodeId> h);

}  // namespace hgtpp
