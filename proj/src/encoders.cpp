#include "hgtpp/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hgtpp/init.hpp"

namespace hgtpp {

HomogeneousEncoderParams make_homogeneous_encoder(ParameterStore& store, const std::string& prefix, std::size_t d,
                                                  Rng& rng) {
    HomogeneousEncoderParams p;
    p.w_q = &store.add(prefix + "W_Q", uniform_weight(d, d, rng));
    p.w_k = &store.add(prefix + "W_K", uniform_weight(d, d, rng));
    p.w_v = &store.add(prefix + "W_V", uniform_weight(d, d, rng));
    p.w_s = &store.add(prefix + "W_s", uniform_weight(d, d, rng));
    p.w_o = &store.add(prefix + "W_o", uniform_weight(d, 1, rng));
    p.b_o = &store.add(prefix + "b_o", Tensor::scalar(0.0));
    return p;
}

BipartiteEncoderParams make_bipartite_encoder(ParameterStore& store, const std::string& prefix, std::size_t d,
                                              Rng& rng) {
    BipartiteEncoderParams p;
    p.left = make_homogeneous_encoder(store, prefix + "left.", d, rng);
    p.right = make_homogeneous_encoder(store, prefix + "right.", d, rng);
    return p;
}

namespace {

void check_dims(std::span<const Var> xs, std::size_t d, const char* what) {
    for (const Var& v : xs) {
        const auto& s = v.value().shape();
        if (s.rank != 1 || s.rows != d) {
            throw ShapeError(std::string(what) + ": embedding shape " + s.str() + " does not match d=" +
                             std::to_string(d));
        }
    }
}

// o = W_oᵀ (dyn − W_s v)² + b_o, returned as softplus(o)
Var output_term(Tape& tape, const HomogeneousEncoderParams& p, Var dyn, Var v) {
    Var s = ad::matmul(tape.parameter(*p.w_s), v);
    Var diff2 = ad::square(ad::sub(dyn, s));
    Var o = ad::add(ad::sum(ad::matmul(diff2, tape.parameter(*p.w_o))), tape.parameter(*p.b_o));
    return ad::softplus(o);
}

}  // namespace

EncodeResult encode_homogeneous(const HomogeneousEncoderParams& params, std::span<const Var> embeddings) {
    const std::size_t k = embeddings.size();
    if (k < 2) throw std::invalid_argument("encode_homogeneous: need at least 2 members, got " + std::to_string(k));
    check_dims(embeddings, params.dim(), "encode_homogeneous");
    Tape& tape = *embeddings[0].tape;
    Var wq = tape.parameter(*params.w_q);
    Var wk = tape.parameter(*params.w_k);
    Var wv = tape.parameter(*params.w_v);

    std::vector<Var> q(k), key(k), val(k);
    for (std::size_t i = 0; i < k; ++i) {
        q[i] = ad::matmul(embeddings[i], wq);  // W_Qᵀ v_i
        key[i] = ad::matmul(embeddings[i], wk);
        val[i] = ad::matmul(embeddings[i], wv);
    }

    EncodeResult out;
    std::vector<Var> terms;
    terms.reserve(k);
    std::vector<Var> logits, values;
    for (std::size_t i = 0; i < k; ++i) {
        logits.clear();
        values.clear();
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            logits.push_back(ad::dot(q[i], key[j]));
            values.push_back(val[j]);
        }
        Var alpha = ad::softmax(ad::stack(logits));
        Var dyn = ad::tanh(ad::matmul(alpha, ad::stack(values)));
        out.attention.push_back(alpha);
        out.dynamic.push_back(dyn);
        terms.push_back(output_term(tape, params, dyn, embeddings[i]));
    }
    out.score = ad::mean(terms);
    return out;
}

namespace {

// dynamic embeddings of `queries` attending over `keys` of the opposite side
std::vector<Var> cross_attend(Tape& tape, const HomogeneousEncoderParams& query_side,
                              const HomogeneousEncoderParams& key_side, std::span<const Var> queries,
                              std::span<const Var> keys, std::vector<Var>& attention) {
    Var wq = tape.parameter(*query_side.w_q);
    Var wk = tape.parameter(*key_side.w_k);
    Var wv = tape.parameter(*key_side.w_v);
    std::vector<Var> kk, vv;
    for (const Var& v : keys) {
        kk.push_back(ad::matmul(v, wk));
        vv.push_back(ad::matmul(v, wv));
    }
    Var values = ad::stack(vv);
    std::vector<Var> dyn;
    std::vector<Var> logits;
    for (const Var& v : queries) {
        Var q = ad::matmul(v, wq);
        logits.clear();
        for (const Var& kj : kk) logits.push_back(ad::dot(q, kj));
        Var alpha = ad::softmax(ad::stack(logits));
        attention.push_back(alpha);
        dyn.push_back(ad::tanh(ad::matmul(alpha, values)));
    }
    return dyn;
}

}  // namespace

EncodeResult encode_bipartite(const BipartiteEncoderParams& params, std::span<const Var> left,
                              std::span<const Var> right) {
    if (left.empty() || right.empty()) throw std::invalid_argument("encode_bipartite: both sides must be nonempty");
    check_dims(left, params.left.dim(), "encode_bipartite");
    check_dims(right, params.right.dim(), "encode_bipartite");
    Tape& tape = *left[0].tape;

    EncodeResult out;
    out.dynamic = cross_attend(tape, params.left, params.right, left, right, out.attention);
    out.dynamic_right = cross_attend(tape, params.right, params.left, right, left, out.attention);

    std::vector<Var> lt, rt;
    for (std::size_t i = 0; i < left.size(); ++i) lt.push_back(output_term(tape, params.left, out.dynamic[i], left[i]));
    for (std::size_t i = 0; i < right.size(); ++i) {
        rt.push_back(output_term(tape, params.right, out.dynamic_right[i], right[i]));
    }
    out.score = ad::add(ad::mean(lt), ad::mean(rt));
    return out;
}

Var encode_pairwise(Var v1, Var v2) { return ad::softplus(ad::dot(v1, v2)); }

std::vector<std::pair<NodeId, NodeId>> clique_decompose(std::span<const NodeId> h) {
    if (h.size() < 2) throw std::invalid_argument("clique_decompose: hyperedge needs at least 2 nodes");
    std::vector<NodeId> sorted(h.begin(), h.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(sorted.size() * (sorted.size() - 1) / 2);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) pairs.emplace_back(sorted[i], sorted[j]);
    }
    return pairs;
}

}  // namespace hgtpp
