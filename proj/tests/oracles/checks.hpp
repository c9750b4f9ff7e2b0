#pragma once

// Randomized comparisons between library code paths and the oracles; shared
// by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hgtpp/dynamics.hpp"
#include "hgtpp/encoders.hpp"
#include "oracles.hpp"

namespace oracle {

inline EncoderWeights weights_of(const hgtpp::HomogeneousEncoderParams& p) {
    EncoderWeights w;
    w.wq = to_mat(p.w_q->value);
    w.wk = to_mat(p.w_k->value);
    w.wv = to_mat(p.w_v->value);
    w.ws = to_mat(p.w_s->value);
    w.wo = to_vec(p.w_o->value);
    w.bo = p.b_o->value.item();
    return w;
}

inline std::vector<Vec> random_vectors(std::size_t n, std::size_t d, hgtpp::Rng& rng) {
    std::vector<Vec> out(n, Vec(d));
    for (auto& v : out) {
        for (auto& x : v) x = rng.uniform(-1.5, 1.5);
    }
    return out;
}

inline std::vector<hgtpp::Var> constants(hgtpp::Tape& tape, const std::vector<Vec>& xs) {
    std::vector<hgtpp::Var> out;
    for (const auto& x : xs) out.push_back(tape.constant(hgtpp::Tensor::vector(x)));
    return out;
}

inline double max_abs_diff(const Vec& a, const hgtpp::Tensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct EncoderCheck {
    double max_error = 0.0;        // library vs straight-line oracle
    double max_permutation = 0.0;  // score change under member reordering
    std::size_t instances = 0;
};

/// `instances` homogeneous and `instances` bipartite random cases with d=`d` and sides of size ≤ max_k.
inline EncoderCheck check_encoders(std::size_t instances, std::size_t d, std::size_t max_k, std::uint64_t seed) {
    EncoderCheck out;
    hgtpp::Rng rng(seed);
    for (std::size_t n = 0; n < instances; ++n) {
        hgtpp::ParameterStore store;
        auto hom = hgtpp::make_homogeneous_encoder(store, "h.", d, rng);
        auto bip = hgtpp::make_bipartite_encoder(store, "b.", d, rng);
        // nonzero biases so the bias path is exercised
        hom.b_o->value[0] = rng.uniform(-1, 1);
        bip.left.b_o->value[0] = rng.uniform(-1, 1);
        bip.right.b_o->value[0] = rng.uniform(-1, 1);

        const std::size_t k = 2 + rng.below(max_k - 1);
        const auto xs = random_vectors(k, d, rng);
        hgtpp::Tape tape(false);
        auto r = hgtpp::encode_homogeneous(hom, constants(tape, xs));
        auto o = homogeneous(weights_of(hom), xs);
        out.max_error = std::max(out.max_error, std::abs(r.score.item() - o.score));
        for (std::size_t i = 0; i < k; ++i) {
            out.max_error = std::max(out.max_error, max_abs_diff(o.dynamic[i], r.dynamic[i].value()));
        }

        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        std::reverse(perm.begin(), perm.end());
        std::swap(perm[0], perm[k / 2]);
        std::vector<Vec> shuffled;
        for (auto i : perm) shuffled.push_back(xs[i]);
        auto rp = hgtpp::encode_homogeneous(hom, constants(tape, shuffled));
        out.max_permutation = std::max(out.max_permutation, std::abs(rp.score.item() - r.score.item()));

        const std::size_t kl = 1 + rng.below(max_k), kr = 1 + rng.below(max_k);
        const auto ls = random_vectors(kl, d, rng), rs = random_vectors(kr, d, rng);
        auto rb = hgtpp::encode_bipartite(bip, constants(tape, ls), constants(tape, rs));
        auto ob = bipartite(weights_of(bip.left), weights_of(bip.right), ls, rs);
        out.max_error = std::max(out.max_error, std::abs(rb.score.item() - ob.score));
        for (std::size_t i = 0; i < kl; ++i) {
            out.max_error = std::max(out.max_error, max_abs_diff(ob.dynamic[i], rb.dynamic[i].value()));
        }
        for (std::size_t i = 0; i < kr; ++i) {
            out.max_error = std::max(out.max_error, max_abs_diff(ob.dynamic_right[i], rb.dynamic_right[i].value()));
        }
        std::vector<Vec> lrev(ls.rbegin(), ls.rend()), rrev(rs.rbegin(), rs.rend());
        auto rbp = hgtpp::encode_bipartite(bip, constants(tape, lrev), constants(tape, rrev));
        out.max_permutation = std::max(out.max_permutation, std::abs(rbp.score.item() - rb.score.item()));
        ++out.instances;
    }
    return out;
}

/// Random windows over ≤ max_nodes nodes with ≤ max_events events; returns the max entry error.
inline double check_hgnn(std::size_t cases, std::size_t max_nodes, std::size_t max_events, std::uint64_t seed) {
    hgtpp::Rng rng(seed);
    double worst = 0.0;
    const std::size_t d = 4;
    for (std::size_t c = 0; c < cases; ++c) {
        const std::size_t n = 1 + rng.below(max_nodes);
        const std::size_t m = 1 + rng.below(max_events);
        hgtpp::HistoryWindow window(max_events);
        std::vector<std::vector<unsigned>> events;
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<hgtpp::NodeId> e;
            for (hgtpp::NodeId v = 0; v < n; ++v) {
                if (rng.uniform() < 0.5) e.push_back(v);
            }
            if (e.empty()) e.push_back(static_cast<hgtpp::NodeId>(rng.below(n)));
            events.emplace_back(e.begin(), e.end());
            window.push(e, static_cast<double>(j));
        }
        const auto x = random_vectors(n, d, rng);
        Mat theta(d, Vec(d));
        for (auto& r : theta) {
            for (auto& v : r) v = rng.uniform(-1, 1);
        }
        hgtpp::Tape tape(false);
        std::vector<double> tv;
        for (const auto& r : theta) tv.insert(tv.end(), r.begin(), r.end());
        hgtpp::Var th = tape.constant(hgtpp::Tensor::matrix(d, d, tv));
        auto agg = hgtpp::history_aggregate(
            tape, window, [&](hgtpp::NodeId v) { return tape.constant(hgtpp::Tensor::vector(x[v])); }, th, d);
        const auto expected = hgnn(n, events, x, theta);
        for (hgtpp::NodeId v = 0; v < n; ++v) worst = std::max(worst, max_abs_diff(expected[v], agg.at(v).value()));
    }
    return worst;
}

}  // namespace oracle
