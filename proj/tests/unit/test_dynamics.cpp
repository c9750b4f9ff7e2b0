#include <cmath>

#include "checks.hpp"
#include "doctest.h"
#include "hgtpp/dynamics.hpp"

using namespace hgtpp;

namespace {

DynamicsFlags all_stages() { return {true, true, true}; }

}  // namespace

TEST_SUITE("dynamics") {
    TEST_CASE("hypergraph convolution matches the dense product") {
        CHECK(oracle::check_hgnn(200, 8, 5, 99) < 1e-12);
    }

    TEST_CASE("window keeps the most recent events") {
        HistoryWindow w(2);
        w.push({0, 1}, 1.0);
        w.push({1, 2}, 2.0);
        w.push({2}, 3.0);
        CHECK(w.size() == 2);
        CHECK(w.events().front().time == 2.0);
        const Tensor h = w.incidence(3);
        CHECK(h.at(1, 0) == 1.0);
        CHECK(h.at(0, 0) == 0.0);
        CHECK(h.at(2, 1) == 1.0);
        CHECK_THROWS(w.push({0}, 2.5));
        HistoryWindow off(0);
        off.push({0}, 1.0);
        CHECK(off.empty());
    }

    TEST_CASE("absent nodes aggregate to zero") {
        HistoryWindow w(4);
        w.push({0, 1}, 0.0);
        Tape t(false);
        Var th = t.constant(Tensor::identity(2));
        auto agg = history_aggregate(
            t, w, [&](NodeId) { return t.constant(Tensor::vector({1, 1})); }, th, 2);
        CHECK(agg.at(5).value()[0] == 0.0);
        CHECK(agg.at(0).value()[0] == doctest::Approx(1.0));
    }

    TEST_CASE("disabled stages are absent") {
        ParameterStore store;
        Rng rng(0);
        auto p = make_dynamics(store, "x.", 3, 4, {false, false, false}, rng);
        CHECK(p.static_embeddings());
        CHECK(store.size() == 1);
        ParameterStore s2;
        auto q = make_dynamics(s2, "", 3, 4, {true, false, true}, rng);
        CHECK(q.temporal_drift());
        CHECK_FALSE(q.history_aggregation());
        CHECK(q.interaction_update());
        CHECK(s2.find("W2") == nullptr);
        CHECK(s2.find("W5") != nullptr);
    }

    TEST_CASE("embedding and update match the oracle formulas") {
        ParameterStore store;
        Rng rng(4);
        const std::size_t d = 4;
        auto p = make_dynamics(store, "", 2, d, all_stages(), rng);
        p.b0->value[1] = 0.3;
        p.b1->value[2] = -0.2;
        p.theta->value[0] = 0.7;
        const auto post = oracle::random_vectors(1, d, rng)[0];
        const auto hist = oracle::random_vectors(1, d, rng)[0];
        const auto dyn = oracle::random_vectors(3, d, rng);

        Tape t(false);
        Var pv = t.constant(Tensor::vector(post)), hv = t.constant(Tensor::vector(hist));
        const Tensor got = embedding_at(t, p, pv, &hv, 1.0, 3.5).value();
        const auto want = oracle::embedding(oracle::to_mat(p.w0->value), oracle::to_mat(p.w1->value),
                                            oracle::to_mat(p.w2->value), oracle::to_vec(p.b0->value),
                                            oracle::to_vec(p.omega->value), oracle::to_vec(p.theta->value), post,
                                            hist, 2.5);
        CHECK(oracle::max_abs_diff(want, got) < 1e-14);

        auto dv = oracle::constants(t, dyn);
        const Tensor upd = interaction_update(t, p, pv, dv, 2.5).value();
        const auto wupd = oracle::update(oracle::to_mat(p.w3->value), oracle::to_mat(p.w4->value),
                                         oracle::to_mat(p.w5->value), oracle::to_vec(p.b1->value),
                                         oracle::to_vec(p.omega->value), oracle::to_vec(p.theta->value), post, dyn,
                                         2.5);
        CHECK(oracle::max_abs_diff(wupd, upd) < 1e-14);

        CHECK_THROWS(embedding_at(t, p, pv, &hv, 2.0, 1.0));
        CHECK_THROWS(embedding_at(t, p, pv, nullptr, 0.0, 1.0));
        CHECK_THROWS(interaction_update(t, p, pv, {}, 1.0));
    }

    TEST_CASE("static embeddings pass through") {
        ParameterStore store;
        Rng rng(4);
        auto p = make_dynamics(store, "", 2, 3, {}, rng);
        Tape t(false);
        Var v = t.constant(Tensor::vector({0.1, 0.2, 0.3}));
        CHECK(embedding_at(t, p, v, nullptr, 0.0, 10.0).value() == v.value());
    }

    TEST_CASE("time features") {
        Tape t(false);
        Var om = t.constant(Tensor::vector({1.0, 0.5})), th = t.constant(Tensor::vector({0.0, 0.1}));
        const Tensor f = time_features(om, th, 2.0).value();
        CHECK(f[0] == doctest::Approx(std::cos(2.0)));
        CHECK(f[1] == doctest::Approx(std::cos(1.1)));
        CHECK_THROWS(time_features(om, th, -1.0));
    }

    TEST_CASE("gradients through all stages") {
        ParameterStore store;
        Rng rng(8);
        auto p = make_dynamics(store, "", 3, 3, all_stages(), rng);
        HistoryWindow w(4);
        w.push({0, 1}, 0.0);
        w.push({1, 2}, 1.0);
        LossFn loss = [&](Tape& t) {
            Var th = t.parameter(*p.hgnn);
            Var init = t.parameter(*p.initial);
            auto agg = history_aggregate(t, w, [&](NodeId v) { return ad::row(init, v); }, th, 3);
            Var h0 = agg.at(0);
            Var e = embedding_at(t, p, ad::row(init, 0), &h0, 1.0, 2.0);
            std::vector<Var> dyn{ad::row(init, 1), ad::row(init, 2)};
            Var u = interaction_update(t, p, e, dyn, 1.0);
            return ad::sum(ad::square(ad::add(u, e)));
        };
        auto params = store.all();
        CHECK(finite_difference_check(loss, params, 1e-5) < 1e-5);
    }
}
