#include <cmath>

#include "checks.hpp"
#include "doctest.h"
#include "hgtpp/encoders.hpp"

using namespace hgtpp;

TEST_SUITE("encoders") {
    TEST_CASE("matches the straight-line oracle") {
        const auto r = oracle::check_encoders(100, 4, 5, 1234);
        CHECK(r.instances == 100);
        CHECK(r.max_error < 1e-12);
        CHECK(r.max_permutation < 1e-9);
    }

    TEST_CASE("score is positive and differentiable") {
        ParameterStore store;
        Rng rng(3);
        auto p = make_homogeneous_encoder(store, "", 3, rng);
        auto xs = oracle::random_vectors(3, 3, rng);
        LossFn loss = [&](Tape& t) { return encode_homogeneous(p, oracle::constants(t, xs)).score; };
        Tape t(false);
        CHECK(loss(t).item() > 0.0);
        auto params = store.all();
        CHECK(finite_difference_check(loss, params, 1e-6) < 1e-6);

        auto q = make_bipartite_encoder(store, "b.", 3, rng);
        auto ls = oracle::random_vectors(2, 3, rng), rs = oracle::random_vectors(3, 3, rng);
        LossFn bl = [&](Tape& t) {
            return encode_bipartite(q, oracle::constants(t, ls), oracle::constants(t, rs)).score;
        };
        params = store.all();
        CHECK(finite_difference_check(bl, params, 1e-6) < 1e-6);
    }

    TEST_CASE("arity and dimension errors") {
        ParameterStore store;
        Rng rng(1);
        auto p = make_homogeneous_encoder(store, "", 4, rng);
        Tape t(false);
        auto one = oracle::constants(t, oracle::random_vectors(1, 4, rng));
        CHECK_THROWS_AS(encode_homogeneous(p, one), std::invalid_argument);
        auto wrong = oracle::constants(t, oracle::random_vectors(2, 3, rng));
        CHECK_THROWS_AS(encode_homogeneous(p, wrong), ShapeError);
        auto b = make_bipartite_encoder(store, "b.", 4, rng);
        auto two = oracle::constants(t, oracle::random_vectors(2, 4, rng));
        CHECK_THROWS(encode_bipartite(b, two, {}));
    }

    TEST_CASE("bipartite sides keep separate weights") {
        ParameterStore store;
        Rng rng(2);
        make_bipartite_encoder(store, "enc.", 2, rng);
        CHECK(store.find("enc.left.W_Q") != nullptr);
        CHECK(store.find("enc.right.W_Q") != nullptr);
        CHECK(store.find("enc.left.W_Q")->value != store.find("enc.right.W_Q")->value);
    }

    TEST_CASE("pairwise score and clique decomposition") {
        Tape t(false);
        Var a = t.constant(Tensor::vector({1, 2})), b = t.constant(Tensor::vector({0.5, -1}));
        CHECK(encode_pairwise(a, b).item() == doctest::Approx(std::log1p(std::exp(-1.5))));
        std::vector<NodeId> h{4, 1, 7};
        auto pairs = clique_decompose(h);
        REQUIRE(pairs.size() == 3);
        CHECK(pairs[0] == std::pair<NodeId, NodeId>{1, 4});
        CHECK(pairs[1] == std::pair<NodeId, NodeId>{1, 7});
        CHECK(pairs[2] == std::pair<NodeId, NodeId>{4, 7});
        std::vector<NodeId> single{3};
        CHECK_THROWS(clique_decompose(single));
    }
}
