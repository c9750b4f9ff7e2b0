#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hgtpp/evaluation.hpp"
#include "hgtpp/tpp.hpp"

using namespace hgtpp;

namespace {

Hyperedge hom(std::vector<NodeId> v) { return {std::move(v), {}}; }

std::vector<EventRecord> stream(std::uint64_t seed, std::size_t n) {
    Rng g(seed);
    std::vector<EventRecord> ev;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t += g.exponential(1.0);
        std::vector<NodeId> e{static_cast<NodeId>(g.below(3)), static_cast<NodeId>(3 + g.below(3))};
        if (g.uniform() < 0.3) e.push_back(6);
        ev.push_back({hom(e), t});
    }
    return ev;
}

}  // namespace

TEST_SUITE("evaluation") {
    TEST_CASE("pessimistic ranks") {
        std::vector<double> neg{0.1, 0.5, 0.5, 0.9};
        CHECK(rank_of(1.0, neg) == 0);
        CHECK(rank_of(0.5, neg) == 3);
        CHECK(rank_of(0.0, neg) == 4);
        CHECK(rank_of(NAN, neg) == 4);
        CHECK(reciprocal_rank(0) == 1.0);
        std::vector<double> twenty(20, 1.0);
        CHECK(reciprocal_rank(rank_of(0.0, twenty)) == doctest::Approx(1.0 / 21));
    }

    TEST_CASE("rank invariant under monotone transforms") {
        Rng rng(4);
        for (int i = 0; i < 100; ++i) {
            std::vector<double> neg(10), tn(10);
            for (auto& x : neg) x = rng.uniform(-3, 3);
            const double s = rng.uniform(-3, 3);
            for (std::size_t j = 0; j < 10; ++j) tn[j] = std::exp(2 * neg[j]) + 1;
            CHECK(rank_of(s, neg) == rank_of(std::exp(2 * s) + 1, tn));
        }
    }

    TEST_CASE("buckets") {
        CHECK(size_bucket(2) == 0);
        CHECK(size_bucket(3) == 1);
        CHECK(size_bucket(4) == 1);
        CHECK(size_bucket(5) == 2);
        CHECK(size_bucket(8) == 2);
        CHECK(size_bucket(9) == 3);
        CHECK(size_bucket(40) == 3);
    }

    TEST_CASE("summaries of hand-built outcomes") {
        std::vector<EventOutcome> o(4);
        o[0] = {0, 2, 0, 21, 1.0, 1.5, false};
        o[1] = {1, 3, 1, 21, 2.0, 2.0, false};
        o[2] = {2, 9, 3, 21, 0.5, 1.5, false};
        o[3] = {3, 2, 20, 21};
        const auto m = summarize(o);
        CHECK(m.count == 4);
        CHECK(m.mrr == doctest::Approx((1.0 + 0.5 + 0.25 + 1.0 / 21) / 4));
        CHECK(m.mae_count == 3);
        CHECK(m.mae == doctest::Approx((0.5 + 0.0 + 1.0) / 3));
        CHECK(m.buckets[0].count == 2);
        CHECK(m.buckets[0].mrr == doctest::Approx((1.0 + 1.0 / 21) / 2));
        std::size_t total = 0;
        for (const auto& b : m.buckets) total += b.count;
        CHECK(total == m.count);

        std::vector<EventOutcome> perfect(5);
        for (auto& p : perfect) {
            p.size = 2;
            p.predicted = p.truth = 1.25;
        }
        const auto pm = summarize(perfect);
        CHECK(pm.mrr == 1.0);
        CHECK(pm.mae == 0.0);
    }

    TEST_CASE("groups") {
        std::vector<EventRecord> ev{{hom({0, 1}), 1}, {hom({1, 2}), 1}, {hom({0, 2}), 2}};
        auto g = group_by_time(ev);
        REQUIRE(g.size() == 2);
        CHECK(g[0] == std::pair<std::size_t, std::size_t>{0, 2});
        std::swap(ev[0], ev[2]);
        CHECK_THROWS(group_by_time(ev));
    }

    TEST_CASE("rayleigh durations use the closed form") {
        auto m = AssembledModel::assemble(model_config("RHE", 4), 4, 0, 3);
        auto st = m.initial_state();
        Tape tape(false);
        StepContext ctx(m, st, tape);
        const Hyperedge h = hom({1, 2});
        const double alpha = ctx.rayleigh_weight(h).item();
        CHECK(predict_duration(ctx, h, {}) == doctest::Approx(rayleigh_expected_duration(alpha)));
    }

    TEST_CASE("neural durations agree with the numeric expectation") {
        auto m = AssembledModel::assemble(model_config("DHE", 4), 4, 0, 3);
        auto st = m.initial_state();
        Tape tape(false);
        StepContext ctx(m, st, tape);
        const Hyperedge h = hom({0, 3});
        EvalConfig cfg;
        cfg.grid = 512;
        const double got = predict_duration(ctx, h, cfg);
        FunctionIntensity lam([&](double t) {
            Tape t2(false);
            StepContext c2(m, st, t2);
            return c2.intensity(h, t).item();
        });
        const double want = expected_duration_numeric(lam, ctx.anchor(h), cfg.horizon_factor, cfg.grid, cfg.time_unit);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
        CHECK(got > 0.0);
    }

    TEST_CASE("streaming evaluation is causal and thread-independent") {
        auto ev = stream(1, 60);
        auto m = AssembledModel::assemble(model_config("HGDHE", 4, 8), 7, 0, 2);
        auto sampler = NegativeSampler::fit(ev, false, 7, 0);
        EvalConfig cfg;
        cfg.negatives = 6;
        cfg.grid = 32;
        auto run = [&](const std::vector<EventRecord>& events, std::size_t threads) {
            auto st = m.initial_state(events.front().time);
            auto c = cfg;
            c.threads = threads;
            return evaluate_stream(m, st, events, sampler, c);
        };
        const auto base = run(ev, 1);
        CHECK(base.metrics.count == ev.size());
        CHECK(base.metrics.mrr > 0.0);
        CHECK(base.metrics.mrr <= 1.0);
        CHECK(base.metrics.mae >= 0.0);

        auto perturbed = ev;
        for (std::size_t i = 40; i < perturbed.size(); ++i) perturbed[i].edge = hom({0, 1, 2, 6});
        const auto p = run(perturbed, 1);
        for (std::size_t i = 0; i < 40; ++i) {
            CHECK(p.outcomes[i].rank == base.outcomes[i].rank);
            CHECK(p.outcomes[i].predicted == base.outcomes[i].predicted);
        }

        const auto threaded = run(ev, 3);
        for (std::size_t i = 0; i < ev.size(); ++i) CHECK(threaded.outcomes[i].rank == base.outcomes[i].rank);
        std::vector<EventRecord> none;
        auto st = m.initial_state();
        CHECK_THROWS(evaluate_stream(m, st, none, sampler, cfg));
    }

    TEST_CASE("metric writers") {
        Metrics m;
        m.count = 3;
        m.mrr = 0.5;
        m.mae = 2.0;
        std::ostringstream csv;
        write_metrics_csv(csv, "DHE", m, 10.0);
        CHECK(csv.str() == "model,events,mrr,mae,mae_original_units,duration_fallbacks\n"
                           "DHE,3,0.500000,2.000000,20.000000,0\n");
        std::ostringstream b;
        write_bucket_csv(b, "DHE", m, 1.0);
        CHECK(b.str().find("k>=9") != std::string::npos);
        std::ostringstream table;
        std::vector<std::pair<std::string, Metrics>> rows{{"DHE", m}, {"HGDHE", m}};
        write_metrics_table(table, rows, 1.0);
        CHECK(table.str().find("HGDHE") != std::string::npos);
        CHECK(table.str().find("50.00") != std::string::npos);
    }
}
