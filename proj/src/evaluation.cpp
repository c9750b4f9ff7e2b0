#include "hgtpp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hgtpp/tpp.hpp"

namespace hgtpp {

std::vector<std::pair<std::size_t, std::size_t>> group_by_time(std::span<const EventRecord> events) {
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::size_t i = 0;
    while (i < events.size()) {
        std::size_t j = i + 1;
        while (j < events.size() && events[j].time == events[i].time) ++j;
        if (j < events.size() && events[j].time < events[i].time) {
            throw std::invalid_argument("event stream is not sorted by time at index " + std::to_string(j));
        }
        groups.emplace_back(i, j);
        i = j;
    }
    return groups;
}

std::size_t rank_of(double true_score, std::span<const double> negative_scores) {
    if (std::isnan(true_score)) return negative_scores.size();
    std::size_t r = 0;
    for (double s : negative_scores) {
        if (s >= true_score || std::isnan(s)) ++r;
    }
    return r;
}

std::size_t size_bucket(std::size_t k) {
    if (k <= 2) return 0;
    if (k <= 4) return 1;
    if (k <= 8) return 2;
    return 3;
}

Metrics summarize(std::span<const EventOutcome> outcomes) {
    Metrics m;
    for (const auto& o : outcomes) {
        auto& b = m.buckets[size_bucket(o.size)];
        const double rr = reciprocal_rank(o.rank);
        ++m.count;
        ++b.count;
        m.mrr += rr;
        b.mrr += rr;
        if (o.duration_fallback) ++m.duration_fallbacks;
        if (std::isfinite(o.predicted) && std::isfinite(o.truth)) {
            const double err = std::abs(o.predicted - o.truth);
            m.mae += err;
            b.mae += err;
            ++m.mae_count;
            ++b.mae_count;
        }
    }
    auto finish = [](double& sum, std::size_t n) { sum = n ? sum / static_cast<double>(n) : 0.0; };
    finish(m.mrr, m.count);
    finish(m.mae, m.mae_count);
    for (auto& b : m.buckets) {
        finish(b.mrr, b.count);
        finish(b.mae, b.mae_count);
    }
    return m;
}

RankResult predict_type(StepContext& ctx, const Hyperedge& h, double t, std::span<const Hyperedge> negatives) {
    RankResult r;
    r.true_score = ctx.intensity(h, t).item();
    r.negative_scores.reserve(negatives.size());
    for (const auto& n : negatives) r.negative_scores.push_back(ctx.intensity(n, t).item());
    r.rank = rank_of(r.true_score, r.negative_scores);
    r.candidates = negatives.size() + 1;
    return r;
}

double predict_duration(StepContext& ctx, const Hyperedge& h, const EvalConfig& cfg) {
    const ModelConfig& mc = ctx.model().config();
    if (mc.family == IntensityFamily::rayleigh) return rayleigh_expected_duration(ctx.rayleigh_weight(h).item());
    if (cfg.grid < 16) throw std::invalid_argument("duration grid must have at least 16 points");
    const double step = cfg.horizon_factor * cfg.time_unit / static_cast<double>(cfg.grid - 1);
    std::vector<double> lambda(cfg.grid);
    const double anchor = ctx.anchor(h);
    if (mc.hyperedge) {
        for (std::size_t k = 0; k < cfg.grid; ++k) {
            lambda[k] = ctx.intensity(h, anchor + step * static_cast<double>(k)).item();
        }
        return expected_duration_from_grid(lambda, step);
    }
    // per-pair expectations from each pair's own anchor, averaged as predicted event times
    const auto pairs = ctx.pairwise_intensities(h, anchor);
    double mean_time = 0.0;
    std::size_t idx = 0;
    auto one_pair = [&](Side sa, NodeId a, Side sb, NodeId b) {
        Hyperedge pair;
        pair.side(sa).push_back(a);
        pair.side(sb).push_back(b);
        const double pa = pairs[idx++].second;
        for (std::size_t k = 0; k < cfg.grid; ++k) {
            lambda[k] = ctx.pairwise_intensities(pair, pa + step * static_cast<double>(k))[0].first.item();
        }
        mean_time += pa + expected_duration_from_grid(lambda, step);
    };
    if (mc.bipartite) {
        for (NodeId a : h.left) {
            for (NodeId b : h.right) one_pair(Side::left, a, Side::right, b);
        }
    } else {
        for (auto [a, b] : clique_decompose(h.left)) one_pair(Side::left, a, Side::left, b);
    }
    mean_time /= static_cast<double>(pairs.size());
    return std::max(0.0, mean_time - anchor);
}

void replay(const AssembledModel& model, StreamState& state, std::span<const EventRecord> events) {
    for (auto [b, e] : group_by_time(events)) {
        Tape tape(false);
        StepContext ctx(model, state, tape);
        ctx.advance(events.subspan(b, e - b), events[b].time);
    }
}

namespace {

std::vector<double> score_parallel(const AssembledModel& model, StreamState& state,
                                   std::span<const Hyperedge> candidates, double t, std::size_t threads) {
    std::vector<double> out(candidates.size());
    const std::size_t chunks = std::min(threads, candidates.size());
    const std::size_t per = (candidates.size() + chunks - 1) / chunks;
    std::vector<std::future<void>> jobs;
    for (std::size_t c = 0; c < chunks; ++c) {
        jobs.push_back(std::async(std::launch::async, [&, c] {
            Tape tape(false);
            StepContext ctx(model, state, tape);
            for (std::size_t i = c * per; i < std::min(candidates.size(), (c + 1) * per); ++i) {
                out[i] = ctx.intensity(candidates[i], t).item();
            }
        }));
    }
    for (auto& j : jobs) j.get();
    return out;
}

}  // namespace

StreamEvaluation evaluate_stream(const AssembledModel& model, StreamState& state, std::span<const EventRecord> events,
                                 const NegativeSampler& sampler, const EvalConfig& cfg) {
    if (events.empty()) throw std::invalid_argument("evaluate_stream: empty evaluation split");
    const Rng base(cfg.seed);
    StreamEvaluation result;
    result.outcomes.reserve(events.size());
    for (auto [b, e] : group_by_time(events)) {
        const double t = events[b].time;
        Tape tape(false);
        StepContext ctx(model, state, tape);
        for (std::size_t i = b; i < e; ++i) {
            const Hyperedge& h = events[i].edge;
            Rng rng = base.split(i);
            const auto negatives = sampler.draw(h, cfg.negatives, rng);
            EventOutcome o;
            o.index = i;
            o.size = h.size();
            if (cfg.threads > 1 && !negatives.empty()) {
                std::vector<Hyperedge> all(negatives);
                all.push_back(h);
                auto scores = score_parallel(model, state, all, t, cfg.threads);
                const double mine = scores.back();
                scores.pop_back();
                o.rank = rank_of(mine, scores);
            } else {
                o.rank = predict_type(ctx, h, t, negatives).rank;
            }
            o.candidates = negatives.size() + 1;
            if (cfg.durations) {
                o.truth = t - ctx.anchor(h);
                try {
                    o.predicted = predict_duration(ctx, h, cfg);
                } catch (const std::domain_error&) {
                    // no mass on the horizon: the event is not expected before it ends
                    o.predicted = cfg.horizon_factor * cfg.time_unit;
                    o.duration_fallback = true;
                }
            }
            result.outcomes.push_back(o);
        }
        ctx.advance(events.subspan(b, e - b), t);
    }
    result.metrics = summarize(result.outcomes);
    return result;
}

// ------------------------------------------------------------- output

namespace {

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << std::fixed << v;
    return os.str();
}

}  // namespace

void write_metrics_csv(std::ostream& os, const std::string& model, const Metrics& m, double time_scale) {
    os << "model,events,mrr,mae,mae_original_units,duration_fallbacks\n";
    os << model << ',' << m.count << ',' << fmt(m.mrr) << ',' << fmt(m.mae) << ',' << fmt(m.mae * time_scale) << ','
       << m.duration_fallbacks << '\n';
}

void write_bucket_csv(std::ostream& os, const std::string& model, const Metrics& m, double time_scale) {
    os << "model,bucket,events,mrr,mae,mae_original_units\n";
    for (std::size_t i = 0; i < m.buckets.size(); ++i) {
        const auto& b = m.buckets[i];
        os << model << ',' << kBucketLabels[i] << ',' << b.count << ',' << fmt(b.mrr) << ',' << fmt(b.mae) << ','
           << fmt(b.mae * time_scale) << '\n';
    }
}

void write_metrics_table(std::ostream& os, std::span<const std::pair<std::string, Metrics>> rows, double time_scale) {
    std::size_t w = 5;
    for (const auto& [name, _] : rows) w = std::max(w, name.size());
    os << std::left << std::setw(static_cast<int>(w) + 2) << "Model" << std::right << std::setw(10) << "MRR(%)"
       << std::setw(14) << "MAE" << std::setw(10) << "events" << '\n';
    for (const auto& [name, m] : rows) {
        os << std::left << std::setw(static_cast<int>(w) + 2) << name << std::right << std::setw(10)
           << fmt(100.0 * m.mrr, 2) << std::setw(14) << fmt(m.mae * time_scale, 4) << std::setw(10) << m.count
           << '\n';
    }
}

}  // namespace hgtpp
