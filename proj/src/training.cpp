#include "hgtpp/training.hpp"

#include <cmath>

#include "hgtpp/tpp.hpp"

namespace hgtpp {

void check_train_config(const TrainConfig& cfg) {
    if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) throw std::invalid_argument("learning rate must be >= 0");
    if (cfg.segment == 0) throw std::invalid_argument("segment length must be >= 1");
    if (cfg.mc_samples < 2) throw std::invalid_argument("Monte-Carlo samples must be >= 2");
}

namespace {

Var positive_term(StepContext& ctx, const Hyperedge& h, double t) {
    if (ctx.model().config().family == IntensityFamily::rayleigh) {
        // −log(α (t − t_h^p)) with the elapsed time floored away from zero
        const double elapsed = std::max(t - ctx.anchor(h), kMinRayleighElapsed);
        Var a = ctx.rayleigh_weight(h);
        return ad::scale(ad::add(ad::log(a), ctx.tape().constant(std::log(elapsed))), -1.0);
    }
    return ad::scale(ad::log(ctx.intensity(h, t)), -1.0);
}

}  // namespace

SegmentLoss segment_loss(const AssembledModel& model, StreamState& state, Tape& tape,
                         std::span<const EventRecord> segment, const NegativeSampler* sampler,
                         std::size_t negatives, std::size_t mc_samples, Rng& rng) {
    SegmentLoss out;
    std::vector<Var> terms;
    terms.reserve(segment.size());
    double t_prev = state.last_event_time;
    for (auto [b, e] : group_by_time(segment)) {
        const double t = segment[b].time;
        if (t < t_prev) throw std::invalid_argument("segment_loss: timestamps go backwards");
        StepContext ctx(model, state, tape);
        const bool has_interval = t_prev < t;
        std::vector<double> samples;
        if (has_interval && model.config().family != IntensityFamily::rayleigh) {
            samples = sorted_uniform_samples(t_prev, t, mc_samples, rng);
        }
        for (std::size_t i = b; i < e; ++i) {
            const Hyperedge& h = segment[i].edge;
            Var pos = positive_term(ctx, h, t);
            Var term = pos;
            double surv_value = 0.0;
            if (has_interval) {
                std::vector<Hyperedge> cands;
                if (sampler != nullptr && negatives > 0) cands = sampler->draw(h, negatives, rng);
                out.negatives_drawn += cands.size();
                Var surv = ctx.survival_term(h, samples, t_prev, t);
                for (const auto& n : cands) surv = ad::add(surv, ctx.survival_term(n, samples, t_prev, t));
                surv_value = surv.item();
                term = ad::add(pos, surv);
            }
            out.positive.push_back(pos.item());
            out.survival.push_back(surv_value);
            out.terms.push_back(term.item());
            terms.push_back(term);
        }
        ctx.advance(segment.subspan(b, e - b), t);
        t_prev = t;
    }
    if (terms.empty()) {
        out.total = tape.constant(0.0);
        return out;
    }
    Var total = terms[0];
    for (std::size_t i = 1; i < terms.size(); ++i) total = ad::add(total, terms[i]);
    out.total = total;
    return out;
}

Adam::Adam(std::vector<Parameter*> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (auto* p : params_) {
        m_.emplace_back(p->value.shape());
        v_.emplace_back(p->value.shape());
    }
}

void Adam::step() {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto w = params_[i]->value.values();
        auto g = params_[i]->grad.values();
        auto m = m_[i].values();
        auto v = v_[i].values();
        for (std::size_t j = 0; j < w.size(); ++j) {
            m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
            v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
            w[j] -= lr_ * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps_);
        }
    }
}

std::vector<std::pair<std::size_t, std::size_t>> make_segments(std::span<const EventRecord> events,
                                                               std::size_t length) {
    if (length == 0) throw std::invalid_argument("segment length must be >= 1");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    for (auto [b, e] : group_by_time(events)) {
        if (e - start >= length) {
            out.emplace_back(start, e);
            start = e;
        }
    }
    if (start < events.size()) out.emplace_back(start, events.size());
    return out;
}

StreamEvaluation evaluate_after(const AssembledModel& model, double origin, std::span<const EventRecord> history,
                                std::span<const EventRecord> events, const NegativeSampler& sampler,
                                const EvalConfig& cfg) {
    StreamState state = model.initial_state(origin);
    replay(model, state, history);
    return evaluate_stream(model, state, events, sampler, cfg);
}

TrainResult train(AssembledModel& model, std::span<const EventRecord> train_events,
                  std::span<const EventRecord> val_events, double origin, const TrainConfig& cfg,
                  const NegativeSampler& sampler, const std::function<void(const EpochRecord&)>& on_epoch) {
    check_train_config(cfg);
    if (train_events.empty()) throw std::invalid_argument("train: empty training split");
    ParameterStore& params = model.parameters();
    Adam opt(params.all(), cfg.lr);
    const auto segments = make_segments(train_events, cfg.segment);
    const bool validating = cfg.validate && !val_events.empty();
    const Rng root(cfg.seed);

    TrainResult result;
    std::vector<Tensor> best;
    if (validating && cfg.best_by_validation) {
        result.best_val_mrr =
            evaluate_after(model, origin, train_events, val_events, sampler, cfg.validation).metrics.mrr;
        best = params.snapshot();
    }
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        StreamState state = model.initial_state(origin);
        // the same stream every epoch: identical negatives and sample times, so lr = 0 repeats the loss
        Rng rng = root.split(0);
        double loss_sum = 0.0;
        for (auto [b, e] : segments) {
            params.zero_grad();
            Tape tape;
            SegmentLoss loss = segment_loss(model, state, tape, train_events.subspan(b, e - b), &sampler,
                                            cfg.negatives, cfg.mc_samples, rng);
            const double value = loss.total.item();
            if (!std::isfinite(value)) {
                throw DivergenceError("training diverged: non-finite loss in epoch " + std::to_string(epoch));
            }
            loss_sum += value;
            tape.backward(loss.total);
            for (const auto* p : params.all()) {
                if (!p->grad.all_finite()) {
                    throw DivergenceError("training diverged: non-finite gradient for " + p->name);
                }
            }
            opt.step();
            state.detach();
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(train_events.size());
        if (validating) {
            const auto m = evaluate_after(model, origin, train_events, val_events, sampler, cfg.validation).metrics;
            rec.val_mrr = m.mrr;
            rec.val_mae = m.mae;
            if (cfg.best_by_validation && m.mrr > result.best_val_mrr) {
                result.best_val_mrr = m.mrr;
                result.best_epoch = epoch;
                best = params.snapshot();
            }
        }
        result.trace.push_back(rec);
        if (on_epoch) on_epoch(rec);
    }
    if (validating && cfg.best_by_validation) {
        params.restore(best);
    } else {
        result.best_epoch = cfg.epochs;
    }
    params.zero_grad();
    return result;
}

}  // namespace hgtpp
