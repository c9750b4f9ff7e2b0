#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hgtpp/checkpoint.hpp"
#include "hgtpp/dataset.hpp"
#include "hgtpp/synthetic.hpp"
#include "hgtpp/training.hpp"

namespace hgtpp::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class CompatibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string model = "HGDHE";
    std::string data;
    bool bipartite = false;
    std::size_t d = 64;
    double lr = 0.001;
    std::size_t epochs = 100;
    std::size_t segment = 128;
    std::size_t negatives = 20;
    std::size_t mc_samples = 20;
    std::size_t history = 128;
    std::uint64_t seed = 0;
    std::uint64_t eval_seed = 0x5eed;
    std::size_t threads = 1;
    std::string out = ".";
    bool no_time_scaling = false;
    bool no_best = false;
    std::size_t grid = 256;
    std::size_t val_grid = 64;
    std::string checkpoint;
    bool untrained = false;
    std::string spec;
};

// `key = value` lines become `--key value` ahead of the command-line arguments,
// so flags given on the command line take precedence
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            file = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (file.empty()) return rest;
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config file " + file);
    std::vector<std::string> cfg;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) throw UsageError(file + ":" + std::to_string(n) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (val == "true" || val == "false") {
            if (val == "true") cfg.push_back("--" + key);
        } else {
            cfg.push_back("--" + key);
            cfg.push_back(val);
        }
    }
    // keep the subcommand first
    std::vector<std::string> out;
    if (!rest.empty()) out.push_back(rest[0]);
    out.insert(out.end(), cfg.begin(), cfg.end());
    if (rest.size() > 1) out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

void add_data_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--data", c.data, "Corpus directory, triple prefix, or bipartite event file")->required();
    sub->add_flag("--bipartite", c.bipartite, "Read the data as bipartite records");
    sub->add_flag("--no-time-scaling", c.no_time_scaling, "Keep original time units");
}

void add_model_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--model", c.model, "Model name: " + model_names_joined())->capture_default_str();
    sub->add_option("--d", c.d, "Embedding size")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--history", c.history, "History window length")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
    sub->add_option("--negatives", c.negatives, "Negatives per event")->capture_default_str();
    sub->add_option("--threads", c.threads, "Evaluation threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--eval-seed", c.eval_seed, "Seed for evaluation negatives")->capture_default_str();
    sub->add_option("--grid", c.grid, "Grid points for duration prediction")->capture_default_str();
}

void add_out_option(CLI::App* sub, RunConfig& c) {
    sub->add_option("--out", c.out, "Output directory")->envname("HGTPP_OUT")->capture_default_str();
}

struct Prepared {
    Dataset data;
    Split split;
    double time_unit = 1.0;  // median gap in the stored time units
};

Prepared prepare(const RunConfig& c) {
    Prepared p;
    p.data = load_dataset(c.data, c.bipartite);
    drop_singletons(p.data);
    if (p.data.events.size() < 4) throw std::runtime_error(c.data + ": fewer than 4 usable events");
    if (c.no_time_scaling) {
        p.time_unit = median_positive_gap(p.data.events);
    } else {
        p.data = scale_times(std::move(p.data));
    }
    p.split = split_events(p.data.events.size());
    return p;
}

std::span<const EventRecord> range(const Dataset& d, std::size_t b, std::size_t e) {
    return std::span<const EventRecord>(d.events).subspan(b, e - b);
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

EvalConfig eval_config(const RunConfig& c, const Prepared& p) {
    EvalConfig e;
    e.negatives = c.negatives;
    e.seed = c.eval_seed;
    e.grid = c.grid;
    e.time_unit = p.time_unit;
    e.threads = c.threads;
    return e;
}

std::map<std::string, std::string> resolved(const RunConfig& c, const Prepared& p) {
    return {{"model", c.model},
            {"d", std::to_string(c.d)},
            {"history", std::to_string(c.history)},
            {"lr", format_double(c.lr)},
            {"epochs", std::to_string(c.epochs)},
            {"segment", std::to_string(c.segment)},
            {"negatives", std::to_string(c.negatives)},
            {"mc-samples", std::to_string(c.mc_samples)},
            {"seed", std::to_string(c.seed)},
            {"eval-seed", std::to_string(c.eval_seed)},
            {"bipartite", c.bipartite ? "true" : "false"},
            {"no-time-scaling", c.no_time_scaling ? "true" : "false"},
            {"best-by-validation", c.no_best ? "false" : "true"},
            {"dataset", p.data.name},
            {"num_left", std::to_string(p.data.num_left)},
            {"num_right", std::to_string(p.data.num_right)},
            {"time_scale", format_double(p.data.time_scale)}};
}

int cmd_train(const RunConfig& c, std::ostream& out) {
    const ModelConfig mc = model_config(c.model, c.d, c.history);
    if (mc.bipartite != c.bipartite) {
        throw UsageError("model " + c.model + (mc.bipartite ? " needs --bipartite data" : " is not bipartite"));
    }
    Prepared p = prepare(c);
    AssembledModel model = AssembledModel::assemble(mc, p.data.num_left, p.data.num_right, c.seed);
    const auto train = range(p.data, 0, p.split.train_end);
    const auto val = range(p.data, p.split.train_end, p.split.val_end);
    const auto sampler = NegativeSampler::fit(train, c.bipartite, p.data.num_left, p.data.num_right);

    TrainConfig tc;
    tc.lr = c.lr;
    tc.segment = c.segment;
    tc.negatives = c.negatives;
    tc.mc_samples = c.mc_samples;
    tc.epochs = c.epochs;
    tc.seed = c.seed;
    tc.best_by_validation = !c.no_best;
    tc.validation = eval_config(c, p);
    tc.validation.grid = c.val_grid;

    fs::create_directories(c.out);
    std::ofstream trace(fs::path(c.out) / "trace.csv", std::ios::binary);
    if (!trace) throw std::runtime_error("cannot write " + (fs::path(c.out) / "trace.csv").string());
    trace << "epoch,train_loss,val_mrr,val_mae\n" << std::setprecision(10);
    const auto result = hgtpp::train(model, train, val, p.data.origin(), tc, sampler, [&](const EpochRecord& r) {
        trace << r.epoch << ',' << r.train_loss << ',' << r.val_mrr << ',' << r.val_mae << '\n';
        out << "epoch " << r.epoch << "  loss " << r.train_loss << "  val_mrr " << r.val_mrr << '\n';
    });

    auto meta = resolved(c, p);
    meta["best_epoch"] = std::to_string(result.best_epoch);
    write_checkpoint(fs::path(c.out) / "model.ckpt", checkpoint_from(model.parameters(), meta));
    std::ofstream echo(fs::path(c.out) / "config.txt", std::ios::binary);
    for (const auto& [k, v] : meta) echo << k << '=' << v << '\n';
    out << "wrote " << (fs::path(c.out) / "model.ckpt").string() << " (best epoch " << result.best_epoch << ")\n";
    return kOk;
}

// Rebuilds the model recorded in a checkpoint; explicit flags must agree with it.
AssembledModel load_model(const RunConfig& c, const CLI::App& sub, const Prepared& p) {
    if (c.untrained) {
        const ModelConfig mc = model_config(c.model, c.d, c.history);
        return AssembledModel::assemble(mc, p.data.num_left, p.data.num_right, c.seed);
    }
    const fs::path path = c.checkpoint.empty() ? fs::path(c.out) / "model.ckpt" : fs::path(c.checkpoint);
    if (!fs::exists(path)) throw std::runtime_error("checkpoint not found: " + path.string());
    const Checkpoint ckpt = read_checkpoint(path);
    auto meta = [&](const std::string& k) {
        auto it = ckpt.meta.find(k);
        if (it == ckpt.meta.end()) throw CompatibilityError("checkpoint lacks '" + k + "'");
        return it->second;
    };
    const std::string name = meta("model");
    const std::size_t d = std::stoul(meta("d"));
    const std::size_t history = std::stoul(meta("history"));
    if (sub.count("--model") && c.model != name) {
        throw CompatibilityError("checkpoint holds model " + name + ", not " + c.model);
    }
    if (sub.count("--d") && c.d != d) {
        throw CompatibilityError("checkpoint has d=" + std::to_string(d) + ", not " + std::to_string(c.d));
    }
    if (std::stoul(meta("num_left")) != p.data.num_left || std::stoul(meta("num_right")) != p.data.num_right) {
        throw CompatibilityError("checkpoint node counts do not match the dataset");
    }
    AssembledModel model = AssembledModel::assemble(model_config(name, d, history), p.data.num_left,
                                                    p.data.num_right, 0);
    try {
        load_into(ckpt, model.parameters());
    } catch (const CheckpointError& e) {
        throw CompatibilityError(e.what());
    }
    return model;
}

int cmd_evaluate(const RunConfig& c, const CLI::App& sub, std::ostream& out) {
    Prepared p = prepare(c);
    const AssembledModel model = load_model(c, sub, p);
    const auto train = range(p.data, 0, p.split.train_end);
    const auto history = range(p.data, 0, p.split.val_end);
    const auto test = range(p.data, p.split.val_end, p.split.size);
    const auto sampler = NegativeSampler::fit(train, model.config().bipartite, p.data.num_left, p.data.num_right);
    const auto ev = evaluate_after(model, p.data.origin(), history, test, sampler, eval_config(c, p));

    fs::create_directories(c.out);
    const double scale = p.data.time_scale;
    std::ofstream m(fs::path(c.out) / "metrics.csv", std::ios::binary);
    write_metrics_csv(m, model.config().name, ev.metrics, scale);
    std::ofstream b(fs::path(c.out) / "buckets.csv", std::ios::binary);
    write_bucket_csv(b, model.config().name, ev.metrics, scale);
    const std::pair<std::string, Metrics> rows[] = {{model.config().name, ev.metrics}};
    std::ofstream t(fs::path(c.out) / "metrics.txt", std::ios::binary);
    write_metrics_table(t, rows, scale);
    write_metrics_table(out, rows, scale);
    return kOk;
}

int cmd_predict(const RunConfig& c, const CLI::App& sub, std::ostream& out) {
    Prepared p = prepare(c);
    const AssembledModel model = load_model(c, sub, p);
    const auto train = range(p.data, 0, p.split.train_end);
    const auto test = range(p.data, p.split.val_end, p.split.size);
    const auto sampler = NegativeSampler::fit(train, model.config().bipartite, p.data.num_left, p.data.num_right);
    StreamState state = model.initial_state(p.data.origin());
    replay(model, state, range(p.data, 0, p.split.val_end));

    const EvalConfig ec = eval_config(c, p);
    const double scale = p.data.time_scale;
    fs::create_directories(c.out);
    std::ofstream f(fs::path(c.out) / "predictions.csv", std::ios::binary);
    f << "index,time,hyperedge,rank,candidates,top_candidate,predicted_duration,true_duration\n"
      << std::setprecision(10);
    const Rng base(c.eval_seed);
    for (auto [b, e] : group_by_time(test)) {
        const double t = test[b].time;
        Tape tape(false);
        StepContext ctx(model, state, tape);
        for (std::size_t i = b; i < e; ++i) {
            const Hyperedge& h = test[i].edge;
            Rng rng = base.split(i);
            const auto negs = sampler.draw(h, c.negatives, rng);
            const RankResult r = predict_type(ctx, h, t, negs);
            std::size_t top = negs.size();  // true edge
            double best = r.true_score;
            for (std::size_t j = 0; j < negs.size(); ++j) {
                if (r.negative_scores[j] > best) {
                    best = r.negative_scores[j];
                    top = j;
                }
            }
            double predicted = std::numeric_limits<double>::quiet_NaN();
            try {
                predicted = predict_duration(ctx, h, ec);
            } catch (const std::domain_error&) {
            }
            // hyperedges contain commas, so they are quoted
            f << (p.split.val_end + i) << ',' << t * scale << ",\"" << to_string(h) << "\"," << r.rank << ','
              << r.candidates << ",\"" << to_string(top == negs.size() ? h : negs[top]) << "\","
              << predicted * scale << ',' << (t - ctx.anchor(h)) * scale << '\n';
        }
        ctx.advance(test.subspan(b, e - b), t);
    }
    out << "wrote " << (fs::path(c.out) / "predictions.csv").string() << '\n';
    return kOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
    std::ifstream in(c.spec);
    if (!in) throw std::runtime_error("cannot open spec file " + c.spec);
    const SyntheticSpec spec = parse_synthetic_spec(in);
    Rng rng(c.seed);
    const Dataset d = generate_synthetic(spec, rng);
    fs::create_directories(c.out);
    if (d.bipartite) {
        const fs::path f = fs::path(c.out) / (spec.name + ".tsv");
        write_bipartite_corpus(d, f);
        out << "wrote " << d.events.size() << " events to " << f.string() << '\n';
    } else {
        const fs::path prefix = write_simplex_corpus(d, c.out, spec.name);
        out << "wrote " << d.events.size() << " events to " << prefix.string() << "-*.txt\n";
    }
    return kOk;
}

int cmd_stats(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Dataset d = load_dataset(c.data, c.bipartite);
    const DatasetStats s = compute_stats(d);
    if (s.events == 0) err << "warning: dataset has no events\n";
    if (d.duplicates_removed) err << "note: removed " << d.duplicates_removed << " repeated node ids\n";
    write_stats(out, d.name, s, d.bipartite);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Temporal point process models for hyperedge forecasting", "hgtpp"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", "key=value file; command-line flags override it");

    auto* train = app.add_subcommand("train", "Fit a model and write a checkpoint, loss trace and resolved config");
    add_data_options(train, c);
    add_model_options(train, c);
    add_out_option(train, c);
    train->add_option("--lr", c.lr, "Adam learning rate")->capture_default_str();
    train->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
    train->add_option("--segment", c.segment, "Events per training segment")->capture_default_str()->check(
        CLI::PositiveNumber);
    train->add_option("--mc-samples", c.mc_samples, "Monte-Carlo samples per survival term")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    train->add_option("--val-grid", c.val_grid, "Duration grid points during validation")->capture_default_str();
    train->add_flag("--no-best", c.no_best, "Keep the last epoch instead of the best validation MRR");

    auto* evaluate = app.add_subcommand("evaluate", "Score the test split: MRR, MAE and size buckets");
    add_data_options(evaluate, c);
    add_model_options(evaluate, c);
    add_out_option(evaluate, c);
    evaluate->add_option("--checkpoint", c.checkpoint, "Checkpoint file (default <out>/model.ckpt)");
    evaluate->add_flag("--untrained", c.untrained, "Evaluate a freshly initialized model");

    auto* predict = app.add_subcommand("predict", "Per-event type and duration predictions on the test split");
    add_data_options(predict, c);
    add_model_options(predict, c);
    add_out_option(predict, c);
    predict->add_option("--checkpoint", c.checkpoint, "Checkpoint file (default <out>/model.ckpt)");
    predict->add_flag("--untrained", c.untrained, "Use a freshly initialized model");

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus from a spec file");
    simulate->add_option("--spec", c.spec, "Synthetic spec (key=value)")->required();
    simulate->add_option("--seed", c.seed, "Seed")->capture_default_str();
    add_out_option(simulate, c);

    auto* stats = app.add_subcommand("stats", "Print node, event and hyperedge counts");
    stats->add_option("--data", c.data, "Corpus directory, triple prefix, or bipartite event file")->required();
    stats->add_flag("--bipartite", c.bipartite, "Read the data as bipartite records");

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    }

    try {
        if (*train) return cmd_train(c, out);
        if (*evaluate) return cmd_evaluate(c, *evaluate, out);
        if (*predict) return cmd_predict(c, *predict, out);
        if (*simulate) return cmd_simulate(c, out);
        if (*stats) return cmd_stats(c, out, err);
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kDivergence;
    } catch (const UnknownModelError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const SpecError& e) {
        err << "error: invalid spec: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}

}  // namespace hgtpp::cli
