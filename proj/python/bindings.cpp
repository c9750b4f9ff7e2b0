#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cli.hpp"
#include "hgtpp/dataset.hpp"
#include "hgtpp/encoders.hpp"
#include "hgtpp/synthetic.hpp"
#include "hgtpp/tpp.hpp"
#include "hgtpp/training.hpp"

namespace py = pybind11;
using namespace hgtpp;

namespace {

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["events"] = m.count;
    d["mrr"] = m.mrr;
    d["mae"] = m.mae;
    py::list buckets;
    for (std::size_t i = 0; i < m.buckets.size(); ++i) {
        py::dict b;
        b["bucket"] = kBucketLabels[i];
        b["events"] = m.buckets[i].count;
        b["mrr"] = m.buckets[i].mrr;
        b["mae"] = m.buckets[i].mae;
        buckets.append(b);
    }
    d["buckets"] = buckets;
    return d;
}

py::dict fit_and_evaluate(const Dataset& data, const std::string& model, std::size_t d, std::size_t epochs,
                          double lr, std::size_t segment, std::size_t negatives, std::size_t mc_samples,
                          std::uint64_t seed) {
    const Split sp = split_events(data.events.size());
    std::span<const EventRecord> all(data.events);
    const auto train_split = all.subspan(0, sp.train_end);
    const auto val = all.subspan(sp.train_end, sp.val_end - sp.train_end);
    const auto test = all.subspan(sp.val_end);
    AssembledModel m = AssembledModel::assemble(model_config(model, d), data.num_left, data.num_right, seed);
    const auto sampler = NegativeSampler::fit(train_split, data.bipartite, data.num_left, data.num_right);
    TrainConfig tc;
    tc.lr = lr;
    tc.epochs = epochs;
    tc.segment = segment;
    tc.negatives = negatives;
    tc.mc_samples = mc_samples;
    tc.seed = seed;
    tc.validation.negatives = negatives;
    tc.validation.durations = false;
    TrainResult r;
    {
        py::gil_scoped_release release;
        r = train(m, train_split, val, data.origin(), tc, sampler);
    }
    EvalConfig ec;
    ec.negatives = negatives;
    ec.grid = 64;
    const auto ev = evaluate_after(m, data.origin(), all.subspan(0, sp.val_end), test, sampler, ec);
    py::dict out = metrics_dict(ev.metrics);
    py::list trace;
    for (const auto& e : r.trace) trace.append(py::make_tuple(e.epoch, e.train_loss, e.val_mrr));
    out["trace"] = trace;
    out["best_epoch"] = r.best_epoch;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Temporal point process models for hyperedge forecasting";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
    py::register_exception<UnknownModelError>(m, "UnknownModelError", PyExc_ValueError);

    m.def("model_names", &model_names);
    m.def("rayleigh_expected_duration", &rayleigh_expected_duration, py::arg("alpha"));
    m.def(
        "survival_constant",
        [](double rate, double from, double to) { return survival(ConstantIntensity(rate), from, to); },
        py::arg("rate"), py::arg("start"), py::arg("end"));
    m.def(
        "survival_rayleigh",
        [](double alpha, double anchor, double t) { return survival(RayleighIntensity(alpha, anchor), anchor, t); },
        py::arg("alpha"), py::arg("anchor"), py::arg("t"));
    m.def(
        "clique_decompose", [](std::vector<NodeId> h) { return clique_decompose(h); }, py::arg("nodes"));

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("name", &Dataset::name)
        .def_readonly("bipartite", &Dataset::bipartite)
        .def_readonly("num_left", &Dataset::num_left)
        .def_readonly("num_right", &Dataset::num_right)
        .def_readonly("time_scale", &Dataset::time_scale)
        .def_readonly("left_ids", &Dataset::left_ids)
        .def_readonly("right_ids", &Dataset::right_ids)
        .def("__len__", [](const Dataset& d) { return d.events.size(); })
        .def_property_readonly("events",
                               [](const Dataset& d) {
                                   py::list out;
                                   for (const auto& e : d.events) {
                                       out.append(py::make_tuple(e.time, e.edge.left, e.edge.right));
                                   }
                                   return out;
                               })
        .def("stats", [](const Dataset& d) {
            const auto s = compute_stats(d);
            py::dict out;
            out["num_left"] = s.num_left;
            out["num_right"] = s.num_right;
            out["events"] = s.events;
            out["distinct_left"] = s.distinct_left;
            out["distinct_right"] = s.distinct_right;
            out["pairwise_fraction"] = s.pairwise_fraction;
            return out;
        });

    m.def("load_dataset", &load_dataset, py::arg("path"), py::arg("bipartite") = false);
    m.def("write_simplex_corpus", &write_simplex_corpus, py::arg("dataset"), py::arg("directory"), py::arg("name"));
    m.def("write_bipartite_corpus", &write_bipartite_corpus, py::arg("dataset"), py::arg("path"));
    m.def("scale_times", &scale_times, py::arg("dataset"));
    m.def(
        "generate_synthetic",
        [](const std::string& spec, std::uint64_t seed) {
            Rng rng(seed);
            return generate_synthetic(parse_synthetic_spec(spec), rng);
        },
        py::arg("spec"), py::arg("seed") = 0);
    m.def("fit_and_evaluate", &fit_and_evaluate, py::arg("dataset"), py::arg("model") = "HGDHE", py::arg("d") = 8,
          py::arg("epochs") = 1, py::arg("lr") = 0.001, py::arg("segment") = 32, py::arg("negatives") = 10,
          py::arg("mc_samples") = 10, py::arg("seed") = 0);
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
