#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "hgtpp/checkpoint.hpp"
#include "hgtpp/dataset.hpp"
#include "hgtpp/model.hpp"
#include "hgtpp/synthetic.hpp"

using namespace hgtpp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hgtpp-unit-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

bool same(const Dataset& a, const Dataset& b) {
    return a.events == b.events && a.left_ids == b.left_ids && a.right_ids == b.right_ids &&
           a.num_left == b.num_left && a.num_right == b.num_right;
}

}  // namespace

TEST_SUITE("data-io") {
    TEST_CASE("simplex triple parsing and remapping") {
        auto dir = scratch("triple");
        write_file(dir / "toy-nverts.txt", "2\n3\n1\n");
        write_file(dir / "toy-simplices.txt", "10\n4\n4\n4\n7\n4\n");
        write_file(dir / "toy-times.txt", "5\n3\n3\n");
        const Dataset d = load_simplex_directory(dir);
        CHECK(d.name == "toy");
        CHECK(d.num_left == 3);
        CHECK(d.left_ids == std::vector<std::uint64_t>{4, 7, 10});
        REQUIRE(d.events.size() == 3);
        // stable by time: second and third records share t=3
        CHECK(d.events[0].time == 3.0);
        CHECK(d.events[0].edge.left == std::vector<NodeId>{0, 1});
        CHECK(d.events[1].edge.left == std::vector<NodeId>{0});
        CHECK(d.events[2].edge.left == std::vector<NodeId>{0, 2});
        CHECK(d.duplicates_removed == 1);
    }

    TEST_CASE("malformed triples report the file and line") {
        auto dir = scratch("bad");
        write_file(dir / "x-nverts.txt", "2\nfoo\n");
        write_file(dir / "x-simplices.txt", "1\n2\n3\n");
        write_file(dir / "x-times.txt", "1\n2\n");
        try {
            load_simplex_directory(dir);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(std::string(e.what()).find("x-nverts.txt") != std::string::npos);
        }
        write_file(dir / "x-nverts.txt", "2\n2\n");
        CHECK_THROWS_AS(load_simplex_directory(dir), ParseError);  // simplices too short
        CHECK_THROWS(load_simplex_directory(scratch("empty")));
    }

    TEST_CASE("bipartite records") {
        auto dir = scratch("bip");
        write_file(dir / "b.tsv", "# time\tleft\tright\n1.5\t3,1\t9\n\n0.5|1|8,9\n");
        const Dataset d = load_bipartite_corpus(dir / "b.tsv");
        CHECK(d.bipartite);
        CHECK(d.num_left == 2);
        CHECK(d.num_right == 2);
        REQUIRE(d.events.size() == 2);
        CHECK(d.events[0].time == 0.5);
        CHECK(d.events[0].edge.right == std::vector<NodeId>{0, 1});
        write_file(dir / "bad.tsv", "1.0\t1\n");
        CHECK_THROWS_AS(load_bipartite_corpus(dir / "bad.tsv"), ParseError);
        write_file(dir / "bad2.tsv", "x\t1\t2\n");
        CHECK_THROWS_AS(load_bipartite_corpus(dir / "bad2.tsv"), ParseError);
    }

    TEST_CASE("round trips are exact") {
        auto dir = scratch("rt");
        const Dataset a = fixture::email_shaped(30, 400, 80, 3);
        const auto prefix = write_simplex_corpus(a, dir, a.name);
        const Dataset b = load_simplex_directory(dir);
        CHECK(same(a, b));
        const Dataset c = fixture::bipartite_small(200, 4);
        write_bipartite_corpus(c, dir / "c.tsv");
        CHECK(same(c, load_bipartite_corpus(dir / "c.tsv")));
        CHECK(same(c, load_dataset(dir / "c.tsv", true)));
        CHECK_THROWS(write_simplex_corpus(c, dir, "nope"));
    }

    TEST_CASE("time scaling and splits") {
        std::vector<EventRecord> ev{{{{0, 1}, {}}, 0}, {{{0, 1}, {}}, 2}, {{{0, 1}, {}}, 2}, {{{0, 1}, {}}, 6},
                                    {{{0, 1}, {}}, 7}};
        // positive gaps 2, 4, 1 → median 2
        CHECK(median_positive_gap(ev) == 2.0);
        ev.pop_back();
        // gaps 2, 4 → average of the middle pair
        CHECK(median_positive_gap(ev) == 3.0);
        Dataset d;
        d.events = ev;
        d.num_left = 2;
        const Dataset s = scale_times(d);
        CHECK(s.time_scale == 3.0);
        CHECK(s.events[3].time == 2.0);
        std::vector<EventRecord> flat{{{{0, 1}, {}}, 1}, {{{0, 1}, {}}, 1}};
        CHECK_THROWS(median_positive_gap(flat));

        const Split sp = split_events(10);
        CHECK(sp.train_end == 5);
        CHECK(sp.val_end == 7);
        CHECK_THROWS(split_events(3));
    }

    TEST_CASE("singletons and stats") {
        auto dir = scratch("st");
        write_file(dir / "s-nverts.txt", "2\n1\n2\n3\n");
        write_file(dir / "s-simplices.txt", "1\n2\n5\n2\n1\n1\n2\n3\n");
        write_file(dir / "s-times.txt", "1\n2\n3\n4\n");
        Dataset d = load_simplex_directory(dir);
        auto st = compute_stats(d);
        CHECK(st.events == 4);
        CHECK(st.distinct_left == 3);
        CHECK(drop_singletons(d) == 1);
        st = compute_stats(d);
        CHECK(st.events == 3);
        CHECK(st.distinct_left == 2);
        CHECK(st.pairwise_fraction == doctest::Approx(2.0 / 3));
        std::ostringstream os;
        write_stats(os, "s", st, false);
        CHECK(os.str().find("|E(T)|") != std::string::npos);
    }
}

TEST_SUITE("synthetic") {
    TEST_CASE("spec parsing") {
        const auto s = parse_synthetic_spec(
            "# comment\nname = toy\nnodes = 6\nhorizon = 50\nedges = 0,1,2; 3,4\nrates = 1, 0.5\n");
        CHECK(s.name == "toy");
        CHECK(s.edges.size() == 2);
        CHECK(s.edges[1].left == std::vector<NodeId>{3, 4});
        CHECK(s.rates == std::vector<double>{1.0, 0.5});
        CHECK_THROWS_AS(parse_synthetic_spec("nodes = x\n"), SpecError);
        CHECK_THROWS_AS(parse_synthetic_spec("bogus = 1\n"), SpecError);
        CHECK_THROWS_AS(parse_synthetic_spec("nodes = 3\nnodes = 4\n"), SpecError);
        CHECK_THROWS_AS(parse_synthetic_spec("process = hawkes\nalpha = 2\nbeta = 1\nedges = 0,1\n"), SpecError);
        CHECK_THROWS_AS(parse_synthetic_spec("nodes = 3\nedges = 0,5\n"), SpecError);
        const auto b = parse_synthetic_spec("nodes = 3\nright_nodes = 2\nedges = 0,1|1\n");
        CHECK(b.edges[0].right == std::vector<NodeId>{1});
    }

    TEST_CASE("confusable gadget shares its pairwise projection") {
        auto pairs = [](const std::vector<std::vector<NodeId>>& edges) {
            std::set<std::pair<NodeId, NodeId>> out;
            for (const auto& e : edges) {
                for (auto p : clique_decompose(e)) out.insert(p);
            }
            return out;
        };
        const auto a = confusable_block(6), b = confusable_alternative(6);
        CHECK(pairs(a) == pairs(b));
        std::set<std::vector<NodeId>> sa(a.begin(), a.end()), sb(b.begin(), b.end());
        CHECK(sa != sb);
        CHECK(sa.count({6, 7, 8}) == 0);
        CHECK(pairs(a).count({6, 7}) == 1);
    }

    TEST_CASE("generation is seeded and time-sorted") {
        const auto spec = parse_synthetic_spec("nodes = 6\nhorizon = 200\nedges = 0,1,2; 3,4\nrates = 1, 0.5\n");
        Rng r1(9), r2(9), r3(10);
        const Dataset a = generate_synthetic(spec, r1), b = generate_synthetic(spec, r2), c = generate_synthetic(spec, r3);
        CHECK(a.events == b.events);
        CHECK(a.events != c.events);
        std::size_t first = 0;
        for (std::size_t i = 0; i < a.events.size(); ++i) {
            if (i) CHECK(a.events[i - 1].time <= a.events[i].time);
            first += a.events[i].edge.left.size() == 3;
        }
        // rate 1 over 200 time units
        CHECK(static_cast<double>(first) == doctest::Approx(200.0).epsilon(0.2));
        CHECK(a.num_left == 6);

        const auto conf = parse_synthetic_spec("mode = clique-confusable\nnodes = 6\nhorizon = 20\n");
        Rng r4(1);
        const Dataset g = generate_synthetic(conf, r4);
        for (const auto& e : g.events) CHECK(e.edge.left.size() >= 2);

        const auto hk = parse_synthetic_spec("process = hawkes\nalpha = 0.5\nbeta = 1\nnodes = 4\nhorizon = 100\n"
                                             "edges = 0,1\n");
        Rng r5(2);
        CHECK(generate_synthetic(hk, r5).events.size() > 100);
    }
}

TEST_SUITE("checkpoint") {
    TEST_CASE("parameters and metadata round-trip exactly") {
        auto dir = scratch("ckpt");
        auto m = AssembledModel::assemble(model_config("HGDHE", 4), 5, 0, 3);
        auto ck = checkpoint_from(m.parameters(), {{"model", "HGDHE"}, {"d", "4"}});
        write_checkpoint(dir / "m.ckpt", ck);
        const auto back = read_checkpoint(dir / "m.ckpt");
        CHECK(back.meta.at("model") == "HGDHE");
        auto fresh = AssembledModel::assemble(model_config("HGDHE", 4), 5, 0, 99);
        load_into(back, fresh.parameters());
        CHECK(fresh.parameters().snapshot() == m.parameters().snapshot());

        auto other = AssembledModel::assemble(model_config("DHE", 4), 5, 0, 3);
        CHECK_THROWS_AS(load_into(back, other.parameters()), CheckpointError);
        auto wide = AssembledModel::assemble(model_config("HGDHE", 8), 5, 0, 3);
        CHECK_THROWS_AS(load_into(back, wide.parameters()), CheckpointError);

        write_file(dir / "junk.ckpt", "not a checkpoint\n");
        CHECK_THROWS_AS(read_checkpoint(dir / "junk.ckpt"), CheckpointError);
        CHECK_THROWS_AS(write_checkpoint(dir / "x.ckpt", checkpoint_from(m.parameters(), {{"bad key", "v"}})),
                        CheckpointError);
        // truncated payload
        std::ifstream in(dir / "m.ckpt", std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        write_file(dir / "cut.ckpt", bytes.substr(0, bytes.size() - 16));
        CHECK_THROWS_AS(read_checkpoint(dir / "cut.ckpt"), CheckpointError);
    }
}
