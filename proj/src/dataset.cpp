#include "hgtpp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <string_view>

namespace hgtpp {

namespace fs = std::filesystem;

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& what)
    : std::runtime_error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::ifstream open_input(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

std::ofstream open_output(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

template <class T>
std::vector<T> read_column(const fs::path& p, const char* what) {
    auto in = open_input(p);
    std::vector<T> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        T v{};
        if (!parse_number(line, v)) throw ParseError(p.string(), n, std::string("expected ") + what);
        out.push_back(v);
    }
    return out;
}

// sorted unique ids → dense index
struct Remap {
    std::vector<std::uint64_t> ids;
    NodeId operator()(std::uint64_t id) const {
        return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    }
};

}  // namespace

Dataset make_dataset(std::string name, bool bipartite,
                     std::vector<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> sides,
                     std::vector<double> times) {
    if (sides.size() != times.size()) throw std::invalid_argument("make_dataset: events and times differ in count");
    Dataset d;
    d.name = std::move(name);
    d.bipartite = bipartite;
    Remap left, right;
    for (const auto& [l, r] : sides) {
        left.ids.insert(left.ids.end(), l.begin(), l.end());
        right.ids.insert(right.ids.end(), r.begin(), r.end());
    }
    for (auto* m : {&left, &right}) {
        std::sort(m->ids.begin(), m->ids.end());
        m->ids.erase(std::unique(m->ids.begin(), m->ids.end()), m->ids.end());
    }
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    d.events.reserve(times.size());
    for (std::size_t i : order) {
        EventRecord e;
        e.time = times[i];
        for (auto id : sides[i].first) e.edge.left.push_back(left(id));
        for (auto id : sides[i].second) e.edge.right.push_back(right(id));
        d.duplicates_removed += canonicalize(e.edge.left) + canonicalize(e.edge.right);
        d.events.push_back(std::move(e));
    }
    d.left_ids = std::move(left.ids);
    d.right_ids = std::move(right.ids);
    d.num_left = d.left_ids.size();
    d.num_right = d.right_ids.size();
    return d;
}

Dataset load_simplex_corpus(const fs::path& nverts_path, const fs::path& simplices_path, const fs::path& times_path) {
    const auto nverts = read_column<std::uint64_t>(nverts_path, "a vertex count");
    const auto ids = read_column<std::uint64_t>(simplices_path, "a node id");
    const auto times = read_column<double>(times_path, "a timestamp");
    if (nverts.size() != times.size()) {
        throw ParseError(times_path.string(), 0,
                         std::to_string(times.size()) + " timestamps for " + std::to_string(nverts.size()) +
                             " vertex counts");
    }
    const std::uint64_t total = std::accumulate(nverts.begin(), nverts.end(), std::uint64_t{0});
    if (total != ids.size()) {
        throw ParseError(simplices_path.string(), 0,
                         std::to_string(ids.size()) + " node ids but vertex counts sum to " + std::to_string(total));
    }
    std::vector<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> sides(nverts.size());
    std::size_t pos = 0;
    for (std::size_t i = 0; i < nverts.size(); ++i) {
        if (nverts[i] == 0) throw ParseError(nverts_path.string(), i + 1, "empty simplex");
        sides[i].first.assign(ids.begin() + static_cast<std::ptrdiff_t>(pos),
                              ids.begin() + static_cast<std::ptrdiff_t>(pos + nverts[i]));
        pos += nverts[i];
    }
    std::string name = nverts_path.filename().string();
    if (auto k = name.rfind("-nverts.txt"); k != std::string::npos) name.resize(k);
    return make_dataset(name, false, std::move(sides), times);
}

Dataset load_simplex_directory(const fs::path& dir) {
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() > 11 && name.ends_with("-nverts.txt")) found.push_back(entry.path());
    }
    if (found.size() != 1) {
        throw std::runtime_error(dir.string() + ": expected exactly one *-nverts.txt file, found " +
                                 std::to_string(found.size()));
    }
    std::string prefix = found[0].string();
    prefix.resize(prefix.size() - std::string("-nverts.txt").size());
    return load_simplex_corpus(found[0], prefix + "-simplices.txt", prefix + "-times.txt");
}

namespace {

std::vector<std::uint64_t> parse_id_list(std::string_view s, const std::string& file, std::size_t line) {
    std::vector<std::uint64_t> out;
    s = trim(s);
    if (s.empty()) throw ParseError(file, line, "empty node list");
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto tok = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        std::uint64_t v = 0;
        if (!parse_number(tok, v)) throw ParseError(file, line, "bad node id '" + std::string(trim(tok)) + "'");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

Dataset load_bipartite_corpus(const fs::path& file) {
    auto in = open_input(file);
    std::vector<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> sides;
    std::vector<double> times;
    std::string line;
    std::size_t n = 0;
    const std::string fname = file.string();
    while (std::getline(in, line)) {
        ++n;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const char sep = body.find('|') != std::string_view::npos ? '|' : '\t';
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto k = body.find(sep, start);
            fields.push_back(body.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start));
            if (k == std::string_view::npos) break;
            start = k + 1;
        }
        if (fields.size() != 3) {
            throw ParseError(fname, n, "expected 3 fields (time, left ids, right ids), got " +
                                           std::to_string(fields.size()));
        }
        double t = 0.0;
        if (!parse_number(fields[0], t)) throw ParseError(fname, n, "bad timestamp");
        sides.emplace_back(parse_id_list(fields[1], fname, n), parse_id_list(fields[2], fname, n));
        times.push_back(t);
    }
    return make_dataset(file.stem().string(), true, std::move(sides), std::move(times));
}

Dataset load_dataset(const fs::path& path, bool bipartite) {
    if (fs::is_directory(path)) return load_simplex_directory(path);
    if (bipartite) return load_bipartite_corpus(path);
    const std::string p = path.string();
    if (fs::exists(p + "-nverts.txt")) return load_simplex_corpus(p + "-nverts.txt", p + "-simplices.txt", p + "-times.txt");
    throw std::runtime_error(p + ": not a corpus directory, triple prefix, or bipartite file");
}

fs::path write_simplex_corpus(const Dataset& d, const fs::path& dir, const std::string& name) {
    if (d.bipartite) throw std::invalid_argument("write_simplex_corpus: dataset is bipartite");
    fs::create_directories(dir);
    const fs::path prefix = dir / name;
    auto nv = open_output(prefix.string() + "-nverts.txt");
    auto sx = open_output(prefix.string() + "-simplices.txt");
    auto tm = open_output(prefix.string() + "-times.txt");
    for (const auto& e : d.events) {
        nv << e.edge.left.size() << '\n';
        for (NodeId v : e.edge.left) sx << d.left_ids.at(v) << '\n';
        tm << format_double(e.time) << '\n';
    }
    return prefix;
}

void write_bipartite_corpus(const Dataset& d, const fs::path& file) {
    if (!d.bipartite) throw std::invalid_argument("write_bipartite_corpus: dataset is not bipartite");
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    auto out = open_output(file);
    auto ids = [&](const std::vector<NodeId>& vs, const std::vector<std::uint64_t>& table) {
        for (std::size_t i = 0; i < vs.size(); ++i) {
            if (i) out << ',';
            out << table.at(vs[i]);
        }
    };
    for (const auto& e : d.events) {
        out << format_double(e.time) << '\t';
        ids(e.edge.left, d.left_ids);
        out << '\t';
        ids(e.edge.right, d.right_ids);
        out << '\n';
    }
}

double median_positive_gap(const std::vector<EventRecord>& events) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < events.size(); ++i) {
        const double g = events[i].time - events[i - 1].time;
        if (g > 0.0) gaps.push_back(g);
    }
    if (gaps.empty()) throw std::invalid_argument("time scaling needs at least two distinct timestamps");
    const std::size_t m = gaps.size() / 2;
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(m), gaps.end());
    const double hi = gaps[m];
    if (gaps.size() % 2 == 1) return hi;
    const double lo = *std::max_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(m));
    return 0.5 * (lo + hi);
}

Dataset scale_times(Dataset d) {
    const double g = median_positive_gap(d.events);
    for (auto& e : d.events) e.time /= g;
    d.time_scale *= g;
    return d;
}

std::size_t drop_singletons(Dataset& d) {
    if (d.bipartite) return 0;
    const auto before = d.events.size();
    std::erase_if(d.events, [](const EventRecord& e) { return e.edge.left.size() < 2; });
    return before - d.events.size();
}

Split split_events(std::size_t n) {
    if (n < 4) throw std::invalid_argument("split needs at least 4 events, got " + std::to_string(n));
    return {n / 2, (3 * n) / 4, n};
}

DatasetStats compute_stats(const Dataset& d) {
    DatasetStats s;
    s.num_left = d.num_left;
    s.num_right = d.num_right;
    s.events = d.events.size();
    std::set<std::vector<NodeId>> left, right;
    std::size_t pairs = 0;
    for (const auto& e : d.events) {
        left.insert(e.edge.left);
        if (d.bipartite) right.insert(e.edge.right);
        if (e.edge.size() == 2) ++pairs;
    }
    s.distinct_left = left.size();
    s.distinct_right = right.size();
    s.pairwise_fraction = s.events ? static_cast<double>(pairs) / static_cast<double>(s.events) : 0.0;
    return s;
}

void write_stats(std::ostream& os, const std::string& name, const DatasetStats& s, bool bipartite) {
    const int w = static_cast<int>(std::max<std::size_t>(name.size(), 7)) + 2;
    os << std::left << std::setw(w) << "Dataset" << std::right << std::setw(9) << "|V|";
    if (bipartite) os << std::setw(9) << "|V'|";
    os << std::setw(12) << "|E(T)|" << std::setw(10) << "|H|";
    if (bipartite) os << std::setw(10) << "|H'|";
    os << '\n' << std::left << std::setw(w) << name << std::right << std::setw(9) << s.num_left;
    if (bipartite) os << std::setw(9) << s.num_right;
    os << std::setw(12) << s.events << std::setw(10) << s.distinct_left;
    if (bipartite) os << std::setw(10) << s.distinct_right;
    os << '\n';
}

}  // namespace hgtpp
