#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hgtpp/event.hpp"

namespace hgtpp {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Time-sorted event stream over densely numbered node universes.
struct Dataset {
    std::string name;
    bool bipartite = false;
    std::size_t num_left = 0;
    std::size_t num_right = 0;
    std::vector<EventRecord> events;
    std::vector<std::uint64_t> left_ids;   // dense id → original id
    std::vector<std::uint64_t> right_ids;
    double time_scale = 1.0;               // original time = stored time × time_scale
    std::size_t duplicates_removed = 0;    // repeated ids within one side of one record

    double origin() const { return events.empty() ? 0.0 : events.front().time; }
    std::size_t num_nodes(Side s) const { return s == Side::left ? num_left : num_right; }
};

/// Three-file corpus: per-event vertex counts, concatenated vertex ids, timestamps.
Dataset load_simplex_corpus(const std::filesystem::path& nverts, const std::filesystem::path& simplices,
                            const std::filesystem::path& times);
/// Directory holding exactly one `<name>-nverts.txt`, `<name>-simplices.txt`, `<name>-times.txt` triple.
Dataset load_simplex_directory(const std::filesystem::path& dir);
/// One event per line: `time<TAB>left ids<TAB>right ids` (ids comma-separated; `|` also accepted
/// as the field separator). Blank lines and lines starting with '#' are skipped.
Dataset load_bipartite_corpus(const std::filesystem::path& file);
/// Directory → simplex triple, file → bipartite records when `bipartite`, else a triple prefix.
Dataset load_dataset(const std::filesystem::path& path, bool bipartite);

/// Writes `<dir>/<name>-{nverts,simplices,times}.txt` with original ids; returns the common prefix.
std::filesystem::path write_simplex_corpus(const Dataset& d, const std::filesystem::path& dir,
                                           const std::string& name);
void write_bipartite_corpus(const Dataset& d, const std::filesystem::path& file);

/// Builds a dataset from events given in original ids: remaps densely by sorted
/// id, deduplicates ids within a side, and stable-sorts by time.
Dataset make_dataset(std::string name, bool bipartite, std::vector<std::pair<std::vector<std::uint64_t>,
                     std::vector<std::uint64_t>>> sides, std::vector<double> times);

/// Median of the positive gaps between consecutive timestamps. Throws if none.
double median_positive_gap(const std::vector<EventRecord>& events);
/// Divides all times by the median positive gap and multiplies time_scale by it.
Dataset scale_times(Dataset d);
/// Removes homogeneous events with fewer than two nodes; returns the count removed.
std::size_t drop_singletons(Dataset& d);

struct Split {
    std::size_t train_end = 0;  // [0, train_end)
    std::size_t val_end = 0;    // [train_end, val_end); test is [val_end, n)
    std::size_t size = 0;
};
/// Boundaries at ⌊0.5n⌋ and ⌊0.75n⌋. Throws for n < 4.
Split split_events(std::size_t n);

struct DatasetStats {
    std::size_t num_left = 0;
    std::size_t num_right = 0;
    std::size_t events = 0;
    std::size_t distinct_left = 0;   // |ℋ|: distinct node sets (left side for bipartite)
    std::size_t distinct_right = 0;  // |ℋ′|
    double pairwise_fraction = 0.0;  // share of homogeneous events with exactly two nodes
};
DatasetStats compute_stats(const Dataset& d);
void write_stats(std::ostream& os, const std::string& name, const DatasetStats& s, bool bipartite);

}  // namespace hgtpp
