#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hgtpp/autodiff.hpp"

namespace hgtpp {

inline constexpr const char* kCheckpointMagic = "HGTPP1";

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CheckpointEntry {
    std::string name;
    Tensor value;
};

/// Container: text header (magic line, `meta` key/value lines, one
/// `param <name> <rank> <dims...> <byte offset>` line per tensor, `end`),
/// followed by raw little-endian float64 payloads.
struct Checkpoint {
    std::map<std::string, std::string> meta;
    std::vector<CheckpointEntry> tensors;

    const Tensor* find(const std::string& name) const;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Captures every parameter of `store` into a checkpoint.
Checkpoint checkpoint_from(const ParameterStore& store, std::map<std::string, std::string> meta);
/// Copies tensors into `store`; names and shapes must match exactly.
void load_into(const Checkpoint& ckpt, ParameterStore& store);

}  // namespace hgtpp
