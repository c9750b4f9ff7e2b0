#include "hgtpp/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hgtpp {

namespace {

void put_le(std::string& out, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

bool valid_token(const std::string& s) {
    return !s.empty() && s.find_first_of(" \t\r\n") == std::string::npos;
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
    for (const auto& e : tensors) {
        if (e.name == name) return &e.value;
    }
    return nullptr;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ostringstream header;
    header << kCheckpointMagic << '\n';
    for (const auto& [k, v] : ckpt.meta) {
        if (!valid_token(k) || v.find('\n') != std::string::npos) {
            throw CheckpointError("checkpoint metadata must be single-line with a space-free key: " + k);
        }
        header << "meta " << k << ' ' << v << '\n';
    }
    std::string payload;
    for (const auto& e : ckpt.tensors) {
        if (!valid_token(e.name)) throw CheckpointError("invalid tensor name '" + e.name + "'");
        header << "param " << e.name << ' ' << e.value.shape().rank;
        for (auto d : e.value.shape().dims()) header << ' ' << d;
        header << ' ' << payload.size() << '\n';
        for (double v : e.value.values()) put_le(payload, v);
    }
    header << "end\n";

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path.string());
    const std::string h = header.str();
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw CheckpointError("failed writing checkpoint: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kCheckpointMagic) {
        throw CheckpointError("not a checkpoint (bad magic): " + path.string());
    }
    Checkpoint ckpt;
    struct Pending {
        std::string name;
        Shape shape;
        std::size_t offset;
    };
    std::vector<Pending> pending;
    bool ended = false;
    while (std::getline(in, line)) {
        if (line == "end") {
            ended = true;
            break;
        }
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "meta") {
            std::string key;
            ls >> key;
            std::string value;
            std::getline(ls, value);
            if (!value.empty() && value.front() == ' ') value.erase(0, 1);
            ckpt.meta[key] = value;
        } else if (kind == "param") {
            Pending p;
            std::size_t rank = 0;
            ls >> p.name >> rank;
            if (rank == 0) {
                p.shape = Shape::scalar();
            } else if (rank == 1) {
                std::size_t n = 0;
                ls >> n;
                p.shape = Shape::vector(n);
            } else if (rank == 2) {
                std::size_t r = 0, c = 0;
                ls >> r >> c;
                p.shape = Shape::matrix(r, c);
            } else {
                throw CheckpointError("unsupported tensor rank in checkpoint: " + line);
            }
            ls >> p.offset;
            if (!ls) throw CheckpointError("malformed checkpoint header line: " + line);
            pending.push_back(p);
        } else {
            throw CheckpointError("unknown checkpoint header line: " + line);
        }
    }
    if (!ended) throw CheckpointError("truncated checkpoint header: " + path.string());
    std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
    for (const auto& p : pending) {
        const std::size_t n = p.shape.numel();
        if (p.offset + 8 * n > payload.size()) throw CheckpointError("checkpoint payload too short for " + p.name);
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) values[i] = get_le(bytes + p.offset + 8 * i);
        ckpt.tensors.push_back({p.name, Tensor(p.shape, std::move(values))});
    }
    return ckpt;
}

Checkpoint checkpoint_from(const ParameterStore& store, std::map<std::string, std::string> meta) {
    Checkpoint ckpt;
    ckpt.meta = std::move(meta);
    for (const Parameter* p : store.all()) ckpt.tensors.push_back({p->name, p->value});
    return ckpt;
}

void load_into(const Checkpoint& ckpt, ParameterStore& store) {
    if (ckpt.tensors.size() != store.size()) {
        throw CheckpointError("checkpoint holds " + std::to_string(ckpt.tensors.size()) + " tensors, model expects " +
                              std::to_string(store.size()));
    }
    for (Parameter* p : store.all()) {
        const Tensor* t = ckpt.find(p->name);
        if (t == nullptr) throw CheckpointError("checkpoint lacks parameter " + p->name);
        if (t->shape() != p->value.shape()) {
            throw CheckpointError("shape mismatch for " + p->name + ": checkpoint " + t->shape().str() + ", model " +
                                  p->value.shape().str());
        }
        p->value = *t;
    }
}

}  // namespace hgtpp
