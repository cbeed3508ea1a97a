#include "anoseqs/netcore/checkpoint.hpp"

#include <bit>
#include <cstring>

namespace anoseqs::netcore {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f32(std::string& out, float f) {
    put_u32(out, std::bit_cast<std::uint32_t>(f));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::string_view take(std::size_t n) {
        need(n);
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::string_view line() {
        const auto end = bytes_.find('\n', pos_);
        if (end == std::string_view::npos) throw Error("checkpoint: unterminated header line");
        auto s = bytes_.substr(pos_, end - pos_);
        pos_ = end + 1;
        return s;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw Error("checkpoint: truncated data");
    }
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace

const NamedTensor* Checkpoint::find(std::string_view name) const {
    for (const auto& t : tensors)
        if (t.name == name) return &t;
    return nullptr;
}

const std::string& Checkpoint::at(const std::string& key) const {
    auto it = header.find(key);
    if (it == header.end()) throw Error("checkpoint: missing header key '" + key + "'");
    return it->second;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
    std::string out(kCheckpointMagic);
    auto header = ckpt.header;
    header["tensor_count"] = std::to_string(ckpt.tensors.size());
    if (!header.contains("spec_hash")) header["spec_hash"] = "none";
    for (const auto& [k, v] : header) {
        if (k.empty() || k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
            throw Error("checkpoint: invalid header entry '" + k + "'");
        out += k + "=" + v + "\n";
    }
    out += "\n";
    for (const auto& t : ckpt.tensors) {
        std::size_t n = 1;
        for (auto d : t.shape) n *= d;
        if (n != t.values.size()) throw Error("checkpoint: tensor '" + t.name + "' shape does not match value count");
        put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out += t.name;
        put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (auto d : t.shape) put_u32(out, d);
        for (float f : t.values) put_f32(out, f);
    }
    return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
    if (bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) throw Error("checkpoint: bad magic bytes");
    Reader r(bytes.substr(kCheckpointMagic.size()));
    Checkpoint ckpt;
    while (true) {
        const auto line = r.line();
        if (line.empty()) break;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw Error("checkpoint: malformed header line");
        ckpt.header.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    }
    const std::size_t count = std::stoul(ckpt.at("tensor_count"));
    for (std::size_t i = 0; i < count; ++i) {
        NamedTensor t;
        t.name = std::string(r.take(r.u32()));
        const std::uint32_t rank = r.u32();
        std::size_t n = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            t.shape.push_back(r.u32());
            n *= t.shape.back();
        }
        t.values.reserve(n);
        for (std::size_t j = 0; j < n; ++j) t.values.push_back(r.f32());
        ckpt.tensors.push_back(std::move(t));
    }
    if (!r.done()) throw Error("checkpoint: trailing bytes after last tensor");
    return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    write_file(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    return decode_checkpoint(read_file(path));
}

Checkpoint checkpoint_from(const Network& net) {
    Checkpoint ckpt;
    ckpt.header["spec_hash"] = to_hex(net.spec().hash());
    ckpt.header["net_spec"] = net.spec().canonical();
    for (const auto* p : net.params()) {
        NamedTensor t;
        t.name = p->name;
        for (auto d : p->shape) t.shape.push_back(static_cast<std::uint32_t>(d));
        t.values.assign(p->values.begin(), p->values.end());
        ckpt.tensors.push_back(std::move(t));
    }
    return ckpt;
}

void load_params(Network& net, const Checkpoint& ckpt) {
    const std::string expected = to_hex(net.spec().hash());
    if (ckpt.at("spec_hash") != expected)
        throw Error("checkpoint: spec hash " + ckpt.at("spec_hash") + " does not match network " + expected);
    for (auto* p : net.params()) {
        const NamedTensor* t = ckpt.find(p->name);
        if (!t) throw Error("checkpoint: missing tensor '" + p->name + "'");
        if (t->shape.size() != p->shape.size() ||
            !std::equal(t->shape.begin(), t->shape.end(), p->shape.begin()))
            throw Error("checkpoint: shape mismatch for '" + p->name + "'");
        for (std::size_t j = 0; j < p->size(); ++j) p->values[j] = static_cast<double>(t->values[j]);
    }
}

Network network_from_checkpoint(const Checkpoint& ckpt) {
    Network net(NetSpec::parse(ckpt.at("net_spec")));
    load_params(net, ckpt);
    return net;
}

} // namespace anoseqs::netcore
