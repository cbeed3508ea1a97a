#include "anoseqs/netcore/network.hpp"

#include <charconv>
#include <sstream>

namespace anoseqs::netcore {

namespace {

bool width_preserving(LayerKind k) {
    return k != LayerKind::dense;
}

std::string describe(std::size_t index, const LayerSpec& l) {
    return "layer " + std::to_string(index) + " (" + std::string(to_string(l.kind)) + ")";
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::uint64_t parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error("net spec: bad integer '" + std::string(s) + "'");
    return v;
}

} // namespace

LayerSpec LayerSpec::dense(std::size_t in, std::size_t out, Activation act) {
    return {LayerKind::dense, in, out, act, 1, 0};
}
LayerSpec LayerSpec::layer_norm(std::size_t width) {
    return {LayerKind::layer_norm, width, width, Activation::none, 1, 0};
}
LayerSpec LayerSpec::self_attention(std::size_t width, std::size_t heads) {
    return {LayerKind::self_attention, width, width, Activation::none, heads, 0};
}
LayerSpec LayerSpec::encoder_block(std::size_t width, std::size_t heads, std::size_t ff_width) {
    return {LayerKind::encoder_block, width, width, Activation::none, heads, ff_width};
}
LayerSpec LayerSpec::positional_encoding(std::size_t width) {
    return {LayerKind::positional_encoding, width, width, Activation::none, 1, 0};
}
LayerSpec LayerSpec::softmax(std::size_t width) {
    return {LayerKind::softmax, width, width, Activation::none, 1, 0};
}

void NetSpec::validate() const {
    if (layers.empty()) throw Error("net spec: no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        if (l.in == 0 || l.out == 0) throw Error(describe(i, l) + ": widths must be positive");
        if (width_preserving(l.kind) && l.in != l.out)
            throw Error(describe(i, l) + ": input and output width must match");
        if (l.kind == LayerKind::self_attention || l.kind == LayerKind::encoder_block) {
            if (l.heads == 0 || l.in % l.heads != 0)
                throw Error(describe(i, l) + ": head count " + std::to_string(l.heads) + " does not divide width " +
                            std::to_string(l.in));
        }
        if (l.kind == LayerKind::encoder_block && l.ff_width == 0)
            throw Error(describe(i, l) + ": feed-forward width must be positive");
        if (i > 0 && layers[i - 1].out != l.in)
            throw Error(describe(i, l) + ": input width " + std::to_string(l.in) + " does not match previous output " +
                        std::to_string(layers[i - 1].out));
    }
}

std::size_t NetSpec::input_width() const {
    return layers.empty() ? 0 : layers.front().in;
}

std::size_t NetSpec::output_width() const {
    return layers.empty() ? 0 : layers.back().out;
}

std::string NetSpec::canonical() const {
    std::ostringstream os;
    os << "seed=" << seed;
    for (const auto& l : layers) {
        os << '|' << to_string(l.kind) << ',' << l.in << ',' << l.out << ',' << to_string(l.activation) << ','
           << l.heads << ',' << l.ff_width;
    }
    return os.str();
}

NetSpec NetSpec::parse(std::string_view text) {
    const auto parts = split(text, '|');
    if (parts.empty() || parts[0].substr(0, 5) != "seed=") throw Error("net spec: missing seed");
    NetSpec spec;
    spec.seed = parse_u64(parts[0].substr(5));
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto f = split(parts[i], ',');
        if (f.size() != 6) throw Error("net spec: malformed layer '" + std::string(parts[i]) + "'");
        LayerSpec l;
        l.kind = parse_layer_kind(f[0]);
        l.in = parse_u64(f[1]);
        l.out = parse_u64(f[2]);
        l.activation = parse_activation(f[3]);
        l.heads = parse_u64(f[4]);
        l.ff_width = parse_u64(f[5]);
        spec.layers.push_back(l);
    }
    spec.validate();
    return spec;
}

Network::Network(NetSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    Rng rng(spec_.seed);
    layers_.reserve(spec_.layers.size());
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        const LayerSpec& l = spec_.layers[i];
        const std::string prefix = "layer" + std::to_string(i);
        switch (l.kind) {
        case LayerKind::dense: layers_.emplace_back(Dense(prefix, l.in, l.out, l.activation, rng)); break;
        case LayerKind::layer_norm: layers_.emplace_back(LayerNorm(prefix, l.in)); break;
        case LayerKind::self_attention: layers_.emplace_back(SelfAttention(prefix, l.in, l.heads, rng)); break;
        case LayerKind::encoder_block:
            layers_.emplace_back(EncoderBlock(prefix, l.in, l.heads, l.ff_width, rng));
            break;
        case LayerKind::positional_encoding: layers_.emplace_back(PositionalEncoding(l.in)); break;
        case LayerKind::softmax: layers_.emplace_back(Softmax()); break;
        }
    }
}

void Network::check_input(const Matrix& x) const {
    const auto& first = spec_.layers.front();
    if (static_cast<std::size_t>(x.cols()) != first.in)
        throw Error(describe(0, first) + ": expected input width " + std::to_string(first.in) + ", got " +
                    std::to_string(x.cols()));
}

Matrix Network::forward(const Matrix& x) {
    check_input(x);
    Matrix h = x;
    for (auto& layer : layers_) h = std::visit([&](auto& l) { return l.forward(h); }, layer);
    has_forward_ = true;
    last_rows_ = x.rows();
    return h;
}

Matrix Network::infer(const Matrix& x) const {
    check_input(x);
    Matrix h = x;
    for (const auto& layer : layers_) h = std::visit([&](const auto& l) { return l.infer(h); }, layer);
    return h;
}

Matrix Network::backward(const Matrix& dy) {
    if (!has_forward_) throw Error("network: backward called without a recorded forward pass");
    if (dy.rows() != last_rows_ || static_cast<std::size_t>(dy.cols()) != spec_.output_width())
        throw Error("network: loss gradient shape does not match last forward output");
    Matrix g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
        g = std::visit([&](auto& l) { return l.backward(g); }, *it);
    return g;
}

std::vector<ParamTensor*> Network::params() {
    std::vector<ParamTensor*> out;
    for (auto& layer : layers_) std::visit([&](auto& l) { l.collect(out); }, layer);
    return out;
}

std::vector<const ParamTensor*> Network::params() const {
    std::vector<const ParamTensor*> out;
    for (const auto& layer : layers_) std::visit([&](const auto& l) { l.collect(out); }, layer);
    return out;
}

std::size_t Network::param_count() const {
    std::size_t n = 0;
    for (const auto* p : params()) n += p->size();
    return n;
}

void Network::zero_grad() {
    for (auto* p : params()) p->zero_grad();
}

void polyak_update(Network& target, const Network& source, double tau) {
    auto dst = target.params();
    const auto src = source.params();
    if (dst.size() != src.size()) throw Error("polyak_update: architecture mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) {
        if (dst[i]->size() != src[i]->size()) throw Error("polyak_update: tensor size mismatch at " + dst[i]->name);
        for (std::size_t j = 0; j < dst[i]->size(); ++j)
            dst[i]->values[j] = tau * src[i]->values[j] + (1.0 - tau) * dst[i]->values[j];
    }
}

} // namespace anoseqs::netcore
