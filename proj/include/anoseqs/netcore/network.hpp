#pragma once

#include "anoseqs/netcore/layers.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace anoseqs::netcore {

struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    std::size_t in = 0;
    std::size_t out = 0;
    Activation activation = Activation::none;
    std::size_t heads = 1;
    std::size_t ff_width = 0;

    static LayerSpec dense(std::size_t in, std::size_t out, Activation act = Activation::none);
    static LayerSpec layer_norm(std::size_t width);
    static LayerSpec self_attention(std::size_t width, std::size_t heads);
    static LayerSpec encoder_block(std::size_t width, std::size_t heads, std::size_t ff_width);
    static LayerSpec positional_encoding(std::size_t width);
    static LayerSpec softmax(std::size_t width);

    bool operator==(const LayerSpec&) const = default;
};

/// Architecture description plus the initialization seed.
struct NetSpec {
    std::vector<LayerSpec> layers;
    std::uint64_t seed = 0;

    /// Throws Error naming the first offending layer.
    void validate() const;

    std::size_t input_width() const;
    std::size_t output_width() const;

    /// Stable text form, e.g. "seed=7|dense,4,8,relu,1,0|layer_norm,8,8,none,1,0".
    std::string canonical() const;
    static NetSpec parse(std::string_view text);
    std::uint64_t hash() const { return fnv1a(canonical()); }

    bool operator==(const NetSpec&) const = default;
};

using Layer = std::variant<Dense, LayerNorm, SelfAttention, EncoderBlock, PositionalEncoding, Softmax>;

/// Sequential network. Copying a Network deep-copies its parameters.
class Network {
public:
    explicit Network(NetSpec spec);

    const NetSpec& spec() const { return spec_; }

    Matrix forward(const Matrix& x);
    Matrix infer(const Matrix& x) const;
    /// Accumulates into every ParamTensor::grad and returns dL/d(input).
    Matrix backward(const Matrix& dy);

    std::vector<ParamTensor*> params();
    std::vector<const ParamTensor*> params() const;
    std::size_t param_count() const;
    void zero_grad();

private:
    void check_input(const Matrix& x) const;

    NetSpec spec_;
    std::vector<Layer> layers_;
    bool has_forward_ = false;
    Eigen::Index last_rows_ = 0;
};

/// target <- tau * source + (1 - tau) * target, parameter by parameter.
void polyak_update(Network& target, const Network& source, double tau);

} // namespace anoseqs::netcore
