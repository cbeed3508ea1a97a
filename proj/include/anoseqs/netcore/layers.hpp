#pragma once

#include "anoseqs/netcore/tensor.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anoseqs::netcore {

enum class Activation { none, relu, tanh, gelu };
enum class LayerKind { dense, layer_norm, self_attention, encoder_block, positional_encoding, softmax };

std::string_view to_string(Activation a);
std::string_view to_string(LayerKind k);
Activation parse_activation(std::string_view s);
LayerKind parse_layer_kind(std::string_view s);

double activate(Activation a, double z);
/// Derivative of the activation at pre-activation z (y = activate(z)).
double activate_grad(Activation a, double z, double y);

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& x);

/// Sinusoidal positional encoding table, rows x width.
Matrix positional_encoding(Eigen::Index rows, Eigen::Index width);

// Every layer follows the same protocol:
//   forward(x)  computes the output and records what backward needs;
//   infer(x)    computes the identical output without touching state;
//   backward(dy) accumulates parameter gradients and returns dL/dx.

class Dense {
public:
    Dense(const std::string& prefix, std::size_t in, std::size_t out, Activation act, Rng& rng);

    Matrix forward(const Matrix& x);
    Matrix infer(const Matrix& x) const { return run(x, nullptr); }
    Matrix backward(const Matrix& dy);

    void collect(std::vector<ParamTensor*>& out) { out.push_back(&weight_); out.push_back(&bias_); }
    void collect(std::vector<const ParamTensor*>& out) const { out.push_back(&weight_); out.push_back(&bias_); }

    ParamTensor& weight() { return weight_; }
    ParamTensor& bias() { return bias_; }

private:
    struct Cache {
        Matrix x, z, y;
    };
    Matrix run(const Matrix& x, Cache* cache) const;

    ParamTensor weight_;  // [in, out]
    ParamTensor bias_;    // [out]
    Activation act_;
    std::optional<Cache> cache_;
};

class LayerNorm {
public:
    static constexpr double kEps = 1e-5;

    LayerNorm(const std::string& prefix, std::size_t width);

    Matrix forward(const Matrix& x);
    Matrix infer(const Matrix& x) const { return run(x, nullptr); }
    Matrix backward(const Matrix& dy);

    void collect(std::vector<ParamTensor*>& out) { out.push_back(&gain_); out.push_back(&shift_); }
    void collect(std::vector<const ParamTensor*>& out) const { out.push_back(&gain_); out.push_back(&shift_); }

private:
    struct Cache {
        Matrix xhat;
        Eigen::VectorXd inv_std;
    };
    Matrix run(const Matrix& x, Cache* cache) const;

    ParamTensor gain_;
    ParamTensor shift_;
    std::optional<Cache> cache_;
};

/// Multi-head scaled dot-product self-attention over the rows of the input.
class SelfAttention {
public:
    SelfAttention(const std::string& prefix, std::size_t width, std::size_t heads, Rng& rng);

    Matrix forward(const Matrix& x);
    Matrix infer(const Matrix& x) const;
    Matrix backward(const Matrix& dy);

    void collect(std::vector<ParamTensor*>& out);
    void collect(std::vector<const ParamTensor*>& out) const;

private:
    struct Cache {
        Matrix q, k, v;
        std::vector<Matrix> attn;  // one rows x rows matrix per head
    };
    Matrix attend(const Matrix& q, const Matrix& k, const Matrix& v, std::vector<Matrix>* attn) const;

    std::size_t width_;
    std::size_t heads_;
    Dense query_, key_, value_, output_;
    std::optional<Cache> cache_;
};

/// Post-norm transformer encoder block:
///   h = LN(x + Attn(x)),  y = LN(h + FF(h)),  FF = Dense(gelu) -> Dense.
class EncoderBlock {
public:
    EncoderBlock(const std::string& prefix, std::size_t width, std::size_t heads, std::size_t ff_width,
                 Rng& rng);

    Matrix forward(const Matrix& x);
    Matrix infer(const Matrix& x) const;
    Matrix backward(const Matrix& dy);

    void collect(std::vector<ParamTensor*>& out);
    void collect(std::vector<const ParamTensor*>& out) const;

private:
    SelfAttention attention_;
    LayerNorm norm1_;
    Dense ff1_, ff2_;
    LayerNorm norm2_;
    bool has_forward_ = false;
};

class PositionalEncoding {
public:
    explicit PositionalEncoding(std::size_t width) : width_(width) {}

    Matrix forward(const Matrix& x) { has_forward_ = true; return infer(x); }
    Matrix infer(const Matrix& x) const;
    Matrix backward(const Matrix& dy);

    void collect(std::vector<ParamTensor*>&) {}
    void collect(std::vector<const ParamTensor*>&) const {}

private:
    std::size_t width_;
    bool has_forward_ = false;
};

class Softmax {
public:
    Matrix forward(const Matrix& x);
    Matrix infer(const Matrix& x) const { return softmax_rows(x); }
    Matrix backward(const Matrix& dy);

    void collect(std::vector<ParamTensor*>&) {}
    void collect(std::vector<const ParamTensor*>&) const {}

private:
    std::optional<Matrix> y_;
};

} // namespace anoseqs::netcore
