#include "anoseqs/netcore/layers.hpp"

#include <cmath>
#include <numbers>

namespace anoseqs::netcore {

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

void init_uniform(ParamTensor& t, std::size_t fan_in, Rng& rng) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : t.values) v = dist(rng);
}

[[noreturn]] void no_forward(const char* layer) {
    throw Error(std::string(layer) + ": backward called without a recorded forward pass");
}

} // namespace

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::none: return "none";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::gelu: return "gelu";
    }
    return "?";
}

std::string_view to_string(LayerKind k) {
    switch (k) {
    case LayerKind::dense: return "dense";
    case LayerKind::layer_norm: return "layer_norm";
    case LayerKind::self_attention: return "self_attention";
    case LayerKind::encoder_block: return "encoder_block";
    case LayerKind::positional_encoding: return "positional_encoding";
    case LayerKind::softmax: return "softmax";
    }
    return "?";
}

Activation parse_activation(std::string_view s) {
    for (auto a : {Activation::none, Activation::relu, Activation::tanh, Activation::gelu})
        if (to_string(a) == s) return a;
    throw Error("unknown activation '" + std::string(s) + "'");
}

LayerKind parse_layer_kind(std::string_view s) {
    for (auto k : {LayerKind::dense, LayerKind::layer_norm, LayerKind::self_attention, LayerKind::encoder_block,
                   LayerKind::positional_encoding, LayerKind::softmax})
        if (to_string(k) == s) return k;
    throw Error("unknown layer kind '" + std::string(s) + "'");
}

double activate(Activation a, double z) {
    switch (a) {
    case Activation::none: return z;
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
    case Activation::gelu: return 0.5 * z * (1.0 + std::tanh(kGeluC * (z + kGeluA * z * z * z)));
    }
    return z;
}

double activate_grad(Activation a, double z, double y) {
    switch (a) {
    case Activation::none: return 1.0;
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: return 1.0 - y * y;
    case Activation::gelu: {
        const double t = std::tanh(kGeluC * (z + kGeluA * z * z * z));
        return 0.5 * (1.0 + t) + 0.5 * z * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * z * z);
    }
    }
    return 1.0;
}

Matrix softmax_rows(const Matrix& x) {
    Matrix y(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double mx = x.row(r).maxCoeff();
        y.row(r) = (x.row(r).array() - mx).exp().matrix();
        y.row(r) /= y.row(r).sum();
    }
    return y;
}

Matrix positional_encoding(Eigen::Index rows, Eigen::Index width) {
    Matrix pe(rows, width);
    for (Eigen::Index pos = 0; pos < rows; ++pos) {
        for (Eigen::Index i = 0; i < width; ++i) {
            const double pair = static_cast<double>(i - (i % 2));
            const double angle =
                static_cast<double>(pos) / std::pow(10000.0, pair / static_cast<double>(width));
            pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return pe;
}

// ---------------------------------------------------------------------------
// Dense

Dense::Dense(const std::string& prefix, std::size_t in, std::size_t out, Activation act, Rng& rng)
    : weight_(prefix + ".weight", {in, out}), bias_(prefix + ".bias", {out}), act_(act) {
    init_uniform(weight_, in, rng);
}

Matrix Dense::run(const Matrix& x, Cache* cache) const {
    Matrix z = x * weight_.value_matrix();
    z.rowwise() += Eigen::Map<const RowVector>(bias_.values.data(), static_cast<Eigen::Index>(bias_.size()));
    Matrix y;
    if (act_ == Activation::none) {
        y = z;
    } else {
        y = z.unaryExpr([a = act_](double v) { return activate(a, v); });
    }
    if (cache) *cache = Cache{x, std::move(z), y};
    return y;
}

Matrix Dense::forward(const Matrix& x) {
    Cache c;
    Matrix y = run(x, &c);
    cache_ = std::move(c);
    return y;
}

Matrix Dense::backward(const Matrix& dy) {
    if (!cache_) no_forward("dense");
    const Cache& c = *cache_;
    Matrix dz = dy;
    if (act_ != Activation::none) {
        for (Eigen::Index i = 0; i < dz.size(); ++i)
            dz.data()[i] *= activate_grad(act_, c.z.data()[i], c.y.data()[i]);
    }
    weight_.grad_matrix().noalias() += c.x.transpose() * dz;
    Eigen::Map<RowVector>(bias_.grad.data(), static_cast<Eigen::Index>(bias_.size())) += dz.colwise().sum();
    return dz * weight_.value_matrix().transpose();
}

// ---------------------------------------------------------------------------
// LayerNorm

LayerNorm::LayerNorm(const std::string& prefix, std::size_t width)
    : gain_(prefix + ".gain", {width}), shift_(prefix + ".shift", {width}) {
    std::fill(gain_.values.begin(), gain_.values.end(), 1.0);
}

Matrix LayerNorm::run(const Matrix& x, Cache* cache) const {
    const Eigen::Index n = x.cols();
    Matrix xhat(x.rows(), n);
    Eigen::VectorXd inv_std(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double mean = x.row(r).mean();
        const double var = (x.row(r).array() - mean).square().sum() / static_cast<double>(n);
        inv_std(r) = 1.0 / std::sqrt(var + kEps);
        xhat.row(r) = (x.row(r).array() - mean) * inv_std(r);
    }
    const Eigen::Map<const RowVector> g(gain_.values.data(), n);
    const Eigen::Map<const RowVector> b(shift_.values.data(), n);
    Matrix y = xhat.array().rowwise() * g.array();
    y.rowwise() += b;
    if (cache) *cache = Cache{std::move(xhat), std::move(inv_std)};
    return y;
}

Matrix LayerNorm::forward(const Matrix& x) {
    Cache c;
    Matrix y = run(x, &c);
    cache_ = std::move(c);
    return y;
}

Matrix LayerNorm::backward(const Matrix& dy) {
    if (!cache_) no_forward("layer_norm");
    const Cache& c = *cache_;
    const Eigen::Index n = dy.cols();
    const Eigen::Map<const RowVector> g(gain_.values.data(), n);
    Eigen::Map<RowVector>(gain_.grad.data(), n) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
    Eigen::Map<RowVector>(shift_.grad.data(), n) += dy.colwise().sum();

    Matrix dxhat = dy.array().rowwise() * g.array();
    Matrix dx(dy.rows(), n);
    const double nn = static_cast<double>(n);
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
        const double s1 = dxhat.row(r).sum();
        const double s2 = dxhat.row(r).dot(c.xhat.row(r));
        dx.row(r) = (c.inv_std(r) / nn) * (nn * dxhat.row(r).array() - s1 - c.xhat.row(r).array() * s2);
    }
    return dx;
}

// ---------------------------------------------------------------------------
// SelfAttention

SelfAttention::SelfAttention(const std::string& prefix, std::size_t width, std::size_t heads, Rng& rng)
    : width_(width),
      heads_(heads),
      query_(prefix + ".query", width, width, Activation::none, rng),
      key_(prefix + ".key", width, width, Activation::none, rng),
      value_(prefix + ".value", width, width, Activation::none, rng),
      output_(prefix + ".output", width, width, Activation::none, rng) {}

Matrix SelfAttention::attend(const Matrix& q, const Matrix& k, const Matrix& v, std::vector<Matrix>* attn) const {
    const Eigen::Index dh = static_cast<Eigen::Index>(width_ / heads_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Matrix concat(q.rows(), q.cols());
    if (attn) attn->clear();
    for (std::size_t h = 0; h < heads_; ++h) {
        const Eigen::Index c0 = static_cast<Eigen::Index>(h) * dh;
        Matrix scores = (q.middleCols(c0, dh) * k.middleCols(c0, dh).transpose()) * scale;
        Matrix a = softmax_rows(scores);
        concat.middleCols(c0, dh).noalias() = a * v.middleCols(c0, dh);
        if (attn) attn->push_back(std::move(a));
    }
    return concat;
}

Matrix SelfAttention::forward(const Matrix& x) {
    Cache c;
    c.q = query_.forward(x);
    c.k = key_.forward(x);
    c.v = value_.forward(x);
    Matrix concat = attend(c.q, c.k, c.v, &c.attn);
    cache_ = std::move(c);
    return output_.forward(concat);
}

Matrix SelfAttention::infer(const Matrix& x) const {
    return output_.infer(attend(query_.infer(x), key_.infer(x), value_.infer(x), nullptr));
}

Matrix SelfAttention::backward(const Matrix& dy) {
    if (!cache_) no_forward("self_attention");
    const Cache& c = *cache_;
    const Matrix dconcat = output_.backward(dy);
    const Eigen::Index dh = static_cast<Eigen::Index>(width_ / heads_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Matrix dq(c.q.rows(), c.q.cols()), dk(c.k.rows(), c.k.cols()), dv(c.v.rows(), c.v.cols());
    for (std::size_t h = 0; h < heads_; ++h) {
        const Eigen::Index c0 = static_cast<Eigen::Index>(h) * dh;
        const Matrix& a = c.attn[h];
        const auto dout = dconcat.middleCols(c0, dh);
        Matrix da = dout * c.v.middleCols(c0, dh).transpose();
        dv.middleCols(c0, dh).noalias() = a.transpose() * dout;
        Matrix ds(a.rows(), a.cols());
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            const double dot = da.row(r).dot(a.row(r));
            ds.row(r) = a.row(r).array() * (da.row(r).array() - dot);
        }
        ds *= scale;
        dq.middleCols(c0, dh).noalias() = ds * c.k.middleCols(c0, dh);
        dk.middleCols(c0, dh).noalias() = ds.transpose() * c.q.middleCols(c0, dh);
    }
    Matrix dx = query_.backward(dq);
    dx += key_.backward(dk);
    dx += value_.backward(dv);
    return dx;
}

void SelfAttention::collect(std::vector<ParamTensor*>& out) {
    query_.collect(out);
    key_.collect(out);
    value_.collect(out);
    output_.collect(out);
}

void SelfAttention::collect(std::vector<const ParamTensor*>& out) const {
    query_.collect(out);
    key_.collect(out);
    value_.collect(out);
    output_.collect(out);
}

// ---------------------------------------------------------------------------
// EncoderBlock

EncoderBlock::EncoderBlock(const std::string& prefix, std::size_t width, std::size_t heads, std::size_t ff_width,
                           Rng& rng)
    : attention_(prefix + ".attn", width, heads, rng),
      norm1_(prefix + ".norm1", width),
      ff1_(prefix + ".ff1", width, ff_width, Activation::gelu, rng),
      ff2_(prefix + ".ff2", ff_width, width, Activation::none, rng),
      norm2_(prefix + ".norm2", width) {}

Matrix EncoderBlock::forward(const Matrix& x) {
    Matrix h = norm1_.forward(x + attention_.forward(x));
    Matrix f = ff2_.forward(ff1_.forward(h));
    has_forward_ = true;
    return norm2_.forward(h + f);
}

Matrix EncoderBlock::infer(const Matrix& x) const {
    Matrix h = norm1_.infer(x + attention_.infer(x));
    Matrix f = ff2_.infer(ff1_.infer(h));
    return norm2_.infer(h + f);
}

Matrix EncoderBlock::backward(const Matrix& dy) {
    if (!has_forward_) no_forward("encoder_block");
    const Matrix dsum2 = norm2_.backward(dy);
    const Matrix dh = dsum2 + ff1_.backward(ff2_.backward(dsum2));
    const Matrix dsum1 = norm1_.backward(dh);
    return dsum1 + attention_.backward(dsum1);
}

void EncoderBlock::collect(std::vector<ParamTensor*>& out) {
    attention_.collect(out);
    norm1_.collect(out);
    ff1_.collect(out);
    ff2_.collect(out);
    norm2_.collect(out);
}

void EncoderBlock::collect(std::vector<const ParamTensor*>& out) const {
    attention_.collect(out);
    norm1_.collect(out);
    ff1_.collect(out);
    ff2_.collect(out);
    norm2_.collect(out);
}

// ---------------------------------------------------------------------------
// Parameter-free layers

Matrix PositionalEncoding::infer(const Matrix& x) const {
    return x + positional_encoding(x.rows(), static_cast<Eigen::Index>(width_));
}

Matrix PositionalEncoding::backward(const Matrix& dy) {
    if (!has_forward_) no_forward("positional_encoding");
    return dy;
}

Matrix Softmax::forward(const Matrix& x) {
    y_ = softmax_rows(x);
    return *y_;
}

Matrix Softmax::backward(const Matrix& dy) {
    if (!y_) no_forward("softmax");
    const Matrix& y = *y_;
    Matrix dx(dy.rows(), dy.cols());
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
        const double dot = dy.row(r).dot(y.row(r));
        dx.row(r) = y.row(r).array() * (dy.row(r).array() - dot);
    }
    return dx;
}

} // namespace anoseqs::netcore
