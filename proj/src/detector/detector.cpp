#include "anoseqs/detector/detector.hpp"

#include "anoseqs/netcore/optim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace anoseqs::detector {

using netcore::LayerSpec;
using netcore::NetSpec;
using netcore::Network;

std::string_view to_string(ScoreMode m) { return m == ScoreMode::mae ? "mae" : "paper"; }

ScoreMode parse_score_mode(std::string_view s) {
    if (s == "mae") return ScoreMode::mae;
    if (s == "paper") return ScoreMode::paper;
    throw Error("unknown score mode '" + std::string(s) + "' (expected mae or paper)");
}

std::string_view to_string(CalibrationMethod m) {
    return m == CalibrationMethod::percentile ? "percentile" : "mean_plus_k_sigma";
}

CalibrationMethod parse_calibration_method(std::string_view s) {
    if (s == "percentile") return CalibrationMethod::percentile;
    if (s == "mean_plus_k_sigma") return CalibrationMethod::mean_plus_k_sigma;
    throw Error("unknown calibration method '" + std::string(s) + "'");
}

void DetectorConfig::validate() const {
    if (d_model == 0 || heads == 0 || d_model % heads != 0) throw Error("detector: d_model must be a positive multiple of heads");
    if (ff_width == 0) throw Error("detector: ff_width must be positive");
    if (!(learning_rate > 0.0)) throw Error("detector: learning_rate must be positive");
    if (batch_size == 0) throw Error("detector: batch_size must be positive");
    if (!(std_floor > 0.0)) throw Error("detector: std_floor must be positive");
}

NetSpec detector_spec(std::size_t M, const DetectorConfig& config) {
    config.validate();
    NetSpec spec;
    spec.seed = derive_seed(config.seed, "detector/init");
    spec.layers.push_back(LayerSpec::dense(M, config.d_model));
    spec.layers.push_back(LayerSpec::positional_encoding(config.d_model));
    for (std::size_t b = 0; b < config.blocks; ++b)
        spec.layers.push_back(LayerSpec::encoder_block(config.d_model, config.heads, config.ff_width));
    spec.layers.push_back(LayerSpec::dense(config.d_model, M));
    return spec;
}

DetectorModel::DetectorModel(std::size_t T, std::size_t M, const DetectorConfig& config)
    : T_(T), M_(M), net_(detector_spec(M, config)), mean_(RowVector::Zero(static_cast<Eigen::Index>(M))),
      std_(RowVector::Ones(static_cast<Eigen::Index>(M))), mode_(config.score_mode) {
    if (T < 2 || M == 0) throw Error("detector: window must have T >= 2 and M >= 1");
    quantize();
}

DetectorModel::DetectorModel(std::size_t T, std::size_t M, Network net, RowVector mean, RowVector std, ScoreMode mode)
    : T_(T), M_(M), net_(std::move(net)), mode_(mode) {
    if (net_.spec().input_width() != M || net_.spec().output_width() != M)
        throw Error("detector: network width does not match M");
    set_normalization(std::move(mean), std::move(std));
}

void DetectorModel::set_normalization(RowVector mean, RowVector std) {
    if (static_cast<std::size_t>(mean.size()) != M_ || static_cast<std::size_t>(std.size()) != M_)
        throw Error("detector: normalization statistics must have M entries");
    for (Eigen::Index i = 0; i < std.size(); ++i)
        if (!(std(i) > 0.0) || !std::isfinite(mean(i))) throw Error("detector: invalid normalization statistics");
    mean_ = std::move(mean);
    std_ = std::move(std);
}

void DetectorModel::check_window(const Matrix& window) const {
    if (static_cast<std::size_t>(window.rows()) != T_ || static_cast<std::size_t>(window.cols()) != M_)
        throw Error("detector: window is " + std::to_string(window.rows()) + "x" + std::to_string(window.cols()) +
                    ", model expects " + std::to_string(T_) + "x" + std::to_string(M_));
}

Matrix DetectorModel::normalize(const Matrix& window) const {
    return ((window.rowwise() - mean_).array().rowwise() / std_.array()).matrix();
}

Matrix DetectorModel::denormalize(const Matrix& z) const {
    return ((z.array().rowwise() * std_.array()).rowwise() + mean_.array()).matrix();
}

Matrix DetectorModel::reconstruct(const Matrix& window) const {
    check_window(window);
    return denormalize(net_.infer(normalize(window)));
}

void DetectorModel::quantize() {
    auto q = [](double v) { return static_cast<double>(static_cast<float>(v)); };
    for (auto* p : net_.params())
        for (auto& v : p->values) v = q(v);
    mean_ = mean_.unaryExpr(q);
    std_ = std_.unaryExpr(q);
}

netcore::Checkpoint DetectorModel::to_checkpoint() const {
    auto ckpt = netcore::checkpoint_from(net_);
    ckpt.header["kind"] = "detector";
    ckpt.header["window_length"] = std::to_string(T_);
    ckpt.header["state_dim"] = std::to_string(M_);
    ckpt.header["score_mode"] = std::string(to_string(mode_));
    auto stats = [&](const std::string& name, const RowVector& v) {
        netcore::NamedTensor t{name, {static_cast<std::uint32_t>(M_)}, {}};
        for (Eigen::Index i = 0; i < v.size(); ++i) t.values.push_back(static_cast<float>(v(i)));
        return t;
    };
    ckpt.tensors.push_back(stats("norm.mean", mean_));
    ckpt.tensors.push_back(stats("norm.std", std_));
    ckpt.header["tensor_count"] = std::to_string(ckpt.tensors.size());
    return ckpt;
}

DetectorModel DetectorModel::from_checkpoint(const netcore::Checkpoint& ckpt) {
    std::size_t T = 0, M = 0;
    try {
        T = std::stoul(ckpt.at("window_length"));
        M = std::stoul(ckpt.at("state_dim"));
    } catch (const std::logic_error&) {
        throw Error("detector checkpoint: bad window_length/state_dim");
    }
    auto stats = [&](const std::string& name) {
        const auto* t = ckpt.find(name);
        if (!t || t->values.size() != M) throw Error("detector checkpoint: missing or malformed " + name);
        RowVector v(static_cast<Eigen::Index>(M));
        for (std::size_t i = 0; i < M; ++i) v(static_cast<Eigen::Index>(i)) = t->values[i];
        return v;
    };
    return DetectorModel(T, M, netcore::network_from_checkpoint(ckpt), stats("norm.mean"), stats("norm.std"),
                         parse_score_mode(ckpt.at("score_mode")));
}

double window_mae(const Matrix& window, const Matrix& reconstruction) {
    if (window.rows() != reconstruction.rows() || window.cols() != reconstruction.cols())
        throw Error("window_mae: shape mismatch");
    if (window.size() == 0) throw Error("window_mae: empty window");
    double total = 0.0;
    for (Eigen::Index i = 0; i < window.size(); ++i) total += std::abs(reconstruction.data()[i] - window.data()[i]);
    return total / static_cast<double>(window.size());
}

double score_from_mae(double mae, std::size_t T, ScoreMode mode) {
    return mode == ScoreMode::mae ? mae : static_cast<double>(T) * mae;
}

double anomaly_score(const DetectorModel& model, const Matrix& window, ScoreMode mode) {
    return score_from_mae(window_mae(window, model.reconstruct(window)), model.window_length(), mode);
}

std::vector<double> score_windows(const DetectorModel& model, const std::vector<sequences::StateWindow>& windows) {
    std::vector<double> out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back(anomaly_score(model, w.states));
    return out;
}

DetectorModel train_detector(const sequences::WindowSet& train, const DetectorConfig& config, TrainingReport* report) {
    config.validate();
    if (train.windows.empty()) throw Error("train_detector: training split is empty");
    const std::size_t T = train.T, M = train.M;
    DetectorModel model(T, M, config);

    // Optional cap: a seeded subset keeps runtime bounded on large datasets.
    std::vector<std::size_t> pool(train.windows.size());
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng(derive_seed(config.seed, "detector/train"));
    if (config.max_train_windows > 0 && pool.size() > config.max_train_windows) {
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(config.max_train_windows);
        std::sort(pool.begin(), pool.end());
    }

    RowVector mean = RowVector::Zero(static_cast<Eigen::Index>(M));
    RowVector sq = RowVector::Zero(static_cast<Eigen::Index>(M));
    double rows = 0.0;
    for (auto i : pool) {
        const Matrix& w = train.windows[i].states;
        if (static_cast<std::size_t>(w.rows()) != T || static_cast<std::size_t>(w.cols()) != M)
            throw Error("train_detector: window shape differs from the dataset header");
        mean += w.colwise().sum();
        rows += static_cast<double>(w.rows());
    }
    mean /= rows;
    for (auto i : pool) sq += (train.windows[i].states.rowwise() - mean).array().square().colwise().sum().matrix();
    RowVector std = (sq / rows).array().sqrt().max(config.std_floor).matrix();
    model.set_normalization(mean, std);

    std::vector<Matrix> inputs;
    inputs.reserve(pool.size());
    for (auto i : pool) inputs.push_back(model.normalize(train.windows[i].states));

    auto& net = model.network();
    auto params = net.params();
    auto adam = netcore::make_adam_state(params, config.learning_rate);
    const double inv_elems = 1.0 / static_cast<double>(T * M);

    TrainingReport rep;
    rep.windows_used = inputs.size();
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_total = 0.0;
        for (std::size_t b0 = 0; b0 < order.size(); b0 += config.batch_size) {
            const std::size_t b1 = std::min(order.size(), b0 + config.batch_size);
            const double inv_batch = 1.0 / static_cast<double>(b1 - b0);
            net.zero_grad();
            for (std::size_t k = b0; k < b1; ++k) {
                const Matrix& x = inputs[order[k]];
                const Matrix diff = net.forward(x) - x;
                epoch_total += diff.cwiseAbs().sum() * inv_elems;
                const Matrix grad = diff.unaryExpr([](double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }) *
                                    (inv_elems * inv_batch);
                net.backward(grad);
            }
            if (!std::isfinite(epoch_total)) throw Error("train_detector: loss diverged (non-finite)");
            netcore::adam_step(params, adam);
        }
        rep.epoch_mae.push_back(epoch_total / static_cast<double>(inputs.size()));
    }
    model.quantize();
    if (report) *report = std::move(rep);
    return model;
}

ThresholdCalibration calibrate_threshold(const std::vector<double>& scores, CalibrationMethod method, double parameter) {
    if (scores.size() < kMinCalibrationScores)
        throw Error("calibrate_threshold: need at least " + std::to_string(kMinCalibrationScores) + " scores, got " +
                    std::to_string(scores.size()));
    for (double s : scores)
        if (!std::isfinite(s)) throw Error("calibrate_threshold: non-finite score");
    ThresholdCalibration c;
    c.method = method;
    c.parameter = parameter;
    c.count = scores.size();
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    c.min = sorted.front();
    c.max = sorted.back();
    const double n = static_cast<double>(sorted.size());
    c.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (double s : sorted) ss += (s - c.mean) * (s - c.mean);
    c.std = std::sqrt(ss / (n - 1.0));
    if (method == CalibrationMethod::percentile) {
        if (!(parameter > 0.0 && parameter <= 100.0)) throw Error("calibrate_threshold: percentile must lie in (0, 100]");
        // The small slack keeps e.g. 0.95 * 100 from rounding up to rank 96.
        auto rank = static_cast<std::size_t>(std::ceil(parameter / 100.0 * n - 1e-9));
        rank = std::clamp<std::size_t>(rank, 1, sorted.size());
        c.theta = sorted[rank - 1];
    } else {
        if (!std::isfinite(parameter)) throw Error("calibrate_threshold: k must be finite");
        c.theta = c.mean + parameter * c.std;
    }
    return c;
}

std::string calibration_to_text(const ThresholdCalibration& c) {
    std::string out;
    out += "method=" + std::string(to_string(c.method)) + "\n";
    out += "parameter=" + format_double(c.parameter) + "\n";
    out += "theta=" + format_double(c.theta) + "\n";
    out += "mean=" + format_double(c.mean) + "\n";
    out += "std=" + format_double(c.std) + "\n";
    out += "min=" + format_double(c.min) + "\n";
    out += "max=" + format_double(c.max) + "\n";
    out += "count=" + std::to_string(c.count) + "\n";
    out += "score_mode=" + std::string(to_string(c.score_mode)) + "\n";
    return out;
}

ThresholdCalibration calibration_from_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("calibration: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto get = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(std::string("calibration: missing key ") + key);
        return it->second;
    };
    ThresholdCalibration c;
    try {
        c.method = parse_calibration_method(get("method"));
        c.parameter = std::stod(get("parameter"));
        c.theta = std::stod(get("theta"));
        c.mean = std::stod(get("mean"));
        c.std = std::stod(get("std"));
        c.min = std::stod(get("min"));
        c.max = std::stod(get("max"));
        c.count = std::stoul(get("count"));
        c.score_mode = parse_score_mode(get("score_mode"));
    } catch (const std::logic_error&) {
        throw Error("calibration: unparsable value");
    }
    if (!std::isfinite(c.theta)) throw Error("calibration: theta must be finite");
    return c;
}

void write_calibration(const std::filesystem::path& path, const ThresholdCalibration& c) {
    write_file(path, calibration_to_text(c));
}

ThresholdCalibration read_calibration(const std::filesystem::path& path) {
    return calibration_from_text(read_file(path));
}

StreamingScorer::StreamingScorer(std::shared_ptr<const DetectorModel> model)
    : StreamingScorer(model, model ? model->score_mode() : ScoreMode::mae) {}

StreamingScorer::StreamingScorer(std::shared_ptr<const DetectorModel> model, ScoreMode mode)
    : model_(std::move(model)), mode_(mode) {
    if (!model_) throw Error("StreamingScorer: model is null");
}

std::optional<double> StreamingScorer::feed(const StateVec& state) {
    if (state.size() != model_->state_dim())
        throw Error("StreamingScorer: state width " + std::to_string(state.size()) + " does not match model width " +
                    std::to_string(model_->state_dim()));
    buffer_.push_back(state);
    if (buffer_.size() > model_->window_length()) buffer_.pop_front();
    if (buffer_.size() < model_->window_length()) return std::nullopt;
    Matrix w(static_cast<Eigen::Index>(buffer_.size()), static_cast<Eigen::Index>(state.size()));
    for (std::size_t t = 0; t < buffer_.size(); ++t)
        for (std::size_t m = 0; m < state.size(); ++m)
            w(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(m)) = buffer_[t][m];
    return anomaly_score(*model_, w, mode_);
}

} // namespace anoseqs::detector
