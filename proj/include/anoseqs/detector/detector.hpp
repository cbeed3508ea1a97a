#pragma once

#include "anoseqs/common.hpp"
#include "anoseqs/netcore/checkpoint.hpp"
#include "anoseqs/netcore/network.hpp"
#include "anoseqs/sequences/windows.hpp"

#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace anoseqs::detector {

/// mae: eta = MAE. paper: eta = T * MAE (the softmax of a single score is 1).
enum class ScoreMode { mae, paper };
std::string_view to_string(ScoreMode m);
ScoreMode parse_score_mode(std::string_view s);

struct DetectorConfig {
    std::size_t d_model = 32;
    std::size_t heads = 2;
    std::size_t blocks = 2;
    std::size_t ff_width = 64;
    double learning_rate = 1e-3;
    std::size_t batch_size = 64;
    std::size_t epochs = 50;
    std::size_t max_train_windows = 4000;  // 0 keeps every window
    double std_floor = 1e-3;
    ScoreMode score_mode = ScoreMode::mae;
    std::uint64_t seed = 0;

    void validate() const;
};

netcore::NetSpec detector_spec(std::size_t M, const DetectorConfig& config);

/// Transformer autoencoder over T x M windows. Inputs are standardized per
/// feature with statistics of the training split; reconstructions are mapped
/// back, so MAE is in the original state units.
class DetectorModel {
public:
    DetectorModel(std::size_t T, std::size_t M, const DetectorConfig& config);
    DetectorModel(std::size_t T, std::size_t M, netcore::Network net, RowVector mean, RowVector std, ScoreMode mode);

    std::size_t window_length() const { return T_; }
    std::size_t state_dim() const { return M_; }
    ScoreMode score_mode() const { return mode_; }
    void set_score_mode(ScoreMode m) { mode_ = m; }

    Matrix reconstruct(const Matrix& window) const;

    Matrix normalize(const Matrix& window) const;
    Matrix denormalize(const Matrix& z) const;
    void set_normalization(RowVector mean, RowVector std);
    const RowVector& feature_mean() const { return mean_; }
    const RowVector& feature_std() const { return std_; }

    netcore::Network& network() { return net_; }
    const netcore::Network& network() const { return net_; }

    /// Rounds every parameter and statistic to 32-bit float so the saved
    /// checkpoint reloads to an identical model.
    void quantize();

    netcore::Checkpoint to_checkpoint() const;
    static DetectorModel from_checkpoint(const netcore::Checkpoint& ckpt);

private:
    void check_window(const Matrix& window) const;

    std::size_t T_, M_;
    netcore::Network net_;
    RowVector mean_, std_;
    ScoreMode mode_;
};

/// Mean over all elements of |reconstruction - window|.
double window_mae(const Matrix& window, const Matrix& reconstruction);

/// Score from an already computed MAE.
double score_from_mae(double mae, std::size_t T, ScoreMode mode);

double anomaly_score(const DetectorModel& model, const Matrix& window, ScoreMode mode);
inline double anomaly_score(const DetectorModel& model, const Matrix& window) {
    return anomaly_score(model, window, model.score_mode());
}
std::vector<double> score_windows(const DetectorModel& model, const std::vector<sequences::StateWindow>& windows);

struct TrainingReport {
    std::vector<double> epoch_mae;  // mean normalized-space training MAE per epoch
    std::size_t windows_used = 0;
};

/// Adam on the per-window MAE with seeded shuffling every epoch.
DetectorModel train_detector(const sequences::WindowSet& train, const DetectorConfig& config,
                             TrainingReport* report = nullptr);

enum class CalibrationMethod { percentile, mean_plus_k_sigma };
std::string_view to_string(CalibrationMethod m);
CalibrationMethod parse_calibration_method(std::string_view s);

struct ThresholdCalibration {
    CalibrationMethod method = CalibrationMethod::percentile;
    double parameter = 95.0;
    double theta = 0.0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
    ScoreMode score_mode = ScoreMode::mae;
};

inline constexpr std::size_t kMinCalibrationScores = 30;

/// percentile: nearest-rank value, rank ceil(p/100 * n).
/// mean_plus_k_sigma: mean + k * sample std.
ThresholdCalibration calibrate_threshold(const std::vector<double>& scores, CalibrationMethod method, double parameter);

/// key=value lines: method, parameter, theta, mean, std, min, max, count, score_mode.
std::string calibration_to_text(const ThresholdCalibration& c);
ThresholdCalibration calibration_from_text(const std::string& text);
void write_calibration(const std::filesystem::path& path, const ThresholdCalibration& c);
ThresholdCalibration read_calibration(const std::filesystem::path& path);

/// Online scoring of a state stream.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::size_t width() const = 0;
    virtual void reset() = 0;
    /// Empty until a full window has been seen.
    virtual std::optional<double> feed(const StateVec& state) = 0;
};

/// Scores the trailing T states after every feed.
class StreamingScorer final : public Scorer {
public:
    explicit StreamingScorer(std::shared_ptr<const DetectorModel> model);
    StreamingScorer(std::shared_ptr<const DetectorModel> model, ScoreMode mode);

    std::size_t width() const override { return model_->state_dim(); }
    void reset() override { buffer_.clear(); }
    std::optional<double> feed(const StateVec& state) override;

private:
    std::shared_ptr<const DetectorModel> model_;
    ScoreMode mode_;
    std::deque<StateVec> buffer_;
};

} // namespace anoseqs::detector
