#pragma once

#include "anoseqs/harness/config.hpp"
#include "anoseqs/metrics/metrics.hpp"

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace anoseqs::harness {

enum class Algo { anoseqs, td3_baseline, cost_shaping_baseline };
std::string_view to_string(Algo a);
Algo parse_algo(std::string_view s);
/// Column label used in reports and plots ("AnoSeqs", "TD3", "Cost Shaping").
std::string display_name(Algo a);

/// Stage record written next to the stage outputs.
struct Manifest {
    std::string stage;
    std::string run_id;
    std::string config_hash;
    std::vector<std::string> outputs;  // file names relative to the stage directory
    std::map<std::string, std::string> info;
};

std::string manifest_to_text(const Manifest& m);
Manifest manifest_from_text(const std::string& text);

struct StageOutcome {
    std::filesystem::path dir;
    std::string config_hash;
    bool skipped = false;  // already complete with the same config hash
};

/// Extra config overrides that distinguish a policy run (sweeps, ablations).
struct PolicyVariant {
    std::string label;  // subdirectory under sweep/; empty for the main runs
    std::map<std::string, std::string> overrides;
};

struct EvaluationResult {
    std::vector<metrics::EpisodeRecord> episodes;
    metrics::MetricsSummary summary;
};

struct PipelineOptions {
    bool force = false;         // rerun stages whose manifest hash differs
    std::ostream* log = nullptr;
};

/// The five-stage pipeline over one run directory. Every stage writes a
/// manifest with its config hash; rerunning a completed stage with the same
/// hash is a no-op, and a different hash is an error unless forced.
class Pipeline {
public:
    explicit Pipeline(RunConfig config, PipelineOptions options = {});

    const RunConfig& config() const { return config_; }
    const std::filesystem::path& run_dir() const { return run_dir_; }

    std::filesystem::path source_dir() const { return run_dir_ / "source"; }
    std::filesystem::path dataset_dir() const { return run_dir_ / "dataset"; }
    std::filesystem::path detector_dir() const { return run_dir_ / "detector"; }
    std::filesystem::path policy_dir(Algo algo, std::uint64_t seed, const PolicyVariant& v = {}) const;

    std::string collect_hash() const;
    std::string dataset_hash() const;
    std::string detector_hash() const;
    std::string policy_hash(Algo algo, std::uint64_t seed, const PolicyVariant& v = {}) const;

    StageOutcome collect();
    StageOutcome build_dataset();
    StageOutcome train_detector();
    StageOutcome train_policy(Algo algo, std::uint64_t seed, const PolicyVariant& v = {});

    /// Deterministic-policy episodes of a trained policy on the target env.
    EvaluationResult evaluate(Algo algo, std::uint64_t seed, int episodes, const PolicyVariant& v = {});

    /// Table with TD3 and AnoSeqs columns from `episodes` evaluation episodes of the given seed.
    std::string summary_report(std::uint64_t seed, int episodes);

    /// One full policy run per value and seed (sharing the detector).
    /// param is "beta" or "theta". Returns the variant used for each value.
    std::vector<PolicyVariant> sweep(const std::string& param, const std::vector<std::string>& values,
                                     const std::vector<std::uint64_t>& seeds);
    static PolicyVariant sweep_variant(const std::string& param, const std::string& value);

    /// Seed-averaged learning curve of one algorithm.
    std::vector<metrics::CurvePoint> average_curve(Algo algo, const std::vector<std::uint64_t>& seeds,
                                                   const PolicyVariant& v = {}) const;

    /// collect, build-dataset, train-detector, all three algorithms for every
    /// seed, the summary report and the plots.
    void run_all();

private:
    RunConfig variant_config(const PolicyVariant& v) const;
    bool stage_complete(const std::filesystem::path& dir, const std::string& stage, const std::string& hash) const;
    void write_manifest(const std::filesystem::path& dir, const std::string& stage, const std::string& hash,
                        const std::vector<std::string>& outputs, const std::map<std::string, std::string>& info = {}) const;
    void say(const std::string& line) const;

    RunConfig config_;
    PipelineOptions options_;
    std::filesystem::path run_dir_;
};

} // namespace anoseqs::harness
