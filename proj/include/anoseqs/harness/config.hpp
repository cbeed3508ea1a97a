#pragma once

#include "anoseqs/agent/td3.hpp"
#include "anoseqs/detector/detector.hpp"
#include "anoseqs/envs/env.hpp"
#include "anoseqs/sequences/windows.hpp"
#include "anoseqs/shaping/shaping.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace anoseqs::harness {

/// Flat run configuration: dotted keys with string values, e.g.
///
///   # comment
///   target.env = hazard_point_goal
///   shaping.beta = 100
///
/// Only keys listed by known_keys() are accepted.
class RunConfig {
public:
    RunConfig();

    static RunConfig load(const std::filesystem::path& path);
    static RunConfig parse(const std::string& text);

    void set(const std::string& key, const std::string& value);
    /// "key=value"
    void apply_override(const std::string& assignment);
    const std::string& get(const std::string& key) const;

    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    std::vector<std::uint64_t> get_uint_list(const std::string& key) const;

    /// Sorted "key = value" lines, including defaults.
    std::string to_text() const;
    /// Canonical text of the keys starting with any of the prefixes.
    std::string canonical(const std::vector<std::string>& prefixes) const;

    static const std::map<std::string, std::string>& defaults();

    // Typed views.
    envs::EnvConfig source_env() const;
    envs::EnvConfig target_env() const;
    agent::AgentConfig agent_config() const;
    /// Agent settings for the source collection run (longer random warm-up).
    agent::AgentConfig collect_agent_config() const;
    sequences::DatasetOptions dataset_options() const;
    detector::DetectorConfig detector_config() const;
    detector::CalibrationMethod calibration_method() const;
    /// Explicit theta, or nullopt for "calibrated".
    std::optional<double> theta_override() const;
    double shaping_beta() const;
    double cost_shaping_beta() const;
    std::vector<std::uint64_t> seeds() const;

    /// Output root: ANOSEQS_OUT if set, otherwise the out_dir key; then run_id.
    std::filesystem::path run_dir() const;

    void validate() const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace anoseqs::harness
