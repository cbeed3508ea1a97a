#pragma once

#include "anoseqs/common.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

namespace anoseqs::agent {

/// One line of the trajectory log.
struct TrajectoryEntry {
    std::int64_t step = 0;
    std::int64_t episode = 0;
    StateVec state;
    std::vector<double> action;
    double reward_orig = 0.0;
    double reward_used = 0.0;
    int cost = 0;
    bool terminated = false;
    bool failure = false;
    bool truncated = false;
    StateVec next_state;
};

/// JSON object with fields step, episode, state, action, reward_orig,
/// reward_used, cost, terminated, failure, truncated, next_state.
std::string to_json_line(const TrajectoryEntry& e);
TrajectoryEntry parse_json_line(const std::string& line);

std::vector<TrajectoryEntry> read_trajectory_log(const std::filesystem::path& path);

using TrajectorySink = std::function<void(const TrajectoryEntry&)>;

/// Appends entries as JSONL to a file, truncating it on construction.
class TrajectoryWriter {
public:
    explicit TrajectoryWriter(const std::filesystem::path& path);
    void operator()(const TrajectoryEntry& e);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

} // namespace anoseqs::agent
