#pragma once

#include "anoseqs/agent/trajectory.hpp"
#include "anoseqs/common.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace anoseqs::sequences {

/// T consecutive states of one episode, rows are timesteps.
struct StateWindow {
    Matrix states;
    std::int64_t episode = 0;
    std::int64_t start = 0;  // index of the first row within the episode
};

/// One episode reconstructed from a trajectory log. states[k] is the state
/// reached by transition k; events holds the k with cost or failure.
struct Episode {
    std::int64_t id = 0;
    std::vector<StateVec> states;
    std::vector<std::int64_t> events;
};

/// Windows starting at 0, stride, 2*stride, ... with start + T <= length.
std::vector<StateWindow> extract_windows(const std::vector<StateVec>& episode, std::size_t T, std::size_t stride,
                                         std::int64_t episode_id = 0);

/// Keeps window [i, i+T-1] iff no event j satisfies i <= j <= i+T-1+H.
std::vector<StateWindow> filter_safe(const std::vector<StateWindow>& windows, const std::vector<std::int64_t>& events,
                                     std::size_t horizon);

/// Groups log lines by episode id (in order of first appearance).
std::vector<Episode> split_episodes(const std::vector<agent::TrajectoryEntry>& log);

struct WindowSet {
    std::size_t T = 0;
    std::size_t M = 0;
    std::string env;
    std::vector<StateWindow> windows;
};

struct WindowDataset {
    WindowSet train;
    WindowSet holdout;
    std::string source_run;
    std::size_t total_windows = 0;  // candidate windows before filtering
};

struct DatasetOptions {
    std::size_t T = 16;
    std::size_t stride = 1;
    std::size_t horizon = 16;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 0;
};

/// Safe windows of every episode, shuffled with a seeded permutation and split
/// into train/holdout (holdout gets round(fraction * count) windows).
WindowDataset build_dataset(const std::vector<agent::TrajectoryEntry>& log, const DatasetOptions& options,
                            const std::string& env, const std::string& source_run = "");

/// Header `T=<int> M=<int> count=<int> env=<id>\n` then count*T*M little-endian f32.
std::string encode_windows(const WindowSet& set);
WindowSet decode_windows(std::string_view bytes);
void write_windows(const std::filesystem::path& path, const WindowSet& set);
WindowSet read_windows(const std::filesystem::path& path);

/// Every unsafe-window candidate (windows containing at least one event) of a log.
std::vector<StateWindow> event_windows(const std::vector<agent::TrajectoryEntry>& log, std::size_t T);

} // namespace anoseqs::sequences
