#include "anoseqs/sequences/windows.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <sstream>

namespace anoseqs::sequences {

std::vector<StateWindow> extract_windows(const std::vector<StateVec>& episode, std::size_t T, std::size_t stride,
                                         std::int64_t episode_id) {
    if (T < 2) throw Error("extract_windows: T must be at least 2");
    if (stride < 1) throw Error("extract_windows: stride must be at least 1");
    std::vector<StateWindow> out;
    if (episode.size() < T) return out;
    const std::size_t M = episode.front().size();
    for (std::size_t start = 0; start + T <= episode.size(); start += stride) {
        StateWindow w;
        w.episode = episode_id;
        w.start = static_cast<std::int64_t>(start);
        w.states.resize(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(M));
        for (std::size_t t = 0; t < T; ++t) {
            const auto& s = episode[start + t];
            if (s.size() != M) throw Error("extract_windows: states differ in width");
            for (std::size_t m = 0; m < M; ++m) w.states(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(m)) = s[m];
        }
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<StateWindow> filter_safe(const std::vector<StateWindow>& windows, const std::vector<std::int64_t>& events,
                                     std::size_t horizon) {
    std::vector<std::int64_t> sorted = events;
    std::sort(sorted.begin(), sorted.end());
    std::vector<StateWindow> out;
    for (const auto& w : windows) {
        const std::int64_t lo = w.start;
        const std::int64_t hi = w.start + w.states.rows() - 1 + static_cast<std::int64_t>(horizon);
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), lo);
        if (it == sorted.end() || *it > hi) out.push_back(w);
    }
    return out;
}

std::vector<Episode> split_episodes(const std::vector<agent::TrajectoryEntry>& log) {
    std::vector<Episode> out;
    std::map<std::int64_t, std::size_t> index;
    for (const auto& e : log) {
        auto [it, fresh] = index.try_emplace(e.episode, out.size());
        if (fresh) out.push_back(Episode{e.episode, {}, {}});
        auto& ep = out[it->second];
        if (e.cost != 0 || e.failure) ep.events.push_back(static_cast<std::int64_t>(ep.states.size()));
        ep.states.push_back(e.next_state);
    }
    return out;
}

namespace {

Matrix quantize(Matrix m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(static_cast<float>(m.data()[i]));
    return m;
}

} // namespace

WindowDataset build_dataset(const std::vector<agent::TrajectoryEntry>& log, const DatasetOptions& options,
                            const std::string& env, const std::string& source_run) {
    if (log.empty()) throw Error("build_dataset: trajectory log is empty");
    if (!(options.holdout_fraction >= 0.0 && options.holdout_fraction < 1.0))
        throw Error("build_dataset: holdout_fraction must lie in [0, 1)");
    const std::size_t M = log.front().next_state.size();
    WindowDataset ds;
    ds.source_run = source_run;
    std::vector<StateWindow> safe;
    for (const auto& ep : split_episodes(log)) {
        for (const auto& s : ep.states)
            if (s.size() != M) throw Error("build_dataset: episodes differ in state width");
        const auto all = extract_windows(ep.states, options.T, options.stride, ep.id);
        ds.total_windows += all.size();
        for (auto& w : filter_safe(all, ep.events, options.horizon)) safe.push_back(std::move(w));
    }
    if (safe.empty())
        throw Error("build_dataset: no safe windows found; collect a longer source run or lower T/H");

    std::vector<std::size_t> order(safe.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(options.seed, "dataset/shuffle"));
    std::shuffle(order.begin(), order.end(), rng);

    const auto n_holdout = static_cast<std::size_t>(std::llround(options.holdout_fraction * static_cast<double>(safe.size())));
    for (auto* set : {&ds.train, &ds.holdout}) {
        set->T = options.T;
        set->M = M;
        set->env = env;
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        StateWindow w = std::move(safe[order[i]]);
        w.states = quantize(std::move(w.states));
        (i < n_holdout ? ds.holdout : ds.train).windows.push_back(std::move(w));
    }
    return ds;
}

std::string encode_windows(const WindowSet& set) {
    std::string out = "T=" + std::to_string(set.T) + " M=" + std::to_string(set.M) +
                      " count=" + std::to_string(set.windows.size()) + " env=" + set.env + "\n";
    out.reserve(out.size() + set.windows.size() * set.T * set.M * 4);
    for (const auto& w : set.windows) {
        if (static_cast<std::size_t>(w.states.rows()) != set.T || static_cast<std::size_t>(w.states.cols()) != set.M)
            throw Error("encode_windows: window shape differs from the header");
        for (Eigen::Index i = 0; i < w.states.size(); ++i) {
            auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(w.states.data()[i]));
            for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
        }
    }
    return out;
}

WindowSet decode_windows(std::string_view bytes) {
    const auto nl = bytes.find('\n');
    if (nl == std::string_view::npos) throw Error("dataset: missing header line");
    std::istringstream header{std::string(bytes.substr(0, nl))};
    WindowSet set;
    std::size_t count = 0;
    std::string tok;
    int seen = 0;
    while (header >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw Error("dataset: malformed header token '" + tok + "'");
        const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
        try {
            if (key == "T") set.T = std::stoul(val), seen |= 1;
            else if (key == "M") set.M = std::stoul(val), seen |= 2;
            else if (key == "count") count = std::stoul(val), seen |= 4;
            else if (key == "env") set.env = val, seen |= 8;
            else throw Error("dataset: unknown header key '" + key + "'");
        } catch (const std::logic_error&) {
            throw Error("dataset: bad header value '" + tok + "'");
        }
    }
    if (seen != 15) throw Error("dataset: header must carry T, M, count and env");
    const std::size_t per = set.T * set.M;
    const auto payload = bytes.substr(nl + 1);
    if (payload.size() != count * per * 4) throw Error("dataset: payload size does not match the header");
    set.windows.resize(count);
    const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
    for (auto& w : set.windows) {
        w.states.resize(static_cast<Eigen::Index>(set.T), static_cast<Eigen::Index>(set.M));
        for (std::size_t i = 0; i < per; ++i, p += 4) {
            const std::uint32_t bits = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
                                       std::uint32_t(p[3]) << 24;
            w.states.data()[i] = static_cast<double>(std::bit_cast<float>(bits));
        }
    }
    return set;
}

void write_windows(const std::filesystem::path& path, const WindowSet& set) { write_file(path, encode_windows(set)); }

WindowSet read_windows(const std::filesystem::path& path) { return decode_windows(read_file(path)); }

std::vector<StateWindow> event_windows(const std::vector<agent::TrajectoryEntry>& log, std::size_t T) {
    std::vector<StateWindow> out;
    for (const auto& ep : split_episodes(log)) {
        if (ep.events.empty()) continue;
        for (auto& w : extract_windows(ep.states, T, 1, ep.id)) {
            const auto lo = w.start, hi = w.start + static_cast<std::int64_t>(T) - 1;
            const bool hit = std::any_of(ep.events.begin(), ep.events.end(),
                                         [&](std::int64_t j) { return j >= lo && j <= hi; });
            if (hit) out.push_back(std::move(w));
        }
    }
    return out;
}

} // namespace anoseqs::sequences
