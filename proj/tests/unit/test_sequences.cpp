#include "anoseqs/sequences/windows.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace anoseqs;
using namespace anoseqs::sequences;

namespace {

std::vector<StateVec> ramp(std::size_t length, std::size_t M = 2) {
    std::vector<StateVec> ep(length);
    for (std::size_t t = 0; t < length; ++t) {
        ep[t].resize(M);
        for (std::size_t m = 0; m < M; ++m) ep[t][m] = static_cast<double>(t) + 0.25 * static_cast<double>(m);
    }
    return ep;
}

// Brute force over every candidate start.
std::vector<std::int64_t> kept_starts_oracle(std::size_t L, std::size_t T, std::vector<std::int64_t> events,
                                             std::size_t H) {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i + T <= L; ++i) {
        bool ok = true;
        for (auto j : events)
            if (j >= static_cast<std::int64_t>(i) && j <= static_cast<std::int64_t>(i + T - 1 + H)) ok = false;
        if (ok) out.push_back(static_cast<std::int64_t>(i));
    }
    return out;
}

std::vector<std::int64_t> starts(const std::vector<StateWindow>& ws) {
    std::vector<std::int64_t> out;
    for (const auto& w : ws) out.push_back(w.start);
    return out;
}

std::vector<agent::TrajectoryEntry> synthetic_log(std::uint64_t seed, int episodes, int max_len, double p_cost) {
    Rng rng(seed);
    std::uniform_int_distribution<int> len(1, max_len);
    std::bernoulli_distribution cost(p_cost);
    std::normal_distribution<double> g(0, 1);
    std::vector<agent::TrajectoryEntry> log;
    std::int64_t step = 0;
    for (int e = 0; e < episodes; ++e) {
        const int L = len(rng);
        for (int t = 0; t < L; ++t) {
            agent::TrajectoryEntry x;
            x.step = ++step;
            x.episode = e;
            x.state = {g(rng), g(rng), g(rng)};
            x.next_state = {g(rng), g(rng), g(rng)};
            x.action = {0.0, 0.0};
            x.cost = cost(rng) ? 1 : 0;
            x.truncated = t + 1 == L;
            log.push_back(x);
        }
    }
    return log;
}

} // namespace

TEST_CASE("extract_windows counts and starts") {
    CHECK(starts(extract_windows(ramp(5), 3, 1)) == std::vector<std::int64_t>{0, 1, 2});
    CHECK(extract_windows(ramp(3), 3, 1).size() == 1);
    CHECK(extract_windows(ramp(2), 3, 1).empty());
    CHECK(starts(extract_windows(ramp(10), 3, 3)) == std::vector<std::int64_t>{0, 3, 6});
    const auto w = extract_windows(ramp(6, 3), 4, 2, 9);
    REQUIRE(w.size() == 2);
    CHECK(w[1].episode == 9);
    CHECK(w[1].states.rows() == 4);
    CHECK(w[1].states.cols() == 3);
    CHECK(w[1].states(0, 0) == 2.0);
    CHECK(w[1].states(3, 2) == 5.5);
    CHECK_THROWS_AS(extract_windows(ramp(5), 1, 1), Error);
    CHECK_THROWS_AS(extract_windows(ramp(5), 3, 0), Error);
}

TEST_CASE("filter_safe with an event at step 7") {
    const auto all = extract_windows(ramp(10), 3, 1);
    REQUIRE(all.size() == 8);
    CHECK(filter_safe(all, {}, 5).size() == 8);
    const auto h0 = filter_safe(all, {7}, 0);
    CHECK(starts(h0) == std::vector<std::int64_t>{0, 1, 2, 3, 4});
    CHECK(starts(h0) == kept_starts_oracle(10, 3, {7}, 0));
    const auto h2 = filter_safe(all, {7}, 2);
    CHECK(starts(h2) == std::vector<std::int64_t>{0, 1, 2});
    CHECK(starts(h2) == kept_starts_oracle(10, 3, {7}, 2));
}

TEST_CASE("filter_safe agrees with brute force on random events") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> L_d(2, 40), T_d(2, 6), H_d(0, 8);
        const std::size_t L = L_d(rng), T = T_d(rng), H = H_d(rng);
        std::vector<std::int64_t> ev;
        std::bernoulli_distribution b(0.1);
        for (std::size_t j = 0; j < L; ++j)
            if (b(rng)) ev.push_back(static_cast<std::int64_t>(j));
        const auto kept = filter_safe(extract_windows(ramp(L), T, 1), ev, H);
        CHECK(starts(kept) == kept_starts_oracle(L, T, ev, H));
        for (const auto& w : kept)
            for (auto j : ev) CHECK((j < w.start || j > w.start + static_cast<std::int64_t>(T - 1 + H)));
    }
}

TEST_CASE("split_episodes marks events by transition index") {
    auto log = synthetic_log(1, 3, 8, 0.0);
    log[2].cost = 1;
    log[log.size() - 1].failure = true;
    const auto eps = split_episodes(log);
    REQUIRE(eps.size() == 3);
    std::size_t total = 0;
    for (const auto& e : eps) total += e.states.size();
    CHECK(total == log.size());
    if (log[2].episode == 0) CHECK(std::find(eps[0].events.begin(), eps[0].events.end(), 2) != eps[0].events.end());
    CHECK(eps[2].events.back() == static_cast<std::int64_t>(eps[2].states.size()) - 1);
    CHECK(eps[0].states[0] == log[0].next_state);
}

TEST_CASE("build_dataset on an all-safe single episode") {
    auto log = synthetic_log(2, 1, 1, 0.0);
    log.clear();
    for (int t = 0; t < 50; ++t) {
        agent::TrajectoryEntry e;
        e.step = t + 1;
        e.next_state = {double(t), 1.0};
        log.push_back(e);
    }
    DatasetOptions opt;
    opt.T = 8;
    opt.stride = 3;
    opt.horizon = 8;
    opt.holdout_fraction = 0.0;
    const auto ds = build_dataset(log, opt, "corridor_run");
    CHECK(ds.train.windows.size() == (50 - 8) / 3 + 1);
    CHECK(ds.holdout.windows.empty());
    CHECK(ds.train.M == 2);
}

TEST_CASE("build_dataset split counts equal the filtered total") {
    const auto log = synthetic_log(3, 40, 60, 0.03);
    DatasetOptions opt;
    opt.T = 5;
    opt.horizon = 3;
    opt.holdout_fraction = 0.25;
    opt.seed = 4;
    const auto ds = build_dataset(log, opt, "x");
    std::size_t oracle = 0, candidates = 0;
    for (const auto& ep : split_episodes(log)) {
        candidates += ep.states.size() >= 5 ? ep.states.size() - 4 : 0;
        oracle += kept_starts_oracle(ep.states.size(), 5, ep.events, 3).size();
    }
    CHECK(ds.train.windows.size() + ds.holdout.windows.size() == oracle);
    CHECK(ds.total_windows == candidates);
    CHECK(ds.holdout.windows.size() == static_cast<std::size_t>(std::llround(0.25 * double(oracle))));

    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const auto* set : {&ds.train, &ds.holdout})
        for (const auto& w : set->windows) CHECK(seen.insert({w.episode, w.start}).second);

    const auto again = build_dataset(log, opt, "x");
    CHECK(encode_windows(again.train) == encode_windows(ds.train));
    opt.seed = 5;
    CHECK(encode_windows(build_dataset(log, opt, "x").train) != encode_windows(ds.train));
}

TEST_CASE("build_dataset rejects logs without safe windows") {
    auto log = synthetic_log(4, 2, 6, 1.0);
    DatasetOptions opt;
    opt.T = 4;
    CHECK_THROWS_AS(build_dataset(log, opt, "x"), Error);
    CHECK_THROWS_AS(build_dataset({}, opt, "x"), Error);
}

TEST_CASE("dataset file round trips bit-exactly") {
    const auto log = synthetic_log(5, 10, 40, 0.02);
    DatasetOptions opt;
    opt.T = 4;
    opt.horizon = 4;
    const auto ds = build_dataset(log, opt, "hazard_point_goal");
    const auto bytes = encode_windows(ds.train);
    CHECK(bytes.rfind("T=4 M=3 count=" + std::to_string(ds.train.windows.size()) + " env=hazard_point_goal\n", 0) == 0);
    CHECK(bytes.size() == bytes.find('\n') + 1 + ds.train.windows.size() * 4 * 3 * 4);
    const auto back = decode_windows(bytes);
    REQUIRE(back.windows.size() == ds.train.windows.size());
    for (std::size_t i = 0; i < back.windows.size(); ++i) CHECK(back.windows[i].states == ds.train.windows[i].states);
    CHECK(encode_windows(back) == bytes);

    const auto path = std::filesystem::temp_directory_path() / "anoseqs_test_seq" / "d.bin";
    write_windows(path, ds.train);
    CHECK(read_file(path) == bytes);

    CHECK_THROWS_AS(decode_windows("T=4 M=3 count=2 env=x\nabc"), Error);
    CHECK_THROWS_AS(decode_windows("T=4 M=3 env=x\n"), Error);
}

TEST_CASE("event windows contain an event and never span episodes") {
    const auto log = synthetic_log(6, 12, 30, 0.05);
    const auto ws = event_windows(log, 4);
    const auto eps = split_episodes(log);
    for (const auto& w : ws) {
        const auto& ep = *std::find_if(eps.begin(), eps.end(), [&](const Episode& e) { return e.id == w.episode; });
        CHECK(w.start + 4 <= static_cast<std::int64_t>(ep.states.size()));
        CHECK(std::any_of(ep.events.begin(), ep.events.end(), [&](auto j) { return j >= w.start && j < w.start + 4; }));
    }
}
