#pragma once

#include "anoseqs/agent/td3.hpp"
#include "anoseqs/agent/trajectory.hpp"
#include "anoseqs/envs/env.hpp"
#include "anoseqs/metrics/metrics.hpp"

#include <cstdint>
#include <vector>

namespace anoseqs::agent {

struct TrainOptions {
    std::int64_t total_steps = 30000;
    std::int64_t eval_interval = 1000;
    int eval_episodes = 5;
    std::uint64_t seed = 0;
};

struct TrainResult {
    netcore::Checkpoint policy;
    std::vector<metrics::CurvePoint> curve;
    std::vector<metrics::EpisodeRecord> final_eval;  // evaluation at the last curve point
    std::vector<metrics::EpisodeRecord> train_episodes;
    std::int64_t total_steps = 0;
    std::int64_t total_costs = 0;
    std::uint64_t updates = 0;
    std::uint64_t actor_updates = 0;
    double max_anomaly_score = 0.0;
};

/// Deterministic-policy episodes on a fresh, unshaped copy of the environment.
/// Episode i uses seed derive_seed(seed, "eval", i); returns use the original reward.
std::vector<metrics::EpisodeRecord> evaluate_policy(const netcore::Network& actor, const envs::EnvConfig& env_config,
                                                    int episodes, std::uint64_t seed);

/// Standard off-policy loop: uniform random actions for the warm-up steps,
/// then the noisy policy with one update per step. The agent learns from
/// StepResult::reward_used, so a shaping wrapper around `env` changes only
/// the learning signal. Evaluation runs every eval_interval steps and at the end.
TrainResult train(envs::Env& env, const envs::EnvConfig& eval_config, const AgentConfig& config,
                  const TrainOptions& options, const TrajectorySink& sink = {});

} // namespace anoseqs::agent
