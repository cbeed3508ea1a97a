#include "anoseqs/agent/trainer.hpp"

#include <cmath>

namespace anoseqs::agent {

std::vector<metrics::EpisodeRecord> evaluate_policy(const netcore::Network& actor, const envs::EnvConfig& env_config,
                                                    int episodes, std::uint64_t seed) {
    if (episodes < 1) throw Error("evaluate: at least one episode is required");
    auto env = envs::make_env(env_config);
    Rng unused(0);
    std::vector<metrics::EpisodeRecord> out;
    for (int e = 0; e < episodes; ++e) {
        StateVec s = env->reset(derive_seed(seed, "eval", static_cast<std::uint64_t>(e)));
        metrics::EpisodeRecord rec;
        for (;;) {
            const auto a = select_action(actor, s, 0.0, unused);
            const auto res = env->step(a);
            rec.return_orig += res.reward;
            rec.cost_count += res.cost;
            ++rec.length;
            s = res.next_state;
            if (res.terminated || res.truncated) {
                rec.failure = res.failure;
                rec.success = res.terminated && !res.failure;
                break;
            }
        }
        out.push_back(rec);
    }
    return out;
}

TrainResult train(envs::Env& env, const envs::EnvConfig& eval_config, const AgentConfig& config,
                  const TrainOptions& options, const TrajectorySink& sink) {
    config.validate();
    if (options.total_steps < static_cast<std::int64_t>(config.warmup_steps))
        throw Error("train: total_steps must be at least warmup_steps");
    if (options.eval_interval < 1) throw Error("train: eval_interval must be positive");

    const auto spec = env.spec();
    Td3Agent agent(spec.state_dim, spec.action_dim, config, derive_seed(options.seed, "agent"));
    ReplayBuffer buffer(config.buffer_capacity);
    Rng rng(derive_seed(options.seed, "train"));
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);

    TrainResult result;
    std::int64_t episode = 0;
    StateVec state = env.reset(derive_seed(options.seed, "episode", 0));
    metrics::EpisodeRecord current;

    auto record_eval = [&](std::int64_t step) {
        result.final_eval = evaluate_policy(agent.actor(), eval_config, options.eval_episodes, options.seed);
        const auto summary = metrics::summarize(result.final_eval);
        result.curve.push_back({step, summary.episode_return.mean, summary.episode_cost_rate.mean,
                                metrics::total_cost_rate(result.total_costs, step)});
    };

    for (std::int64_t step = 1; step <= options.total_steps; ++step) {
        std::vector<double> action;
        if (step <= static_cast<std::int64_t>(config.warmup_steps)) {
            action.resize(spec.action_dim);
            for (auto& v : action) v = uniform(rng);
        } else {
            action = select_action(agent.actor(), state, config.exploration_noise_sigma, rng);
        }
        const auto res = env.step(action);
        if (!std::isfinite(res.reward_used)) throw Error("train: non-finite learning reward");

        if (sink) {
            sink(TrajectoryEntry{step, episode, state, action, res.reward, res.reward_used, res.cost, res.terminated,
                                 res.failure, res.truncated, res.next_state});
        }
        result.max_anomaly_score = std::max(result.max_anomaly_score, res.anomaly_score);
        result.total_costs += res.cost;
        current.return_orig += res.reward;
        current.cost_count += res.cost;
        ++current.length;

        buffer.push(Transition{state, action, res.reward_used, res.reward, res.cost, res.next_state, res.terminated});

        if (step > static_cast<std::int64_t>(config.warmup_steps)) {
            const auto rep = agent.update(buffer, ++result.updates, rng);
            if (!std::isfinite(rep.critic_loss) || !std::isfinite(rep.actor_loss))
                throw Error("train: non-finite loss at step " + std::to_string(step));
        }

        if (res.terminated || res.truncated) {
            current.failure = res.failure;
            current.success = res.terminated && !res.failure;
            result.train_episodes.push_back(current);
            current = {};
            ++episode;
            state = env.reset(derive_seed(options.seed, "episode", static_cast<std::uint64_t>(episode)));
        } else {
            state = res.next_state;
        }

        result.total_steps = step;
        if (step % options.eval_interval == 0 || step == options.total_steps) record_eval(step);
    }
    if (options.total_steps == 0) {
        result.final_eval = evaluate_policy(agent.actor(), eval_config, options.eval_episodes, options.seed);
    }
    result.actor_updates = agent.actor_updates();
    result.policy = agent.policy_checkpoint();
    return result;
}

} // namespace anoseqs::agent
