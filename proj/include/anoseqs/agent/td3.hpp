#pragma once

#include "anoseqs/common.hpp"
#include "anoseqs/netcore/checkpoint.hpp"
#include "anoseqs/netcore/network.hpp"
#include "anoseqs/netcore/optim.hpp"

#include <cstdint>
#include <vector>

namespace anoseqs::agent {

struct Transition {
    StateVec state;
    std::vector<double> action;
    double reward_used = 0.0;  // learning signal (shaped in the risk-averse phase)
    double reward_orig = 0.0;
    int cost = 0;
    StateVec next_state;
    bool done_for_bootstrap = false;  // terminal (failure or goal), never set by truncation
};

/// Fixed-capacity ring; the oldest transition is evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::uint64_t insertions() const { return insertions_; }

    /// i-th oldest stored transition.
    const Transition& at(std::size_t i) const;
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::vector<Transition> items_;
    std::size_t head_ = 0;  // slot of the oldest item once full
    std::uint64_t insertions_ = 0;
};

struct AgentConfig {
    double gamma = 0.99;
    double tau = 0.005;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    int policy_delay = 2;
    double target_noise_sigma = 0.2;
    double target_noise_clip = 0.5;
    double exploration_noise_sigma = 0.1;
    std::size_t batch_size = 128;
    std::size_t warmup_steps = 1000;
    std::size_t buffer_capacity = 100000;
    std::vector<std::size_t> hidden = {64, 64};

    void validate() const;
};

/// y = r + (done ? 0 : gamma * min(q1', q2'))
double critic_target(double reward, bool done_for_bootstrap, double q1_next, double q2_next, double gamma);

/// clamp(actor(state) + N(0, sigma), -1, 1). No random draws when sigma == 0.
std::vector<double> select_action(const netcore::Network& actor, const StateVec& state, double noise_sigma, Rng& rng);

struct UpdateReport {
    bool skipped = false;  // buffer smaller than the batch
    bool actor_updated = false;
    double critic_loss = 0.0;  // mean squared TD error, critic 1 + critic 2, before the step
    double actor_loss = 0.0;   // -mean Q1(s, pi(s)) before the step
};

netcore::NetSpec actor_spec(std::size_t state_dim, std::size_t action_dim, const std::vector<std::size_t>& hidden,
                            std::uint64_t seed);
netcore::NetSpec critic_spec(std::size_t state_dim, std::size_t action_dim, const std::vector<std::size_t>& hidden,
                             std::uint64_t seed);

/// Twin-critic deterministic actor-critic with delayed actor updates and
/// target policy smoothing.
class Td3Agent {
public:
    Td3Agent(std::size_t state_dim, std::size_t action_dim, AgentConfig config, std::uint64_t seed);

    /// Deterministic policy action, clamped to [-1, 1].
    std::vector<double> act(const StateVec& state) const;

    /// One TD3 update from a uniformly sampled batch. `step_index` counts
    /// update calls from 1; the actor and targets move only when
    /// step_index % policy_delay == 0.
    UpdateReport update(const ReplayBuffer& buffer, std::uint64_t step_index, Rng& rng);

    const AgentConfig& config() const { return config_; }
    std::uint64_t actor_updates() const { return actor_updates_; }

    netcore::Network& actor() { return actor_; }
    const netcore::Network& actor() const { return actor_; }
    netcore::Network& critic1() { return critic1_; }
    netcore::Network& critic2() { return critic2_; }
    const netcore::Network& actor_target() const { return actor_target_; }
    const netcore::Network& critic1_target() const { return critic1_target_; }
    const netcore::Network& critic2_target() const { return critic2_target_; }

    /// Actor parameters plus state_dim/action_dim header keys.
    netcore::Checkpoint policy_checkpoint() const;

private:
    AgentConfig config_;
    std::size_t state_dim_, action_dim_;
    netcore::Network actor_, critic1_, critic2_;
    netcore::Network actor_target_, critic1_target_, critic2_target_;
    netcore::AdamState actor_opt_, critic1_opt_, critic2_opt_;
    std::uint64_t actor_updates_ = 0;
};

} // namespace anoseqs::agent
