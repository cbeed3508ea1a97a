#include "anoseqs/agent/td3.hpp"

#include <algorithm>
#include <cmath>

namespace anoseqs::agent {

using netcore::Activation;
using netcore::LayerSpec;
using netcore::NetSpec;
using netcore::Network;

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw Error("replay buffer capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
    ++insertions_;
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= items_.size()) throw Error("replay buffer index out of range");
    return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
    if (items_.empty()) throw Error("cannot sample from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<std::size_t> idx(batch);
    for (auto& i : idx) i = pick(rng);
    return idx;
}

void AgentConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error("agent: gamma must lie in (0, 1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw Error("agent: tau must lie in (0, 1]");
    if (policy_delay < 1) throw Error("agent: policy_delay must be at least 1");
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw Error("agent: learning rates must be positive");
    if (target_noise_sigma < 0.0 || target_noise_clip < 0.0 || exploration_noise_sigma < 0.0)
        throw Error("agent: noise scales must be non-negative");
    if (batch_size == 0) throw Error("agent: batch_size must be positive");
    if (buffer_capacity == 0) throw Error("agent: buffer_capacity must be positive");
    if (hidden.empty()) throw Error("agent: at least one hidden layer is required");
    for (auto h : hidden)
        if (h == 0) throw Error("agent: hidden widths must be positive");
}

double critic_target(double reward, bool done_for_bootstrap, double q1_next, double q2_next, double gamma) {
    if (done_for_bootstrap) return reward;
    return reward + gamma * std::min(q1_next, q2_next);
}

std::vector<double> select_action(const Network& actor, const StateVec& state, double noise_sigma, Rng& rng) {
    const Matrix out = actor.infer(to_row(state));
    std::vector<double> a(static_cast<std::size_t>(out.cols()));
    std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        double v = out(0, static_cast<Eigen::Index>(i));
        if (noise_sigma > 0.0) v += noise(rng);
        a[i] = std::clamp(v, -1.0, 1.0);
    }
    return a;
}

namespace {

NetSpec mlp(std::size_t in, std::size_t out, const std::vector<std::size_t>& hidden, Activation last,
            std::uint64_t seed) {
    NetSpec spec;
    spec.seed = seed;
    std::size_t width = in;
    for (auto h : hidden) {
        spec.layers.push_back(LayerSpec::dense(width, h, Activation::relu));
        width = h;
    }
    spec.layers.push_back(LayerSpec::dense(width, out, last));
    return spec;
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

} // namespace

NetSpec actor_spec(std::size_t state_dim, std::size_t action_dim, const std::vector<std::size_t>& hidden,
                   std::uint64_t seed) {
    return mlp(state_dim, action_dim, hidden, Activation::tanh, seed);
}

NetSpec critic_spec(std::size_t state_dim, std::size_t action_dim, const std::vector<std::size_t>& hidden,
                    std::uint64_t seed) {
    return mlp(state_dim + action_dim, 1, hidden, Activation::none, seed);
}

Td3Agent::Td3Agent(std::size_t state_dim, std::size_t action_dim, AgentConfig config, std::uint64_t seed)
    : config_((config.validate(), std::move(config))),
      state_dim_(state_dim),
      action_dim_(action_dim),
      actor_(actor_spec(state_dim, action_dim, config_.hidden, derive_seed(seed, "actor"))),
      critic1_(critic_spec(state_dim, action_dim, config_.hidden, derive_seed(seed, "critic1"))),
      critic2_(critic_spec(state_dim, action_dim, config_.hidden, derive_seed(seed, "critic2"))),
      actor_target_(actor_),
      critic1_target_(critic1_),
      critic2_target_(critic2_),
      actor_opt_(netcore::make_adam_state(actor_.params(), config_.actor_lr)),
      critic1_opt_(netcore::make_adam_state(critic1_.params(), config_.critic_lr)),
      critic2_opt_(netcore::make_adam_state(critic2_.params(), config_.critic_lr)) {
    if (state_dim == 0 || action_dim == 0) throw Error("agent: state and action widths must be positive");
}

std::vector<double> Td3Agent::act(const StateVec& state) const {
    Rng unused(0);
    return select_action(actor_, state, 0.0, unused);
}

UpdateReport Td3Agent::update(const ReplayBuffer& buffer, std::uint64_t step_index, Rng& rng) {
    UpdateReport report;
    const std::size_t n = config_.batch_size;
    if (buffer.size() < n) {
        report.skipped = true;
        return report;
    }
    const auto idx = buffer.sample_indices(n, rng);
    const auto rows = static_cast<Eigen::Index>(n);
    Matrix s(rows, state_dim_), a(rows, action_dim_), s2(rows, state_dim_);
    std::vector<double> r(n);
    std::vector<bool> done(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Transition& t = buffer.at(idx[i]);
        if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ || t.action.size() != action_dim_)
            throw Error("agent: transition width does not match the agent");
        const auto k = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < state_dim_; ++j) {
            s(k, static_cast<Eigen::Index>(j)) = t.state[j];
            s2(k, static_cast<Eigen::Index>(j)) = t.next_state[j];
        }
        for (std::size_t j = 0; j < action_dim_; ++j) a(k, static_cast<Eigen::Index>(j)) = t.action[j];
        r[i] = t.reward_used;
        done[i] = t.done_for_bootstrap;
    }

    // Target policy smoothing.
    Matrix a2 = actor_target_.infer(s2);
    std::normal_distribution<double> noise(0.0, config_.target_noise_sigma > 0.0 ? config_.target_noise_sigma : 1.0);
    for (Eigen::Index i = 0; i < a2.rows(); ++i) {
        for (Eigen::Index j = 0; j < a2.cols(); ++j) {
            double eps = 0.0;
            if (config_.target_noise_sigma > 0.0)
                eps = std::clamp(noise(rng), -config_.target_noise_clip, config_.target_noise_clip);
            a2(i, j) = std::clamp(a2(i, j) + eps, -1.0, 1.0);
        }
    }
    const Matrix sa2 = concat_cols(s2, a2);
    const Matrix q1n = critic1_target_.infer(sa2);
    const Matrix q2n = critic2_target_.infer(sa2);
    Matrix y(rows, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        y(k, 0) = critic_target(r[i], done[i], q1n(k, 0), q2n(k, 0), config_.gamma);
    }

    const Matrix sa = concat_cols(s, a);
    const double inv_n = 1.0 / static_cast<double>(n);
    auto fit_critic = [&](Network& critic, netcore::AdamState& opt) {
        critic.zero_grad();
        const Matrix q = critic.forward(sa);
        const Matrix diff = q - y;
        const double loss = diff.squaredNorm() * inv_n;
        if (!std::isfinite(loss)) throw Error("agent: non-finite critic loss");
        critic.backward(diff * (2.0 * inv_n));
        netcore::adam_step(critic.params(), opt);
        return loss;
    };
    report.critic_loss = fit_critic(critic1_, critic1_opt_) + fit_critic(critic2_, critic2_opt_);

    if (step_index % static_cast<std::uint64_t>(config_.policy_delay) == 0) {
        actor_.zero_grad();
        const Matrix pi = actor_.forward(s);
        critic1_.zero_grad();
        const Matrix q = critic1_.forward(concat_cols(s, pi));
        report.actor_loss = -q.mean();
        if (!std::isfinite(report.actor_loss)) throw Error("agent: non-finite actor loss");
        const Matrix dq = Matrix::Constant(rows, 1, -inv_n);
        const Matrix dsa = critic1_.backward(dq);
        actor_.backward(dsa.rightCols(static_cast<Eigen::Index>(action_dim_)));
        critic1_.zero_grad();
        netcore::adam_step(actor_.params(), actor_opt_);

        netcore::polyak_update(actor_target_, actor_, config_.tau);
        netcore::polyak_update(critic1_target_, critic1_, config_.tau);
        netcore::polyak_update(critic2_target_, critic2_, config_.tau);
        ++actor_updates_;
        report.actor_updated = true;
    }
    return report;
}

netcore::Checkpoint Td3Agent::policy_checkpoint() const {
    auto ckpt = netcore::checkpoint_from(actor_);
    ckpt.header["kind"] = "policy";
    ckpt.header["state_dim"] = std::to_string(state_dim_);
    ckpt.header["action_dim"] = std::to_string(action_dim_);
    return ckpt;
}

} // namespace anoseqs::agent
