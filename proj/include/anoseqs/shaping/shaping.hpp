#pragma once

#include "anoseqs/detector/detector.hpp"
#include "anoseqs/envs/env.hpp"

#include <memory>

namespace anoseqs::shaping {

struct ShapingConfig {
    double theta = 0.0;
    double beta = 100.0;
    detector::ScoreMode score_mode = detector::ScoreMode::mae;

    void validate() const;
};

/// r_orig when eta <= theta, otherwise r_orig - beta * eta.
double shape_reward(double reward_orig, double eta, double theta, double beta);

/// Feeds every next_state to the scorer and shapes reward_used. The scorer
/// is reset on every episode reset; before a full window eta is 0.
class ShapedEnv final : public envs::Env {
public:
    ShapedEnv(std::unique_ptr<envs::Env> inner, std::unique_ptr<detector::Scorer> scorer, ShapingConfig config);

    StateVec reset(std::uint64_t episode_seed) override;
    envs::StepResult step(std::span<const double> action) override;
    envs::EnvSpec spec() const override { return inner_->spec(); }

    const ShapingConfig& config() const { return config_; }
    std::uint64_t penalized_steps() const { return penalized_; }

private:
    std::unique_ptr<envs::Env> inner_;
    std::unique_ptr<detector::Scorer> scorer_;
    ShapingConfig config_;
    std::uint64_t penalized_ = 0;
};

/// Reward-shaping baseline on the native cost signal: r_orig - beta * cost.
class CostShapedEnv final : public envs::Env {
public:
    CostShapedEnv(std::unique_ptr<envs::Env> inner, double beta);

    StateVec reset(std::uint64_t episode_seed) override { return inner_->reset(episode_seed); }
    envs::StepResult step(std::span<const double> action) override;
    envs::EnvSpec spec() const override { return inner_->spec(); }

private:
    std::unique_ptr<envs::Env> inner_;
    double beta_;
};

} // namespace anoseqs::shaping
