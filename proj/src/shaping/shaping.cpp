#include "anoseqs/shaping/shaping.hpp"

#include <cmath>

namespace anoseqs::shaping {

void ShapingConfig::validate() const {
    if (!std::isfinite(theta)) throw Error("shaping: theta must be finite");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error("shaping: beta must be finite and non-negative");
}

double shape_reward(double reward_orig, double eta, double theta, double beta) {
    if (eta <= theta) return reward_orig;
    return reward_orig - beta * eta;
}

ShapedEnv::ShapedEnv(std::unique_ptr<envs::Env> inner, std::unique_ptr<detector::Scorer> scorer, ShapingConfig config)
    : inner_(std::move(inner)), scorer_(std::move(scorer)), config_(config) {
    if (!inner_ || !scorer_) throw Error("ShapedEnv: environment and scorer are required");
    config_.validate();
    if (inner_->spec().state_dim != scorer_->width())
        throw Error("ShapedEnv: scorer width " + std::to_string(scorer_->width()) +
                    " does not match environment state width " + std::to_string(inner_->spec().state_dim));
}

StateVec ShapedEnv::reset(std::uint64_t episode_seed) {
    scorer_->reset();
    return inner_->reset(episode_seed);
}

envs::StepResult ShapedEnv::step(std::span<const double> action) {
    auto out = inner_->step(action);
    const double eta = scorer_->feed(out.next_state).value_or(0.0);
    out.anomaly_score = eta;
    out.reward_used = shape_reward(out.reward, eta, config_.theta, config_.beta);
    if (eta > config_.theta) ++penalized_;
    return out;
}

CostShapedEnv::CostShapedEnv(std::unique_ptr<envs::Env> inner, double beta) : inner_(std::move(inner)), beta_(beta) {
    if (!inner_) throw Error("CostShapedEnv: environment is required");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error("CostShapedEnv: beta must be finite and non-negative");
}

envs::StepResult CostShapedEnv::step(std::span<const double> action) {
    auto out = inner_->step(action);
    out.reward_used = out.reward - beta_ * static_cast<double>(out.cost);
    return out;
}

} // namespace anoseqs::shaping
