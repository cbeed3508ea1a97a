#pragma once

#include "anoseqs/common.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace anoseqs::envs {

enum class EnvId { corridor_run, hazard_point_goal };
enum class EnvRole { source, target };

std::string_view to_string(EnvId id);
std::string_view to_string(EnvRole role);
EnvId parse_env_id(std::string_view s);
EnvRole parse_env_role(std::string_view s);

struct EnvConfig {
    EnvId env_id = EnvId::hazard_point_goal;
    EnvRole role = EnvRole::target;
    std::uint64_t layout_seed = 0;
    int max_steps = 0;  // 0 selects the environment default (300 / 200)

    // shared point-mass dynamics
    double dt = 0.1;
    double damping = 0.9;
    double accel_gain = 0.5;
    double speed_clamp = 1.5;

    // corridor_run
    double v_limit = 1.0;

    // hazard_point_goal
    double arena_half_width = 5.0;
    double hazard_radius = 0.8;
    double goal_radius = 0.3;
    double goal_bonus = 10.0;
    double progress_gain = 2.0;
    double min_separation = 1.5;
};

struct StepResult {
    StateVec next_state;
    double reward = 0.0;       // original task reward
    double reward_used = 0.0;  // reward fed to learning; equals `reward` unless a wrapper shapes it
    double anomaly_score = 0.0;
    int cost = 0;
    bool terminated = false;
    bool failure = false;
    bool truncated = false;
};

struct EnvSpec {
    EnvId env_id;
    EnvRole role;
    std::size_t state_dim;
    std::size_t action_dim;
    double v_limit;      // corridor_run
    double goal_radius;  // hazard_point_goal
    int max_steps;
};

class Env {
public:
    virtual ~Env() = default;

    virtual StateVec reset(std::uint64_t episode_seed) = 0;
    /// Actions are clamped to [-1, 1]; stepping a finished episode throws.
    virtual StepResult step(std::span<const double> action) = 0;
    virtual EnvSpec spec() const = 0;
};

std::unique_ptr<Env> make_env(const EnvConfig& config);

/// Point-mass velocity update: clamp(damping * v + gain * a, -clamp, clamp).
double integrate_velocity(const EnvConfig& c, double v, double a);

/// Base with the episode bookkeeping shared by both environments.
class PointMassEnv : public Env {
public:
    explicit PointMassEnv(EnvConfig config);

    StepResult step(std::span<const double> action) final;
    EnvSpec spec() const override;
    const EnvConfig& config() const { return config_; }

protected:
    virtual StateVec observe() const = 0;
    virtual void advance(double ax, double ay, StepResult& out) = 0;
    virtual std::size_t state_dim() const = 0;
    void begin_episode();

    EnvConfig config_;
    double vx_ = 0.0, vy_ = 0.0;

private:
    int steps_ = 0;
    bool finished_ = true;
};

/// Avenue between two walls at |y| = 1. State [y, vx, vy, 1-|y|, vx - v_limit].
class CorridorRun final : public PointMassEnv {
public:
    explicit CorridorRun(EnvConfig config);
    StateVec reset(std::uint64_t episode_seed) override;

protected:
    StateVec observe() const override;
    void advance(double ax, double ay, StepResult& out) override;
    std::size_t state_dim() const override { return 5; }

private:
    double y_ = 0.0;
};

struct HazardLayout {
    std::array<double, 2> goal;
    std::array<std::array<double, 2>, 2> hazards;
};

/// Draws the layout of one episode from (layout_seed, role, episode_seed).
HazardLayout make_hazard_layout(const EnvConfig& config, std::uint64_t episode_seed);

/// Point navigation to a goal past two circular hazards.
/// State [x, y, vx, vy, gx-x, gy-y, c1, c2], c_i = clamp(dist_i - radius, -1, 5).
class HazardPointGoal final : public PointMassEnv {
public:
    explicit HazardPointGoal(EnvConfig config);
    StateVec reset(std::uint64_t episode_seed) override;

    const HazardLayout& layout() const { return layout_; }
    /// Unclamped signed clearance to hazard i from (x, y).
    double clearance(std::size_t i, double x, double y) const;
    std::array<double, 2> position() const { return {x_, y_}; }

protected:
    StateVec observe() const override;
    void advance(double ax, double ay, StepResult& out) override;
    std::size_t state_dim() const override { return 8; }

private:
    double goal_distance() const;

    HazardLayout layout_;
    double x_ = 0.0, y_ = 0.0;
};

} // namespace anoseqs::envs
