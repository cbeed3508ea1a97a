#include "anoseqs/envs/env.hpp"

#include <algorithm>
#include <cmath>

namespace anoseqs::envs {

std::string_view to_string(EnvId id) {
    return id == EnvId::corridor_run ? "corridor_run" : "hazard_point_goal";
}

std::string_view to_string(EnvRole role) {
    return role == EnvRole::source ? "source" : "target";
}

EnvId parse_env_id(std::string_view s) {
    if (s == "corridor_run") return EnvId::corridor_run;
    if (s == "hazard_point_goal") return EnvId::hazard_point_goal;
    throw Error("unknown environment '" + std::string(s) + "'");
}

EnvRole parse_env_role(std::string_view s) {
    if (s == "source") return EnvRole::source;
    if (s == "target") return EnvRole::target;
    throw Error("unknown environment role '" + std::string(s) + "'");
}

std::unique_ptr<Env> make_env(const EnvConfig& config) {
    switch (config.env_id) {
    case EnvId::corridor_run: return std::make_unique<CorridorRun>(config);
    case EnvId::hazard_point_goal: return std::make_unique<HazardPointGoal>(config);
    }
    throw Error("make_env: unknown environment");
}

double integrate_velocity(const EnvConfig& c, double v, double a) {
    return std::clamp(c.damping * v + c.accel_gain * a, -c.speed_clamp, c.speed_clamp);
}

// ---------------------------------------------------------------------------

PointMassEnv::PointMassEnv(EnvConfig config) : config_(std::move(config)) {
    if (config_.max_steps < 0) throw Error("env: max_steps must be positive");
}

void PointMassEnv::begin_episode() {
    steps_ = 0;
    finished_ = false;
    vx_ = 0.0;
    vy_ = 0.0;
}

StepResult PointMassEnv::step(std::span<const double> action) {
    if (finished_) throw Error(std::string(to_string(config_.env_id)) + ": step called on a finished episode");
    if (action.size() != 2)
        throw Error(std::string(to_string(config_.env_id)) + ": expected 2 action components, got " +
                    std::to_string(action.size()));
    const double ax = std::clamp(action[0], -1.0, 1.0);
    const double ay = std::clamp(action[1], -1.0, 1.0);

    StepResult out;
    advance(ax, ay, out);
    ++steps_;
    out.next_state = observe();
    out.reward_used = out.reward;
    out.truncated = !out.terminated && steps_ >= spec().max_steps;
    finished_ = out.terminated || out.truncated;
    return out;
}

EnvSpec PointMassEnv::spec() const {
    const int default_steps = config_.env_id == EnvId::corridor_run ? 300 : 200;
    return EnvSpec{config_.env_id,    config_.role,       state_dim(), 2, config_.v_limit,
                   config_.goal_radius, config_.max_steps > 0 ? config_.max_steps : default_steps};
}

// ---------------------------------------------------------------------------

CorridorRun::CorridorRun(EnvConfig config) : PointMassEnv(std::move(config)) {
    config_.env_id = EnvId::corridor_run;
}

StateVec CorridorRun::reset(std::uint64_t) {
    begin_episode();
    y_ = 0.0;
    return observe();
}

StateVec CorridorRun::observe() const {
    return {y_, vx_, vy_, 1.0 - std::abs(y_), vx_ - config_.v_limit};
}

void CorridorRun::advance(double ax, double ay, StepResult& out) {
    vx_ = integrate_velocity(config_, vx_, ax);
    vy_ = integrate_velocity(config_, vy_, ay);
    y_ += config_.dt * vy_;
    out.reward = config_.dt * vx_;
    out.cost = vx_ > config_.v_limit ? 1 : 0;
    out.failure = std::abs(y_) > 1.0;
    out.terminated = out.failure;
}

// ---------------------------------------------------------------------------

namespace {

double dist(std::array<double, 2> a, std::array<double, 2> b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

} // namespace

HazardLayout make_hazard_layout(const EnvConfig& c, std::uint64_t episode_seed) {
    // West-to-east family: the goal sits on the east side, one hazard blocks
    // the middle of the arena and a second one flanks it, so the direct route
    // from the western start zone frequently crosses a hazard.
    const auto tag = c.role == EnvRole::source ? "layout/source" : "layout/target";
    Rng rng(derive_seed(derive_seed(c.layout_seed, tag), "layout/episode", episode_seed));
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    for (int attempt = 0; attempt < 1000; ++attempt) {
        HazardLayout l{};
        l.goal = {u(3.0, 4.0), u(-1.5, 1.5)};
        l.hazards[0] = {u(-0.75, 0.75), u(-0.75, 0.75)};
        const double side = u(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
        l.hazards[1] = {l.hazards[0][0] + u(-0.5, 1.0), l.hazards[0][1] + side * u(1.7, 2.2)};
        if (dist(l.goal, l.hazards[0]) >= c.min_separation && dist(l.goal, l.hazards[1]) >= c.min_separation &&
            dist(l.hazards[0], l.hazards[1]) >= c.min_separation)
            return l;
    }
    throw Error("hazard_point_goal: could not place layout");
}

HazardPointGoal::HazardPointGoal(EnvConfig config) : PointMassEnv(std::move(config)) {
    config_.env_id = EnvId::hazard_point_goal;
    layout_ = make_hazard_layout(config_, 0);
}

StateVec HazardPointGoal::reset(std::uint64_t episode_seed) {
    begin_episode();
    layout_ = make_hazard_layout(config_, episode_seed);
    Rng rng(derive_seed(config_.layout_seed, "episode", episode_seed));
    std::uniform_real_distribution<double> ux(-4.0, -3.0), uy(-1.5, 1.5);
    for (int attempt = 0;; ++attempt) {
        x_ = ux(rng);
        y_ = uy(rng);
        const bool clear = dist({x_, y_}, layout_.goal) >= config_.min_separation &&
                           dist({x_, y_}, layout_.hazards[0]) >= config_.min_separation &&
                           dist({x_, y_}, layout_.hazards[1]) >= config_.min_separation;
        if (clear) break;
        if (attempt > 1000) throw Error("hazard_point_goal: could not place start");
    }
    return observe();
}

double HazardPointGoal::clearance(std::size_t i, double x, double y) const {
    return dist({x, y}, layout_.hazards[i]) - config_.hazard_radius;
}

double HazardPointGoal::goal_distance() const {
    return dist({x_, y_}, layout_.goal);
}

StateVec HazardPointGoal::observe() const {
    auto c = [&](std::size_t i) { return std::clamp(clearance(i, x_, y_), -1.0, 5.0); };
    return {x_, y_, vx_, vy_, layout_.goal[0] - x_, layout_.goal[1] - y_, c(0), c(1)};
}

void HazardPointGoal::advance(double ax, double ay, StepResult& out) {
    const double before = goal_distance();
    vx_ = integrate_velocity(config_, vx_, ax);
    vy_ = integrate_velocity(config_, vy_, ay);
    const double w = config_.arena_half_width;
    x_ = std::clamp(x_ + config_.dt * vx_, -w, w);
    y_ = std::clamp(y_ + config_.dt * vy_, -w, w);
    const double after = goal_distance();
    out.reward = config_.progress_gain * (before - after);
    out.cost = (clearance(0, x_, y_) < 0.0 || clearance(1, x_, y_) < 0.0) ? 1 : 0;
    if (after <= config_.goal_radius) {
        out.reward += config_.goal_bonus;
        out.terminated = true;
    }
}

} // namespace anoseqs::envs
