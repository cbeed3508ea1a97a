#include "anoseqs/harness/config.hpp"

#include <cstdlib>
#include <sstream>

namespace anoseqs::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

const std::map<std::string, std::string>& RunConfig::defaults() {
    static const std::map<std::string, std::string> d{
        {"run_id", "default"},
        {"out_dir", "runs"},
        {"seeds", "1,2,3,4,5"},

        {"source.env", "hazard_point_goal"},
        {"source.layout_seed", "0"},
        {"source.max_steps", "0"},
        {"target.env", "hazard_point_goal"},
        {"target.layout_seed", "0"},
        {"target.max_steps", "0"},

        {"collect.steps", "30000"},
        {"collect.warmup_steps", "5000"},
        {"collect.seed", "0"},

        {"agent.gamma", "0.99"},
        {"agent.tau", "0.005"},
        {"agent.actor_lr", "0.001"},
        {"agent.critic_lr", "0.001"},
        {"agent.policy_delay", "2"},
        {"agent.target_noise_sigma", "0.2"},
        {"agent.target_noise_clip", "0.5"},
        {"agent.exploration_noise_sigma", "0.1"},
        {"agent.batch_size", "128"},
        {"agent.warmup_steps", "1000"},
        {"agent.buffer_capacity", "100000"},
        {"agent.hidden", "64,64"},

        {"policy.steps", "30000"},
        {"eval.interval", "1000"},
        {"eval.episodes", "5"},
        {"evaluate.episodes", "100"},

        {"sequences.T", "16"},
        {"sequences.stride", "1"},
        {"sequences.horizon", "16"},
        {"sequences.holdout_fraction", "0.2"},
        {"sequences.seed", "0"},

        {"detector.d_model", "32"},
        {"detector.heads", "2"},
        {"detector.blocks", "2"},
        {"detector.ff_width", "64"},
        {"detector.learning_rate", "0.001"},
        {"detector.batch_size", "64"},
        {"detector.epochs", "50"},
        {"detector.max_train_windows", "4000"},
        {"detector.std_floor", "0.001"},
        {"detector.score_mode", "mae"},
        {"detector.seed", "0"},

        {"calibration.method", "percentile"},
        {"calibration.parameter", "95"},

        {"shaping.theta", "calibrated"},
        {"shaping.beta", "100"},
        {"cost_shaping.beta", "shared"},
    };
    return d;
}

RunConfig::RunConfig() : values_(defaults()) {}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) { return parse(read_file(path)); }

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!defaults().count(key)) throw Error("unknown config key '" + key + "'");
    values_[key] = value;
}

void RunConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw Error("override '" + assignment + "' must look like key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error("unknown config key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key) const {
    const auto& v = get(key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::logic_error&) {
        throw Error("config key " + key + ": expected a number, got '" + v + "'");
    }
}

std::int64_t RunConfig::get_int(const std::string& key) const {
    const auto& v = get(key);
    try {
        std::size_t used = 0;
        const auto n = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::logic_error&) {
        throw Error("config key " + key + ": expected an integer, got '" + v + "'");
    }
}

std::uint64_t RunConfig::get_uint(const std::string& key) const {
    const auto n = get_int(key);
    if (n < 0) throw Error("config key " + key + " must be non-negative");
    return static_cast<std::uint64_t>(n);
}

std::vector<std::uint64_t> RunConfig::get_uint_list(const std::string& key) const {
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(get(key))) {
        try {
            std::size_t used = 0;
            const auto n = std::stoull(item, &used);
            if (used != item.size() || item.front() == '-') throw std::invalid_argument(item);
            out.push_back(n);
        } catch (const std::logic_error&) {
            throw Error("config key " + key + ": bad list entry '" + item + "'");
        }
    }
    return out;
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

std::string RunConfig::canonical(const std::vector<std::string>& prefixes) const {
    std::string out;
    for (const auto& [k, v] : values_) {
        for (const auto& p : prefixes) {
            if (k.rfind(p, 0) == 0) {
                out += k + "=" + v + "\n";
                break;
            }
        }
    }
    return out;
}

namespace {

envs::EnvConfig env_from(const RunConfig& c, const std::string& prefix, envs::EnvRole role) {
    envs::EnvConfig e;
    e.env_id = envs::parse_env_id(c.get(prefix + ".env"));
    e.role = role;
    e.layout_seed = c.get_uint(prefix + ".layout_seed");
    e.max_steps = static_cast<int>(c.get_int(prefix + ".max_steps"));
    if (e.max_steps < 0) throw Error(prefix + ".max_steps must be non-negative");
    return e;
}

} // namespace

envs::EnvConfig RunConfig::source_env() const { return env_from(*this, "source", envs::EnvRole::source); }
envs::EnvConfig RunConfig::target_env() const { return env_from(*this, "target", envs::EnvRole::target); }

agent::AgentConfig RunConfig::agent_config() const {
    agent::AgentConfig a;
    a.gamma = get_double("agent.gamma");
    a.tau = get_double("agent.tau");
    a.actor_lr = get_double("agent.actor_lr");
    a.critic_lr = get_double("agent.critic_lr");
    a.policy_delay = static_cast<int>(get_int("agent.policy_delay"));
    a.target_noise_sigma = get_double("agent.target_noise_sigma");
    a.target_noise_clip = get_double("agent.target_noise_clip");
    a.exploration_noise_sigma = get_double("agent.exploration_noise_sigma");
    a.batch_size = get_uint("agent.batch_size");
    a.warmup_steps = get_uint("agent.warmup_steps");
    a.buffer_capacity = get_uint("agent.buffer_capacity");
    a.hidden.clear();
    for (auto h : get_uint_list("agent.hidden")) a.hidden.push_back(h);
    a.validate();
    return a;
}

agent::AgentConfig RunConfig::collect_agent_config() const {
    auto a = agent_config();
    a.warmup_steps = get_uint("collect.warmup_steps");
    return a;
}

sequences::DatasetOptions RunConfig::dataset_options() const {
    sequences::DatasetOptions d;
    d.T = get_uint("sequences.T");
    d.stride = get_uint("sequences.stride");
    d.horizon = get_uint("sequences.horizon");
    d.holdout_fraction = get_double("sequences.holdout_fraction");
    d.seed = get_uint("sequences.seed");
    return d;
}

detector::DetectorConfig RunConfig::detector_config() const {
    detector::DetectorConfig d;
    d.d_model = get_uint("detector.d_model");
    d.heads = get_uint("detector.heads");
    d.blocks = get_uint("detector.blocks");
    d.ff_width = get_uint("detector.ff_width");
    d.learning_rate = get_double("detector.learning_rate");
    d.batch_size = get_uint("detector.batch_size");
    d.epochs = get_uint("detector.epochs");
    d.max_train_windows = get_uint("detector.max_train_windows");
    d.std_floor = get_double("detector.std_floor");
    d.score_mode = detector::parse_score_mode(get("detector.score_mode"));
    d.seed = get_uint("detector.seed");
    d.validate();
    return d;
}

detector::CalibrationMethod RunConfig::calibration_method() const {
    return detector::parse_calibration_method(get("calibration.method"));
}

std::optional<double> RunConfig::theta_override() const {
    if (get("shaping.theta") == "calibrated") return std::nullopt;
    return get_double("shaping.theta");
}

double RunConfig::shaping_beta() const {
    const double b = get_double("shaping.beta");
    if (!(b >= 0.0)) throw Error("shaping.beta must be non-negative");
    return b;
}

double RunConfig::cost_shaping_beta() const {
    if (get("cost_shaping.beta") == "shared") return shaping_beta();
    const double b = get_double("cost_shaping.beta");
    if (!(b >= 0.0)) throw Error("cost_shaping.beta must be non-negative");
    return b;
}

std::vector<std::uint64_t> RunConfig::seeds() const {
    auto s = get_uint_list("seeds");
    if (s.empty()) throw Error("config key seeds must list at least one seed");
    return s;
}

std::filesystem::path RunConfig::run_dir() const {
    std::filesystem::path root = get("out_dir");
    if (const char* env = std::getenv("ANOSEQS_OUT"); env && *env) root = env;
    return root / get("run_id");
}

void RunConfig::validate() const {
    source_env();
    target_env();
    agent_config();
    collect_agent_config();
    detector_config();
    calibration_method();
    theta_override();
    shaping_beta();
    cost_shaping_beta();
    seeds();
    const auto d = dataset_options();
    if (d.T < 2 || d.stride < 1) throw Error("sequences.T must be >= 2 and sequences.stride >= 1");
    if (get_int("collect.steps") < 1 || get_int("policy.steps") < 1) throw Error("step counts must be positive");
    if (get_int("eval.interval") < 1 || get_int("eval.episodes") < 1 || get_int("evaluate.episodes") < 1)
        throw Error("evaluation interval and episode counts must be positive");
    const auto id = get("run_id");
    if (id.empty() || id.find('/') != std::string::npos) throw Error("run_id must be a non-empty name without '/'");
}

} // namespace anoseqs::harness
