#include "anoseqs/agent/trajectory.hpp"

#include <json.hpp>

namespace anoseqs::agent {

using nlohmann::ordered_json;

std::string to_json_line(const TrajectoryEntry& e) {
    ordered_json j;
    j["step"] = e.step;
    j["episode"] = e.episode;
    j["state"] = e.state;
    j["action"] = e.action;
    j["reward_orig"] = e.reward_orig;
    j["reward_used"] = e.reward_used;
    j["cost"] = e.cost;
    j["terminated"] = e.terminated;
    j["failure"] = e.failure;
    j["truncated"] = e.truncated;
    j["next_state"] = e.next_state;
    return j.dump();
}

TrajectoryEntry parse_json_line(const std::string& line) {
    try {
        const auto j = ordered_json::parse(line);
        TrajectoryEntry e;
        e.step = j.at("step").get<std::int64_t>();
        e.episode = j.at("episode").get<std::int64_t>();
        e.state = j.at("state").get<StateVec>();
        e.action = j.at("action").get<std::vector<double>>();
        e.reward_orig = j.at("reward_orig").get<double>();
        e.reward_used = j.at("reward_used").get<double>();
        e.cost = j.at("cost").get<int>();
        e.terminated = j.at("terminated").get<bool>();
        e.failure = j.at("failure").get<bool>();
        e.truncated = j.at("truncated").get<bool>();
        e.next_state = j.at("next_state").get<StateVec>();
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("trajectory log: ") + ex.what());
    }
}

std::vector<TrajectoryEntry> read_trajectory_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trajectory log " + path.string());
    std::vector<TrajectoryEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(parse_json_line(line));
    }
    return out;
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::trunc);
    if (!out_) throw Error("cannot write trajectory log " + path.string());
}

void TrajectoryWriter::operator()(const TrajectoryEntry& e) {
    out_ << to_json_line(e) << '\n';
}

} // namespace anoseqs::agent
