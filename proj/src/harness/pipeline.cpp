#include "anoseqs/harness/pipeline.hpp"

#include "anoseqs/agent/trainer.hpp"
#include "anoseqs/harness/plot.hpp"
#include "anoseqs/netcore/checkpoint.hpp"
#include "anoseqs/shaping/shaping.hpp"

#include <sstream>

namespace anoseqs::harness {

namespace fs = std::filesystem;

std::string_view to_string(Algo a) {
    switch (a) {
        case Algo::anoseqs: return "anoseqs";
        case Algo::td3_baseline: return "td3_baseline";
        case Algo::cost_shaping_baseline: return "cost_shaping_baseline";
    }
    return "?";
}

Algo parse_algo(std::string_view s) {
    if (s == "anoseqs") return Algo::anoseqs;
    if (s == "td3_baseline") return Algo::td3_baseline;
    if (s == "cost_shaping_baseline") return Algo::cost_shaping_baseline;
    throw Error("unknown algorithm '" + std::string(s) + "' (anoseqs, td3_baseline, cost_shaping_baseline)");
}

std::string display_name(Algo a) {
    switch (a) {
        case Algo::anoseqs: return "AnoSeqs";
        case Algo::td3_baseline: return "TD3";
        case Algo::cost_shaping_baseline: return "Cost Shaping";
    }
    return "?";
}

std::string manifest_to_text(const Manifest& m) {
    std::string out = "stage=" + m.stage + "\nrun_id=" + m.run_id + "\nconfig_hash=" + m.config_hash + "\noutputs=";
    for (std::size_t i = 0; i < m.outputs.size(); ++i) out += (i ? "," : "") + m.outputs[i];
    out += "\n";
    for (const auto& [k, v] : m.info) out += "info." + k + "=" + v + "\n";
    return out;
}

Manifest manifest_from_text(const std::string& text) {
    Manifest m;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("manifest: malformed line '" + line + "'");
        const auto key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "stage") m.stage = val;
        else if (key == "run_id") m.run_id = val;
        else if (key == "config_hash") m.config_hash = val;
        else if (key == "outputs") {
            std::stringstream list(val);
            std::string item;
            while (std::getline(list, item, ','))
                if (!item.empty()) m.outputs.push_back(item);
        } else if (key.rfind("info.", 0) == 0) m.info[key.substr(5)] = val;
        else throw Error("manifest: unknown key '" + key + "'");
    }
    if (m.stage.empty() || m.config_hash.empty()) throw Error("manifest: missing stage or config_hash");
    return m;
}

namespace {

std::string hash_text(const std::string& text) { return to_hex(fnv1a(text)); }

constexpr const char* kManifest = "manifest.txt";

} // namespace

Pipeline::Pipeline(RunConfig config, PipelineOptions options)
    : config_(std::move(config)), options_(options), run_dir_(config_.run_dir()) {
    config_.validate();
}

void Pipeline::say(const std::string& line) const {
    if (options_.log) *options_.log << line << std::endl;
}

bool Pipeline::stage_complete(const fs::path& dir, const std::string& stage, const std::string& hash) const {
    const auto path = dir / kManifest;
    if (!fs::exists(path)) return false;
    const auto m = manifest_from_text(read_file(path));
    if (m.config_hash != hash) {
        if (options_.force) return false;
        throw Error("stage " + stage + " in " + dir.string() + " was produced with config hash " + m.config_hash +
                    " but the current config hashes to " + hash + "; rerun with --force to overwrite");
    }
    for (const auto& out : m.outputs)
        if (!fs::exists(dir / out)) return false;
    return true;
}

void Pipeline::write_manifest(const fs::path& dir, const std::string& stage, const std::string& hash,
                              const std::vector<std::string>& outputs,
                              const std::map<std::string, std::string>& info) const {
    write_file(dir / kManifest, manifest_to_text(Manifest{stage, config_.get("run_id"), hash, outputs, info}));
}

std::string Pipeline::collect_hash() const {
    return hash_text("collect\n" + config_.canonical({"source.", "collect.", "agent.", "eval."}));
}

std::string Pipeline::dataset_hash() const {
    return hash_text("dataset\n" + collect_hash() + "\n" + config_.canonical({"sequences."}));
}

std::string Pipeline::detector_hash() const {
    return hash_text("detector\n" + dataset_hash() + "\n" + config_.canonical({"detector.", "calibration."}));
}

RunConfig Pipeline::variant_config(const PolicyVariant& v) const {
    RunConfig c = config_;
    for (const auto& [k, val] : v.overrides) c.set(k, val);
    return c;
}

std::string Pipeline::policy_hash(Algo algo, std::uint64_t seed, const PolicyVariant& v) const {
    const RunConfig c = variant_config(v);
    std::string text = "policy\n" + std::string(to_string(algo)) + "\nseed=" + std::to_string(seed) + "\n" +
                       c.canonical({"target.", "agent.", "policy.", "eval."});
    if (algo == Algo::anoseqs) text += detector_hash() + "\n" + c.canonical({"shaping."});
    if (algo == Algo::cost_shaping_baseline) text += "cost_beta=" + format_double(c.cost_shaping_beta()) + "\n";
    return hash_text(text);
}

fs::path Pipeline::policy_dir(Algo algo, std::uint64_t seed, const PolicyVariant& v) const {
    fs::path base = v.label.empty() ? run_dir_ / "policy" : run_dir_ / "sweep" / v.label;
    return base / std::string(to_string(algo)) / ("seed_" + std::to_string(seed));
}

StageOutcome Pipeline::collect() {
    const auto dir = source_dir();
    const auto hash = collect_hash();
    if (stage_complete(dir, "collect", hash)) {
        say("collect: up to date (" + hash + ")");
        return {dir, hash, true};
    }
    say("collect: training the source agent for " + config_.get("collect.steps") + " steps");
    const auto env_cfg = config_.source_env();
    auto env = envs::make_env(env_cfg);
    agent::TrainOptions opt{config_.get_int("collect.steps"), config_.get_int("eval.interval"),
                            static_cast<int>(config_.get_int("eval.episodes")), config_.get_uint("collect.seed")};
    agent::TrainResult res;
    {
        agent::TrajectoryWriter writer(dir / "trajectory.jsonl");
        res = agent::train(*env, env_cfg, config_.collect_agent_config(), opt,
                           [&](const agent::TrajectoryEntry& e) { writer(e); });
    }
    metrics::write_curve_csv(dir / "metrics.csv", res.curve);
    res.policy.header["run_id"] = config_.get("run_id");
    res.policy.header["config_hash"] = hash;
    netcore::write_checkpoint(dir / "policy.ckpt", res.policy);
    write_manifest(dir, "collect", hash, {"trajectory.jsonl", "metrics.csv", "policy.ckpt"},
                   {{"steps", std::to_string(res.total_steps)}, {"costs", std::to_string(res.total_costs)}});
    say("collect: " + std::to_string(res.total_costs) + " cost signals in " + std::to_string(res.total_steps) + " steps");
    return {dir, hash, false};
}

StageOutcome Pipeline::build_dataset() {
    const auto dir = dataset_dir();
    const auto hash = dataset_hash();
    if (stage_complete(dir, "build-dataset", hash)) {
        say("build-dataset: up to date (" + hash + ")");
        return {dir, hash, true};
    }
    const auto log_path = source_dir() / "trajectory.jsonl";
    if (!fs::exists(log_path)) throw Error("build-dataset: missing " + log_path.string() + "; run collect first");
    const auto log = agent::read_trajectory_log(log_path);
    const auto ds = sequences::build_dataset(log, config_.dataset_options(), config_.get("source.env"),
                                             config_.get("run_id"));
    sequences::write_windows(dir / "dataset.train.bin", ds.train);
    sequences::write_windows(dir / "dataset.holdout.bin", ds.holdout);
    write_manifest(dir, "build-dataset", hash, {"dataset.train.bin", "dataset.holdout.bin"},
                   {{"candidates", std::to_string(ds.total_windows)},
                    {"train", std::to_string(ds.train.windows.size())},
                    {"holdout", std::to_string(ds.holdout.windows.size())},
                    {"source_run", ds.source_run}});
    say("build-dataset: " + std::to_string(ds.train.windows.size()) + " train / " +
        std::to_string(ds.holdout.windows.size()) + " holdout safe windows of " + std::to_string(ds.total_windows));
    return {dir, hash, false};
}

StageOutcome Pipeline::train_detector() {
    const auto dir = detector_dir();
    const auto hash = detector_hash();
    if (stage_complete(dir, "train-detector", hash)) {
        say("train-detector: up to date (" + hash + ")");
        return {dir, hash, true};
    }
    const auto train_path = dataset_dir() / "dataset.train.bin";
    const auto holdout_path = dataset_dir() / "dataset.holdout.bin";
    if (!fs::exists(train_path)) throw Error("train-detector: missing " + train_path.string() + "; run build-dataset first");
    const auto train = sequences::read_windows(train_path);
    const auto holdout = sequences::read_windows(holdout_path);
    const auto dcfg = config_.detector_config();
    detector::TrainingReport report;
    say("train-detector: " + std::to_string(dcfg.epochs) + " epochs");
    const auto model = detector::train_detector(train, dcfg, &report);
    const auto scores = detector::score_windows(model, holdout.windows);
    auto cal = detector::calibrate_threshold(scores, config_.calibration_method(),
                                             config_.get_double("calibration.parameter"));
    cal.score_mode = model.score_mode();

    auto ckpt = model.to_checkpoint();
    ckpt.header["run_id"] = config_.get("run_id");
    ckpt.header["config_hash"] = hash;
    netcore::write_checkpoint(dir / "detector.ckpt", ckpt);
    detector::write_calibration(dir / "calibration.txt", cal);
    std::string rep = "windows_used=" + std::to_string(report.windows_used) + "\n";
    for (std::size_t e = 0; e < report.epoch_mae.size(); ++e)
        rep += "epoch_" + std::to_string(e + 1) + "_mae=" + format_double(report.epoch_mae[e]) + "\n";
    write_file(dir / "training_report.txt", rep);
    write_manifest(dir, "train-detector", hash, {"detector.ckpt", "calibration.txt", "training_report.txt"},
                   {{"theta", format_double(cal.theta)}});
    say("train-detector: theta=" + format_double(cal.theta) + " (holdout mean " + format_double(cal.mean) + ", std " +
        format_double(cal.std) + ", max " + format_double(cal.max) + ", n=" + std::to_string(cal.count) + ")");
    return {dir, hash, false};
}

StageOutcome Pipeline::train_policy(Algo algo, std::uint64_t seed, const PolicyVariant& v) {
    const auto dir = policy_dir(algo, seed, v);
    const auto hash = policy_hash(algo, seed, v);
    const std::string name = "train-policy[" + std::string(to_string(algo)) + ", seed " + std::to_string(seed) +
                             (v.label.empty() ? "" : ", " + v.label) + "]";
    if (stage_complete(dir, "train-policy", hash)) {
        say(name + ": up to date (" + hash + ")");
        return {dir, hash, true};
    }
    const RunConfig c = variant_config(v);
    const auto env_cfg = c.target_env();
    std::unique_ptr<envs::Env> env = envs::make_env(env_cfg);
    std::map<std::string, std::string> info;
    if (algo == Algo::anoseqs) {
        const auto ckpt_path = detector_dir() / "detector.ckpt";
        if (!fs::exists(ckpt_path) || !fs::exists(detector_dir() / "calibration.txt"))
            throw Error("train-policy anoseqs: no trained detector in " + detector_dir().string() +
                        "; run train-detector first");
        auto model = std::make_shared<const detector::DetectorModel>(
            detector::DetectorModel::from_checkpoint(netcore::read_checkpoint(ckpt_path)));
        const auto cal = detector::read_calibration(detector_dir() / "calibration.txt");
        shaping::ShapingConfig sc{c.theta_override().value_or(cal.theta), c.shaping_beta(), model->score_mode()};
        info["theta"] = format_double(sc.theta);
        info["beta"] = format_double(sc.beta);
        env = std::make_unique<shaping::ShapedEnv>(std::move(env), std::make_unique<detector::StreamingScorer>(model), sc);
    } else if (algo == Algo::cost_shaping_baseline) {
        info["beta"] = format_double(c.cost_shaping_beta());
        env = std::make_unique<shaping::CostShapedEnv>(std::move(env), c.cost_shaping_beta());
    }
    say(name + ": training for " + c.get("policy.steps") + " steps");
    agent::TrainOptions opt{c.get_int("policy.steps"), c.get_int("eval.interval"),
                            static_cast<int>(c.get_int("eval.episodes")), seed};
    agent::TrainResult res;
    {
        agent::TrajectoryWriter writer(dir / "trajectory.jsonl");
        res = agent::train(*env, env_cfg, c.agent_config(), opt, [&](const agent::TrajectoryEntry& e) { writer(e); });
    }
    metrics::write_curve_csv(dir / "metrics.csv", res.curve);
    res.policy.header["run_id"] = config_.get("run_id");
    res.policy.header["config_hash"] = hash;
    res.policy.header["algo"] = std::string(to_string(algo));
    netcore::write_checkpoint(dir / "policy.ckpt", res.policy);
    info["total_costs"] = std::to_string(res.total_costs);
    info["max_anomaly_score"] = format_double(res.max_anomaly_score);
    write_manifest(dir, "train-policy", hash, {"trajectory.jsonl", "metrics.csv", "policy.ckpt"}, info);
    const auto& last = res.curve.back();
    say(name + ": return " + format_double(last.episodic_return_mean) + ", episodic cost rate " +
        format_double(last.episodic_cost_rate_mean) + ", total cost rate " + format_double(last.total_cost_rate));
    return {dir, hash, false};
}

EvaluationResult Pipeline::evaluate(Algo algo, std::uint64_t seed, int episodes, const PolicyVariant& v) {
    const auto path = policy_dir(algo, seed, v) / "policy.ckpt";
    if (!fs::exists(path)) throw Error("evaluate: missing " + path.string() + "; run train-policy first");
    const auto actor = netcore::network_from_checkpoint(netcore::read_checkpoint(path));
    EvaluationResult out;
    out.episodes = agent::evaluate_policy(actor, variant_config(v).target_env(), episodes, derive_seed(seed, "test"));
    out.summary = metrics::summarize(out.episodes);
    return out;
}

std::string Pipeline::summary_report(std::uint64_t seed, int episodes) {
    const auto td3 = evaluate(Algo::td3_baseline, seed, episodes);
    const auto ano = evaluate(Algo::anoseqs, seed, episodes);
    const auto table = metrics::render_summary_table(config_.get("target.env"),
                                                     {{display_name(Algo::td3_baseline), td3.summary},
                                                      {display_name(Algo::anoseqs), ano.summary}});
    write_file(run_dir_ / "report.txt", table);
    return table;
}

PolicyVariant Pipeline::sweep_variant(const std::string& param, const std::string& value) {
    if (param == "beta") return {"beta_" + value, {{"shaping.beta", value}}};
    if (param == "theta") return {"theta_" + value, {{"shaping.theta", value}}};
    throw Error("sweep: parameter must be beta or theta, got '" + param + "'");
}

std::vector<PolicyVariant> Pipeline::sweep(const std::string& param, const std::vector<std::string>& values,
                                           const std::vector<std::uint64_t>& seeds) {
    if (values.empty()) throw Error("sweep: no values");
    if (seeds.empty()) throw Error("sweep: no seeds");
    std::vector<PolicyVariant> variants;
    for (const auto& value : values) variants.push_back(sweep_variant(param, value));
    for (const auto& v : variants) variant_config(v).validate();
    collect();
    build_dataset();
    train_detector();
    std::vector<std::pair<std::string, std::vector<metrics::CurvePoint>>> curves;
    for (const auto& v : variants) {
        for (auto seed : seeds) train_policy(Algo::anoseqs, seed, v);
        curves.emplace_back(param + "=" + v.overrides.begin()->second, average_curve(Algo::anoseqs, seeds, v));
    }
    plot_curves(curves, run_dir_ / "sweep" / ("plots_" + param));
    return variants;
}

std::vector<metrics::CurvePoint> Pipeline::average_curve(Algo algo, const std::vector<std::uint64_t>& seeds,
                                                         const PolicyVariant& v) const {
    std::vector<std::vector<metrics::CurvePoint>> curves;
    for (auto seed : seeds) curves.push_back(metrics::read_curve_csv(policy_dir(algo, seed, v) / "metrics.csv"));
    return metrics::average_curves(curves);
}

void Pipeline::run_all() {
    write_file(run_dir_ / "config.txt", config_.to_text());
    collect();
    build_dataset();
    train_detector();
    const auto seeds = config_.seeds();
    const Algo algos[] = {Algo::td3_baseline, Algo::anoseqs, Algo::cost_shaping_baseline};
    for (auto seed : seeds)
        for (auto algo : algos) train_policy(algo, seed);
    std::vector<std::pair<std::string, std::vector<metrics::CurvePoint>>> curves;
    for (auto algo : algos) curves.emplace_back(display_name(algo), average_curve(algo, seeds));
    plot_curves(curves, run_dir_ / "plots");
    const auto table = summary_report(seeds.front(), static_cast<int>(config_.get_int("evaluate.episodes")));
    say(table);
}

} // namespace anoseqs::harness
