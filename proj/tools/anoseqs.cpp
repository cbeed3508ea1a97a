// Command-line front end for the two-phase pipeline.
#include "anoseqs/harness/pipeline.hpp"
#include "anoseqs/harness/plot.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace anoseqs;
using namespace anoseqs::harness;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

void print_summary(const std::string& label, const metrics::MetricsSummary& s) {
    std::cout << label << " over " << s.count << " episodes\n"
              << "  episode return     " << metrics::format_mean_std(s.episode_return) << "\n"
              << "  episode cost       " << metrics::format_mean_std(s.episode_cost) << "\n"
              << "  episode cost rate  " << metrics::format_mean_std(s.episode_cost_rate, 4) << "\n"
              << "  episode length     " << metrics::format_mean_std(s.episode_length) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anomaly-guided risk-averse reinforcement learning pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool force = false, quiet = false;
    app.add_option("-c,--config", config_path, "run config file (key = value lines)")->check(CLI::ExistingFile);
    app.add_option("-s,--set", overrides, "override a config key, e.g. --set shaping.beta=10");
    app.add_flag("--force", force, "rerun stages whose recorded config hash differs");
    app.add_flag("-q,--quiet", quiet, "suppress progress lines");

    auto* collect = app.add_subcommand("collect", "train the source agent and log its trajectories");
    auto* dataset = app.add_subcommand("build-dataset", "extract safe windows from the source log");
    auto* detect = app.add_subcommand("train-detector", "train the autoencoder and calibrate the threshold");

    auto* policy = app.add_subcommand("train-policy", "train a policy on the target environment");
    std::string algo = "anoseqs";
    std::vector<std::uint64_t> seeds;
    policy->add_option("--algo", algo, "anoseqs, td3_baseline or cost_shaping_baseline")
        ->check(CLI::IsMember({"anoseqs", "td3_baseline", "cost_shaping_baseline"}));
    policy->add_option("--seed", seeds, "seeds to train (default: the config seeds)");

    auto* eval = app.add_subcommand("evaluate", "run deterministic evaluation episodes of trained policies");
    int episodes = 0;
    bool report = false;
    std::uint64_t eval_seed = 0;
    eval->add_option("--algo", algo, "policy to evaluate")
        ->check(CLI::IsMember({"anoseqs", "td3_baseline", "cost_shaping_baseline"}));
    eval->add_option("--seed", eval_seed, "training seed of the policy (default: first config seed)");
    eval->add_option("--episodes", episodes, "episodes (default: evaluate.episodes)");
    eval->add_flag("--report", report, "print the TD3 vs AnoSeqs summary table");

    auto* sweep = app.add_subcommand("sweep", "train anoseqs over a grid of beta or theta values");
    std::string param;
    std::string values;
    sweep->add_option("--param", param, "beta or theta")->required()->check(CLI::IsMember({"beta", "theta"}));
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--seed", seeds, "seeds (default: the config seeds)");

    auto* plot = app.add_subcommand("plot", "draw learning curves as SVG");
    std::vector<std::string> series;
    std::string plot_out;
    plot->add_option("--series", series, "LABEL=a.csv[,b.csv...]; CSVs of one series are averaged")->required();
    plot->add_option("--out", plot_out, "output directory")->required();

    auto* all = app.add_subcommand("run-all", "every stage, all algorithms and seeds, report and plots");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plot->parsed()) {
            std::vector<std::pair<std::string, std::vector<metrics::CurvePoint>>> curves;
            for (const auto& spec : series) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos) throw Error("--series expects LABEL=path[,path...]");
                std::vector<std::vector<metrics::CurvePoint>> parts;
                for (const auto& p : split(spec.substr(eq + 1), ',')) {
                    auto c = metrics::read_curve_csv(p);
                    if (c.empty()) throw Error("plot: " + p + " has no data rows");
                    parts.push_back(std::move(c));
                }
                if (parts.empty()) throw Error("plot: series " + spec + " lists no files");
                curves.emplace_back(spec.substr(0, eq), metrics::average_curves(parts));
            }
            for (const auto& p : plot_curves(curves, plot_out)) std::cout << p.string() << "\n";
            return 0;
        }

        RunConfig config = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
        for (const auto& o : overrides) config.apply_override(o);
        Pipeline pipeline(config, {force, quiet ? nullptr : &std::cerr});
        const auto run_seeds = seeds.empty() ? pipeline.config().seeds() : seeds;

        if (collect->parsed()) pipeline.collect();
        if (dataset->parsed()) pipeline.build_dataset();
        if (detect->parsed()) pipeline.train_detector();
        if (policy->parsed())
            for (auto s : run_seeds) pipeline.train_policy(parse_algo(algo), s);
        if (eval->parsed()) {
            const int n = episodes > 0 ? episodes : static_cast<int>(pipeline.config().get_int("evaluate.episodes"));
            const auto s = eval->count("--seed") ? eval_seed : pipeline.config().seeds().front();
            if (report) {
                std::cout << pipeline.summary_report(s, n);
            } else {
                const auto a = parse_algo(algo);
                print_summary(display_name(a) + " (seed " + std::to_string(s) + ")", pipeline.evaluate(a, s, n).summary);
            }
        }
        if (sweep->parsed()) {
            const auto vs = split(values, ',');
            for (const auto& v : pipeline.sweep(param, vs, run_seeds)) {
                const auto curve = pipeline.average_curve(Algo::anoseqs, run_seeds, v);
                const auto& last = curve.back();
                std::cout << v.label << "\treturn " << format_double(last.episodic_return_mean) << "\tepisodic cost rate "
                          << format_double(last.episodic_cost_rate_mean) << "\ttotal cost rate "
                          << format_double(last.total_cost_rate) << "\n";
            }
        }
        if (all->parsed()) pipeline.run_all();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
