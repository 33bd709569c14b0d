#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cfbkit/config.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int truncation = 0;
    bool fail_fast = false;
    double tolerance_scale = 0.0;
};

int execute(cfbkit::ExperimentConfig cfg, const Flags& f, CLI::App& app) {
    if (app.count("--seed")) cfg.seed = f.seed;
    if (app.count("--truncation")) cfg.truncation = f.truncation;
    if (f.fail_fast) cfg.fail_fast = true;
    if (app.count("--tolerance-scale")) cfg.tolerance_scale = f.tolerance_scale;

    cfbkit::RunOptions opts;
    if (f.out.empty()) return cfbkit::run_experiment(cfg, std::cout, opts);

    opts.out_dir = f.out;
    opts.write_files = true;
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream(opts.out_dir / "resolved_config.json") << cfg.resolved().dump(2) << "\n";
    std::ofstream report(opts.out_dir / cfg.report);
    if (!report) {
        std::cerr << "cannot write report in " << f.out << "\n";
        return 2;
    }
    return cfbkit::run_experiment(cfg, report, opts);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfbtool: truncated Cowen-Douglas operator workbench"};
    Flags f;
    app.add_option("--config", f.config, "Experiment config (JSON)");
    app.add_option("--out", f.out, "Output directory for the report, CSV grids and matrices");
    app.add_option("--seed", f.seed, "RNG seed override");
    app.add_option("--truncation", f.truncation, "Default truncation N override")->check(CLI::PositiveNumber);
    app.add_flag("--fail-fast", f.fail_fast, "Stop at the first failing task");
    app.add_option("--tolerance-scale", f.tolerance_scale, "Multiplier on reported tolerance checks")
        ->check(CLI::PositiveNumber);

    std::map<std::string, std::string> inline_task;
    for (const auto& kind : cfbkit::task_kinds()) {
        auto* sub = app.add_subcommand(kind, "Run a single " + kind + " task");
        sub->add_option("--task", inline_task[kind], "Task parameters as inline JSON")->default_val("{}");
    }
    app.require_subcommand(0, 1);

    CLI11_PARSE(app, argc, argv);

    try {
        cfbkit::json doc = cfbkit::json::object();
        if (!f.config.empty()) {
            std::ifstream in(f.config);
            if (!in) throw cfbkit::Error(cfbkit::ErrorKind::InvalidParameter, "cannot open config " + f.config);
            doc = cfbkit::json::parse(in);
        }
        const auto subs = app.get_subcommands();
        if (!subs.empty()) {
            const std::string kind = subs.front()->get_name();
            auto task = cfbkit::json::parse(inline_task[kind]);
            task["kind"] = kind;
            doc["tasks"] = cfbkit::json::array({task});
        } else if (f.config.empty()) {
            std::cerr << app.help();
            return 2;
        }
        if (app.count("--truncation")) doc["truncation"] = f.truncation;
        return execute(cfbkit::parse_config(doc), f, app);
    } catch (const cfbkit::Error& e) {
        std::cerr << "error (" << cfbkit::to_string(e.kind()) << "): " << e.what() << "\n";
        return 2;
    } catch (const cfbkit::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
