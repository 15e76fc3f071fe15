#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uoro/harness.hpp"
#include "uoro/svgplot.hpp"
#include "uoro/version.hpp"

namespace {

using uoro::RunConfig;

struct ConfigFlags {
    std::string config_file;
    std::string task, cell, algorithm, optimizer, style;
    std::string name, group;
    std::size_t units = 0, plus = 0, db_s = 0, db_k = 0, db_a = 0, kmin = 0, kmax = 0;
    std::size_t state = 0, window = 0, rank = 0;
    double gamma = 0, alpha = 0, divergence_factor = 0;
    std::uint64_t seed_data = 0, seed_signs = 0, seed_init = 0;
    std::uint64_t horizon = 0, log_every = 0, trail_window = 0;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
    app->add_option("--config", f.config_file, "JSON run configuration file");
    app->add_option("--name", f.name, "run name");
    app->add_option("--group", f.group, "sweep aggregation group");
    app->add_option("--task", f.task, "influence_balancing | distant_brackets | anbn");
    app->add_option("--units", f.units, "influence balancing: number of units");
    app->add_option("--plus", f.plus, "influence balancing: count of +theta entries");
    app->add_option("--db-s", f.db_s, "distant brackets: bracketed length s");
    app->add_option("--db-k", f.db_k, "distant brackets: filler length k");
    app->add_option("--db-a", f.db_a, "distant brackets: alphabet size a");
    app->add_option("--kmin", f.kmin, "anbn: minimum run length");
    app->add_option("--kmax", f.kmax, "anbn: maximum run length");
    app->add_option("--cell", f.cell, "linear | tanh_rnn | gru | lstm");
    app->add_option("--state", f.state, "hidden units");
    app->add_option("--algorithm", f.algorithm,
                    "uoro | rtrl | tbptt | memory_uoro | rank_uoro");
    app->add_option("--window", f.window, "tbptt truncation / memory-T window");
    app->add_option("--rank", f.rank, "rank-k tracks");
    app->add_option("--style", f.style, "tbptt style: chunked | sliding");
    app->add_option("--optimizer", f.optimizer, "sgd | adam");
    app->add_option("--gamma", f.gamma, "learning rate scale gamma (eta for sgd form)");
    app->add_option("--alpha", f.alpha, "learning rate decay alpha");
    app->add_option("--seed-data", f.seed_data, "task stream seed");
    app->add_option("--seed-signs", f.seed_signs, "random sign seed");
    app->add_option("--seed-init", f.seed_init, "parameter init seed");
    app->add_option("--horizon", f.horizon, "total steps / characters");
    app->add_option("--log-every", f.log_every, "metric cadence");
    app->add_option("--trail-window", f.trail_window, "trailing average window");
    app->add_option("--divergence-factor", f.divergence_factor,
                    "divergence threshold as a multiple of the initial loss");
}

RunConfig build_config(const CLI::App* app, const ConfigFlags& f) {
    RunConfig cfg;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) throw std::runtime_error("cannot open config file: " + f.config_file);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = RunConfig::from_json(ss.str());
    }
    const auto set = [&](const char* flag) { return app->count(flag) > 0; };
    if (set("--name")) cfg.name = f.name;
    if (set("--group")) cfg.group = f.group;
    if (set("--task")) {
        nlohmann::json j = nlohmann::json::parse(cfg.to_json());
        j["task"]["kind"] = f.task;
        cfg = RunConfig::from_json(j.dump());
    }
    if (set("--units")) cfg.task.units = f.units;
    if (set("--plus")) cfg.task.plus = f.plus;
    if (set("--db-s")) cfg.task.db_s = f.db_s;
    if (set("--db-k")) cfg.task.db_k = f.db_k;
    if (set("--db-a")) cfg.task.db_a = f.db_a;
    if (set("--kmin")) cfg.task.anbn_min = f.kmin;
    if (set("--kmax")) cfg.task.anbn_max = f.kmax;
    if (set("--cell")) {
        nlohmann::json j = nlohmann::json::parse(cfg.to_json());
        j["model"]["cell"] = f.cell;
        cfg = RunConfig::from_json(j.dump());
    }
    if (set("--state")) cfg.model.state = f.state;
    if (set("--algorithm")) {
        nlohmann::json j = nlohmann::json::parse(cfg.to_json());
        j["algorithm"]["kind"] = f.algorithm;
        cfg = RunConfig::from_json(j.dump());
    }
    if (set("--window")) cfg.algorithm.window = f.window;
    if (set("--rank")) cfg.algorithm.rank = f.rank;
    if (set("--style"))
        cfg.algorithm.style =
            f.style == "sliding" ? uoro::TbpttStyle::sliding : uoro::TbpttStyle::chunked;
    if (set("--optimizer"))
        cfg.optimizer.kind = f.optimizer == "adam" ? uoro::OptimizerSpec::Kind::adam
                                                   : uoro::OptimizerSpec::Kind::sgd;
    if (set("--gamma")) cfg.optimizer.schedule.gamma = f.gamma;
    if (set("--alpha")) cfg.optimizer.schedule.alpha = f.alpha;
    if (set("--seed-data")) cfg.seed_data = f.seed_data;
    if (set("--seed-signs")) cfg.seed_signs = f.seed_signs;
    if (set("--seed-init")) cfg.seed_init = f.seed_init;
    if (set("--horizon")) cfg.horizon = f.horizon;
    if (set("--log-every")) cfg.log_every = f.log_every;
    if (set("--trail-window")) cfg.trail_window = f.trail_window;
    if (set("--divergence-factor")) cfg.divergence_factor = f.divergence_factor;
    return cfg;
}

struct CsvColumns {
    std::vector<double> step, inst, cum, trail;
};

CsvColumns read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvColumns out;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // step,inst_loss,cum_avg,trail_avg,lr,diverged
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
        if (vals.size() < 4) continue;
        out.step.push_back(vals[0]);
        out.inst.push_back(vals[1]);
        out.cum.push_back(vals[2]);
        out.trail.push_back(vals[3]);
    }
    return out;
}

int cmd_run(const CLI::App* app, const ConfigFlags& f, const std::string& out_path) {
    const RunConfig cfg = build_config(app, f);
    const uoro::RunResult result = uoro::run(cfg);
    if (out_path.empty()) {
        uoro::write_metrics_csv(cfg, result, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        uoro::write_metrics_csv(cfg, result, out);
    }
    if (result.diverged) {
        std::cerr << cfg.name << ": diverged at step " << result.diverge_step << "\n";
        return 2;
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::string& summary_path, std::size_t jobs) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open sweep config: " + config_path);
    const nlohmann::json j = nlohmann::json::parse(in);
    if (!j.is_array()) throw std::runtime_error("sweep config must be a JSON array of runs");
    std::vector<RunConfig> configs;
    for (const auto& item : j) configs.push_back(RunConfig::from_json(item.dump()));

    const auto entries = uoro::sweep(configs, jobs);

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (const auto& e : entries) {
            if (e.failed) continue;
            std::ofstream out(std::filesystem::path(out_dir) / (e.cfg.name + ".csv"));
            uoro::write_metrics_csv(e.cfg, e.result, out);
        }
    }
    if (summary_path.empty()) {
        uoro::write_sweep_summary(entries, std::cout);
    } else {
        std::ofstream out(summary_path);
        if (!out) throw std::runtime_error("cannot open summary file: " + summary_path);
        uoro::write_sweep_summary(entries, out);
    }
    for (const auto& e : entries)
        if (e.failed) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online recurrent training harness (UORO / RTRL / truncated BPTT)"};
    app.require_subcommand(1);
    app.set_version_flag("--version", uoro::kVersion);

    // run
    auto* run_cmd = app.add_subcommand("run", "execute one training run, write metrics CSV");
    ConfigFlags run_flags;
    std::string run_out;
    add_config_flags(run_cmd, run_flags);
    run_cmd->add_option("--out", run_out, "metrics CSV path (default: stdout)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run a batch of configs, write a summary");
    std::string sweep_config, sweep_dir, sweep_summary;
    std::size_t sweep_jobs = 0;
    sweep_cmd->add_option("--config", sweep_config, "JSON array of run configs")->required();
    sweep_cmd->add_option("--out-dir", sweep_dir, "directory for per-run metric CSVs");
    sweep_cmd->add_option("--summary", sweep_summary, "summary CSV path (default: stdout)");
    sweep_cmd->add_option("--jobs", sweep_jobs, "parallel runs (default: hardware)");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "render metric CSVs to an SVG line chart");
    std::vector<std::string> plot_csvs;
    std::string plot_out = "plot.svg", plot_col = "cum_avg", plot_title;
    bool log_x = false, log_y = false;
    plot_cmd->add_option("--csv", plot_csvs, "metrics CSV (repeatable)")->required();
    plot_cmd->add_option("--out", plot_out, "output SVG path");
    plot_cmd->add_option("--col", plot_col, "inst_loss | cum_avg | trail_avg");
    plot_cmd->add_option("--title", plot_title, "chart title");
    plot_cmd->add_flag("--logx", log_x, "logarithmic x axis");
    plot_cmd->add_flag("--logy", log_y, "logarithmic y axis");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "dump raw task text");
    ConfigFlags gen_flags;
    std::string gen_out;
    std::uint64_t gen_chars = 400;
    add_config_flags(gen_cmd, gen_flags);
    gen_cmd->add_option("--chars", gen_chars, "characters to emit");
    gen_cmd->add_option("--out", gen_out, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_cmd, run_flags, run_out);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_config, sweep_dir, sweep_summary, sweep_jobs);
        if (plot_cmd->parsed()) {
            std::vector<uoro::PlotSeries> series;
            for (const std::string& path : plot_csvs) {
                const CsvColumns cols = read_metrics_csv(path);
                uoro::PlotSeries s;
                s.label = std::filesystem::path(path).stem().string();
                s.x = cols.step;
                s.y = plot_col == "inst_loss" ? cols.inst
                      : plot_col == "trail_avg" ? cols.trail
                                                : cols.cum;
                series.push_back(std::move(s));
            }
            uoro::PlotOptions opt;
            opt.title = plot_title.empty() ? plot_col : plot_title;
            opt.y_label = plot_col;
            opt.log_x = log_x;
            opt.log_y = log_y;
            std::ofstream out(plot_out);
            if (!out) throw std::runtime_error("cannot open output file: " + plot_out);
            uoro::write_svg_plot(series, opt, out);
            return 0;
        }
        if (gen_cmd->parsed()) {
            const RunConfig cfg = build_config(gen_cmd, gen_flags);
            auto stream = uoro::make_char_stream(cfg.task, cfg.seed_data);
            if (gen_out.empty()) {
                uoro::dump_stream(*stream, gen_chars, std::cout);
            } else {
                std::ofstream out(gen_out);
                if (!out) throw std::runtime_error("cannot open output file: " + gen_out);
                uoro::dump_stream(*stream, gen_chars, out);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
