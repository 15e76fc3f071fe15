#include "uoro/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "uoro/models/gru.hpp"
#include "uoro/models/influence_balancing.hpp"
#include "uoro/models/lstm.hpp"
#include "uoro/models/tanh_rnn.hpp"
#include "uoro/version.hpp"

namespace uoro {

namespace {

constexpr double kLog2 = 0.6931471805599453;

const char* task_kind_name(TaskSpec::Kind k) {
    switch (k) {
        case TaskSpec::Kind::influence_balancing: return "influence_balancing";
        case TaskSpec::Kind::distant_brackets: return "distant_brackets";
        case TaskSpec::Kind::anbn: return "anbn";
    }
    return "?";
}

TaskSpec::Kind task_kind_from(const std::string& s) {
    if (s == "influence_balancing") return TaskSpec::Kind::influence_balancing;
    if (s == "distant_brackets") return TaskSpec::Kind::distant_brackets;
    if (s == "anbn") return TaskSpec::Kind::anbn;
    throw std::invalid_argument("unknown task kind: " + s);
}

const char* cell_name(ModelSpec::Cell c) {
    switch (c) {
        case ModelSpec::Cell::linear: return "linear";
        case ModelSpec::Cell::tanh_rnn: return "tanh_rnn";
        case ModelSpec::Cell::gru: return "gru";
        case ModelSpec::Cell::lstm: return "lstm";
    }
    return "?";
}

ModelSpec::Cell cell_from(const std::string& s) {
    if (s == "linear") return ModelSpec::Cell::linear;
    if (s == "tanh_rnn") return ModelSpec::Cell::tanh_rnn;
    if (s == "gru") return ModelSpec::Cell::gru;
    if (s == "lstm") return ModelSpec::Cell::lstm;
    throw std::invalid_argument("unknown cell: " + s);
}

const char* algo_name(AlgorithmSpec::Kind k) {
    switch (k) {
        case AlgorithmSpec::Kind::uoro: return "uoro";
        case AlgorithmSpec::Kind::rtrl: return "rtrl";
        case AlgorithmSpec::Kind::tbptt: return "tbptt";
        case AlgorithmSpec::Kind::memory_uoro: return "memory_uoro";
        case AlgorithmSpec::Kind::rank_uoro: return "rank_uoro";
    }
    return "?";
}

AlgorithmSpec::Kind algo_from(const std::string& s) {
    if (s == "uoro") return AlgorithmSpec::Kind::uoro;
    if (s == "rtrl") return AlgorithmSpec::Kind::rtrl;
    if (s == "tbptt") return AlgorithmSpec::Kind::tbptt;
    if (s == "memory_uoro") return AlgorithmSpec::Kind::memory_uoro;
    if (s == "rank_uoro") return AlgorithmSpec::Kind::rank_uoro;
    throw std::invalid_argument("unknown algorithm: " + s);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string AlgorithmSpec::label() const {
    switch (kind) {
        case Kind::uoro: return "uoro";
        case Kind::rtrl: return "rtrl";
        case Kind::tbptt: return "tbptt(" + std::to_string(window) + ")";
        case Kind::memory_uoro: return "memory_uoro(" + std::to_string(window) + ")";
        case Kind::rank_uoro: return "rank_uoro(" + std::to_string(rank) + ")";
    }
    return "?";
}

std::string RunConfig::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["group"] = group;
    nlohmann::json t;
    t["kind"] = task_kind_name(task.kind);
    switch (task.kind) {
        case TaskSpec::Kind::influence_balancing:
            t["units"] = task.units;
            t["plus"] = task.plus;
            break;
        case TaskSpec::Kind::distant_brackets:
            t["s"] = task.db_s;
            t["k"] = task.db_k;
            t["a"] = task.db_a;
            break;
        case TaskSpec::Kind::anbn:
            t["kmin"] = task.anbn_min;
            t["kmax"] = task.anbn_max;
            break;
    }
    j["task"] = t;
    j["model"] = {{"cell", cell_name(model.cell)}, {"state", model.state}};
    j["algorithm"] = {{"kind", algo_name(algorithm.kind)},
                      {"window", algorithm.window},
                      {"rank", algorithm.rank},
                      {"style", algorithm.style == TbpttStyle::chunked ? "chunked" : "sliding"}};
    j["optimizer"] = {{"kind", optimizer.kind == OptimizerSpec::Kind::sgd ? "sgd" : "adam"},
                      {"gamma", optimizer.schedule.gamma},
                      {"alpha", optimizer.schedule.alpha}};
    j["seed_data"] = seed_data;
    j["seed_signs"] = seed_signs;
    j["seed_init"] = seed_init;
    j["horizon"] = horizon;
    j["log_every"] = log_every;
    j["trail_window"] = trail_window;
    j["divergence_factor"] = divergence_factor;
    return j.dump();
}

RunConfig RunConfig::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunConfig cfg;
    cfg.name = j.value("name", cfg.name);
    cfg.group = j.value("group", cfg.group);
    if (j.contains("task")) {
        const auto& t = j.at("task");
        cfg.task.kind = task_kind_from(t.at("kind").get<std::string>());
        cfg.task.units = t.value("units", cfg.task.units);
        cfg.task.plus = t.value("plus", cfg.task.plus);
        cfg.task.db_s = t.value("s", cfg.task.db_s);
        cfg.task.db_k = t.value("k", cfg.task.db_k);
        cfg.task.db_a = t.value("a", cfg.task.db_a);
        cfg.task.anbn_min = t.value("kmin", cfg.task.anbn_min);
        cfg.task.anbn_max = t.value("kmax", cfg.task.anbn_max);
    }
    if (j.contains("model")) {
        cfg.model.cell = cell_from(j.at("model").value("cell", std::string("linear")));
        cfg.model.state = j.at("model").value("state", cfg.model.state);
    }
    if (j.contains("algorithm")) {
        const auto& a = j.at("algorithm");
        cfg.algorithm.kind = algo_from(a.at("kind").get<std::string>());
        cfg.algorithm.window = a.value("window", cfg.algorithm.window);
        cfg.algorithm.rank = a.value("rank", cfg.algorithm.rank);
        cfg.algorithm.style = a.value("style", std::string("chunked")) == "sliding"
                                  ? TbpttStyle::sliding
                                  : TbpttStyle::chunked;
    }
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        cfg.optimizer.kind = o.value("kind", std::string("sgd")) == "adam"
                                 ? OptimizerSpec::Kind::adam
                                 : OptimizerSpec::Kind::sgd;
        cfg.optimizer.schedule.gamma = o.value("gamma", cfg.optimizer.schedule.gamma);
        cfg.optimizer.schedule.alpha = o.value("alpha", cfg.optimizer.schedule.alpha);
    }
    cfg.seed_data = j.value("seed_data", cfg.seed_data);
    cfg.seed_signs = j.value("seed_signs", cfg.seed_signs);
    cfg.seed_init = j.value("seed_init", cfg.seed_init);
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.log_every = j.value("log_every", cfg.log_every);
    cfg.trail_window = j.value("trail_window", cfg.trail_window);
    cfg.divergence_factor = j.value("divergence_factor", cfg.divergence_factor);
    return cfg;
}

std::unique_ptr<CharStream> make_char_stream(const TaskSpec& task, std::uint64_t seed) {
    switch (task.kind) {
        case TaskSpec::Kind::distant_brackets:
            return std::make_unique<DistantBracketsStream>(task.db_s, task.db_k, task.db_a, seed);
        case TaskSpec::Kind::anbn:
            return std::make_unique<AnbnStream>(task.anbn_min, task.anbn_max, seed);
        case TaskSpec::Kind::influence_balancing:
            break;
    }
    throw std::invalid_argument("task has no character stream");
}

std::unique_ptr<RecurrentModel> make_model(const RunConfig& cfg) {
    if (cfg.task.kind == TaskSpec::Kind::influence_balancing) {
        if (cfg.model.cell != ModelSpec::Cell::linear)
            throw std::invalid_argument("influence balancing requires the linear cell");
        return std::make_unique<InfluenceBalancingModel>(cfg.task.units, cfg.task.plus);
    }
    const std::size_t alphabet = make_char_stream(cfg.task, 0)->alphabet().size();
    switch (cfg.model.cell) {
        case ModelSpec::Cell::tanh_rnn:
            return std::make_unique<TanhRnnModel>(cfg.model.state, alphabet, alphabet);
        case ModelSpec::Cell::gru:
            return std::make_unique<GruModel>(cfg.model.state, alphabet, alphabet);
        case ModelSpec::Cell::lstm:
            return std::make_unique<LstmModel>(cfg.model.state, alphabet, alphabet);
        case ModelSpec::Cell::linear:
            throw std::invalid_argument("text tasks require a recurrent cell");
    }
    throw std::invalid_argument("bad cell");
}

std::unique_ptr<Loss> make_loss(const RunConfig& cfg) {
    if (cfg.task.kind == TaskSpec::Kind::influence_balancing)
        return std::make_unique<UnitTargetLoss>(0);
    return std::make_unique<CrossEntropyLoss>();
}

std::unique_ptr<GradientEstimator> make_estimator(const RunConfig& cfg,
                                                  const RecurrentModel& model) {
    const SignRng rng(cfg.seed_signs);
    switch (cfg.algorithm.kind) {
        case AlgorithmSpec::Kind::uoro:
            return std::make_unique<UoroEstimator>(model, rng);
        case AlgorithmSpec::Kind::rtrl:
            return std::make_unique<RtrlEstimator>(model);
        case AlgorithmSpec::Kind::tbptt:
            return std::make_unique<TbpttEstimator>(model, cfg.algorithm.window,
                                                    cfg.algorithm.style);
        case AlgorithmSpec::Kind::memory_uoro:
            return std::make_unique<MemoryUoroEstimator>(model, cfg.algorithm.window, rng);
        case AlgorithmSpec::Kind::rank_uoro:
            return std::make_unique<RankUoroEstimator>(model, cfg.algorithm.rank, rng);
    }
    throw std::invalid_argument("bad algorithm");
}

RunResult run(const RunConfig& cfg) {
    if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (cfg.log_every < 1) throw std::invalid_argument("log_every must be >= 1");
    if (cfg.trail_window < 1) throw std::invalid_argument("trail_window must be >= 1");

    const auto model = make_model(cfg);
    const auto loss = make_loss(cfg);
    auto estimator = make_estimator(cfg, *model);

    SignRng init_rng(cfg.seed_init);
    ParameterVector theta = model->init_params(init_rng);

    std::unique_ptr<Optimizer> optimizer;
    if (cfg.optimizer.kind == OptimizerSpec::Kind::adam)
        optimizer = std::make_unique<AdamOptimizer>(theta.dim());
    else
        optimizer = std::make_unique<SgdOptimizer>();

    const bool text = cfg.task.is_text();
    const double unit = text ? 1.0 / kLog2 : 1.0;

    std::unique_ptr<PredictionStream> stream;
    if (text) stream = std::make_unique<PredictionStream>(make_char_stream(cfg.task, cfg.seed_data));

    Vec state(model->state_dim(), 0.0);
    Vec x;
    Target target = Vec{1.0};

    KahanSum cum;
    const std::size_t window = std::size_t(cfg.trail_window);
    Vec ring(window, 0.0);
    std::size_t ring_fill = 0, ring_pos = 0;
    double trail_sum = 0.0;

    RunResult out;
    StepResult res;
    double initial_loss = 0.0;

    const auto trail_avg_exact = [&]() {
        KahanSum k;
        const std::size_t n = std::min<std::size_t>(ring_fill, window);
        for (std::size_t i = 0; i < n; ++i) k.add(ring[i]);
        return n ? k.value() / double(n) : 0.0;
    };

    for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        if (text) target = stream->next(x);

        estimator->step(*model, *loss, x, target, state, theta, res);
        const double inst = res.loss * unit;
        const double lr = cfg.optimizer.schedule.at(t - 1);

        cum.add(inst);
        if (ring_fill < window) {
            ring[ring_pos] = inst;
            trail_sum += inst;
            ++ring_fill;
        } else {
            trail_sum += inst - ring[ring_pos];
            ring[ring_pos] = inst;
        }
        ring_pos = ring_pos + 1 == window ? 0 : ring_pos + 1;

        if (t == 1) initial_loss = inst;
        const bool diverged =
            res.diverged || !std::isfinite(inst) || inst > cfg.divergence_factor * initial_loss;

        if (!diverged && res.grad_ready) optimizer->update(theta, res.grad, lr);

        if (diverged || t % cfg.log_every == 0 || t == cfg.horizon) {
            const std::size_t n = std::min<std::size_t>(ring_fill, window);
            out.rows.push_back({t, inst, cum.value() / double(t), trail_sum / double(n), lr,
                                diverged});
        }
        out.steps = t;
        if (diverged) {
            out.diverged = true;
            out.diverge_step = t;
            break;
        }
    }

    out.final_cum_avg = cum.value() / double(out.steps);
    out.final_trail_avg = trail_avg_exact();
    if (!out.rows.empty()) {
        out.rows.back().cum_avg = out.final_cum_avg;
        out.rows.back().trail_avg = out.final_trail_avg;
    }
    return out;
}

void write_metrics_csv(const RunConfig& cfg, const RunResult& result, std::ostream& os) {
    os << "# uoro " << kVersion << "\n";
    os << "# config " << cfg.to_json() << "\n";
    os << "# diverged " << (result.diverged ? 1 : 0) << " at_step " << result.diverge_step
       << "\n";
    os << "step,inst_loss,cum_avg,trail_avg,lr,diverged\n";
    for (const MetricRow& r : result.rows) {
        os << r.step << ',' << fmt_double(r.inst_loss) << ',' << fmt_double(r.cum_avg) << ','
           << fmt_double(r.trail_avg) << ',' << fmt_double(r.lr) << ',' << (r.diverged ? 1 : 0)
           << '\n';
    }
}

std::vector<SweepEntry> sweep(const std::vector<RunConfig>& configs, std::size_t parallelism) {
    std::vector<SweepEntry> entries(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) entries[i].cfg = configs[i];

    if (parallelism == 0) parallelism = std::max(1u, std::thread::hardware_concurrency());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            try {
                entries[i].result = run(entries[i].cfg);
            } catch (const std::exception& e) {
                entries[i].failed = true;
                entries[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> threads;
    const std::size_t n_threads = std::min(parallelism, entries.size());
    threads.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();

    // Flag the best completed run of each group.
    std::map<std::string, std::size_t> best;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const SweepEntry& e = entries[i];
        if (e.failed || e.result.diverged) continue;
        auto it = best.find(e.cfg.group);
        if (it == best.end() ||
            e.result.final_trail_avg < entries[it->second].result.final_trail_avg)
            best[e.cfg.group] = i;
    }
    for (auto& [group, idx] : best) entries[idx].best_in_group = true;
    return entries;
}

void write_sweep_summary(const std::vector<SweepEntry>& entries, std::ostream& os) {
    os << "# uoro " << kVersion << " sweep of " << entries.size() << " runs\n";
    os << "# best_in_group marks the lowest final trailing loss among completed runs\n";
    os << "name,group,algorithm,gamma,alpha,steps,final_cum_avg,final_trail_avg,diverged,"
          "diverge_step,best_in_group,error\n";
    for (const SweepEntry& e : entries) {
        os << e.cfg.name << ',' << e.cfg.group << ',' << e.cfg.algorithm.label() << ','
           << fmt_double(e.cfg.optimizer.schedule.gamma) << ','
           << fmt_double(e.cfg.optimizer.schedule.alpha) << ',' << e.result.steps << ','
           << fmt_double(e.result.final_cum_avg) << ',' << fmt_double(e.result.final_trail_avg)
           << ',' << (e.result.diverged ? 1 : 0) << ',' << e.result.diverge_step << ','
           << (e.best_in_group ? 1 : 0) << ',' << e.error << '\n';
    }
}

}  // namespace uoro
