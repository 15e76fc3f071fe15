#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uoro/estimators.hpp"
#include "uoro/loss.hpp"
#include "uoro/model.hpp"
#include "uoro/optim.hpp"
#include "uoro/tasks.hpp"

namespace uoro {

struct TaskSpec {
    enum class Kind { influence_balancing, distant_brackets, anbn };
    Kind kind = Kind::influence_balancing;
    // influence balancing
    std::size_t units = 23;
    std::size_t plus = 10;
    // distant brackets (s, k, a)
    std::size_t db_s = 1;
    std::size_t db_k = 5;
    std::size_t db_a = 10;
    // a^n b^n (kmin, kmax)
    std::size_t anbn_min = 1;
    std::size_t anbn_max = 32;

    bool is_text() const { return kind != Kind::influence_balancing; }
};

struct ModelSpec {
    enum class Cell { linear, tanh_rnn, gru, lstm };
    Cell cell = Cell::linear;
    std::size_t state = 64;  // hidden units (LSTM state is twice this)
};

struct AlgorithmSpec {
    enum class Kind { uoro, rtrl, tbptt, memory_uoro, rank_uoro };
    Kind kind = Kind::uoro;
    std::size_t window = 1;  // tbptt truncation / memory-T window
    std::size_t rank = 1;    // rank-k tracks
    TbpttStyle style = TbpttStyle::chunked;

    std::string label() const;
};

struct OptimizerSpec {
    enum class Kind { sgd, adam };
    Kind kind = Kind::sgd;
    LrSchedule schedule = LrSchedule::inv_sqrt(1e-3);
};

// Fully determines a run: equal configs produce identical metric files.
struct RunConfig {
    std::string name = "run";
    std::string group;  // sweep aggregation key
    TaskSpec task;
    ModelSpec model;
    AlgorithmSpec algorithm;
    OptimizerSpec optimizer;
    std::uint64_t seed_data = 1;
    std::uint64_t seed_signs = 2;
    std::uint64_t seed_init = 3;
    std::uint64_t horizon = 100000;
    std::uint64_t log_every = 1;
    std::uint64_t trail_window = 100000;
    double divergence_factor = 1e6;

    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
};

struct MetricRow {
    std::uint64_t step;
    double inst_loss;
    double cum_avg;    // compensated cumulative average
    double trail_avg;  // average over the last trail_window steps
    double lr;
    bool diverged;
};

struct RunResult {
    std::vector<MetricRow> rows;
    bool diverged = false;
    std::uint64_t diverge_step = 0;
    std::uint64_t steps = 0;
    double final_cum_avg = 0.0;
    double final_trail_avg = 0.0;
};

// Executes the online loop: stream -> estimator step -> optimizer update,
// stopping at the horizon or on the divergence event (non-finite values,
// or instantaneous loss above divergence_factor times the first step's
// loss). Text losses are reported in bits per character.
RunResult run(const RunConfig& cfg);

// CSV with '#'-prefixed metadata lines echoing the config and version.
void write_metrics_csv(const RunConfig& cfg, const RunResult& result, std::ostream& os);

struct SweepEntry {
    RunConfig cfg;
    RunResult result;
    bool failed = false;
    std::string error;
    bool best_in_group = false;
};

// Runs all configs (in parallel up to `parallelism` threads; 0 picks the
// hardware concurrency). Per-run errors are captured, not propagated.
// The lowest final trailing loss among completed runs of each group is
// flagged best_in_group.
std::vector<SweepEntry> sweep(const std::vector<RunConfig>& configs,
                              std::size_t parallelism = 0);

void write_sweep_summary(const std::vector<SweepEntry>& entries, std::ostream& os);

// Wiring helpers shared with the CLI and tests.
std::unique_ptr<RecurrentModel> make_model(const RunConfig& cfg);
std::unique_ptr<Loss> make_loss(const RunConfig& cfg);
std::unique_ptr<GradientEstimator> make_estimator(const RunConfig& cfg,
                                                  const RecurrentModel& model);
std::unique_ptr<CharStream> make_char_stream(const TaskSpec& task, std::uint64_t seed);

}  // namespace uoro
