#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stocklab/cli.hpp"
#include "stocklab/timestamp.hpp"

namespace cli = stocklab::cli;

namespace {

void add_common_flags(CLI::App* cmd, cli::CommonOptions& common, std::string& preset) {
    cmd->add_option("--input", common.input, "Input dataset CSV (defaults to a synthetic dataset)");
    cmd->add_option("--output-dir", common.output_dir, "Directory for output files");
    cmd->add_option("--seed", common.seed, "Master random seed");
    cmd->add_option("--preset", preset, "Inventory model preset")
        ->check(CLI::IsMember({"lost-sales", "dual-sourcing", "multi-echelon"}));
    cmd->add_option("--days", common.days, "Synthetic dataset length when no --input is given");
    cmd->add_flag("--parallel", common.parallel, "Run independent folds/candidates concurrently");
    cmd->add_flag("--plot-script", common.plot_script,
                  "Also write a gnuplot recipe for the emitted CSVs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stocklab: inventory-model forecasting, tree ensembles and DQN pipelines"};
    app.require_subcommand(1);

    // datagen
    auto* datagen = app.add_subcommand("datagen", "Write a deterministic synthetic dataset");
    cli::DatagenOptions datagen_options;
    std::string datagen_config, datagen_start;
    datagen->add_option("--days", datagen_options.synth.n_days, "Number of daily rows");
    datagen->add_option("--seed", datagen_options.synth.seed, "Generator seed");
    datagen->add_option("--trend-slope", datagen_options.synth.trend_slope, "Trend units per day");
    datagen->add_option("--weekly-amplitude", datagen_options.synth.weekly_amplitude,
                        "Weekly sinusoid amplitude");
    datagen->add_option("--yearly-amplitude", datagen_options.synth.yearly_amplitude,
                        "Yearly sinusoid amplitude");
    datagen->add_option("--noise-sd", datagen_options.synth.noise_sd, "Gaussian noise level");
    datagen->add_option("--promo-probability", datagen_options.synth.promo_probability,
                        "Promotion flag probability");
    datagen->add_option("--start-date", datagen_start, "First date (YYYY-MM-DD)");
    datagen->add_option("-o,--output", datagen_options.output, "Output CSV path");
    datagen->add_option("--config", datagen_config, "SynthConfig JSON file (flags override)");

    // forecast
    auto* forecast = app.add_subcommand("forecast", "Seasonal-trend forecast with rolling-origin CV");
    cli::ForecastOptions forecast_options;
    std::string forecast_preset_name = "lost-sales";
    double forecast_threshold = -1.0;
    bool forecast_has_threshold = false;
    add_common_flags(forecast, forecast_options.common, forecast_preset_name);
    forecast->add_option("--horizon", forecast_options.horizon, "Days to forecast ahead");
    forecast->add_option("--threshold", forecast_threshold, "Action threshold on yhat")
        ->each([&forecast_has_threshold](const std::string&) { forecast_has_threshold = true; });
    forecast->add_option("--cv-window-fraction", forecast_options.cv_window_fraction,
                         "Rolling metric window as a fraction of CV records");

    // trees
    auto* trees = app.add_subcommand("trees", "Random forest and gradient boosting pipelines");
    cli::TreesOptions trees_options;
    std::string trees_preset_name = "lost-sales";
    add_common_flags(trees, trees_options.common, trees_preset_name);
    trees->add_option("--search-iters", trees_options.search_iters,
                      "Randomized search candidates");
    trees->add_option("--cv-folds", trees_options.cv_folds, "Folds for search scoring");

    // dqn
    auto* dqn = app.add_subcommand("dqn", "Replay-buffer DQN training");
    cli::DqnOptions dqn_options;
    std::string dqn_preset_name = "lost-sales";
    std::size_t dqn_episodes = 0;
    add_common_flags(dqn, dqn_options.common, dqn_preset_name);
    dqn->add_flag("--tuned", dqn_options.tuned, "Use the tuned hyperparameter preset");
    auto* episodes_opt = dqn->add_option("--episodes", dqn_episodes, "Episode count override");

    // benchmark
    auto* benchmark = app.add_subcommand("benchmark",
                                         "Run all three pipelines and emit a comparison report");
    cli::BenchmarkOptions benchmark_options;
    std::string benchmark_preset_name = "lost-sales";
    std::string benchmark_config;
    std::size_t benchmark_episodes = 0;
    add_common_flags(benchmark, benchmark_options.common, benchmark_preset_name);
    benchmark->add_option("--config", benchmark_config, "Benchmark config JSON (flags override)");
    benchmark->add_option("--horizon", benchmark_options.horizon, "Forecast horizon");
    benchmark->add_option("--threshold", benchmark_options.threshold, "Order threshold");
    benchmark->add_option("--search-iters", benchmark_options.search_iters,
                          "Randomized search candidates");
    auto* bench_episodes_opt =
        benchmark->add_option("--episodes", benchmark_episodes, "DQN episode override");
    benchmark->add_flag("--tuned", benchmark_options.tuned, "Tuned DQN preset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? cli::kExitOk : cli::kExitUsage;
    }

    if (app.got_subcommand(datagen)) {
        return cli::run(
            [&] {
                if (!datagen_config.empty()) {
                    auto merged = stocklab::synth_config_from_json_file(datagen_config);
                    if (datagen->count("--days") == 0) datagen_options.synth.n_days = merged.n_days;
                    if (datagen->count("--seed") == 0) datagen_options.synth.seed = merged.seed;
                    if (datagen->count("--trend-slope") == 0)
                        datagen_options.synth.trend_slope = merged.trend_slope;
                    if (datagen->count("--weekly-amplitude") == 0)
                        datagen_options.synth.weekly_amplitude = merged.weekly_amplitude;
                    if (datagen->count("--yearly-amplitude") == 0)
                        datagen_options.synth.yearly_amplitude = merged.yearly_amplitude;
                    if (datagen->count("--noise-sd") == 0)
                        datagen_options.synth.noise_sd = merged.noise_sd;
                    if (datagen->count("--promo-probability") == 0)
                        datagen_options.synth.promo_probability = merged.promo_probability;
                    if (datagen->count("--start-date") == 0)
                        datagen_options.synth.start_date = merged.start_date;
                }
                if (!datagen_start.empty()) {
                    stocklab::Timestamp ts;
                    if (!stocklab::try_parse_timestamp(datagen_start, ts))
                        throw std::invalid_argument("bad --start-date");
                    datagen_options.synth.start_date = ts;
                }
                cli::run_datagen(datagen_options, std::cout);
            },
            std::cerr);
    }
    if (app.got_subcommand(forecast)) {
        return cli::run(
            [&] {
                forecast_options.common.preset =
                    stocklab::model_kind_from_string(forecast_preset_name);
                if (forecast_has_threshold) forecast_options.threshold = forecast_threshold;
                cli::run_forecast(forecast_options, std::cout);
            },
            std::cerr);
    }
    if (app.got_subcommand(trees)) {
        return cli::run(
            [&] {
                trees_options.common.preset = stocklab::model_kind_from_string(trees_preset_name);
                cli::run_trees(trees_options, std::cout);
            },
            std::cerr);
    }
    if (app.got_subcommand(dqn)) {
        return cli::run(
            [&] {
                dqn_options.common.preset = stocklab::model_kind_from_string(dqn_preset_name);
                if (episodes_opt->count() > 0) dqn_options.episodes = dqn_episodes;
                cli::run_dqn(dqn_options, std::cout);
            },
            std::cerr);
    }
    if (app.got_subcommand(benchmark)) {
        return cli::run(
            [&] {
                if (!benchmark_config.empty()) {
                    auto merged = cli::benchmark_options_from_json_file(benchmark_config);
                    // flags given on the command line win over the file
                    if (benchmark->count("--preset") == 0)
                        benchmark_preset_name = stocklab::to_string(merged.common.preset);
                    if (benchmark->count("--seed") == 0)
                        benchmark_options.common.seed = merged.common.seed;
                    if (benchmark->count("--days") == 0)
                        benchmark_options.common.days = merged.common.days;
                    if (benchmark->count("--input") == 0)
                        benchmark_options.common.input = merged.common.input;
                    if (benchmark->count("--output-dir") == 0 && !merged.common.output_dir.empty())
                        benchmark_options.common.output_dir = merged.common.output_dir;
                    if (benchmark->count("--parallel") == 0)
                        benchmark_options.common.parallel = merged.common.parallel;
                    if (benchmark->count("--horizon") == 0)
                        benchmark_options.horizon = merged.horizon;
                    if (benchmark->count("--threshold") == 0)
                        benchmark_options.threshold = merged.threshold;
                    if (benchmark->count("--search-iters") == 0)
                        benchmark_options.search_iters = merged.search_iters;
                    if (bench_episodes_opt->count() == 0)
                        benchmark_options.episodes = merged.episodes;
                    if (benchmark->count("--tuned") == 0)
                        benchmark_options.tuned = merged.tuned;
                    benchmark_options.synth = merged.synth;
                }
                benchmark_options.common.preset =
                    stocklab::model_kind_from_string(benchmark_preset_name);
                if (bench_episodes_opt->count() > 0)
                    benchmark_options.episodes = benchmark_episodes;
                cli::run_benchmark(benchmark_options, std::cout);
            },
            std::cerr);
    }
    return cli::kExitUsage;
}
