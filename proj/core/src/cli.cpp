#include "stocklab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "stocklab/csv.hpp"
#include "stocklab/decide.hpp"
#include "stocklab/dqn.hpp"
#include "stocklab/ensembles.hpp"
#include "stocklab/envs.hpp"
#include "stocklab/errors.hpp"
#include "stocklab/forecast.hpp"
#include "stocklab/metrics.hpp"

namespace stocklab::cli {

namespace fs = std::filesystem;

namespace {

Frame load_or_synthesize(const CommonOptions& common) {
    if (!common.input.empty()) return load_dataset(common.input, default_schema());
    SynthConfig config;
    config.n_days = common.days;
    config.seed = common.seed;
    return generate_synthetic(config);
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw DataError("cannot create output directory: " + path);
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::string target_column_for(ModelKind kind) {
    return kind == ModelKind::lost_sales ? "Estimated Lost Sales" : "Quantity Replenished";
}

std::string supplier_label(double encoded) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03d", static_cast<int>(encoded));
    return buf;
}

// A generic gnuplot recipe covering the CSVs a command just wrote; each
// entry is (output stem, plot command).
void write_plot_recipe(const std::string& dir,
                       const std::vector<std::pair<std::string, std::string>>& plots) {
    std::ofstream out((fs::path(dir) / "plots.gnuplot").string(), std::ios::binary);
    out << "# gnuplot recipe; run from this directory: gnuplot plots.gnuplot\n"
        << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set terminal pngcairo size 900,540\n";
    for (const auto& [stem, command] : plots)
        out << "set output '" << stem << ".png'\n" << command << '\n';
}

}  // namespace

int exception_exit_code(const std::exception& e) {
    if (dynamic_cast<const DataError*>(&e) != nullptr) return kExitData;
    if (dynamic_cast<const NumericError*>(&e) != nullptr) return kExitNumeric;
    if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) return kExitUsage;
    if (dynamic_cast<const std::logic_error*>(&e) != nullptr) return kExitUsage;
    return kExitNumeric;
}

void run_datagen(const DatagenOptions& options, std::ostream& out) {
    options.synth.validate();
    const Frame frame = generate_synthetic(options.synth);
    const fs::path parent = fs::path(options.output).parent_path();
    if (!parent.empty()) ensure_dir(parent.string());
    write_frame_csv(frame, options.output);
    out << "wrote " << frame.n_rows() << " rows to " << options.output << '\n';
}

void run_forecast(const ForecastOptions& options, std::ostream& out) {
    ensure_dir(options.common.output_dir);
    const Frame raw = load_or_synthesize(options.common);
    const Frame cleaned = clean(raw);
    const Frame frame = engineer_features(cleaned, options.common.preset);
    const ForecastPreset preset = forecast_preset(options.common.preset);

    if (!frame.has_column(preset.target_column))
        throw DataError("dataset is missing the preset target column '" + preset.target_column +
                        "'");

    const auto ds = frame.timestamps("Date");
    const auto y = frame.numeric(preset.target_column);
    RegressorColumns regressors;
    for (const auto& [name, fill] : preset.regressors) {
        if (!frame.has_column(name))
            throw DataError("dataset is missing the preset regressor column '" + name + "'");
        regressors[name] = frame.numeric(name);
    }

    const FittedForecaster model = fit_forecaster(ds, y, regressors, preset.config);

    const auto future = make_future(model.train_end, options.horizon);
    RegressorColumns future_regressors;
    for (const auto& [name, fill] : preset.regressors) {
        const auto& history = regressors[name];
        double value = 0.0;
        switch (fill) {
            case FutureFill::zero: value = 0.0; break;
            case FutureFill::last_value: value = history.back(); break;
            case FutureFill::mean: {
                double sum = 0.0;
                for (double v : history) sum += v;
                value = sum / static_cast<double>(history.size());
                break;
            }
        }
        future_regressors[name] = std::vector<double>(future.size(), value);
    }
    const auto forecast_rows = predict(model, future, future_regressors);
    write_forecast_csv(forecast_rows, join(options.common.output_dir, "forecast.csv"));

    const ComponentSeries series = components(model, ds, regressors);
    write_components_csv(series, options.common.output_dir);

    const CrossValPlan plan =
        plan_cross_validation({model.train_start, model.train_end}, options.common.preset,
                              ds.size());
    const auto cv_records = cross_validate(ds, y, regressors, preset.config, plan,
                                           {options.common.parallel});
    const auto horizon_rows = performance_by_horizon(cv_records, options.cv_window_fraction);
    write_horizon_metrics_csv(horizon_rows, join(options.common.output_dir, "cv_metrics.csv"));

    if (options.threshold.has_value()) {
        const auto decisions = threshold_report(forecast_rows, *options.threshold);
        write_threshold_decisions_csv(decisions,
                                      join(options.common.output_dir, "decisions.csv"));
    }

    if (options.common.plot_script) {
        write_plot_recipe(
            options.common.output_dir,
            {{"forecast",
              "plot 'forecast.csv' using 1:2 with lines, '' using 1:3 with lines, "
              "'' using 1:4 with lines"},
             {"cv_mape_by_horizon", "plot 'cv_metrics.csv' using 1:5 with lines"},
             {"component_trend", "plot 'component_trend.csv' using 1:2 with lines"},
             {"component_weekly", "plot 'component_weekly.csv' using 1:2 with lines"},
             {"component_yearly", "plot 'component_yearly.csv' using 1:2 with lines"}});
    }

    out << "forecast: " << forecast_rows.size() << " rows, " << plan.cutoffs.size()
        << " cv folds, horizon " << plan.horizon_days << " days\n";
}

namespace {

struct TreesArtifacts {
    Forest forest;
    Gbm gbm;
    MetricsReport forest_metrics;
    MetricsReport gbm_metrics;
    ScalerParams scaler;
};

TreesArtifacts run_trees_pipeline(const TreesOptions& options, const Frame& frame,
                                  std::ostream& out) {
    const std::string target = target_column_for(options.common.preset);
    if (!frame.has_column(target))
        throw DataError("dataset is missing the target column '" + target + "'");

    const auto [train_frame, test_frame] = train_test_split(frame, 0.2, options.common.seed);
    std::vector<std::string> feature_names;
    const Matrix X_train_raw = feature_matrix(train_frame, {target}, &feature_names);
    const Matrix X_test_raw = feature_matrix(test_frame, {target});
    const auto y_train = train_frame.numeric(target);
    const auto y_test = test_frame.numeric(target);

    const ScalerParams scaler = standardize_fit(X_train_raw);
    const Matrix X_train = standardize_apply(X_train_raw, scaler);
    const Matrix X_test = standardize_apply(X_test_raw, scaler);

    const SearchSpace space;
    const SearchOptions search_options{options.common.parallel};
    const SearchResult forest_search =
        randomized_search(X_train, y_train, EnsembleKind::forest, space, options.search_iters,
                          options.cv_folds, options.common.seed, search_options);
    const SearchResult gbm_search =
        randomized_search(X_train, y_train, EnsembleKind::gbm, space, options.search_iters,
                          options.cv_folds, options.common.seed, search_options);

    TreesArtifacts artifacts{
        fit_forest(X_train, y_train, forest_search.best.to_forest_config(options.common.seed)),
        fit_gbm(X_train, y_train, gbm_search.best.to_gbm_config(options.common.seed)),
        {},
        {},
        scaler};
    const auto forest_pred = predict(artifacts.forest, X_test);
    const auto gbm_pred = predict(artifacts.gbm, X_test);
    artifacts.forest_metrics = pointwise_metrics(y_test, forest_pred);
    artifacts.gbm_metrics = pointwise_metrics(y_test, gbm_pred);

    const std::string& dir = options.common.output_dir;

    {  // model comparison, rows MSE/MAE/R2 x model columns
        CsvTable table;
        table.header = {"", "Random Forest", "Gradient Boosting"};
        table.rows.push_back({"MSE", format_double(artifacts.forest_metrics.mse),
                              format_double(artifacts.gbm_metrics.mse)});
        table.rows.push_back({"MAE", format_double(artifacts.forest_metrics.mae),
                              format_double(artifacts.gbm_metrics.mae)});
        table.rows.push_back({"R2", format_double(artifacts.forest_metrics.r2),
                              format_double(artifacts.gbm_metrics.r2)});
        write_csv(join(dir, "metrics.csv"), table);
    }

    const std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    const TrainFn forest_builder = [&forest_search](const Matrix& X, const std::vector<double>& y,
                                                    std::uint64_t seed) -> PredictFn {
        auto model = std::make_shared<Forest>(
            fit_forest(X, y, forest_search.best.to_forest_config(seed)));
        return [model](const Matrix& X_eval) { return predict(*model, X_eval); };
    };
    const TrainFn gbm_builder = [&gbm_search](const Matrix& X, const std::vector<double>& y,
                                              std::uint64_t seed) -> PredictFn {
        auto model = std::make_shared<Gbm>(fit_gbm(X, y, gbm_search.best.to_gbm_config(seed)));
        return [model](const Matrix& X_eval) { return predict(*model, X_eval); };
    };
    write_learning_curve_csv(learning_curve(forest_builder, X_train, y_train, fractions,
                                            options.learning_curve_folds, options.common.seed),
                             join(dir, "learning_curve_forest.csv"));
    write_learning_curve_csv(learning_curve(gbm_builder, X_train, y_train, fractions,
                                            options.learning_curve_folds, options.common.seed),
                             join(dir, "learning_curve_gbm.csv"));

    auto residuals_of = [&](const std::vector<double>& pred) {
        std::vector<double> residuals(y_test.size());
        for (std::size_t i = 0; i < y_test.size(); ++i) residuals[i] = y_test[i] - pred[i];
        return residuals;
    };
    const auto forest_diag = residual_diagnostics(residuals_of(forest_pred), 20);
    const auto gbm_diag = residual_diagnostics(residuals_of(gbm_pred), 20);
    write_residual_histogram_csv(forest_diag, join(dir, "residual_hist_forest.csv"));
    write_residual_qq_csv(forest_diag, join(dir, "residual_qq_forest.csv"));
    write_residual_histogram_csv(gbm_diag, join(dir, "residual_hist_gbm.csv"));
    write_residual_qq_csv(gbm_diag, join(dir, "residual_qq_gbm.csv"));

    {
        const auto importance = feature_importance(artifacts.forest);
        CsvTable table;
        table.header = {"feature", "importance"};
        for (std::size_t i = 0; i < importance.size(); ++i)
            table.rows.push_back({feature_names[i], format_double(importance[i])});
        write_csv(join(dir, "feature_importance.csv"), table);
    }

    {
        std::ofstream f(join(dir, "forest_model.json"), std::ios::binary);
        f << to_json(artifacts.forest) << '\n';
        std::ofstream g(join(dir, "gbm_model.json"), std::ios::binary);
        g << to_json(artifacts.gbm) << '\n';
    }

    if (options.common.preset == ModelKind::dual_sourcing) {
        // Reorder loop: each forecasted quantity is quoted by the row's own
        // supplier and the next row's supplier; the cheaper reliable one wins.
        std::vector<OrderDecision> decisions;
        const auto supplier_ids = test_frame.numeric("Supplier ID Encoded");
        const auto reliability = test_frame.numeric("Supplier Reliability Score");
        const auto cost_diff = test_frame.numeric("Cost Difference");
        for (std::size_t r = 0; r < test_frame.n_rows(); ++r) {
            const std::size_t other = (r + 1) % test_frame.n_rows();
            auto profile = [&](std::size_t i) {
                SupplierProfile p;
                p.id = supplier_label(supplier_ids[i]);
                p.unit_cost = static_cast<std::int64_t>(supplier_ids[i]) % 2 == 0 ? 10.0 : 15.0;
                p.reliability = reliability[i];
                p.cost_difference = cost_diff[i];
                return p;
            };
            const std::string chosen = select_supplier({profile(r), profile(other)});
            decisions.push_back(place_order(std::max(0.0, forest_pred[r]), 10.0, chosen));
        }
        write_order_decisions_csv(decisions, join(dir, "order_decisions.csv"));
    }

    if (options.common.plot_script) {
        write_plot_recipe(
            dir, {{"learning_curve_forest",
                   "plot 'learning_curve_forest.csv' using 1:2 with linespoints, "
                   "'' using 1:3 with linespoints"},
                  {"learning_curve_gbm",
                   "plot 'learning_curve_gbm.csv' using 1:2 with linespoints, "
                   "'' using 1:3 with linespoints"},
                  {"residual_hist_forest",
                   "plot 'residual_hist_forest.csv' using 1:3 with boxes"},
                  {"residual_qq_forest",
                   "plot 'residual_qq_forest.csv' using 1:2 with points, x with lines"}});
    }

    out << "trees: forest mse " << format_double(artifacts.forest_metrics.mse) << ", gbm mse "
        << format_double(artifacts.gbm_metrics.mse) << '\n';
    return artifacts;
}

}  // namespace

void run_trees(const TreesOptions& options, std::ostream& out) {
    ensure_dir(options.common.output_dir);
    const Frame raw = load_or_synthesize(options.common);
    const Frame frame = engineer_features(clean(raw), options.common.preset);
    run_trees_pipeline(options, frame, out);
}

namespace {

struct DqnArtifacts {
    TrainLog log;
    AgentConfig config;
    Network network;
};

DqnArtifacts run_dqn_pipeline(const DqnOptions& options, const Frame& cleaned, std::ostream& out) {
    AgentConfig config = options.tuned ? tuned_agent_config(options.common.preset)
                                       : default_agent_config(options.common.preset);
    if (options.episodes.has_value()) config.episodes = *options.episodes;

    InventoryEnv env = make_env(options.common.preset, cleaned,
                                default_costs(options.common.preset));
    DqnAgent agent(config, options.common.seed);
    std::vector<TraceRow> trace;
    const TrainLog log = train_agent(agent, env, &trace);

    const std::string& dir = options.common.output_dir;
    write_train_log_csv(log, join(dir, "trainlog.csv"));
    write_episode_trace_csv(trace, join(dir, "episode_trace.csv"));
    save_weights(agent.network(), join(dir, "weights.json"));

    // Echo the effective configuration.
    nlohmann::json echo = {{"preset", to_string(options.common.preset)},
                           {"tuned", options.tuned},
                           {"episodes", config.episodes},
                           {"gamma", config.gamma},
                           {"epsilon_start", config.epsilon_start},
                           {"epsilon_min", config.epsilon_min},
                           {"epsilon_decay", config.epsilon_decay},
                           {"learning_rate", config.learning_rate},
                           {"hidden_sizes", config.hidden_sizes},
                           {"dropout_rate", config.dropout_rate},
                           {"batch_size", config.batch_size},
                           {"memory_capacity", config.memory_capacity},
                           {"grad_clip_norm", config.grad_clip_norm},
                           {"seed", options.common.seed}};
    std::ofstream config_file(join(dir, "run_config.json"), std::ios::binary);
    config_file << echo.dump(2) << '\n';
    if (options.common.plot_script) {
        write_plot_recipe(dir,
                          {{"rewards_per_episode", "plot 'trainlog.csv' using 1:2 with lines"},
                           {"epsilon_per_episode", "plot 'trainlog.csv' using 1:3 with lines"}});
    }

    out << "dqn config: " << echo.dump() << '\n';
    out << "dqn: " << log.total_rewards.size() << " episodes, final epsilon "
        << format_double(log.epsilons.back()) << '\n';
    return {log, config, agent.network()};
}

}  // namespace

void run_dqn(const DqnOptions& options, std::ostream& out) {
    ensure_dir(options.common.output_dir);
    const Frame raw = load_or_synthesize(options.common);
    const Frame frame = clean(raw);
    run_dqn_pipeline(options, frame, out);
}

BenchmarkOptions benchmark_options_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError(std::string("bad JSON in ") + path + ": " + e.what());
    }
    BenchmarkOptions options;
    if (j.contains("preset"))
        options.common.preset = model_kind_from_string(j.at("preset").get<std::string>());
    if (j.contains("seed")) options.common.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("days")) {
        options.common.days = j.at("days").get<std::size_t>();
        options.synth.n_days = options.common.days;
    }
    if (j.contains("input")) options.common.input = j.at("input").get<std::string>();
    if (j.contains("output_dir")) options.common.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("parallel")) options.common.parallel = j.at("parallel").get<bool>();
    if (j.contains("horizon")) options.horizon = j.at("horizon").get<std::size_t>();
    if (j.contains("threshold")) options.threshold = j.at("threshold").get<double>();
    if (j.contains("search_iters")) options.search_iters = j.at("search_iters").get<std::size_t>();
    if (j.contains("cv_folds")) options.cv_folds = j.at("cv_folds").get<std::size_t>();
    if (j.contains("episodes")) options.episodes = j.at("episodes").get<std::size_t>();
    if (j.contains("tuned")) options.tuned = j.at("tuned").get<bool>();
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        if (s.contains("n_days")) options.synth.n_days = s.at("n_days").get<std::size_t>();
        if (s.contains("seed")) options.synth.seed = s.at("seed").get<std::uint64_t>();
        if (s.contains("trend_slope")) options.synth.trend_slope = s.at("trend_slope").get<double>();
        if (s.contains("weekly_amplitude"))
            options.synth.weekly_amplitude = s.at("weekly_amplitude").get<double>();
        if (s.contains("yearly_amplitude"))
            options.synth.yearly_amplitude = s.at("yearly_amplitude").get<double>();
        if (s.contains("noise_sd")) options.synth.noise_sd = s.at("noise_sd").get<double>();
        if (s.contains("promo_probability"))
            options.synth.promo_probability = s.at("promo_probability").get<double>();
        if (s.contains("start_date")) {
            Timestamp ts;
            if (!try_parse_timestamp(s.at("start_date").get<std::string>(), ts))
                throw DataError("bad start_date in " + path);
            options.synth.start_date = ts;
        }
    }
    return options;
}

void write_benchmark_run_config(const BenchmarkOptions& options, const std::string& path) {
    nlohmann::json j = {
        {"preset", to_string(options.common.preset)},
        {"seed", options.common.seed},
        {"days", options.common.days},
        {"input", options.common.input},
        {"parallel", options.common.parallel},
        {"horizon", options.horizon},
        {"threshold", options.threshold},
        {"search_iters", options.search_iters},
        {"cv_folds", options.cv_folds},
        {"tuned", options.tuned},
        {"synth",
         {{"n_days", options.synth.n_days},
          {"seed", options.synth.seed},
          {"trend_slope", options.synth.trend_slope},
          {"weekly_amplitude", options.synth.weekly_amplitude},
          {"yearly_amplitude", options.synth.yearly_amplitude},
          {"noise_sd", options.synth.noise_sd},
          {"promo_probability", options.synth.promo_probability},
          {"start_date", format_timestamp(options.synth.start_date)}}}};
    if (options.episodes.has_value()) j["episodes"] = *options.episodes;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << '\n';
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot hash missing file: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buffer[8192];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    char hex[32];
    std::snprintf(hex, sizeof(hex), "fnv1a:%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

void run_benchmark(const BenchmarkOptions& options, std::ostream& out) {
    using clock = std::chrono::steady_clock;
    const std::string& dir = options.common.output_dir;
    ensure_dir(dir);

    // One shared dataset file for all three methods.
    Frame raw;
    if (options.common.input.empty()) {
        SynthConfig synth = options.synth;
        synth.n_days = options.common.days;
        synth.seed = options.common.seed;
        raw = generate_synthetic(synth);
    } else {
        raw = load_dataset(options.common.input, default_schema());
    }
    const std::string dataset_path = join(dir, "dataset.csv");
    write_frame_csv(raw, dataset_path);
    const Frame cleaned = clean(raw);
    const Frame engineered = engineer_features(cleaned, options.common.preset);

    const ModelKind kind = options.common.preset;
    const std::string target = target_column_for(kind);
    nlohmann::json report;
    report["preset"] = to_string(kind);
    report["note"] =
        "replay_total_cost is an artifact-defined comparison metric: each method's decisions are "
        "replayed through the same environment with a fixed order policy";
    std::map<std::string, double> wall_clock;

    const std::size_t noop_action = kind == ModelKind::lost_sales ? 1 : 3;
    auto replay_actions_cost = [&](const std::vector<std::size_t>& actions) {
        InventoryEnv env = make_env(kind, engineered, default_costs(kind));
        env.reset();
        double total = 0.0;
        for (std::size_t action : actions) {
            const StepOutcome outcome = env.step(action);
            total += outcome.reward;
            if (outcome.done) break;
        }
        return -total;
    };
    auto threshold_actions = [&](const std::vector<double>& predictions) {
        std::vector<std::size_t> actions;
        actions.reserve(predictions.size());
        for (double p : predictions) actions.push_back(p >= options.threshold ? 0 : noop_action);
        return actions;
    };

    CommonOptions shared = options.common;
    shared.input = dataset_path;

    {  // time-series method
        const auto t0 = clock::now();
        ForecastOptions fopts;
        fopts.common = shared;
        fopts.common.output_dir = join(dir, "forecast");
        fopts.horizon = options.horizon;
        fopts.threshold = options.threshold;
        std::ostringstream sink;
        run_forecast(fopts, sink);

        const ForecastPreset preset = forecast_preset(kind);
        const auto ds = engineered.timestamps("Date");
        const auto y = engineered.numeric(target);
        RegressorColumns regressors;
        for (const auto& [name, fill] : preset.regressors)
            regressors[name] = engineered.numeric(name);
        const FittedForecaster model = fit_forecaster(ds, y, regressors, preset.config);
        const auto in_sample = predict(model, ds, regressors);
        std::vector<double> yhat;
        yhat.reserve(in_sample.size());
        for (const auto& row : in_sample) yhat.push_back(row.yhat);
        const MetricsReport metrics = pointwise_metrics(y, yhat);
        report["time_series"] = nlohmann::json::parse(metrics.to_json());
        report["time_series"]["replay_total_cost"] =
            replay_actions_cost(threshold_actions(yhat));
        wall_clock["time_series"] = std::chrono::duration<double>(clock::now() - t0).count();
    }

    {  // tree-ensemble method
        const auto t0 = clock::now();
        TreesOptions topts;
        topts.common = shared;
        topts.common.output_dir = join(dir, "trees");
        topts.search_iters = options.search_iters;
        topts.cv_folds = options.cv_folds;
        ensure_dir(topts.common.output_dir);
        std::ostringstream sink;
        const TreesArtifacts artifacts = run_trees_pipeline(topts, engineered, sink);

        const Matrix X_all = standardize_apply(feature_matrix(engineered, {target}),
                                               artifacts.scaler);
        const auto forest_all = predict(artifacts.forest, X_all);
        report["tree_ensembles"] = nlohmann::json::parse(artifacts.forest_metrics.to_json());
        report["tree_ensembles"]["gbm"] = nlohmann::json::parse(artifacts.gbm_metrics.to_json());
        report["tree_ensembles"]["replay_total_cost"] =
            replay_actions_cost(threshold_actions(forest_all));
        wall_clock["tree_ensembles"] = std::chrono::duration<double>(clock::now() - t0).count();
    }

    {  // dqn method
        const auto t0 = clock::now();
        DqnOptions dopts;
        dopts.common = shared;
        dopts.common.output_dir = join(dir, "dqn");
        dopts.tuned = options.tuned;
        dopts.episodes = options.episodes;
        ensure_dir(dopts.common.output_dir);
        std::ostringstream sink;
        const DqnArtifacts artifacts = run_dqn_pipeline(dopts, cleaned, sink);

        // Greedy replay of the trained policy.
        DqnAgent greedy(artifacts.config, shared.seed);
        greedy.network() = artifacts.network;
        greedy.set_epsilon(0.0);
        InventoryEnv env = make_env(kind, cleaned, default_costs(kind));
        EnvObservation obs = env.reset();
        double total = 0.0;
        bool done = false;
        while (!done) {
            const StepOutcome outcome = env.step(greedy.act(obs));
            total += outcome.reward;
            obs = outcome.observation;
            done = outcome.done;
        }

        double final_mean = 0.0;
        const std::size_t tail = std::min<std::size_t>(10, artifacts.log.total_rewards.size());
        for (std::size_t i = artifacts.log.total_rewards.size() - tail;
             i < artifacts.log.total_rewards.size(); ++i)
            final_mean += artifacts.log.total_rewards[i];
        final_mean /= static_cast<double>(tail);
        report["dqn"] = {{"episodes", artifacts.log.total_rewards.size()},
                         {"final_epsilon", artifacts.log.epsilons.back()},
                         {"mean_reward_last_10", final_mean},
                         {"replay_total_cost", -total}};
        wall_clock["dqn"] = std::chrono::duration<double>(clock::now() - t0).count();
    }

    {
        std::ofstream report_file(join(dir, "report.json"), std::ios::binary);
        report_file << report.dump(2) << '\n';
    }
    write_benchmark_run_config(options, join(dir, "run_config.json"));

    // Manifest covers the deterministic artifacts; timing lives in
    // timings.txt and stdout only.
    nlohmann::json manifest;
    manifest["files"] = nlohmann::json::object();
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), dir).generic_string();
        if (rel == "manifest.json" || rel == "timings.txt") continue;
        files.push_back(rel);
    }
    std::sort(files.begin(), files.end());
    for (const auto& rel : files) manifest["files"][rel] = hash_file(join(dir, rel));
    {
        std::ofstream manifest_file(join(dir, "manifest.json"), std::ios::binary);
        manifest_file << manifest.dump(2) << '\n';
    }
    // Verify the manifest against the bytes just written.
    for (const auto& rel : files) {
        if (hash_file(join(dir, rel)) != manifest["files"][rel].get<std::string>())
            throw NumericError("manifest hash mismatch for " + rel);
    }

    {
        std::ofstream timing_file(join(dir, "timings.txt"), std::ios::binary);
        for (const auto& [name, seconds] : wall_clock)
            timing_file << name << ": " << format_double(seconds) << " s\n";
    }
    double total_seconds = 0.0;
    for (const auto& [name, seconds] : wall_clock) {
        out << name << " wall-clock: " << format_double(seconds) << " s\n";
        total_seconds += seconds;
    }
    out << "benchmark complete in " << format_double(total_seconds) << " s, manifest covers "
        << files.size() << " files\n";
}

}  // namespace stocklab::cli
