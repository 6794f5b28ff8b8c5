#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "stocklab/ingest.hpp"

namespace stocklab::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string input;             // empty: synthesize from synth options
    std::string output_dir = ".";
    std::uint64_t seed = 42;
    ModelKind preset = ModelKind::lost_sales;
    bool parallel = false;
    bool plot_script = false;  // also emit a gnuplot recipe for the CSVs
    std::size_t days = 365;    // synthetic fallback length
};

struct DatagenOptions {
    SynthConfig synth;
    std::string output = "data.csv";
};

struct ForecastOptions {
    CommonOptions common;
    std::size_t horizon = 180;
    std::optional<double> threshold;
    double cv_window_fraction = 0.1;
};

struct TreesOptions {
    CommonOptions common;
    std::size_t search_iters = 10;
    std::size_t cv_folds = 3;
    std::size_t learning_curve_folds = 5;
};

struct DqnOptions {
    CommonOptions common;
    bool tuned = false;
    std::optional<std::size_t> episodes;
};

struct BenchmarkOptions {
    CommonOptions common;
    SynthConfig synth;
    std::size_t horizon = 180;
    double threshold = 100.0;
    std::size_t search_iters = 5;
    std::size_t cv_folds = 3;
    std::optional<std::size_t> episodes;
    bool tuned = false;
};

/// Each command throws on failure (std::invalid_argument for usage
/// problems, DataError / NumericError otherwise); run() maps exceptions to
/// exit codes and prints a one-line diagnostic.
void run_datagen(const DatagenOptions& options, std::ostream& out);
void run_forecast(const ForecastOptions& options, std::ostream& out);
void run_trees(const TreesOptions& options, std::ostream& out);
void run_dqn(const DqnOptions& options, std::ostream& out);
void run_benchmark(const BenchmarkOptions& options, std::ostream& out);

template <typename Fn>
int run(Fn&& fn, std::ostream& err);

/// Loads --config JSON (exact option field names) over the defaults; flags
/// are applied on top by the tool.
BenchmarkOptions benchmark_options_from_json_file(const std::string& path);
void write_benchmark_run_config(const BenchmarkOptions& options, const std::string& path);

/// FNV-1a 64-bit content hash, as "fnv1a:<hex>".
std::string hash_file(const std::string& path);

int exception_exit_code(const std::exception& e);

template <typename Fn>
int run(Fn&& fn, std::ostream& err) {
    try {
        fn();
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exception_exit_code(e);
    }
}

}  // namespace stocklab::cli
