#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stocklab/frame.hpp"
#include "stocklab/matrix.hpp"

namespace stocklab {

enum class ModelKind { lost_sales, dual_sourcing, multi_echelon };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& text);

/// How clean() fills gaps: numeric columns take the column median,
/// categorical and flag columns take the column mode (frequency ties break
/// to the smallest value).
struct CleaningPolicy {
    bool drop_incomplete_target_rows = false;
    std::string target_column;  // consulted only when dropping is enabled
};

struct SynthConfig {
    std::size_t n_days = 365;
    Timestamp start_date = timestamp_from_civil({2023, 1, 1, 0, 0, 0});
    std::uint64_t seed = 0;
    double trend_slope = 0.05;      // units per day
    double weekly_amplitude = 10.0;
    double yearly_amplitude = 15.0;
    double noise_sd = 2.0;
    double promo_probability = 0.2;

    void validate() const;  // throws std::invalid_argument
};

/// Per-feature standardization parameters (population standard deviation;
/// constant features store deviation 1 so the transform is a no-op shift).
struct ScalerParams {
    std::vector<double> means;
    std::vector<double> sds;
};

using Schema = std::map<std::string, ColumnRole>;

/// The column role map for the synthetic supermarket dataset (documented in
/// docs/schema.md).
Schema default_schema();

/// Loads a CSV against a role map. Columns absent from the schema are kept
/// as categorical text. Throws DataError for a missing file, a header
/// missing a schema-required column, or an unparseable cell (reported with
/// its row index).
Frame load_dataset(const std::string& path, const Schema& schema,
                   const std::vector<std::string>& required_columns = {});

/// Parses the well-known date columns, imputes numeric columns with the
/// median and categorical/flag columns with the mode, and sorts ascending
/// by "Date". Rows with an unusable "Date" are dropped. Idempotent.
Frame clean(const Frame& frame, const CleaningPolicy& policy = {});

/// Adds date decompositions ("<col> Year/Month/Day/Hour/Minute") for every
/// timestamp column, the Quantity Sold_x x Price interaction, and - for the
/// dual-sourcing kind - reliability/lead-time/cost-difference columns
/// (passed through when present, deterministically simulated otherwise).
/// Missing "Promotion Type_Discount" entries become 0. Never removes
/// columns or reorders rows.
Frame engineer_features(const Frame& frame, ModelKind kind);

/// Deterministic synthetic dataset: identical configs give bit-identical
/// frames. Demand-like columns follow trend + weekly and yearly sinusoids
/// + Gaussian noise.
Frame generate_synthetic(const SynthConfig& config);

/// Seeded shuffle split; test gets round(test_fraction * n) rows. Row order
/// inside each part follows the original frame.
std::pair<Frame, Frame> train_test_split(const Frame& frame, double test_fraction,
                                         std::uint64_t seed);

ScalerParams standardize_fit(const Matrix& X);
Matrix standardize_apply(const Matrix& X, const ScalerParams& params);
Matrix standardize_invert(const Matrix& X, const ScalerParams& params);

/// Feature matrix from every numeric/flag column except the listed
/// exclusions; returns the chosen column names in order.
Matrix feature_matrix(const Frame& frame, const std::vector<std::string>& exclude,
                      std::vector<std::string>* names_out = nullptr);

/// Reads a SynthConfig from a JSON file with exactly the SynthConfig field
/// names; missing fields keep their defaults.
SynthConfig synth_config_from_json_file(const std::string& path);

/// Writes the frame as CSV (timestamps in ISO form, numbers via %.12g).
void write_frame_csv(const Frame& frame, const std::string& path);

}  // namespace stocklab
