#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stocklab/frame.hpp"
#include "stocklab/ingest.hpp"
#include "stocklab/metrics.hpp"

namespace stocklab {

struct ForecasterConfig {
    double changepoint_prior_scale = 0.1;
    double seasonality_prior_scale = 10.0;
    bool yearly = true;
    bool weekly = true;
    bool daily = false;
    std::size_t n_changepoints = 25;
    double changepoint_range = 0.8;
    std::size_t weekly_fourier_order = 3;
    std::size_t yearly_fourier_order = 10;
    double interval_width = 0.8;
    std::vector<std::string> regressor_names;

    void validate() const;
};

/// Additive model fitted by ridge-penalized least squares: piecewise-linear
/// trend (hinge terms at the changepoints, penalized by
/// 1/changepoint_prior_scale), Fourier seasonality blocks (penalized by
/// 1/seasonality_prior_scale) and unpenalized external regressors.
struct FittedForecaster {
    ForecasterConfig config;
    Timestamp train_start;
    Timestamp train_end;
    double intercept = 0.0;
    double base_slope = 0.0;                  // units per day
    std::vector<Timestamp> changepoints;
    std::vector<double> changepoint_deltas;   // slope changes, one per changepoint
    std::vector<double> weekly_coefficients;  // cos/sin pairs per order
    std::vector<double> yearly_coefficients;
    std::vector<double> regressor_coefficients;
    double residual_sd = 0.0;

    double trend_at(Timestamp ds) const;    // includes the intercept
    double weekly_at(Timestamp ds) const;
    double yearly_at(Timestamp ds) const;
};

struct ForecastRow {
    Timestamp ds;
    double yhat = 0.0;
    double yhat_lower = 0.0;
    double yhat_upper = 0.0;
};

struct CrossValPlan {
    std::int64_t initial_days = 0;
    std::int64_t period_days = 0;
    std::int64_t horizon_days = 0;
    std::vector<Timestamp> cutoffs;
};

struct CvRecord {
    Timestamp ds;
    double actual = 0.0;
    double yhat = 0.0;
    double yhat_lower = 0.0;
    double yhat_upper = 0.0;
    Timestamp cutoff;
};

struct HorizonMetricsRow {
    double horizon_days = 0.0;
    MetricsReport metrics;
    double coverage = 0.0;
};

struct ComponentSeries {
    std::vector<Timestamp> ds;
    double intercept = 0.0;
    std::vector<double> trend;      // slope + changepoint part, excludes the intercept
    std::vector<double> weekly;
    std::vector<double> yearly;
    std::vector<double> regressor;  // sum of regressor terms
};

struct ThresholdDecision {
    Timestamp ds;
    double units = 0.0;
    bool action_needed = false;
};

using RegressorColumns = std::map<std::string, std::vector<double>>;

/// Fits on (ds, y) pairs plus aligned regressor columns. Throws
/// std::invalid_argument for fewer than 2 distinct timestamps or misaligned
/// regressors. A 1e-8 ridge jitter keeps degenerate designs solvable.
FittedForecaster fit_forecaster(const std::vector<Timestamp>& ds, const std::vector<double>& y,
                                const RegressorColumns& regressors, const ForecasterConfig& config);

/// horizon_days timestamps at the cadence, strictly after the last one.
std::vector<Timestamp> make_future(Timestamp last_training_ds, std::size_t horizon_days,
                                   std::int64_t cadence_seconds = Timestamp::seconds_per_day);

/// Predicts with Gaussian intervals: yhat +- z((1+width)/2) * residual_sd.
/// Throws std::invalid_argument when a fitted regressor column is missing.
std::vector<ForecastRow> predict(const FittedForecaster& model, const std::vector<Timestamp>& ds,
                                 const RegressorColumns& regressors);

/// Rolling-origin plan for the model-kind presets. Durations are whole days.
CrossValPlan plan_cross_validation(std::pair<Timestamp, Timestamp> span, ModelKind preset,
                                   std::size_t series_length);

struct CrossValOptions {
    bool parallel = false;
};

/// Refits on data <= cutoff and evaluates on (cutoff, cutoff + horizon] for
/// every cutoff. Folds are independent; the parallel option preserves
/// output order and bit-exact results.
std::vector<CvRecord> cross_validate(const std::vector<Timestamp>& ds, const std::vector<double>& y,
                                     const RegressorColumns& regressors,
                                     const ForecasterConfig& config, const CrossValPlan& plan,
                                     const CrossValOptions& options = {});

/// Metrics over a sliding window of round(window_fraction * n) records
/// (sorted by horizon), reported at each distinct horizon.
std::vector<HorizonMetricsRow> performance_by_horizon(const std::vector<CvRecord>& records,
                                                      double window_fraction);

/// Component decomposition; trend + weekly + yearly + regressor + intercept
/// reconstructs yhat.
ComponentSeries components(const FittedForecaster& model, const std::vector<Timestamp>& ds,
                           const RegressorColumns& regressors);

/// Rows with yhat strictly greater than the threshold are flagged.
std::vector<ThresholdDecision> threshold_report(const std::vector<ForecastRow>& rows,
                                                double threshold);

/// Per-model-kind defaults: target column, configuration and how future
/// regressor values are filled.
enum class FutureFill { zero, last_value, mean };

struct ForecastPreset {
    ForecasterConfig config;
    std::string target_column;
    std::vector<std::pair<std::string, FutureFill>> regressors;
};

ForecastPreset forecast_preset(ModelKind kind);

void write_forecast_csv(const std::vector<ForecastRow>& rows, const std::string& path);
void write_horizon_metrics_csv(const std::vector<HorizonMetricsRow>& rows,
                               const std::string& path);
void write_components_csv(const ComponentSeries& series, const std::string& directory);
void write_threshold_decisions_csv(const std::vector<ThresholdDecision>& decisions,
                                   const std::string& path);

}  // namespace stocklab
