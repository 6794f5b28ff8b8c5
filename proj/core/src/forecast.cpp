#include "stocklab/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <stdexcept>
#include <tuple>

#include "stocklab/csv.hpp"
#include "stocklab/errors.hpp"
#include "stocklab/stats.hpp"

namespace stocklab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kWeeklyPeriod = 7.0;
constexpr double kYearlyPeriod = 365.25;
constexpr double kRidgeJitter = 1e-8;

double days_since(Timestamp start, Timestamp ds) {
    return static_cast<double>(ds.seconds - start.seconds) / Timestamp::seconds_per_day;
}

// Cholesky solve of a symmetric positive-definite system.
std::vector<double> solve_spd(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j][j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
        if (d <= 0.0) throw NumericError("normal equations not positive definite");
        a[j][j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            a[i][j] = s / a[j][j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i][k] * b[k];
        b[i] = s / a[i][i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[k][i] * b[k];
        b[i] = s / a[i][i];
    }
    return b;
}

void append_fourier(std::vector<double>& row, double t, double period, std::size_t order) {
    for (std::size_t k = 1; k <= order; ++k) {
        const double arg = kTwoPi * static_cast<double>(k) * t / period;
        row.push_back(std::cos(arg));
        row.push_back(std::sin(arg));
    }
}

struct DesignLayout {
    std::size_t n_changepoints = 0;
    std::size_t weekly_terms = 0;
    std::size_t yearly_terms = 0;
    std::size_t n_regressors = 0;
    std::size_t width() const {
        return 2 + n_changepoints + weekly_terms + yearly_terms + n_regressors;
    }
};

std::vector<double> design_row(const FittedForecaster& model, const DesignLayout& layout,
                               Timestamp ds, const std::vector<double>& regressor_values) {
    std::vector<double> row;
    row.reserve(layout.width());
    const double t = days_since(model.train_start, ds);
    row.push_back(1.0);
    row.push_back(t);
    for (Timestamp cp : model.changepoints) {
        const double s = days_since(model.train_start, cp);
        row.push_back(t > s ? t - s : 0.0);
    }
    if (layout.weekly_terms > 0) append_fourier(row, t, kWeeklyPeriod, model.config.weekly_fourier_order);
    if (layout.yearly_terms > 0) append_fourier(row, t, kYearlyPeriod, model.config.yearly_fourier_order);
    for (double v : regressor_values) row.push_back(v);
    return row;
}

std::vector<double> gather_regressor_row(const RegressorColumns& regressors,
                                         const std::vector<std::string>& names, std::size_t i) {
    std::vector<double> out;
    out.reserve(names.size());
    for (const auto& name : names) {
        auto it = regressors.find(name);
        if (it == regressors.end())
            throw std::invalid_argument("missing regressor column '" + name + "'");
        out.push_back(it->second.at(i));
    }
    return out;
}

}  // namespace

void ForecasterConfig::validate() const {
    if (changepoint_prior_scale <= 0.0 || seasonality_prior_scale <= 0.0)
        throw std::invalid_argument("prior scales must be positive");
    if (!(changepoint_range > 0.0 && changepoint_range <= 1.0))
        throw std::invalid_argument("changepoint_range must be in (0,1]");
    if (!(interval_width > 0.0 && interval_width < 1.0))
        throw std::invalid_argument("interval_width must be in (0,1)");
}

double FittedForecaster::trend_at(Timestamp ds) const {
    const double t = days_since(train_start, ds);
    double v = intercept + base_slope * t;
    for (std::size_t j = 0; j < changepoints.size(); ++j) {
        const double s = days_since(train_start, changepoints[j]);
        if (t > s) v += changepoint_deltas[j] * (t - s);
    }
    return v;
}

double FittedForecaster::weekly_at(Timestamp ds) const {
    if (weekly_coefficients.empty()) return 0.0;
    const double t = days_since(train_start, ds);
    double v = 0.0;
    std::size_t i = 0;
    for (std::size_t k = 1; k <= config.weekly_fourier_order; ++k) {
        const double arg = kTwoPi * static_cast<double>(k) * t / kWeeklyPeriod;
        v += weekly_coefficients[i++] * std::cos(arg);
        v += weekly_coefficients[i++] * std::sin(arg);
    }
    return v;
}

double FittedForecaster::yearly_at(Timestamp ds) const {
    if (yearly_coefficients.empty()) return 0.0;
    const double t = days_since(train_start, ds);
    double v = 0.0;
    std::size_t i = 0;
    for (std::size_t k = 1; k <= config.yearly_fourier_order; ++k) {
        const double arg = kTwoPi * static_cast<double>(k) * t / kYearlyPeriod;
        v += yearly_coefficients[i++] * std::cos(arg);
        v += yearly_coefficients[i++] * std::sin(arg);
    }
    return v;
}

FittedForecaster fit_forecaster(const std::vector<Timestamp>& ds, const std::vector<double>& y,
                                const RegressorColumns& regressors,
                                const ForecasterConfig& config) {
    config.validate();
    if (ds.size() != y.size()) throw std::invalid_argument("ds/y length mismatch");
    {
        std::set<std::int64_t> distinct;
        for (Timestamp t : ds) distinct.insert(t.seconds);
        if (distinct.size() < 2) throw std::invalid_argument("need at least 2 distinct timestamps");
    }
    for (const auto& name : config.regressor_names) {
        auto it = regressors.find(name);
        if (it == regressors.end())
            throw std::invalid_argument("missing regressor column '" + name + "'");
        if (it->second.size() != ds.size())
            throw std::invalid_argument("regressor '" + name + "' not aligned with the series");
    }

    FittedForecaster model;
    model.config = config;
    model.train_start = *std::min_element(ds.begin(), ds.end());
    model.train_end = *std::max_element(ds.begin(), ds.end());

    // Changepoints sit uniformly inside the first changepoint_range of the
    // training history, strictly between the endpoints.
    const double span_days = days_since(model.train_start, model.train_end);
    const std::size_t n_cp = std::min(config.n_changepoints, ds.size() >= 2 ? ds.size() - 2 : 0);
    const double cp_span = span_days * config.changepoint_range;
    for (std::size_t j = 1; j <= n_cp; ++j) {
        const double s = cp_span * static_cast<double>(j) / static_cast<double>(n_cp + 1);
        model.changepoints.push_back(model.train_start.plus_days(s));
    }

    DesignLayout layout;
    layout.n_changepoints = model.changepoints.size();
    layout.weekly_terms = config.weekly ? 2 * config.weekly_fourier_order : 0;
    layout.yearly_terms = config.yearly ? 2 * config.yearly_fourier_order : 0;
    layout.n_regressors = config.regressor_names.size();
    const std::size_t p = layout.width();

    // Normal equations with ridge terms mapped from the prior scales.
    std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
    std::vector<double> aty(p, 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto reg_row = gather_regressor_row(regressors, config.regressor_names, i);
        const auto row = design_row(model, layout, ds[i], reg_row);
        for (std::size_t a = 0; a < p; ++a) {
            aty[a] += row[a] * y[i];
            for (std::size_t b = a; b < p; ++b) ata[a][b] += row[a] * row[b];
        }
    }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < a; ++b) ata[a][b] = ata[b][a];

    const std::size_t cp_begin = 2;
    const std::size_t seasonal_begin = cp_begin + layout.n_changepoints;
    const std::size_t seasonal_end = seasonal_begin + layout.weekly_terms + layout.yearly_terms;
    for (std::size_t a = 0; a < p; ++a) {
        double penalty = 0.0;
        if (a >= cp_begin && a < seasonal_begin) penalty = 1.0 / config.changepoint_prior_scale;
        else if (a >= seasonal_begin && a < seasonal_end) penalty = 1.0 / config.seasonality_prior_scale;
        ata[a][a] += penalty + kRidgeJitter;
    }

    const std::vector<double> beta = solve_spd(std::move(ata), std::move(aty));

    model.intercept = beta[0];
    model.base_slope = beta[1];
    model.changepoint_deltas.assign(beta.begin() + cp_begin, beta.begin() + seasonal_begin);
    std::size_t cursor = seasonal_begin;
    model.weekly_coefficients.assign(beta.begin() + cursor, beta.begin() + cursor + layout.weekly_terms);
    cursor += layout.weekly_terms;
    model.yearly_coefficients.assign(beta.begin() + cursor, beta.begin() + cursor + layout.yearly_terms);
    cursor += layout.yearly_terms;
    model.regressor_coefficients.assign(beta.begin() + cursor, beta.end());

    double ss = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto reg_row = gather_regressor_row(regressors, config.regressor_names, i);
        const auto row = design_row(model, layout, ds[i], reg_row);
        double fitted = 0.0;
        for (std::size_t a = 0; a < p; ++a) fitted += row[a] * beta[a];
        ss += (y[i] - fitted) * (y[i] - fitted);
    }
    model.residual_sd = std::sqrt(ss / static_cast<double>(ds.size()));
    return model;
}

std::vector<Timestamp> make_future(Timestamp last_training_ds, std::size_t horizon_days,
                                   std::int64_t cadence_seconds) {
    if (horizon_days < 1) throw std::invalid_argument("horizon must be >= 1");
    if (cadence_seconds <= 0) throw std::invalid_argument("cadence must be positive");
    std::vector<Timestamp> out;
    out.reserve(horizon_days);
    for (std::size_t i = 1; i <= horizon_days; ++i)
        out.push_back(Timestamp{last_training_ds.seconds +
                                static_cast<std::int64_t>(i) * cadence_seconds});
    return out;
}

std::vector<ForecastRow> predict(const FittedForecaster& model, const std::vector<Timestamp>& ds,
                                 const RegressorColumns& regressors) {
    const double z = normal_quantile((1.0 + model.config.interval_width) / 2.0);
    std::vector<ForecastRow> rows;
    rows.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double yhat = model.trend_at(ds[i]) + model.weekly_at(ds[i]) + model.yearly_at(ds[i]);
        const auto reg_row = gather_regressor_row(regressors, model.config.regressor_names, i);
        for (std::size_t r = 0; r < reg_row.size(); ++r)
            yhat += model.regressor_coefficients[r] * reg_row[r];
        ForecastRow row;
        row.ds = ds[i];
        row.yhat = yhat;
        row.yhat_lower = yhat - z * model.residual_sd;
        row.yhat_upper = yhat + z * model.residual_sd;
        rows.push_back(row);
    }
    return rows;
}

CrossValPlan plan_cross_validation(std::pair<Timestamp, Timestamp> span, ModelKind preset,
                                   std::size_t series_length) {
    const std::int64_t span_days =
        (span.second.seconds - span.first.seconds) / Timestamp::seconds_per_day;
    CrossValPlan plan;
    std::size_t max_folds = 0;  // 0 = unlimited
    switch (preset) {
        case ModelKind::lost_sales:
            plan.initial_days = 180;
            plan.period_days = plan.initial_days / 10;
            plan.horizon_days = 30;
            break;
        case ModelKind::dual_sourcing:
            plan.initial_days = 180;
            plan.period_days = plan.initial_days / 3;
            plan.horizon_days = span_days / 2;
            max_folds = 3;
            break;
        case ModelKind::multi_echelon: {
            plan.initial_days = static_cast<std::int64_t>(series_length) / 2;
            plan.period_days = plan.initial_days / 10;
            plan.horizon_days = 3 * plan.initial_days / 10;
            break;
        }
    }
    if (plan.period_days < 1 || plan.horizon_days < 1)
        throw std::invalid_argument("series too short for a cross-validation plan");

    // The horizon never reaches past the end of the data.
    plan.horizon_days = std::min(plan.horizon_days, span_days - plan.initial_days);
    if (plan.horizon_days < 1)
        throw std::invalid_argument("span too short for one cross-validation fold");

    for (std::int64_t offset = plan.initial_days;
         offset + plan.horizon_days <= span_days;
         offset += plan.period_days) {
        plan.cutoffs.push_back(span.first.plus_days(static_cast<double>(offset)));
        if (max_folds != 0 && plan.cutoffs.size() == max_folds) break;
    }
    if (plan.cutoffs.empty())
        throw std::invalid_argument("span too short for one cross-validation fold");
    return plan;
}

std::vector<CvRecord> cross_validate(const std::vector<Timestamp>& ds, const std::vector<double>& y,
                                     const RegressorColumns& regressors,
                                     const ForecasterConfig& config, const CrossValPlan& plan,
                                     const CrossValOptions& options) {
    auto run_fold = [&](Timestamp cutoff) {
        const Timestamp fold_end = cutoff.plus_days(static_cast<double>(plan.horizon_days));
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds[i] <= cutoff) train_idx.push_back(i);
            else if (ds[i] <= fold_end) test_idx.push_back(i);
        }
        if (train_idx.size() < 2)
            throw std::invalid_argument("fold has fewer than 2 training points");

        auto subset = [&](const std::vector<std::size_t>& idx) {
            std::vector<Timestamp> sds;
            std::vector<double> sy;
            RegressorColumns sregs;
            for (std::size_t i : idx) {
                sds.push_back(ds[i]);
                sy.push_back(y[i]);
            }
            for (const auto& name : config.regressor_names) {
                auto it = regressors.find(name);
                if (it == regressors.end())
                    throw std::invalid_argument("missing regressor column '" + name + "'");
                std::vector<double> vals;
                for (std::size_t i : idx) vals.push_back(it->second.at(i));
                sregs[name] = std::move(vals);
            }
            return std::tuple(std::move(sds), std::move(sy), std::move(sregs));
        };

        auto [train_ds, train_y, train_regs] = subset(train_idx);
        auto [test_ds, test_y, test_regs] = subset(test_idx);
        const FittedForecaster model = fit_forecaster(train_ds, train_y, train_regs, config);
        const auto rows = predict(model, test_ds, test_regs);

        std::vector<CvRecord> records;
        records.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CvRecord rec;
            rec.ds = rows[i].ds;
            rec.actual = test_y[i];
            rec.yhat = rows[i].yhat;
            rec.yhat_lower = rows[i].yhat_lower;
            rec.yhat_upper = rows[i].yhat_upper;
            rec.cutoff = cutoff;
            records.push_back(rec);
        }
        return records;
    };

    std::vector<std::vector<CvRecord>> fold_records(plan.cutoffs.size());
    if (options.parallel) {
        std::vector<std::future<std::vector<CvRecord>>> futures;
        futures.reserve(plan.cutoffs.size());
        for (Timestamp cutoff : plan.cutoffs)
            futures.push_back(std::async(std::launch::async, run_fold, cutoff));
        for (std::size_t f = 0; f < futures.size(); ++f) fold_records[f] = futures[f].get();
    } else {
        for (std::size_t f = 0; f < plan.cutoffs.size(); ++f)
            fold_records[f] = run_fold(plan.cutoffs[f]);
    }

    std::vector<CvRecord> all;
    for (auto& records : fold_records)
        all.insert(all.end(), records.begin(), records.end());
    return all;
}

std::vector<HorizonMetricsRow> performance_by_horizon(const std::vector<CvRecord>& records,
                                                      double window_fraction) {
    if (records.empty()) throw std::invalid_argument("empty cross-validation records");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw std::invalid_argument("window_fraction must be in (0,1]");

    std::vector<CvRecord> sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(), [](const CvRecord& a, const CvRecord& b) {
        return a.cutoff.days_until(a.ds) < b.cutoff.days_until(b.ds);
    });
    const std::size_t n = sorted.size();
    const std::size_t w = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(window_fraction * static_cast<double>(n))));

    std::vector<HorizonMetricsRow> rows;
    std::size_t i = 0;
    while (i < n) {
        const double horizon = sorted[i].cutoff.days_until(sorted[i].ds);
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1].cutoff.days_until(sorted[j + 1].ds) == horizon) ++j;

        // Window of w records centred on this horizon's run, clamped to fit.
        const std::size_t center = (i + j) / 2;
        std::size_t lo = center >= (w - 1) / 2 ? center - (w - 1) / 2 : 0;
        lo = std::min(lo, n - w);
        std::vector<double> actual, predicted, lower, upper;
        actual.reserve(w);
        for (std::size_t k = lo; k < lo + w; ++k) {
            actual.push_back(sorted[k].actual);
            predicted.push_back(sorted[k].yhat);
            lower.push_back(sorted[k].yhat_lower);
            upper.push_back(sorted[k].yhat_upper);
        }
        HorizonMetricsRow row;
        row.horizon_days = horizon;
        row.metrics = pointwise_metrics(actual, predicted);
        row.coverage = interval_coverage(actual, lower, upper);
        rows.push_back(std::move(row));
        i = j + 1;
    }
    return rows;
}

ComponentSeries components(const FittedForecaster& model, const std::vector<Timestamp>& ds,
                           const RegressorColumns& regressors) {
    ComponentSeries series;
    series.ds = ds;
    series.intercept = model.intercept;
    series.trend.reserve(ds.size());
    series.weekly.reserve(ds.size());
    series.yearly.reserve(ds.size());
    series.regressor.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        series.trend.push_back(model.trend_at(ds[i]) - model.intercept);
        series.weekly.push_back(model.weekly_at(ds[i]));
        series.yearly.push_back(model.yearly_at(ds[i]));
        const auto reg_row = gather_regressor_row(regressors, model.config.regressor_names, i);
        double reg = 0.0;
        for (std::size_t r = 0; r < reg_row.size(); ++r)
            reg += model.regressor_coefficients[r] * reg_row[r];
        series.regressor.push_back(reg);
    }
    return series;
}

std::vector<ThresholdDecision> threshold_report(const std::vector<ForecastRow>& rows,
                                                double threshold) {
    std::vector<ThresholdDecision> out;
    out.reserve(rows.size());
    for (const auto& row : rows)
        out.push_back({row.ds, row.yhat, row.yhat > threshold});
    return out;
}

ForecastPreset forecast_preset(ModelKind kind) {
    ForecastPreset preset;
    preset.config.yearly = true;
    preset.config.weekly = true;
    preset.config.daily = false;
    switch (kind) {
        case ModelKind::lost_sales:
            preset.config.changepoint_prior_scale = 0.1;
            preset.config.seasonality_prior_scale = 10.0;
            preset.target_column = "Estimated Lost Sales";
            break;
        case ModelKind::dual_sourcing:
            preset.config.changepoint_prior_scale = 0.05;
            preset.config.seasonality_prior_scale = 10.0;
            preset.target_column = "Quantity Replenished";
            preset.regressors = {{"Promotion Type_Discount", FutureFill::zero},
                                 {"Quantity Replenished", FutureFill::last_value}};
            break;
        case ModelKind::multi_echelon:
            preset.config.changepoint_prior_scale = 0.05;
            preset.config.seasonality_prior_scale = 10.0;
            preset.target_column = "Quantity Replenished";
            preset.regressors = {{"Potential Lost Sales", FutureFill::mean},
                                 {"Lead Time", FutureFill::mean},
                                 {"Market Event E010", FutureFill::mean},
                                 {"Estimated Demand", FutureFill::mean}};
            break;
    }
    for (const auto& [name, fill] : preset.regressors)
        preset.config.regressor_names.push_back(name);
    return preset;
}

void write_forecast_csv(const std::vector<ForecastRow>& rows, const std::string& path) {
    CsvTable table;
    table.header = {"ds", "yhat", "yhat_lower", "yhat_upper"};
    for (const auto& row : rows)
        table.rows.push_back({format_timestamp(row.ds), format_double(row.yhat),
                              format_double(row.yhat_lower), format_double(row.yhat_upper)});
    write_csv(path, table);
}

void write_horizon_metrics_csv(const std::vector<HorizonMetricsRow>& rows,
                               const std::string& path) {
    CsvTable table;
    table.header = {"horizon", "mse", "rmse", "mae", "mape", "mdape", "smape", "coverage"};
    for (const auto& row : rows)
        table.rows.push_back({format_double(row.horizon_days), format_double(row.metrics.mse),
                              format_double(row.metrics.rmse), format_double(row.metrics.mae),
                              format_double(row.metrics.mape), format_double(row.metrics.mdape),
                              format_double(row.metrics.smape), format_double(row.coverage)});
    write_csv(path, table);
}

void write_components_csv(const ComponentSeries& series, const std::string& directory) {
    auto write_one = [&](const std::string& name, const std::vector<double>& values) {
        CsvTable table;
        table.header = {"ds", name};
        for (std::size_t i = 0; i < series.ds.size(); ++i)
            table.rows.push_back({format_timestamp(series.ds[i]), format_double(values[i])});
        write_csv(directory + "/component_" + name + ".csv", table);
    };
    write_one("trend", series.trend);
    write_one("weekly", series.weekly);
    write_one("yearly", series.yearly);
    write_one("regressor", series.regressor);
}

void write_threshold_decisions_csv(const std::vector<ThresholdDecision>& decisions,
                                   const std::string& path) {
    CsvTable table;
    table.header = {"Date", "Action needed (units)"};
    for (const auto& d : decisions) {
        if (!d.action_needed) continue;
        table.rows.push_back({format_timestamp(d.ds), format_double(d.units)});
    }
    write_csv(path, table);
}

}  // namespace stocklab
