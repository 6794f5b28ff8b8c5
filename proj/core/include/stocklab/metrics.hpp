#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace stocklab {

/// Point-forecast accuracy report. Fields that cannot be computed (MAPE and
/// MdAPE when an actual is zero, R^2 when the actuals are constant) hold a
/// quiet NaN sentinel.
struct MetricsReport {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    double mdape = 0.0;
    double smape = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;

    std::string to_csv() const;   // header + one row
    std::string to_json() const;  // exact field names
};

struct ResidualDiagnostics {
    struct Bin {
        double lower = 0.0;
        double upper = 0.0;
        std::size_t count = 0;
    };
    std::vector<Bin> histogram;
    /// (theoretical standard normal quantile, ordered standardized residual)
    std::vector<std::pair<double, double>> qq;
};

/// mse, rmse, mae, mape = mean(|a-p|/|a|), mdape = median of the same
/// ratios, smape = mean(|a-p| / ((|a|+|p|)/2)), r2 = 1 - SS_res/SS_tot with
/// SS_tot about the mean of the actuals (population form, accumulated in
/// index order).
MetricsReport pointwise_metrics(const std::vector<double>& actual,
                                const std::vector<double>& predicted);

/// Fraction of indices with lower <= actual <= upper. Throws on length
/// mismatch or any lower > upper.
double interval_coverage(const std::vector<double>& actual, const std::vector<double>& lower,
                         const std::vector<double>& upper);

/// Equal-width histogram over [min, max] plus a normal Q-Q pairing at
/// probabilities (i - 0.5)/n; residuals standardized by their mean and
/// population deviation and sorted ascending.
ResidualDiagnostics residual_diagnostics(const std::vector<double>& residuals, std::size_t n_bins);

void write_residual_histogram_csv(const ResidualDiagnostics& diag, const std::string& path);
void write_residual_qq_csv(const ResidualDiagnostics& diag, const std::string& path);

}  // namespace stocklab
