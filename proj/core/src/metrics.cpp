#include "stocklab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "stocklab/csv.hpp"
#include "stocklab/stats.hpp"

namespace stocklab {

namespace {
constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();
}

MetricsReport pointwise_metrics(const std::vector<double>& actual,
                                const std::vector<double>& predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("actual/predicted length mismatch");
    if (actual.empty()) throw std::invalid_argument("empty input");

    const std::size_t n = actual.size();
    MetricsReport report;
    report.n = n;

    double se = 0.0, ae = 0.0, smape_sum = 0.0;
    bool any_zero_actual = false;
    std::vector<double> ape;
    ape.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double err = actual[i] - predicted[i];
        se += err * err;
        ae += std::abs(err);
        if (actual[i] == 0.0) any_zero_actual = true;
        else ape.push_back(std::abs(err) / std::abs(actual[i]));
        const double denom = (std::abs(actual[i]) + std::abs(predicted[i])) / 2.0;
        smape_sum += denom == 0.0 ? 0.0 : std::abs(err) / denom;
    }
    report.mse = se / static_cast<double>(n);
    report.rmse = std::sqrt(report.mse);
    report.mae = ae / static_cast<double>(n);
    report.smape = smape_sum / static_cast<double>(n);
    if (any_zero_actual) {
        report.mape = kUndefined;
        report.mdape = kUndefined;
    } else {
        double s = 0.0;
        for (double v : ape) s += v;
        report.mape = s / static_cast<double>(n);
        report.mdape = median(ape);
    }

    // SS_tot about the mean of the actuals, both sums in index order so that
    // a mean predictor scores exactly zero.
    double sum_a = 0.0;
    for (double a : actual) sum_a += a;
    const double mean_a = sum_a / static_cast<double>(n);
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss_tot += (actual[i] - mean_a) * (actual[i] - mean_a);
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    }
    report.r2 = ss_tot == 0.0 ? kUndefined : 1.0 - ss_res / ss_tot;
    return report;
}

double interval_coverage(const std::vector<double>& actual, const std::vector<double>& lower,
                         const std::vector<double>& upper) {
    if (actual.size() != lower.size() || actual.size() != upper.size())
        throw std::invalid_argument("coverage length mismatch");
    if (actual.empty()) throw std::invalid_argument("empty input");
    std::size_t inside = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (lower[i] > upper[i]) throw std::invalid_argument("lower > upper at index " + std::to_string(i));
        if (lower[i] <= actual[i] && actual[i] <= upper[i]) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(actual.size());
}

ResidualDiagnostics residual_diagnostics(const std::vector<double>& residuals,
                                         std::size_t n_bins) {
    if (residuals.empty()) throw std::invalid_argument("empty residuals");
    if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");

    ResidualDiagnostics diag;
    const double lo = *std::min_element(residuals.begin(), residuals.end());
    const double hi = *std::max_element(residuals.begin(), residuals.end());
    const double width = (hi - lo) / static_cast<double>(n_bins);
    diag.histogram.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        diag.histogram[b].lower = lo + width * static_cast<double>(b);
        diag.histogram[b].upper = b + 1 == n_bins ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double r : residuals) {
        std::size_t b = 0;
        if (width > 0.0) {
            b = static_cast<std::size_t>((r - lo) / width);
            if (b >= n_bins) b = n_bins - 1;  // the max lands in the last bin
        }
        ++diag.histogram[b].count;
    }

    const std::size_t n = residuals.size();
    const double m = mean(residuals);
    double sd = population_sd(residuals);
    if (sd == 0.0) sd = 1.0;
    std::vector<double> standardized(n);
    for (std::size_t i = 0; i < n; ++i) standardized[i] = (residuals[i] - m) / sd;
    std::sort(standardized.begin(), standardized.end());
    diag.qq.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        diag.qq.emplace_back(normal_quantile(p), standardized[i]);
    }
    return diag;
}

std::string MetricsReport::to_csv() const {
    std::ostringstream out;
    out << "mse,rmse,mae,mape,mdape,smape,r2,n\n"
        << format_double(mse) << ',' << format_double(rmse) << ',' << format_double(mae) << ','
        << format_double(mape) << ',' << format_double(mdape) << ',' << format_double(smape)
        << ',' << format_double(r2) << ',' << n << '\n';
    return out.str();
}

std::string MetricsReport::to_json() const {
    auto field = [](double v) -> std::string {
        return std::isnan(v) ? std::string("null") : format_double(v);
    };
    std::ostringstream out;
    out << "{\"mse\":" << field(mse) << ",\"rmse\":" << field(rmse) << ",\"mae\":" << field(mae)
        << ",\"mape\":" << field(mape) << ",\"mdape\":" << field(mdape)
        << ",\"smape\":" << field(smape) << ",\"r2\":" << field(r2) << ",\"n\":" << n << "}";
    return out.str();
}

void write_residual_histogram_csv(const ResidualDiagnostics& diag, const std::string& path) {
    CsvTable table;
    table.header = {"bin_lower", "bin_upper", "count"};
    for (const auto& bin : diag.histogram)
        table.rows.push_back(
            {format_double(bin.lower), format_double(bin.upper), std::to_string(bin.count)});
    write_csv(path, table);
}

void write_residual_qq_csv(const ResidualDiagnostics& diag, const std::string& path) {
    CsvTable table;
    table.header = {"theoretical_quantile", "ordered_value"};
    for (const auto& [theoretical, ordered] : diag.qq)
        table.rows.push_back({format_double(theoretical), format_double(ordered)});
    write_csv(path, table);
}

}  // namespace stocklab
