#pragma once

#include <cstddef>
#include <vector>

namespace stocklab {

/// Standard normal CDF, accurate to machine precision via erfc.
double normal_cdf(double z);

/// Standard normal quantile (inverse CDF) for p in (0, 1). Rational
/// approximation (max relative error ~1.2e-9) polished with one Halley
/// step against erfc, giving near machine precision.
double normal_quantile(double p);

/// Mean with left-to-right accumulation (the order matters for exact
/// reproducibility contracts).
double mean(const std::vector<double>& v);

/// Population variance (divides by n).
double population_variance(const std::vector<double>& v);
double population_sd(const std::vector<double>& v);

/// Median; even-length inputs average the two middle order statistics.
double median(std::vector<double> v);

/// Pearson correlation of two equal-length sequences.
double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace stocklab
