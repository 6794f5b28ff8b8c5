#include "stocklab/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "stocklab/csv.hpp"
#include "stocklab/errors.hpp"
#include "stocklab/rng.hpp"

namespace stocklab {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::lost_sales: return "lost-sales";
        case ModelKind::dual_sourcing: return "dual-sourcing";
        case ModelKind::multi_echelon: return "multi-echelon";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& text) {
    if (text == "lost-sales" || text == "lost_sales") return ModelKind::lost_sales;
    if (text == "dual-sourcing" || text == "dual_sourcing") return ModelKind::dual_sourcing;
    if (text == "multi-echelon" || text == "multi_echelon") return ModelKind::multi_echelon;
    throw std::invalid_argument("unknown preset '" + text + "'");
}

void SynthConfig::validate() const {
    if (n_days < 1) throw std::invalid_argument("n_days must be >= 1");
    if (noise_sd < 0.0) throw std::invalid_argument("noise_sd must be >= 0");
    if (promo_probability < 0.0 || promo_probability > 1.0)
        throw std::invalid_argument("promo_probability must be in [0,1]");
}

namespace {

const char* kDateColumns[] = {"Date", "Replenishment Date", "Scheduled Delivery Date",
                              "Date of Stock-out"};

bool parse_number(const std::string& text, double& out) {
    const char* begin = text.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end != begin && *end == '\0';
}

}  // namespace

Schema default_schema() {
    Schema s;
    s["Date"] = ColumnRole::timestamp;
    s["Replenishment Date"] = ColumnRole::timestamp;
    s["Scheduled Delivery Date"] = ColumnRole::timestamp;
    s["Date of Stock-out"] = ColumnRole::timestamp;
    for (const char* name :
         {"Quantity Sold_x", "Price", "Estimated Lost Sales", "Estimated Demand",
          "Potential Lost Sales", "Lead Time", "Days Until Replenishment", "Quantity Replenished",
          "Supplier ID Encoded", "Item ID Encoded", "Shelf-life", "Supplier Reliability Score",
          "Cost Difference"})
        s[name] = ColumnRole::numeric;
    for (const char* name : {"Season_winter", "Category_Meat", "Category_Produce",
                             "Promotion Type_Discount", "Market Event E010"})
        s[name] = ColumnRole::binary_flag;
    return s;
}

Frame load_dataset(const std::string& path, const Schema& schema,
                   const std::vector<std::string>& required_columns) {
    const CsvTable table = read_csv(path);

    for (const auto& required : required_columns) {
        if (std::find(table.header.begin(), table.header.end(), required) == table.header.end())
            throw DataError("header missing required column '" + required + "'");
    }
    {
        std::set<std::string> seen;
        for (const auto& h : table.header)
            if (!seen.insert(h).second) throw DataError("duplicate column '" + h + "' in header");
    }

    Frame frame;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        Column col;
        col.name = table.header[c];
        auto it = schema.find(col.name);
        col.role = it == schema.end() ? ColumnRole::categorical : it->second;
        col.cells.reserve(table.rows.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const std::string& text = table.rows[r][c];
            if (text.empty()) {
                col.cells.emplace_back(std::monostate{});
                continue;
            }
            switch (col.role) {
                case ColumnRole::numeric:
                case ColumnRole::binary_flag: {
                    double v;
                    if (!parse_number(text, v))
                        throw DataError("row " + std::to_string(r + 2) + ": cannot parse '" + text +
                                        "' as a number in column '" + col.name + "'");
                    col.cells.emplace_back(v);
                    break;
                }
                case ColumnRole::timestamp: {
                    Timestamp ts;
                    if (!try_parse_timestamp(text, ts))
                        throw DataError("row " + std::to_string(r + 2) + ": cannot parse '" + text +
                                        "' as a timestamp in column '" + col.name + "'");
                    col.cells.emplace_back(ts);
                    break;
                }
                case ColumnRole::categorical:
                    col.cells.emplace_back(text);
                    break;
            }
        }
        frame.add_column(std::move(col));
    }
    return frame;
}

namespace {

void parse_date_column(Column& col) {
    col.role = ColumnRole::timestamp;
    for (auto& cell : col.cells) {
        if (const std::string* text = std::get_if<std::string>(&cell)) {
            Timestamp ts;
            if (try_parse_timestamp(*text, ts)) cell = ts;
            else cell = std::monostate{};
        } else if (std::holds_alternative<double>(cell)) {
            cell = std::monostate{};
        }
    }
}

void impute_numeric_median(Column& col) {
    std::vector<double> present;
    for (const auto& cell : col.cells)
        if (const double* v = std::get_if<double>(&cell)) present.push_back(*v);
    if (present.empty())
        throw DataError("column '" + col.name + "' is entirely missing; cannot impute");
    std::sort(present.begin(), present.end());
    const std::size_t n = present.size();
    const double med =
        n % 2 == 1 ? present[n / 2] : 0.5 * (present[n / 2 - 1] + present[n / 2]);
    for (auto& cell : col.cells)
        if (is_missing(cell)) cell = med;
}

// Frequency ties break to the smallest value.
void impute_categorical_mode(Column& col) {
    std::map<std::string, std::size_t> counts;
    for (const auto& cell : col.cells)
        if (const std::string* v = std::get_if<std::string>(&cell)) ++counts[*v];
    if (counts.empty())
        throw DataError("column '" + col.name + "' is entirely missing; cannot impute");
    std::string mode;
    std::size_t best = 0;
    for (const auto& [value, count] : counts) {
        if (count > best) {  // map iterates in lexicographic order
            best = count;
            mode = value;
        }
    }
    for (auto& cell : col.cells)
        if (is_missing(cell)) cell = mode;
}

void impute_flag_mode(Column& col) {
    std::map<double, std::size_t> counts;
    for (const auto& cell : col.cells)
        if (const double* v = std::get_if<double>(&cell)) ++counts[*v];
    if (counts.empty())
        throw DataError("column '" + col.name + "' is entirely missing; cannot impute");
    double mode = 0.0;
    std::size_t best = 0;
    for (const auto& [value, count] : counts) {
        if (count > best) {
            best = count;
            mode = value;
        }
    }
    for (auto& cell : col.cells)
        if (is_missing(cell)) cell = mode;
}

}  // namespace

Frame clean(const Frame& frame, const CleaningPolicy& policy) {
    Frame out = frame;

    // Dates first, then numerics, then categoricals; the order keeps
    // imputation deterministic.
    for (const char* name : kDateColumns)
        if (out.has_column(name)) parse_date_column(out.column(name));

    std::vector<std::size_t> keep;
    const std::size_t n = out.n_rows();
    const bool has_date = out.has_column("Date");
    for (std::size_t r = 0; r < n; ++r) {
        if (has_date && is_missing(out.column("Date").cells[r])) continue;
        if (policy.drop_incomplete_target_rows && !policy.target_column.empty() &&
            out.has_column(policy.target_column) &&
            is_missing(out.column(policy.target_column).cells[r]))
            continue;
        keep.push_back(r);
    }
    if (keep.size() != n) out = out.select_rows(keep);

    for (auto& col : out.mutable_columns()) {
        switch (col.role) {
            case ColumnRole::numeric: impute_numeric_median(col); break;
            case ColumnRole::categorical: impute_categorical_mode(col); break;
            case ColumnRole::binary_flag: impute_flag_mode(col); break;
            case ColumnRole::timestamp: break;
        }
    }

    if (has_date) {
        const auto dates = out.timestamps("Date");
        std::vector<std::size_t> order(dates.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&dates](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
        out.permute_rows(order);
    }
    return out;
}

namespace {

void add_numeric_column(Frame& frame, const std::string& name, std::vector<double> values) {
    Column col;
    col.name = name;
    col.role = ColumnRole::numeric;
    col.cells.reserve(values.size());
    for (double v : values) col.cells.emplace_back(v);
    frame.add_column(std::move(col));
}

// Fixed stream so the same frame always gets the same simulated features.
constexpr std::uint64_t kFeatureSynthSeed = 0x5717CEB0C5A21ABCull;

}  // namespace

Frame engineer_features(const Frame& frame, ModelKind kind) {
    for (const char* required : {"Quantity Sold_x", "Price"})
        if (!frame.has_column(required))
            throw DataError(std::string("feature engineering requires column '") + required + "'");
    if (kind == ModelKind::dual_sourcing && !frame.has_column("Lead Time") &&
        !frame.has_column("Supplier ID Encoded"))
        throw DataError("dual-sourcing features need 'Lead Time' or 'Supplier ID Encoded'");

    Frame out = frame;
    const std::size_t n = out.n_rows();

    // Date decompositions for every timestamp column present.
    std::vector<std::string> ts_columns;
    for (const auto& col : out.columns())
        if (col.role == ColumnRole::timestamp) ts_columns.push_back(col.name);
    for (const auto& name : ts_columns) {
        const Column& src = out.column(name);
        // Missing timestamps decompose to missing cells.
        std::vector<Cell> year(n), month(n), day(n), hour(n), minute(n);
        for (std::size_t r = 0; r < n; ++r) {
            const Timestamp* ts = std::get_if<Timestamp>(&src.cells[r]);
            if (ts == nullptr) continue;
            const CivilTime ct = civil_from_timestamp(*ts);
            year[r] = static_cast<double>(ct.year);
            month[r] = static_cast<double>(ct.month);
            day[r] = static_cast<double>(ct.day);
            hour[r] = static_cast<double>(ct.hour);
            minute[r] = static_cast<double>(ct.minute);
        }
        auto add_cells = [&out](const std::string& col_name, std::vector<Cell> cells) {
            out.add_column(Column{col_name, ColumnRole::numeric, std::move(cells)});
        };
        add_cells(name + " Year", std::move(year));
        add_cells(name + " Month", std::move(month));
        add_cells(name + " Day", std::move(day));
        add_cells(name + " Hour", std::move(hour));
        add_cells(name + " Minute", std::move(minute));
    }

    {
        const auto qty = out.numeric("Quantity Sold_x");
        const auto price = out.numeric("Price");
        std::vector<double> interaction(n);
        for (std::size_t r = 0; r < n; ++r) interaction[r] = qty[r] * price[r];
        add_numeric_column(out, "Quantity Sold_x Price Interaction", std::move(interaction));
    }

    if (out.has_column("Promotion Type_Discount")) {
        for (auto& cell : out.column("Promotion Type_Discount").cells)
            if (is_missing(cell)) cell = 0.0;
    } else {
        add_numeric_column(out, "Promotion Type_Discount", std::vector<double>(n, 0.0));
        out.column("Promotion Type_Discount").role = ColumnRole::binary_flag;
    }

    if (kind == ModelKind::dual_sourcing) {
        if (!out.has_column("Supplier Reliability Score")) {
            std::vector<double> score(n);
            for (std::size_t r = 0; r < n; ++r) {
                Rng rng(Rng::derive_seed(kFeatureSynthSeed, r));
                score[r] = rng.uniform(0.7, 1.0);
            }
            add_numeric_column(out, "Supplier Reliability Score", std::move(score));
        }
        if (!out.has_column("Lead Time")) {
            const auto supplier = out.numeric("Supplier ID Encoded");
            std::vector<double> lead(n);
            for (std::size_t r = 0; r < n; ++r)
                lead[r] = static_cast<std::int64_t>(supplier[r]) % 2 == 0 ? 5.0 : 10.0;
            add_numeric_column(out, "Lead Time", std::move(lead));
        }
        if (!out.has_column("Cost Difference")) {
            std::vector<double> diff(n);
            for (std::size_t r = 0; r < n; ++r) {
                Rng rng(Rng::derive_seed(kFeatureSynthSeed ^ 0xABCDull, r));
                diff[r] = rng.uniform(-0.2, 0.2);
            }
            add_numeric_column(out, "Cost Difference", std::move(diff));
        }
    }
    return out;
}

Frame generate_synthetic(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const std::size_t n = config.n_days;
    constexpr double two_pi = 6.283185307179586476925286766559;

    std::vector<Timestamp> date(n), replenish(n), delivery(n), stockout_date(n);
    std::vector<double> qty_sold(n), price(n), est_demand(n), est_lost(n), pot_lost(n),
        qty_repl(n), supplier(n), item(n), shelf(n), lead(n), days_until(n), season(n), meat(n),
        produce(n), promo(n), event(n), reliability(n), cost_diff(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        const double seasonal = config.weekly_amplitude * std::sin(two_pi * t / 7.0) +
                                config.yearly_amplitude * std::sin(two_pi * t / 365.25);
        const double base = config.trend_slope * t + seasonal;

        date[i] = Timestamp{config.start_date.seconds + static_cast<std::int64_t>(i) *
                                                            Timestamp::seconds_per_day};

        qty_sold[i] = std::max(0.0, 100.0 + base + config.noise_sd * rng.normal());
        price[i] = std::max(0.5, 5.0 + 0.5 * std::sin(two_pi * t / 30.0) +
                                     0.1 * config.noise_sd * rng.normal());
        est_demand[i] = std::max(0.0, 112.0 + base + config.noise_sd * rng.normal());
        // Lost sales sit above sales so that unmet demand dominates revenue,
        // keeping simulated rewards negative as in understocked retail data.
        est_lost[i] = std::max(0.0, 110.0 + base + config.noise_sd * rng.normal());
        pot_lost[i] = std::max(0.0, 55.0 + base + config.noise_sd * rng.normal());
        qty_repl[i] = std::max(0.0, 100.0 + base + config.noise_sd * rng.normal());

        supplier[i] = static_cast<double>(rng.uniform_int(0, 49));
        item[i] = static_cast<double>(rng.uniform_int(0, 99));
        shelf[i] = static_cast<double>(rng.uniform_int(3, 30));
        lead[i] = static_cast<std::int64_t>(supplier[i]) % 2 == 0 ? 5.0 : 10.0;
        days_until[i] = static_cast<double>(rng.uniform_int(0, static_cast<std::int64_t>(lead[i])));

        replenish[i] = date[i].plus_days(days_until[i]);
        delivery[i] = date[i].plus_days(days_until[i] + lead[i]);
        stockout_date[i] = date[i].plus_days(static_cast<double>(rng.uniform_int(1, 20)));

        const CivilTime ct = civil_from_timestamp(date[i]);
        season[i] = (ct.month == 12 || ct.month <= 2) ? 1.0 : 0.0;
        const int item_mod = static_cast<int>(item[i]) % 3;
        meat[i] = item_mod == 0 ? 1.0 : 0.0;
        produce[i] = item_mod == 1 ? 1.0 : 0.0;
        promo[i] = rng.uniform() < config.promo_probability ? 1.0 : 0.0;
        event[i] = rng.uniform() < 0.05 ? 1.0 : 0.0;
        reliability[i] = rng.uniform(0.7, 1.0);
        cost_diff[i] = rng.uniform(-0.2, 0.2);
    }

    Frame frame;
    auto add_ts = [&frame](const std::string& name, const std::vector<Timestamp>& values) {
        Column col;
        col.name = name;
        col.role = ColumnRole::timestamp;
        for (Timestamp ts : values) col.cells.emplace_back(ts);
        frame.add_column(std::move(col));
    };
    auto add_flag = [&frame](const std::string& name, const std::vector<double>& values) {
        Column col;
        col.name = name;
        col.role = ColumnRole::binary_flag;
        for (double v : values) col.cells.emplace_back(v);
        frame.add_column(std::move(col));
    };

    add_ts("Date", date);
    add_numeric_column(frame, "Quantity Sold_x", qty_sold);
    add_numeric_column(frame, "Price", price);
    add_numeric_column(frame, "Estimated Lost Sales", est_lost);
    add_numeric_column(frame, "Estimated Demand", est_demand);
    add_numeric_column(frame, "Potential Lost Sales", pot_lost);
    add_numeric_column(frame, "Lead Time", lead);
    add_numeric_column(frame, "Days Until Replenishment", days_until);
    add_ts("Replenishment Date", replenish);
    add_ts("Scheduled Delivery Date", delivery);
    add_ts("Date of Stock-out", stockout_date);
    add_numeric_column(frame, "Quantity Replenished", qty_repl);
    add_numeric_column(frame, "Supplier ID Encoded", supplier);
    add_numeric_column(frame, "Item ID Encoded", item);
    add_numeric_column(frame, "Shelf-life", shelf);
    add_flag("Season_winter", season);
    add_flag("Category_Meat", meat);
    add_flag("Category_Produce", produce);
    add_flag("Promotion Type_Discount", promo);
    add_flag("Market Event E010", event);
    add_numeric_column(frame, "Supplier Reliability Score", reliability);
    add_numeric_column(frame, "Cost Difference", cost_diff);
    return frame;
}

std::pair<Frame, Frame> train_test_split(const Frame& frame, double test_fraction,
                                         std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must be in (0,1)");
    const std::size_t n = frame.n_rows();
    if (n < 2) throw std::invalid_argument("need at least 2 rows to split");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
        std::swap(order[i], order[j]);
    }

    const std::size_t n_test =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    std::vector<std::size_t> test_idx(order.begin(), order.begin() + n_test);
    std::vector<std::size_t> train_idx(order.begin() + n_test, order.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    return {frame.select_rows(train_idx), frame.select_rows(test_idx)};
}

ScalerParams standardize_fit(const Matrix& X) {
    if (X.empty()) throw std::invalid_argument("cannot fit a scaler on an empty matrix");
    ScalerParams params;
    params.means.resize(X.cols);
    params.sds.resize(X.cols);
    for (std::size_t c = 0; c < X.cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < X.rows; ++r) sum += X.at(r, c);
        const double mean = sum / static_cast<double>(X.rows);
        double ss = 0.0;
        for (std::size_t r = 0; r < X.rows; ++r) {
            const double d = X.at(r, c) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(X.rows));
        params.means[c] = mean;
        params.sds[c] = sd > 0.0 ? sd : 1.0;
    }
    return params;
}

Matrix standardize_apply(const Matrix& X, const ScalerParams& params) {
    if (X.cols != params.means.size())
        throw std::invalid_argument("scaler/matrix column count mismatch");
    Matrix out = X;
    for (std::size_t r = 0; r < X.rows; ++r)
        for (std::size_t c = 0; c < X.cols; ++c)
            out.at(r, c) = (X.at(r, c) - params.means[c]) / params.sds[c];
    return out;
}

Matrix standardize_invert(const Matrix& X, const ScalerParams& params) {
    if (X.cols != params.means.size())
        throw std::invalid_argument("scaler/matrix column count mismatch");
    Matrix out = X;
    for (std::size_t r = 0; r < X.rows; ++r)
        for (std::size_t c = 0; c < X.cols; ++c)
            out.at(r, c) = X.at(r, c) * params.sds[c] + params.means[c];
    return out;
}

Matrix feature_matrix(const Frame& frame, const std::vector<std::string>& exclude,
                      std::vector<std::string>* names_out) {
    std::vector<const Column*> chosen;
    for (const auto& col : frame.columns()) {
        if (col.role != ColumnRole::numeric && col.role != ColumnRole::binary_flag) continue;
        if (std::find(exclude.begin(), exclude.end(), col.name) != exclude.end()) continue;
        chosen.push_back(&col);
    }
    Matrix X(frame.n_rows(), chosen.size());
    for (std::size_t c = 0; c < chosen.size(); ++c) {
        for (std::size_t r = 0; r < frame.n_rows(); ++r) {
            const double* v = std::get_if<double>(&chosen[c]->cells[r]);
            if (v == nullptr)
                throw DataError("column '" + chosen[c]->name + "' has a missing value at row " +
                                std::to_string(r));
            X.at(r, c) = *v;
        }
    }
    if (names_out) {
        names_out->clear();
        for (const Column* col : chosen) names_out->push_back(col->name);
    }
    return X;
}

SynthConfig synth_config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError(std::string("bad JSON in ") + path + ": " + e.what());
    }
    SynthConfig config;
    if (j.contains("n_days")) config.n_days = j.at("n_days").get<std::size_t>();
    if (j.contains("start_date")) {
        Timestamp ts;
        if (!try_parse_timestamp(j.at("start_date").get<std::string>(), ts))
            throw DataError("bad start_date in " + path);
        config.start_date = ts;
    }
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trend_slope")) config.trend_slope = j.at("trend_slope").get<double>();
    if (j.contains("weekly_amplitude"))
        config.weekly_amplitude = j.at("weekly_amplitude").get<double>();
    if (j.contains("yearly_amplitude"))
        config.yearly_amplitude = j.at("yearly_amplitude").get<double>();
    if (j.contains("noise_sd")) config.noise_sd = j.at("noise_sd").get<double>();
    if (j.contains("promo_probability"))
        config.promo_probability = j.at("promo_probability").get<double>();
    return config;
}

void write_frame_csv(const Frame& frame, const std::string& path) {
    CsvTable table;
    for (const auto& col : frame.columns()) table.header.push_back(col.name);
    table.rows.resize(frame.n_rows());
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        auto& row = table.rows[r];
        row.reserve(frame.n_cols());
        for (const auto& col : frame.columns()) {
            const Cell& cell = col.cells[r];
            if (is_missing(cell)) {
                row.emplace_back();
            } else if (const double* v = std::get_if<double>(&cell)) {
                row.push_back(format_double(*v));
            } else if (const Timestamp* ts = std::get_if<Timestamp>(&cell)) {
                row.push_back(format_timestamp(*ts));
            } else {
                row.push_back(std::get<std::string>(cell));
            }
        }
    }
    write_csv(path, table);
}

}  // namespace stocklab
