#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "stocklab/csv.hpp"
#include "stocklab/errors.hpp"
#include "stocklab/ingest.hpp"
#include "stocklab/rng.hpp"

using namespace stocklab;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = fs::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("load_dataset basics") {
    const auto path = write_temp("stocklab_load.csv",
                                 "Date,Price\n"
                                 "2024-05-01,3.5\n"
                                 "2024-05-02,4.0\n"
                                 "2024-05-03,4.5\n");
    const Frame frame = load_dataset(path, default_schema());
    CHECK(frame.n_rows() == 3);
    CHECK(frame.column("Date").role == ColumnRole::timestamp);
    CHECK(frame.number_at("Price", 1) == 4.0);

    const auto ts_path = write_temp("stocklab_ts.csv", "Date\n2024-05-03 20:30:00\n");
    const Frame ts_frame = load_dataset(ts_path, default_schema());
    const Timestamp ts = ts_frame.timestamps("Date")[0];
    const CivilTime ct = civil_from_timestamp(ts);
    CHECK(ct.year == 2024);
    CHECK(ct.month == 5);
    CHECK(ct.day == 3);
    CHECK(ct.hour == 20);
    CHECK(ct.minute == 30);
    CHECK(format_timestamp(ts) == "2024-05-03 20:30:00");

    const auto empty_path = write_temp("stocklab_empty.csv", "Date,Price\n");
    CHECK(load_dataset(empty_path, default_schema()).n_rows() == 0);
}

TEST_CASE("load_dataset error reporting") {
    CHECK_THROWS_AS(load_dataset("/no/such/file.csv", default_schema()), DataError);

    const auto path = write_temp("stocklab_missing_col.csv", "Price\n1.0\n");
    CHECK_THROWS_AS(load_dataset(path, default_schema(), {"Date"}), DataError);

    const auto bad = write_temp("stocklab_bad_row.csv", "Date,Price\n2024-01-01,notanumber\n");
    try {
        load_dataset(bad, default_schema());
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }

    // Unknown columns are kept as text.
    const auto extra = write_temp("stocklab_extra.csv", "Date,Note\n2024-01-01,hello\n");
    const Frame frame = load_dataset(extra, default_schema());
    CHECK(frame.column("Note").role == ColumnRole::categorical);
}

TEST_CASE("clean imputes numerics with the median and categoricals with the mode") {
    Frame frame;
    {
        Column date{"Date", ColumnRole::timestamp, {}};
        Column qty{"Qty", ColumnRole::numeric, {}};
        Column cat{"Category", ColumnRole::categorical, {}};
        Column flag{"Season_winter", ColumnRole::binary_flag, {}};
        for (int i = 0; i < 3; ++i)
            date.cells.emplace_back(timestamp_from_civil({2024, 1, 3 - i, 0, 0, 0}));
        qty.cells = {Cell{1.0}, Cell{std::monostate{}}, Cell{3.0}};
        cat.cells = {Cell{std::string("Meat")}, Cell{std::string("Meat")}, Cell{std::monostate{}}};
        flag.cells = {Cell{1.0}, Cell{std::monostate{}}, Cell{1.0}};
        frame.add_column(date);
        frame.add_column(qty);
        frame.add_column(cat);
        frame.add_column(flag);
    }
    const Frame cleaned = clean(frame);

    // Sorted ascending by Date: original rows were Jan 3, 2, 1.
    const auto dates = cleaned.timestamps("Date");
    CHECK(dates[0] < dates[1]);
    CHECK(dates[1] < dates[2]);

    const auto qty = cleaned.numeric("Qty");
    CHECK(std::set<double>(qty.begin(), qty.end()) == std::set<double>{1.0, 2.0, 3.0});
    for (const auto& cell : cleaned.column("Category").cells)
        CHECK(std::get<std::string>(cell) == "Meat");
    for (const auto& cell : cleaned.column("Season_winter").cells)
        CHECK(std::get<double>(cell) == 1.0);

    // Idempotent.
    CHECK(clean(cleaned) == cleaned);
}

TEST_CASE("clean mode tie breaks to the smallest value and rejects all-missing columns") {
    Frame frame;
    Column date{"Date", ColumnRole::timestamp, {}};
    Column cat{"Category", ColumnRole::categorical, {}};
    for (int i = 0; i < 3; ++i)
        date.cells.emplace_back(timestamp_from_civil({2024, 1, i + 1, 0, 0, 0}));
    cat.cells = {Cell{std::string("b")}, Cell{std::string("a")}, Cell{std::monostate{}}};
    frame.add_column(date);
    frame.add_column(cat);
    const Frame cleaned = clean(frame);
    CHECK(std::get<std::string>(cleaned.column("Category").cells[2]) == "a");

    Frame broken;
    Column date2{"Date", ColumnRole::timestamp, {Cell{timestamp_from_civil({2024, 1, 1, 0, 0, 0})}}};
    Column empty{"Qty", ColumnRole::numeric, {Cell{std::monostate{}}}};
    broken.add_column(date2);
    broken.add_column(empty);
    CHECK_THROWS_AS(clean(broken), DataError);
}

TEST_CASE("engineer_features adds decompositions, the interaction and dual-sourcing columns") {
    SynthConfig config;
    config.n_days = 40;
    config.seed = 9;
    const Frame frame = generate_synthetic(config);
    const Frame features = engineer_features(frame, ModelKind::lost_sales);

    // Row order and existing columns are untouched.
    for (const auto& col : frame.columns()) {
        CHECK(features.has_column(col.name));
        CHECK(features.column(col.name).cells == col.cells);
    }

    const auto qty = features.numeric("Quantity Sold_x");
    const auto price = features.numeric("Price");
    const auto interaction = features.numeric("Quantity Sold_x Price Interaction");
    for (std::size_t i = 0; i < qty.size(); ++i)
        CHECK(interaction[i] == doctest::Approx(qty[i] * price[i]).epsilon(1e-12));

    CHECK(features.has_column("Date Year"));
    CHECK(features.has_column("Date Minute"));
    CHECK(features.number_at("Date Year", 0) == 2023);

    // 2024-05-03 20:30 decomposes componentwise.
    Frame tiny;
    Column date{"Date", ColumnRole::timestamp, {Cell{timestamp_from_civil({2024, 5, 3, 20, 30, 0})}}};
    Column q{"Quantity Sold_x", ColumnRole::numeric, {Cell{10.0}}};
    Column p{"Price", ColumnRole::numeric, {Cell{2.5}}};
    tiny.add_column(date);
    tiny.add_column(q);
    tiny.add_column(p);
    const Frame tiny_features = engineer_features(tiny, ModelKind::lost_sales);
    CHECK(tiny_features.number_at("Date Year", 0) == 2024);
    CHECK(tiny_features.number_at("Date Month", 0) == 5);
    CHECK(tiny_features.number_at("Date Day", 0) == 3);
    CHECK(tiny_features.number_at("Date Hour", 0) == 20);
    CHECK(tiny_features.number_at("Date Minute", 0) == 30);
    CHECK(tiny_features.number_at("Quantity Sold_x Price Interaction", 0) == 25.0);
    // Absent promotion column materializes as zeros.
    CHECK(tiny_features.number_at("Promotion Type_Discount", 0) == 0.0);

    Frame no_price;
    no_price.add_column(Column{"Quantity Sold_x", ColumnRole::numeric, {Cell{1.0}}});
    CHECK_THROWS_AS(engineer_features(no_price, ModelKind::lost_sales), DataError);
}

TEST_CASE("engineer_features synthesizes dual-sourcing features deterministically") {
    Frame frame;
    Column q{"Quantity Sold_x", ColumnRole::numeric, {}};
    Column p{"Price", ColumnRole::numeric, {}};
    Column s{"Supplier ID Encoded", ColumnRole::numeric, {}};
    for (int i = 0; i < 6; ++i) {
        q.cells.emplace_back(10.0 + i);
        p.cells.emplace_back(2.0);
        s.cells.emplace_back(static_cast<double>(i));
    }
    frame.add_column(q);
    frame.add_column(p);
    frame.add_column(s);

    const Frame a = engineer_features(frame, ModelKind::dual_sourcing);
    const Frame b = engineer_features(frame, ModelKind::dual_sourcing);
    CHECK(a == b);

    const auto reliability = a.numeric("Supplier Reliability Score");
    for (double r : reliability) {
        CHECK(r >= 0.7);
        CHECK(r < 1.0);
    }
    const auto lead = a.numeric("Lead Time");
    for (std::size_t i = 0; i < lead.size(); ++i) CHECK(lead[i] == (i % 2 == 0 ? 5.0 : 10.0));
    const auto diff = a.numeric("Cost Difference");
    for (double d : diff) {
        CHECK(d >= -0.2);
        CHECK(d < 0.2);
    }
}

TEST_CASE("generate_synthetic is deterministic with the full column set") {
    SynthConfig config;
    config.n_days = 500;
    config.seed = 77;
    const Frame a = generate_synthetic(config);
    const Frame b = generate_synthetic(config);
    CHECK(a == b);
    CHECK(a.n_rows() == 500);

    for (const char* name :
         {"Date", "Quantity Sold_x", "Price", "Estimated Lost Sales", "Estimated Demand",
          "Potential Lost Sales", "Lead Time", "Days Until Replenishment", "Replenishment Date",
          "Scheduled Delivery Date", "Date of Stock-out", "Quantity Replenished",
          "Supplier ID Encoded", "Item ID Encoded", "Shelf-life", "Season_winter",
          "Category_Meat", "Category_Produce", "Promotion Type_Discount", "Market Event E010",
          "Supplier Reliability Score", "Cost Difference"})
        CHECK(a.has_column(name));

    // Clean passes the generated frame through unchanged.
    CHECK(clean(a) == a);
}

TEST_CASE("generate_synthetic weekly cycle shows up as a periodogram peak at 7 days") {
    SynthConfig config;
    config.n_days = 280;  // exact multiple of 7 keeps the weekly line in one DFT bin
    config.seed = 5;
    config.trend_slope = 0.0;
    config.weekly_amplitude = 20.0;
    config.yearly_amplitude = 0.0;
    config.noise_sd = 1.0;
    const Frame frame = generate_synthetic(config);
    const auto series = frame.numeric("Quantity Replenished");

    // Discrete Fourier transform oracle.
    const std::size_t n = series.size();
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    std::size_t best_k = 0;
    double best_power = -1.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double arg = -2.0 * 3.14159265358979323846 * static_cast<double>(k) *
                               static_cast<double>(t) / static_cast<double>(n);
            re += (series[t] - mean) * std::cos(arg);
            im += (series[t] - mean) * std::sin(arg);
        }
        const double power = re * re + im * im;
        if (power > best_power) {
            best_power = power;
            best_k = k;
        }
    }
    CHECK(best_k == n / 7);  // period 7 days
}

TEST_CASE("train_test_split partitions deterministically") {
    SynthConfig config;
    config.n_days = 100;
    config.seed = 3;
    const Frame frame = generate_synthetic(config);

    const auto [train_a, test_a] = train_test_split(frame, 0.2, 99);
    CHECK(train_a.n_rows() == 80);
    CHECK(test_a.n_rows() == 20);

    const auto [train_b, test_b] = train_test_split(frame, 0.2, 99);
    CHECK(train_a == train_b);
    CHECK(test_a == test_b);

    // Union of parts recovers the original rows exactly once (the Date
    // column is unique per row here).
    std::multiset<std::int64_t> seen;
    for (const auto& part : {train_a, test_a})
        for (Timestamp ts : part.timestamps("Date")) seen.insert(ts.seconds);
    std::multiset<std::int64_t> expected;
    for (Timestamp ts : frame.timestamps("Date")) expected.insert(ts.seconds);
    CHECK(seen == expected);

    CHECK_THROWS_AS(train_test_split(frame, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(train_test_split(frame, 1.0, 1), std::invalid_argument);
}

TEST_CASE("standardize fit and apply") {
    Matrix two(2, 1);
    two.at(0, 0) = 2.0;
    two.at(1, 0) = 4.0;
    const ScalerParams params = standardize_fit(two);
    CHECK(params.means[0] == 3.0);
    CHECK(params.sds[0] == 1.0);  // population deviation
    const Matrix scaled = standardize_apply(two, params);
    CHECK(scaled.at(0, 0) == -1.0);
    CHECK(scaled.at(1, 0) == 1.0);

    Matrix constant(3, 1);
    for (std::size_t r = 0; r < 3; ++r) constant.at(r, 0) = 5.0;
    const ScalerParams cparams = standardize_fit(constant);
    CHECK(cparams.sds[0] == 1.0);
    const Matrix czero = standardize_apply(constant, cparams);
    for (std::size_t r = 0; r < 3; ++r) CHECK(czero.at(r, 0) == 0.0);

    // Direct recomputation oracle on an arbitrary matrix.
    Matrix m(3, 2);
    m.values = {1.0, -7.5, 4.0, 0.25, 10.0, 3.0};
    const ScalerParams mp = standardize_fit(m);
    const Matrix z = standardize_apply(m, mp);
    for (std::size_t c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < 3; ++r) mean += z.at(r, c);
        mean /= 3.0;
        CHECK(std::abs(mean) < 1e-9);
    }
    const Matrix back = standardize_invert(z, mp);
    for (std::size_t i = 0; i < m.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(m.values[i]).epsilon(1e-9));

    CHECK_THROWS_AS(standardize_fit(Matrix{}), std::invalid_argument);
}

TEST_CASE("csv quoting survives commas, quotes and newlines") {
    const auto path = (fs::temp_directory_path() / "stocklab_quoted.csv").string();
    CsvTable table;
    table.header = {"Date", "Note"};
    table.rows = {{"2024-01-01", "plain"},
                  {"2024-01-02", "comma, inside"},
                  {"2024-01-03", "say \"hi\""},
                  {"2024-01-04", "two\nlines"}};
    write_csv(path, table);
    const CsvTable back = read_csv(path);
    REQUIRE(back.rows.size() == 4);
    CHECK(back.rows[1][1] == "comma, inside");
    CHECK(back.rows[2][1] == "say \"hi\"");
    CHECK(back.rows[3][1] == "two\nlines");

    const Frame frame = load_dataset(path, default_schema());
    CHECK(std::get<std::string>(frame.column("Note").cells[1]) == "comma, inside");
}

TEST_CASE("clean can drop rows whose target is missing") {
    Frame frame;
    Column date{"Date", ColumnRole::timestamp, {}};
    Column target{"Quantity Replenished", ColumnRole::numeric, {}};
    for (int i = 0; i < 4; ++i)
        date.cells.emplace_back(timestamp_from_civil({2024, 2, i + 1, 0, 0, 0}));
    target.cells = {Cell{10.0}, Cell{std::monostate{}}, Cell{30.0}, Cell{std::monostate{}}};
    frame.add_column(date);
    frame.add_column(target);

    CleaningPolicy drop;
    drop.drop_incomplete_target_rows = true;
    drop.target_column = "Quantity Replenished";
    const Frame dropped = clean(frame, drop);
    CHECK(dropped.n_rows() == 2);
    CHECK(dropped.numeric("Quantity Replenished") == std::vector<double>{10.0, 30.0});

    // Default policy keeps the rows and imputes the median instead.
    const Frame imputed = clean(frame);
    CHECK(imputed.n_rows() == 4);
    CHECK(imputed.number_at("Quantity Replenished", 1) == 20.0);
}

TEST_CASE("clean is idempotent on randomly holed frames") {
    Rng rng(404);
    for (int round = 0; round < 10; ++round) {
        SynthConfig config;
        config.n_days = 60;
        config.seed = 1000 + round;
        Frame frame = generate_synthetic(config);
        // Punch random holes in the imputable columns.
        for (auto& col : frame.mutable_columns()) {
            if (col.role == ColumnRole::timestamp || col.name == "Date") continue;
            for (auto& cell : col.cells)
                if (rng.uniform() < 0.15) cell = std::monostate{};
        }
        const Frame once = clean(frame);
        const Frame twice = clean(once);
        CHECK(once == twice);
        for (const auto& col : once.columns()) {
            if (col.role == ColumnRole::timestamp) continue;
            for (const auto& cell : col.cells) CHECK_FALSE(is_missing(cell));
        }
    }
}

TEST_CASE("synth config json round trip") {
    const auto path = write_temp("stocklab_synth.json",
                                 R"({"n_days": 42, "seed": 7, "trend_slope": 0.25,
                                     "weekly_amplitude": 11.0, "yearly_amplitude": 1.5,
                                     "noise_sd": 0.5, "promo_probability": 0.1,
                                     "start_date": "2022-03-01"})");
    const SynthConfig config = synth_config_from_json_file(path);
    CHECK(config.n_days == 42);
    CHECK(config.seed == 7);
    CHECK(config.trend_slope == 0.25);
    CHECK(config.weekly_amplitude == 11.0);
    CHECK(config.yearly_amplitude == 1.5);
    CHECK(config.noise_sd == 0.5);
    CHECK(config.promo_probability == 0.1);
    CHECK(civil_from_timestamp(config.start_date).year == 2022);
}
