#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "stocklab/envs.hpp"
#include "stocklab/errors.hpp"
#include "stocklab/rng.hpp"

using namespace stocklab;

namespace {

Frame env_frame(std::size_t n) {
    SynthConfig config;
    config.n_days = n;
    config.seed = 99;
    return clean(generate_synthetic(config));
}

// One hand-crafted row: qty 10, price 5, lost 2, days 6, demand 15, lead 4.
Frame single_row_frame() {
    Frame frame;
    auto add = [&frame](const char* name, double v) {
        frame.add_column(Column{name, ColumnRole::numeric, {Cell{v}}});
    };
    add("Quantity Sold_x", 10.0);
    add("Estimated Lost Sales", 2.0);
    add("Days Until Replenishment", 6.0);
    add("Price", 5.0);
    add("Estimated Demand", 15.0);
    add("Lead Time", 4.0);
    return frame;
}

double info_signed_sum(const StepInfo& info) {
    return info.revenue - info.holding_cost - info.lost_sales_cost - info.order_cost -
           info.stockout_penalty - info.transfer_cost - info.price_reduction_cost;
}

}  // namespace

TEST_CASE("cost presets carry the model parameters") {
    const CostParams lost = CostParams::lost_sales_preset();
    CHECK(lost.order_cost_per_unit == 10.0);
    CHECK(lost.holding_cost_per_day == 1.0);
    CHECK(lost.stockout_cost_per_unit == 50.0);
    CHECK(lost.price_reduction_cost == 5.0);
    CHECK(lost.order_quantity == 50.0);

    const CostParams dual = CostParams::dual_sourcing_preset();
    CHECK(dual.order_cost_per_unit == 10.0);
    CHECK(dual.supplier2_order_cost == 15.0);
    CHECK(dual.lead_time_supplier1 == 5);
    CHECK(dual.lead_time_supplier2 == 10);
    CHECK(dual.initial_inventory == 100.0);

    const CostParams multi = CostParams::multi_echelon_preset();
    CHECK(multi.order_cost_per_unit == 20.0);
    CHECK(multi.holding_cost_per_day == 2.0);
    CHECK(multi.stockout_cost_per_unit == 100.0);
    CHECK(multi.transfer_cost == 15.0);
    CHECK(multi.transfer_quantity == 20.0);
}

TEST_CASE("action and observation spaces per preset") {
    const Frame frame = env_frame(30);
    auto lost = make_env(ModelKind::lost_sales, frame, default_costs(ModelKind::lost_sales));
    auto dual = make_env(ModelKind::dual_sourcing, frame, default_costs(ModelKind::dual_sourcing));
    auto multi = make_env(ModelKind::multi_echelon, frame, default_costs(ModelKind::multi_echelon));
    CHECK(lost.action_count() == 3);
    CHECK(dual.action_count() == 4);
    CHECK(multi.action_count() == 4);
    CHECK(lost.observation_size() == 3);
    CHECK(dual.observation_size() == 5);
    CHECK(multi.observation_size() == 5);

    Frame missing;
    missing.add_column(Column{"Price", ColumnRole::numeric, {Cell{1.0}}});
    CHECK_THROWS_AS(make_env(ModelKind::lost_sales, missing, CostParams{}), DataError);
    CHECK_THROWS_AS(make_env(ModelKind::lost_sales, Frame{}, CostParams{}), DataError);
}

TEST_CASE("reset restores the initial state") {
    const Frame frame = env_frame(20);
    auto env = make_env(ModelKind::dual_sourcing, frame, default_costs(ModelKind::dual_sourcing));
    const auto first = env.reset();
    env.step(0);
    env.step(2);
    const auto second = env.reset();
    CHECK(first == second);
    CHECK(env.supplier_inventory(1) == 100.0);
    CHECK(env.supplier_inventory(2) == 100.0);
    CHECK(env.pending_orders().empty());
    for (double v : first) CHECK(v >= 0.0);
}

TEST_CASE("lost-sales reward assembly on the hand example") {
    const Frame frame = single_row_frame();
    auto env = make_env(ModelKind::lost_sales, frame, default_costs(ModelKind::lost_sales));

    SUBCASE("no action: revenue minus holding, lost sales and stockout") {
        env.reset();
        const auto outcome = env.step(1);
        // 10*5 - 1*(6/30) - 2*5 - 0 - 50 = -10.2
        CHECK(outcome.reward == doctest::Approx(-10.2).epsilon(1e-12));
        CHECK(outcome.info.revenue == doctest::Approx(50.0));
        CHECK(outcome.info.holding_cost == doctest::Approx(0.2));
        CHECK(outcome.info.lost_sales_cost == doctest::Approx(10.0));
        CHECK(outcome.info.stockout_penalty == 50.0);
        CHECK(outcome.info.order_cost == 0.0);
        CHECK(outcome.done);
    }

    SUBCASE("order stock: lost sales zeroed, lead time becomes the wait") {
        env.reset();
        const auto outcome = env.step(0);
        CHECK(outcome.info.order_cost == doctest::Approx(500.0));  // 10 * 50
        CHECK(outcome.info.lost_sales_cost == 0.0);
        CHECK(outcome.info.holding_cost == doctest::Approx(4.0 / 30.0));
        // Next-state observation shows zero lost sales and the lead time.
        CHECK(outcome.observation[1] == 0.0);
        CHECK(outcome.observation[2] == 4.0);
    }

    SUBCASE("price cut: 10 percent off price, 10 percent more sold") {
        env.reset();
        const auto outcome = env.step(2);
        CHECK(outcome.info.price_reduction_cost == 5.0);
        CHECK(outcome.info.revenue == doctest::Approx(10.0 * 1.1 * 5.0 * 0.9));
        CHECK(outcome.info.lost_sales_cost == doctest::Approx(2.0 * 4.5));
    }

    SUBCASE("bad actions and stepping after the end") {
        env.reset();
        CHECK_THROWS_AS(env.step(3), std::invalid_argument);
        env.step(1);
        CHECK_THROWS_AS(env.step(1), std::logic_error);
    }
}

TEST_CASE("dual-sourcing orders arrive exactly after their lead times") {
    const Frame frame = env_frame(30);
    auto env = make_env(ModelKind::dual_sourcing, frame, default_costs(ModelKind::dual_sourcing));
    env.reset();

    const auto outcome = env.step(2);  // both suppliers at step 0
    CHECK(outcome.info.order_cost == doctest::Approx(1250.0));  // (10 + 15) * 50
    CHECK(env.pending_orders().size() == 2);

    // Supplier 1 delivery lands at the start of step 5, supplier 2 at step 10.
    for (std::size_t t = 1; t < 12; ++t) {
        const double inv1_before = env.supplier_inventory(1);
        const double inv2_before = env.supplier_inventory(2);
        env.step(3);
        if (t == 5) {
            CHECK(env.supplier_inventory(1) == inv1_before + 50.0);
        } else {
            CHECK(env.supplier_inventory(1) == inv1_before);
        }
        if (t == 10) {
            CHECK(env.supplier_inventory(2) == inv2_before + 50.0);
        } else {
            CHECK(env.supplier_inventory(2) == inv2_before);
        }
    }
    CHECK(env.pending_orders().empty());
}

TEST_CASE("dual-sourcing single-supplier actions") {
    const Frame frame = env_frame(15);
    auto env = make_env(ModelKind::dual_sourcing, frame, default_costs(ModelKind::dual_sourcing));
    env.reset();
    const auto s1 = env.step(0);
    CHECK(s1.info.order_cost == doctest::Approx(500.0));  // 10 * 50
    const auto s2 = env.step(1);
    CHECK(s2.info.order_cost == doctest::Approx(750.0));  // 15 * 50
    const auto none = env.step(3);
    CHECK(none.info.order_cost == 0.0);
}

TEST_CASE("multi-echelon transfers conserve total inventory") {
    const Frame frame = env_frame(30);
    auto env = make_env(ModelKind::multi_echelon, frame, default_costs(ModelKind::multi_echelon));
    env.reset();
    const double total_before = env.echelon_inventory(1) + env.echelon_inventory(2);

    const auto outcome = env.step(2);
    CHECK(outcome.info.transfer_cost == 15.0);
    CHECK(env.echelon_inventory(1) == 80.0);
    CHECK(env.echelon_inventory(2) == 120.0);
    CHECK(env.echelon_inventory(1) + env.echelon_inventory(2) == total_before);

    // Drain echelon 1; the transfer clamps at zero and still conserves.
    for (int i = 0; i < 6; ++i) env.step(2);
    CHECK(env.echelon_inventory(1) == 0.0);
    CHECK(env.echelon_inventory(1) + env.echelon_inventory(2) == total_before);

    auto env2 = make_env(ModelKind::multi_echelon, frame, default_costs(ModelKind::multi_echelon));
    env2.reset();
    const auto order_fast = env2.step(0);
    CHECK(order_fast.info.order_cost == doctest::Approx(1000.0));  // 20 * 50
    CHECK(order_fast.observation[2] == 5.0);
    const auto order_slow = env2.step(1);
    CHECK(order_slow.observation[2] == 3.0);
    CHECK(order_slow.info.holding_cost == doctest::Approx(2.0 * (3.0 / 30.0)));
}

TEST_CASE("wraparound versus done-flag episode ends") {
    const Frame frame = env_frame(5);

    auto wrap = make_env(ModelKind::lost_sales, frame, default_costs(ModelKind::lost_sales), true);
    const auto start_obs = wrap.reset();
    StepOutcome last;
    for (int i = 0; i < 5; ++i) last = wrap.step(1);
    CHECK(last.done);
    CHECK(last.observation == start_obs);  // back at row 0
    CHECK_NOTHROW(wrap.step(1));           // stepping continues after the wrap

    auto flat = make_env(ModelKind::lost_sales, frame, default_costs(ModelKind::lost_sales));
    flat.reset();
    StepOutcome flat_last;
    for (int i = 0; i < 5; ++i) flat_last = flat.step(1);
    CHECK(flat_last.done);
    CHECK_THROWS_AS(flat.step(1), std::logic_error);

    // Accounting is identical in both modes for the same rows.
    CHECK(info_signed_sum(last.info) == info_signed_sum(flat_last.info));
    CHECK(last.info.revenue == flat_last.info.revenue);

    // The wraparound entry point itself.
    CHECK(wrap.wrap_to_start() == start_obs);
}

TEST_CASE("accounting identity holds over random rollouts") {
    const Frame frame = env_frame(60);
    Rng rng(7);
    for (ModelKind kind :
         {ModelKind::lost_sales, ModelKind::dual_sourcing, ModelKind::multi_echelon}) {
        auto env = make_env(kind, frame, default_costs(kind), true);
        env.reset();
        for (int i = 0; i < 1000; ++i) {
            const auto action = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(env.action_count()) - 1));
            const auto outcome = env.step(action);
            CHECK(outcome.reward == info_signed_sum(outcome.info));
            for (double v : outcome.observation) CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("identical action sequences give identical reward sequences") {
    const Frame frame = env_frame(40);
    auto run = [&frame]() {
        auto env = make_env(ModelKind::dual_sourcing, frame,
                            default_costs(ModelKind::dual_sourcing), true);
        env.reset();
        Rng rng(5);
        std::vector<double> rewards;
        for (int i = 0; i < 200; ++i)
            rewards.push_back(
                env.step(static_cast<std::size_t>(rng.uniform_int(0, 3))).reward);
        return rewards;
    };
    const auto a = run();
    const auto b = run();
    CHECK(a == b);
}

TEST_CASE("episode traces serialize to CSV") {
    const Frame frame = env_frame(8);
    auto env = make_env(ModelKind::lost_sales, frame, default_costs(ModelKind::lost_sales));
    env.reset();
    std::vector<TraceRow> trace;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto outcome = env.step(i % 3);
        trace.push_back({i, i % 3, outcome.reward, outcome.info, outcome.observation});
    }
    const auto path = std::filesystem::temp_directory_path() / "stocklab_trace.csv";
    write_episode_trace_csv(trace, path.string());
    CHECK(std::filesystem::file_size(path) > 0);
}
