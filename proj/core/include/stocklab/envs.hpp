#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "stocklab/frame.hpp"
#include "stocklab/ingest.hpp"

namespace stocklab {

/// Observation vector. The first three components are always
/// (quantity_sold, estimated_lost_sales, days_until_replenishment); the
/// dual-sourcing and multi-echelon presets append their two inventory
/// levels. Every component is floored at zero.
using EnvObservation = std::vector<double>;

struct CostParams {
    double order_cost_per_unit = 10.0;
    double holding_cost_per_day = 1.0;
    double stockout_cost_per_unit = 50.0;
    double price_reduction_cost = 5.0;
    double supplier2_order_cost = 15.0;  // dual-sourcing
    double transfer_cost = 15.0;         // multi-echelon
    double order_quantity = 50.0;
    double transfer_quantity = 20.0;     // multi-echelon
    std::int64_t lead_time_supplier1 = 5;
    std::int64_t lead_time_supplier2 = 10;
    double initial_inventory = 100.0;

    static CostParams lost_sales_preset();
    static CostParams dual_sourcing_preset();
    static CostParams multi_echelon_preset();
};

struct PendingOrder {
    int supplier = 1;
    std::size_t due_step = 0;  // absolute step count, strictly after placement
    double quantity = 0.0;
};

/// Accounting terms of one step. The reward is always
/// revenue - holding - lost_sales - order - stockout - transfer - price_reduction.
struct StepInfo {
    double revenue = 0.0;
    double holding_cost = 0.0;
    double lost_sales_cost = 0.0;
    double order_cost = 0.0;
    double stockout_penalty = 0.0;
    double transfer_cost = 0.0;
    double price_reduction_cost = 0.0;

    std::map<std::string, double> as_map() const;
    double signed_sum() const;
};

struct StepOutcome {
    EnvObservation observation;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

/// Discrete-time simulator driven row by row through a cleaned frame.
/// Action effects apply to the current step's accounting; the only
/// cross-step state is the pending-order queue, the inventory levels, and
/// the observation overrides of an order action.
class InventoryEnv {
   public:
    InventoryEnv(ModelKind kind, Frame frame, CostParams costs, bool wraparound = false);

    ModelKind kind() const { return kind_; }
    std::size_t action_count() const;
    std::size_t observation_size() const;
    std::size_t frame_length() const { return n_rows_; }

    EnvObservation reset();

    /// Throws std::invalid_argument for a bad action index and
    /// std::logic_error when stepping a finished episode.
    StepOutcome step(std::size_t action);

    /// Cursor back to row 0 (wraparound mode); returns the row-0 observation.
    EnvObservation wrap_to_start();

    bool wraparound() const { return wraparound_; }

    double supplier_inventory(int supplier) const;
    double echelon_inventory(int echelon) const;
    const std::deque<PendingOrder>& pending_orders() const { return pending_; }

   private:
    struct RowView {
        double quantity_sold = 0.0;
        double estimated_lost_sales = 0.0;
        double days_until_replenishment = 0.0;
        double price = 0.0;
        double estimated_demand = 0.0;
        double lead_time = 0.0;
    };
    RowView row(std::size_t r) const;
    EnvObservation observe(std::size_t r) const;

    ModelKind kind_;
    Frame frame_;
    CostParams costs_;
    bool wraparound_;
    std::size_t n_rows_ = 0;

    std::size_t cursor_ = 0;
    std::size_t absolute_step_ = 0;
    bool done_ = false;
    double inventory1_ = 0.0;  // supplier 1 / echelon 1
    double inventory2_ = 0.0;  // supplier 2 / echelon 2
    std::deque<PendingOrder> pending_;

    // Observation overrides from an order action, valid for the next
    // observation only.
    bool override_lost_sales_ = false;
    bool override_days_ = false;
    double override_days_value_ = 0.0;
};

/// Validates the preset's required columns and builds the environment.
InventoryEnv make_env(ModelKind kind, const Frame& frame, const CostParams& costs,
                      bool wraparound = false);

CostParams default_costs(ModelKind kind);

struct TraceRow {
    std::size_t step = 0;
    std::size_t action = 0;
    double reward = 0.0;
    StepInfo info;
    EnvObservation observation;
};

void write_episode_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace stocklab
