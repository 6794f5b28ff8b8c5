#include "stocklab/envs.hpp"

#include <algorithm>
#include <stdexcept>

#include "stocklab/csv.hpp"
#include "stocklab/errors.hpp"

namespace stocklab {

CostParams CostParams::lost_sales_preset() {
    CostParams p;
    p.order_cost_per_unit = 10.0;
    p.holding_cost_per_day = 1.0;
    p.stockout_cost_per_unit = 50.0;
    p.price_reduction_cost = 5.0;
    p.order_quantity = 50.0;
    return p;
}

CostParams CostParams::dual_sourcing_preset() {
    CostParams p = lost_sales_preset();
    p.supplier2_order_cost = 15.0;
    p.lead_time_supplier1 = 5;
    p.lead_time_supplier2 = 10;
    p.initial_inventory = 100.0;
    return p;
}

CostParams CostParams::multi_echelon_preset() {
    CostParams p = lost_sales_preset();
    p.order_cost_per_unit = 20.0;
    p.holding_cost_per_day = 2.0;
    p.stockout_cost_per_unit = 100.0;
    p.transfer_cost = 15.0;
    p.transfer_quantity = 20.0;
    p.initial_inventory = 100.0;
    return p;
}

CostParams default_costs(ModelKind kind) {
    switch (kind) {
        case ModelKind::lost_sales: return CostParams::lost_sales_preset();
        case ModelKind::dual_sourcing: return CostParams::dual_sourcing_preset();
        case ModelKind::multi_echelon: return CostParams::multi_echelon_preset();
    }
    return CostParams::lost_sales_preset();
}

std::map<std::string, double> StepInfo::as_map() const {
    return {{"revenue", revenue},
            {"holding_cost", holding_cost},
            {"lost_sales_cost", lost_sales_cost},
            {"order_cost", order_cost},
            {"stockout_penalty", stockout_penalty},
            {"transfer_cost", transfer_cost},
            {"price_reduction_cost", price_reduction_cost}};
}

double StepInfo::signed_sum() const {
    return revenue - holding_cost - lost_sales_cost - order_cost - stockout_penalty -
           transfer_cost - price_reduction_cost;
}

namespace {
const char* kRequiredColumns[] = {"Quantity Sold_x", "Estimated Lost Sales",
                                  "Days Until Replenishment", "Price", "Estimated Demand",
                                  "Lead Time"};
}

InventoryEnv::InventoryEnv(ModelKind kind, Frame frame, CostParams costs, bool wraparound)
    : kind_(kind), frame_(std::move(frame)), costs_(costs), wraparound_(wraparound) {
    n_rows_ = frame_.n_rows();
    if (n_rows_ == 0) throw DataError("environment frame is empty");
    for (const char* name : kRequiredColumns)
        if (!frame_.has_column(name)) throw DataError(std::string("missing column '") + name + "'");
    reset();
}

InventoryEnv make_env(ModelKind kind, const Frame& frame, const CostParams& costs,
                      bool wraparound) {
    return InventoryEnv(kind, frame, costs, wraparound);
}

std::size_t InventoryEnv::action_count() const {
    return kind_ == ModelKind::lost_sales ? 3 : 4;
}

std::size_t InventoryEnv::observation_size() const {
    return kind_ == ModelKind::lost_sales ? 3 : 5;
}

InventoryEnv::RowView InventoryEnv::row(std::size_t r) const {
    RowView view;
    view.quantity_sold = frame_.number_at("Quantity Sold_x", r);
    view.estimated_lost_sales = frame_.number_at("Estimated Lost Sales", r);
    view.days_until_replenishment = frame_.number_at("Days Until Replenishment", r);
    view.price = frame_.number_at("Price", r);
    view.estimated_demand = frame_.number_at("Estimated Demand", r);
    view.lead_time = frame_.number_at("Lead Time", r);
    return view;
}

EnvObservation InventoryEnv::observe(std::size_t r) const {
    const RowView view = row(r);
    EnvObservation obs{std::max(0.0, view.quantity_sold),
                       std::max(0.0, override_lost_sales_ ? 0.0 : view.estimated_lost_sales),
                       std::max(0.0, override_days_ ? override_days_value_
                                                    : view.days_until_replenishment)};
    if (kind_ != ModelKind::lost_sales) {
        obs.push_back(std::max(0.0, inventory1_));
        obs.push_back(std::max(0.0, inventory2_));
    }
    return obs;
}

EnvObservation InventoryEnv::reset() {
    cursor_ = 0;
    absolute_step_ = 0;
    done_ = false;
    pending_.clear();
    override_lost_sales_ = false;
    override_days_ = false;
    override_days_value_ = 0.0;
    inventory1_ = kind_ == ModelKind::lost_sales ? 0.0 : costs_.initial_inventory;
    inventory2_ = inventory1_;
    return observe(0);
}

EnvObservation InventoryEnv::wrap_to_start() {
    cursor_ = 0;
    done_ = false;
    return observe(0);
}

StepOutcome InventoryEnv::step(std::size_t action) {
    if (action >= action_count())
        throw std::invalid_argument("invalid action index " + std::to_string(action));
    if (done_) throw std::logic_error("step after episode end; call reset()");

    const RowView base = row(cursor_);
    double quantity_sold = base.quantity_sold;
    double estimated_lost_sales = base.estimated_lost_sales;
    double days_until_replenishment = base.days_until_replenishment;
    double price = base.price;

    StepInfo info;
    override_lost_sales_ = false;
    override_days_ = false;

    // Deliveries due now arrive before any accounting.
    if (kind_ == ModelKind::dual_sourcing) {
        for (auto it = pending_.begin(); it != pending_.end();) {
            if (it->due_step == absolute_step_) {
                (it->supplier == 1 ? inventory1_ : inventory2_) += it->quantity;
                it = pending_.erase(it);
            } else {
                ++it;
            }
        }
    }

    switch (kind_) {
        case ModelKind::lost_sales:
            if (action == 0) {  // order stock
                estimated_lost_sales = 0.0;
                days_until_replenishment = base.lead_time;
                info.order_cost = costs_.order_cost_per_unit * costs_.order_quantity;
                override_lost_sales_ = true;
                override_days_ = true;
                override_days_value_ = base.lead_time;
            } else if (action == 2) {  // reduce prices
                price *= 0.9;
                quantity_sold *= 1.1;
                info.price_reduction_cost = costs_.price_reduction_cost;
            }
            break;
        case ModelKind::dual_sourcing:
            if (action == 0 || action == 2) {
                pending_.push_back({1, absolute_step_ + static_cast<std::size_t>(
                                                            costs_.lead_time_supplier1),
                                    costs_.order_quantity});
                info.order_cost += costs_.order_cost_per_unit * costs_.order_quantity;
            }
            if (action == 1 || action == 2) {
                pending_.push_back({2, absolute_step_ + static_cast<std::size_t>(
                                                            costs_.lead_time_supplier2),
                                    costs_.order_quantity});
                info.order_cost += costs_.supplier2_order_cost * costs_.order_quantity;
            }
            break;
        case ModelKind::multi_echelon:
            if (action == 0 || action == 1) {
                days_until_replenishment = action == 0 ? 5.0 : 3.0;
                info.order_cost = costs_.order_cost_per_unit * costs_.order_quantity;
                override_days_ = true;
                override_days_value_ = days_until_replenishment;
            } else if (action == 2) {
                // Transfer echelon 1 -> echelon 2, clamped to what is on hand.
                const double moved = std::min(costs_.transfer_quantity, std::max(0.0, inventory1_));
                inventory1_ -= moved;
                inventory2_ += moved;
                info.transfer_cost = costs_.transfer_cost;
                quantity_sold += moved;
            }
            break;
    }

    info.revenue = quantity_sold * price;
    info.holding_cost = costs_.holding_cost_per_day * (days_until_replenishment / 30.0);
    info.lost_sales_cost = estimated_lost_sales * price;
    if (quantity_sold < estimated_lost_sales + base.estimated_demand)
        info.stockout_penalty = costs_.stockout_cost_per_unit;

    StepOutcome outcome;
    outcome.info = info;
    outcome.reward = info.signed_sum();

    ++absolute_step_;
    ++cursor_;
    if (cursor_ >= n_rows_) {
        outcome.done = true;
        if (wraparound_) {
            cursor_ = 0;
            done_ = false;
        } else {
            done_ = true;
        }
        outcome.observation = observe(wraparound_ ? 0 : n_rows_ - 1);
    } else {
        outcome.observation = observe(cursor_);
    }
    return outcome;
}

double InventoryEnv::supplier_inventory(int supplier) const {
    return supplier == 1 ? inventory1_ : inventory2_;
}

double InventoryEnv::echelon_inventory(int echelon) const {
    return echelon == 1 ? inventory1_ : inventory2_;
}

void write_episode_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
    CsvTable table;
    table.header = {"step",          "action",           "reward",
                    "revenue",       "holding_cost",     "lost_sales_cost",
                    "order_cost",    "stockout_penalty", "transfer_cost",
                    "price_reduction_cost"};
    std::size_t obs_width = 0;
    for (const auto& row : trace) obs_width = std::max(obs_width, row.observation.size());
    for (std::size_t i = 0; i < obs_width; ++i) table.header.push_back("obs_" + std::to_string(i));
    for (const auto& row : trace) {
        std::vector<std::string> fields{std::to_string(row.step),
                                        std::to_string(row.action),
                                        format_double(row.reward),
                                        format_double(row.info.revenue),
                                        format_double(row.info.holding_cost),
                                        format_double(row.info.lost_sales_cost),
                                        format_double(row.info.order_cost),
                                        format_double(row.info.stockout_penalty),
                                        format_double(row.info.transfer_cost),
                                        format_double(row.info.price_reduction_cost)};
        for (std::size_t i = 0; i < obs_width; ++i)
            fields.push_back(i < row.observation.size() ? format_double(row.observation[i]) : "");
        table.rows.push_back(std::move(fields));
    }
    write_csv(path, table);
}

}  // namespace stocklab
