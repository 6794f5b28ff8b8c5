#pragma once

#include <string>
#include <vector>

namespace stocklab {

struct PolicyParams {
    double order_quantity = 0.0;       // Q
    double reorder_point = 0.0;        // s
    double express_quantity = 0.0;     // Q_E
    double express_order_up_to = 0.0;  // S_E
    double regular_quantity = 0.0;     // Q_R
    double regular_order_up_to = 0.0;  // S_R
    double safety_stock = 0.0;         // SS

    void validate() const;
};

/// Per-period demand is Normal(mu, sigma2); lead-time demand over L periods
/// is Normal(mu*L, sigma2*L) under independent increments.
struct DemandModel {
    double mu = 0.0;
    double sigma2 = 0.0;
    double lead_time_1 = 1.0;
    double lead_time_2 = 1.0;

    void validate() const;
};

struct SupplierProfile {
    std::string id;
    double unit_cost = 0.0;
    double reliability = 1.0;      // in (0, 1]
    double cost_difference = 0.0;  // signed fraction
};

struct OrderDecision {
    bool placed = false;
    double units = 0.0;
    std::string supplier;
    std::string status;  // "Order placed" or "Order skipped - below minimum threshold"
};

/// P(D_L > s) for lead-time demand D_L ~ Normal(mu*L, sigma2*L).
double stockout_probability(const DemandModel& model, double reorder_point, int which_lead);

/// Strictly below the reorder point triggers an order.
bool reorder_needed(double inventory_position, double reorder_point);

/// Minimizes unit_cost * (1 + cost_difference) / reliability; ties go to
/// the lexicographically smallest id.
std::string select_supplier(const std::vector<SupplierProfile>& candidates);

OrderDecision place_order(double predicted_quantity, double min_threshold,
                          const std::string& supplier);
inline OrderDecision place_order(double predicted_quantity, const std::string& supplier) {
    return place_order(predicted_quantity, 10.0, supplier);
}

/// (regular, express) = (total * fraction, remainder); the parts sum back
/// to the total exactly.
std::pair<double, double> split_order(double total, double fraction_regular);

void write_order_decisions_csv(const std::vector<OrderDecision>& decisions,
                               const std::string& path);

}  // namespace stocklab
