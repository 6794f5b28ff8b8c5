#include "stocklab/decide.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "stocklab/csv.hpp"
#include "stocklab/stats.hpp"

namespace stocklab {

namespace {
const char* kPlaced = "Order placed";
const char* kSkipped = "Order skipped - below minimum threshold";
}  // namespace

void PolicyParams::validate() const {
    for (double v : {order_quantity, reorder_point, express_quantity, express_order_up_to,
                     regular_quantity, regular_order_up_to, safety_stock})
        if (v < 0.0) throw std::invalid_argument("policy parameters must be nonnegative");
    if (express_order_up_to < express_quantity || regular_order_up_to < regular_quantity)
        throw std::invalid_argument("order-up-to levels must cover their order quantities");
}

void DemandModel::validate() const {
    if (sigma2 < 0.0) throw std::invalid_argument("sigma2 must be >= 0");
    if (lead_time_1 <= 0.0 || lead_time_2 <= 0.0)
        throw std::invalid_argument("lead times must be positive");
}

double stockout_probability(const DemandModel& model, double reorder_point, int which_lead) {
    model.validate();
    if (which_lead != 1 && which_lead != 2)
        throw std::invalid_argument("which_lead must be 1 or 2");
    const double lead = which_lead == 1 ? model.lead_time_1 : model.lead_time_2;
    const double mean = model.mu * lead;
    const double variance = model.sigma2 * lead;
    if (variance == 0.0) return reorder_point < mean ? 1.0 : 0.0;
    const double z = (reorder_point - mean) / std::sqrt(variance);
    return 1.0 - normal_cdf(z);
}

bool reorder_needed(double inventory_position, double reorder_point) {
    return inventory_position < reorder_point;
}

std::string select_supplier(const std::vector<SupplierProfile>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("no supplier candidates");
    const SupplierProfile* best = nullptr;
    double best_score = 0.0;
    for (const auto& candidate : candidates) {
        if (!(candidate.reliability > 0.0 && candidate.reliability <= 1.0))
            throw std::invalid_argument("reliability must be in (0,1]");
        const double score =
            candidate.unit_cost * (1.0 + candidate.cost_difference) / candidate.reliability;
        if (best == nullptr || score < best_score ||
            (score == best_score && candidate.id < best->id)) {
            best = &candidate;
            best_score = score;
        }
    }
    return best->id;
}

OrderDecision place_order(double predicted_quantity, double min_threshold,
                          const std::string& supplier) {
    if (predicted_quantity < 0.0)
        throw std::invalid_argument("predicted quantity must be nonnegative");
    OrderDecision decision;
    decision.units = predicted_quantity;
    decision.supplier = supplier;
    decision.placed = predicted_quantity >= min_threshold;
    decision.status = decision.placed ? kPlaced : kSkipped;
    return decision;
}

std::pair<double, double> split_order(double total, double fraction_regular) {
    if (!(fraction_regular >= 0.0 && fraction_regular <= 1.0))
        throw std::invalid_argument("fraction must be in [0,1]");
    // The parts must sum back to the total exactly. Correct express by the
    // (exactly representable) residual; when the exact sum falls halfway
    // between doubles on both sides of the total, round-to-even can never
    // land on it, so shift regular's sub-ulp phase by one ulp and retry.
    double regular = total * fraction_regular;
    for (int attempt = 0; attempt < 4; ++attempt) {
        double express = total - regular;
        for (int i = 0; i < 2 && regular + express != total; ++i)
            express += total - (regular + express);
        if (regular + express == total) return {regular, express};
        regular = std::nextafter(regular, 0.0);
    }
    return {regular, total - regular};
}

void write_order_decisions_csv(const std::vector<OrderDecision>& decisions,
                               const std::string& path) {
    CsvTable table;
    table.header = {"Supplier", "Units", "Status"};
    for (const auto& d : decisions) {
        char units[32];
        std::snprintf(units, sizeof(units), "%.2f", d.units);
        table.rows.push_back({d.supplier, units, d.status});
    }
    write_csv(path, table);
}

}  // namespace stocklab
