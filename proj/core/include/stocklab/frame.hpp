#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "stocklab/timestamp.hpp"

namespace stocklab {

enum class ColumnRole { timestamp, numeric, categorical, binary_flag };

/// One value slot. monostate = missing.
using Cell = std::variant<std::monostate, double, std::string, Timestamp>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

struct Column {
    std::string name;
    ColumnRole role = ColumnRole::numeric;
    std::vector<Cell> cells;

    bool operator==(const Column&) const = default;
};

/// Ordered, column-typed tabular dataset. Immutable by convention once a
/// pipeline stage has produced it; stages return fresh frames.
class Frame {
   public:
    Frame() = default;

    std::size_t n_rows() const { return columns_.empty() ? 0 : columns_.front().cells.size(); }
    std::size_t n_cols() const { return columns_.size(); }

    bool has_column(const std::string& name) const;

    /// Throws std::out_of_range if absent.
    const Column& column(const std::string& name) const;
    Column& column(const std::string& name);
    const Column& column_at(std::size_t i) const { return columns_.at(i); }

    const std::vector<Column>& columns() const { return columns_; }
    std::vector<Column>& mutable_columns() { return columns_; }

    /// Throws std::invalid_argument on duplicate name or row-count mismatch.
    void add_column(Column col);

    /// Numeric view of a column; throws DataError if any cell is missing or
    /// not numeric.
    std::vector<double> numeric(const std::string& name) const;

    /// Timestamp view; same contract as numeric().
    std::vector<Timestamp> timestamps(const std::string& name) const;

    double number_at(const std::string& name, std::size_t row) const;

    /// New frame with rows picked by index, in the given order.
    Frame select_rows(const std::vector<std::size_t>& idx) const;

    /// Reorders rows in place by the permutation (perm[i] = source row of new row i).
    void permute_rows(const std::vector<std::size_t>& perm);

    bool operator==(const Frame& other) const = default;

   private:
    std::vector<Column> columns_;
};

}  // namespace stocklab
