#include "stocklab/frame.hpp"

#include <stdexcept>

#include "stocklab/errors.hpp"

namespace stocklab {

bool Frame::has_column(const std::string& name) const {
    for (const auto& c : columns_)
        if (c.name == name) return true;
    return false;
}

const Column& Frame::column(const std::string& name) const {
    for (const auto& c : columns_)
        if (c.name == name) return c;
    throw std::out_of_range("no column named '" + name + "'");
}

Column& Frame::column(const std::string& name) {
    for (auto& c : columns_)
        if (c.name == name) return c;
    throw std::out_of_range("no column named '" + name + "'");
}

void Frame::add_column(Column col) {
    if (has_column(col.name)) throw std::invalid_argument("duplicate column '" + col.name + "'");
    if (!columns_.empty() && col.cells.size() != n_rows())
        throw std::invalid_argument("column '" + col.name + "' row count mismatch");
    columns_.push_back(std::move(col));
}

std::vector<double> Frame::numeric(const std::string& name) const {
    const Column& col = column(name);
    std::vector<double> out;
    out.reserve(col.cells.size());
    for (std::size_t i = 0; i < col.cells.size(); ++i) {
        const double* v = std::get_if<double>(&col.cells[i]);
        if (v == nullptr)
            throw DataError("column '" + name + "' is not numeric-complete at row " +
                            std::to_string(i));
        out.push_back(*v);
    }
    return out;
}

std::vector<Timestamp> Frame::timestamps(const std::string& name) const {
    const Column& col = column(name);
    std::vector<Timestamp> out;
    out.reserve(col.cells.size());
    for (std::size_t i = 0; i < col.cells.size(); ++i) {
        const Timestamp* v = std::get_if<Timestamp>(&col.cells[i]);
        if (v == nullptr)
            throw DataError("column '" + name + "' is not timestamp-complete at row " +
                            std::to_string(i));
        out.push_back(*v);
    }
    return out;
}

double Frame::number_at(const std::string& name, std::size_t row) const {
    const Column& col = column(name);
    const double* v = std::get_if<double>(&col.cells.at(row));
    if (v == nullptr)
        throw DataError("column '" + name + "' has no numeric value at row " + std::to_string(row));
    return *v;
}

Frame Frame::select_rows(const std::vector<std::size_t>& idx) const {
    Frame out;
    for (const auto& c : columns_) {
        Column nc;
        nc.name = c.name;
        nc.role = c.role;
        nc.cells.reserve(idx.size());
        for (std::size_t i : idx) nc.cells.push_back(c.cells.at(i));
        out.add_column(std::move(nc));
    }
    return out;
}

void Frame::permute_rows(const std::vector<std::size_t>& perm) {
    for (auto& c : columns_) {
        std::vector<Cell> next(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) next[i] = c.cells.at(perm[i]);
        c.cells = std::move(next);
    }
}

}  // namespace stocklab
