#include "rollkit/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rollkit/common.hpp"

namespace rollkit {

Trajectory::Trajectory(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Trajectory::reserve(std::size_t rows) { data_.reserve(rows * columns_.size()); }

void Trajectory::push_row(std::span<const double> row) {
    if (row.size() != columns_.size())
        throw std::invalid_argument("Trajectory::push_row: column count mismatch");
    data_.insert(data_.end(), row.begin(), row.end());
}

double Trajectory::at(std::size_t row, std::size_t col) const {
    return data_.at(row * columns_.size() + col);
}

double Trajectory::at(std::size_t row, std::string_view col) const {
    const int c = column_index(col);
    if (c < 0) throw std::out_of_range("Trajectory: no column " + std::string(col));
    return at(row, static_cast<std::size_t>(c));
}

int Trajectory::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> Trajectory::column(std::string_view name) const {
    const int c = column_index(name);
    if (c < 0) throw std::out_of_range("Trajectory: no column " + std::string(name));
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, static_cast<std::size_t>(c));
    return out;
}

double Trajectory::relative_drift(std::string_view col) const {
    if (rows() == 0) return 0.0;
    const std::size_t c = static_cast<std::size_t>(column_index(col));
    const double ref = at(0, c);
    double worst = 0.0;
    for (std::size_t i = 0; i < rows(); ++i)
        worst = std::max(worst, std::abs(at(i, c) - ref));
    return ref != 0.0 ? worst / std::abs(ref) : worst;
}

double Trajectory::max_abs(std::string_view col) const {
    const std::size_t c = static_cast<std::size_t>(column_index(col));
    double worst = 0.0;
    for (std::size_t i = 0; i < rows(); ++i)
        worst = std::max(worst, std::abs(at(i, c)));
    return worst;
}

void Trajectory::write_csv(std::ostream& os) const {
    if (!meta.empty()) {
        os << '#';
        for (const auto& [k, v] : meta) os << ' ' << k << '=' << v;
        os << '\n';
    }
    for (std::size_t i = 0; i < columns_.size(); ++i)
        os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t c = 0; c < columns_.size(); ++c)
            os << (c ? "," : "") << fmt_sci(at(r, c));
        os << '\n';
    }
}

} // namespace rollkit
