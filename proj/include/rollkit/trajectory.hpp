#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rollkit {

// Column-named, uniformly indexed time series. Integrators append one row per
// output sample; channels (energy, conserved level, constraint residuals)
// ride along as ordinary columns so runs can be diffed as CSV.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<std::string> columns);

    std::size_t rows() const { return columns_.empty() ? 0 : data_.size() / columns_.size(); }
    std::size_t cols() const { return columns_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }

    void reserve(std::size_t rows);
    void push_row(std::span<const double> row);

    double at(std::size_t row, std::size_t col) const;
    double at(std::size_t row, std::string_view col) const;
    int column_index(std::string_view name) const; // -1 when absent
    std::vector<double> column(std::string_view name) const;

    double front(std::string_view col) const { return at(0, col); }
    double back(std::string_view col) const { return at(rows() - 1, col); }

    // Largest |x - x(0)| over the column, divided by |x(0)|; falls back to
    // the absolute drift when the reference value is exactly zero.
    double relative_drift(std::string_view col) const;
    double max_abs(std::string_view col) const;

    // Free-form metadata, written as a single leading comment line. Keys are
    // emitted sorted, so identical inputs give identical bytes.
    std::map<std::string, std::string> meta;

    void write_csv(std::ostream& os) const;

private:
    std::vector<std::string> columns_;
    std::vector<double> data_;
};

enum class IntegrationStatus { ok, singularity, step_failure };

struct IntegrationResult {
    Trajectory trajectory;
    IntegrationStatus status = IntegrationStatus::ok;
    std::string message;

    bool ok() const { return status == IntegrationStatus::ok; }
};

enum class Method { rk4, rk45 };

struct IntegrateOptions {
    Method method = Method::rk4;
    double dt = 1e-3;        // fixed step (rk4) or initial step (rk45)
    double t_end = 10.0;
    int output_every = 1;    // sample stride, rk4 only
    double abs_tol = 1e-10;  // rk45
    double rel_tol = 1e-10;  // rk45
    double sin_guard = 1e-4; // abort threshold on sin(theta)
};

} // namespace rollkit
