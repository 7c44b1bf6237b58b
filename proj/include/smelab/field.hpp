#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smelab/grid.hpp"

namespace sme {

/// One real value per lattice node of a grid. Outside nodes carry 0 and are never read.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid, double fill = 0.0);
    ScalarField(GridPtr grid, std::vector<double> values);

    /// Sample f at every active node.
    static ScalarField from_function(GridPtr grid, const std::function<double(double, double)>& f);

    const GridPtr& grid() const noexcept { return grid_; }
    const Grid2D& g() const { return *grid_; }

    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double at(int i, int j) const { return values_[grid_->index(i, j)]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    double min_interior() const;
    double max_interior() const;
    std::size_t argmin_interior() const;
    /// max |a - b| over interior nodes.
    double max_abs_diff_interior(const ScalarField& other) const;

    /// Throws StructuralError unless both fields live on the same grid.
    void require_same_grid(const ScalarField& other, const char* op) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Per-node gradient (n = 2 components).
struct VectorField {
    GridPtr grid;
    std::vector<double> x;
    std::vector<double> y;

    double norm(std::size_t k) const { return std::hypot(x[k], y[k]); }
    std::size_t components() const noexcept { return 2; }
};

/// Dirichlet data: one value per boundary node of a grid (evaluated at its anchor point).
class BoundaryData {
public:
    BoundaryData() = default;
    BoundaryData(GridPtr grid, std::vector<double> values, std::string label = "custom");

    static BoundaryData constant(GridPtr grid, double c);
    /// Evaluate f at every boundary anchor point.
    static BoundaryData from_function(GridPtr grid, const std::function<double(double, double)>& f,
                                      std::string label = "function");
    /// Trace of the cone slope*|x - center|.
    static BoundaryData cone_trace(GridPtr grid, double slope, Point center = {});

    const GridPtr& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::string& label() const noexcept { return label_; }
    double min() const;
    double max() const;
    double mean() const;

    /// Copy these values onto the boundary nodes of a field.
    void apply(ScalarField& u) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
    std::string label_;
};

}  // namespace sme
