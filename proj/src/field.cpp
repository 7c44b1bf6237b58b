#include "smelab/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smelab/errors.hpp"

namespace sme {

ScalarField::ScalarField(GridPtr grid, double fill) : grid_(std::move(grid)) {
    if (!grid_) throw StructuralError("ScalarField: null grid");
    values_.assign(grid_->size(), 0.0);
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (grid_->active(k)) values_[k] = fill;
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw StructuralError("ScalarField: null grid");
    if (values_.size() != grid_->size())
        throw StructuralError("ScalarField: value count " + std::to_string(values_.size()) +
                              " does not match grid size " + std::to_string(grid_->size()));
}

ScalarField ScalarField::from_function(GridPtr grid, const std::function<double(double, double)>& f) {
    ScalarField u(grid);
    for (std::size_t k = 0; k < grid->size(); ++k)
        if (grid->active(k)) {
            const Point p = grid->coords(k);
            u.values_[k] = f(p.x, p.y);
        }
    return u;
}

double ScalarField::min_interior() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k : grid_->interior()) m = std::min(m, values_[k]);
    return m;
}

double ScalarField::max_interior() const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k : grid_->interior()) m = std::max(m, values_[k]);
    return m;
}

std::size_t ScalarField::argmin_interior() const {
    const auto& in = grid_->interior();
    return *std::min_element(in.begin(), in.end(),
                             [&](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
}

double ScalarField::max_abs_diff_interior(const ScalarField& other) const {
    require_same_grid(other, "max_abs_diff_interior");
    double m = 0.0;
    for (std::size_t k : grid_->interior()) m = std::max(m, std::abs(values_[k] - other.values_[k]));
    return m;
}

void ScalarField::require_same_grid(const ScalarField& other, const char* op) const {
    if (!grid_ || !other.grid_ || !grid_->same_as(*other.grid_))
        throw StructuralError(std::string(op) + ": fields live on different grids");
}

BoundaryData::BoundaryData(GridPtr grid, std::vector<double> values, std::string label)
    : grid_(std::move(grid)), values_(std::move(values)), label_(std::move(label)) {
    if (!grid_) throw StructuralError("BoundaryData: null grid");
    if (values_.size() != grid_->boundary().size())
        throw StructuralError("BoundaryData: expected " + std::to_string(grid_->boundary().size()) +
                              " boundary values, got " + std::to_string(values_.size()));
}

BoundaryData BoundaryData::constant(GridPtr grid, double c) {
    const std::size_t nb = grid->boundary().size();
    return BoundaryData(std::move(grid), std::vector<double>(nb, c), "constant");
}

BoundaryData BoundaryData::from_function(GridPtr grid, const std::function<double(double, double)>& f,
                                         std::string label) {
    std::vector<double> v(grid->boundary().size());
    for (std::size_t b = 0; b < v.size(); ++b) {
        const Point p = grid->boundary_anchor(b);
        v[b] = f(p.x, p.y);
    }
    return BoundaryData(std::move(grid), std::move(v), std::move(label));
}

BoundaryData BoundaryData::cone_trace(GridPtr grid, double slope, Point center) {
    return from_function(
        std::move(grid), [=](double x, double y) { return slope * std::hypot(x - center.x, y - center.y); },
        "cone");
}

double BoundaryData::min() const { return *std::min_element(values_.begin(), values_.end()); }
double BoundaryData::max() const { return *std::max_element(values_.begin(), values_.end()); }
double BoundaryData::mean() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0) / double(values_.size());
}

void BoundaryData::apply(ScalarField& u) const {
    if (!u.grid()->same_as(*grid_)) throw StructuralError("BoundaryData::apply: grid mismatch");
    const auto& bnd = grid_->boundary();
    for (std::size_t b = 0; b < bnd.size(); ++b) u[bnd[b]] = values_[b];
}

}  // namespace sme
