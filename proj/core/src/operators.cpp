#include "minkproj/operators.hpp"

#include "minkproj/error.hpp"

namespace minkproj {

namespace {

template<class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::size_t> all_axes(const ModelGrid& grid, const std::vector<std::size_t>& axes)
{
    if (!axes.empty()) {
        return axes;
    }
    std::vector<std::size_t> out(grid.ndims());
    for (std::size_t a = 0; a < out.size(); ++a) {
        out[a] = a;
    }
    return out;
}

std::size_t derivative_rows(const ModelGrid& grid, std::size_t axis)
{
    return grid.size() / grid.extent(axis) * (grid.extent(axis) - 1);
}

} // namespace

SparseMatrix build_derivative(const ModelGrid& grid, std::size_t axis)
{
    const auto n_axis = grid.extent(axis);
    if (n_axis < 2) {
        throw ShapeError("derivative along axis " + std::to_string(axis) + " ("
                         + grid.labels()[axis] + ") needs extent >= 2");
    }
    const auto stride = grid.stride(axis);
    const auto outer = grid.size() / (stride * n_axis);
    std::vector<Triplet> t;
    t.reserve(2 * derivative_rows(grid, axis));
    // Output grid index: inner + stride * (k + (n_axis - 1) * o).
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t k = 0; k + 1 < n_axis; ++k) {
            for (std::size_t inner = 0; inner < stride; ++inner) {
                const auto row = inner + stride * (k + (n_axis - 1) * o);
                const auto col = inner + stride * (k + n_axis * o);
                t.push_back({row, col, -1.0});
                t.push_back({row, col + stride, 1.0});
            }
        }
    }
    return SparseMatrix::from_triplets(derivative_rows(grid, axis), grid.size(), std::move(t));
}

SparseMatrix build_gradient(const ModelGrid& grid, const std::vector<std::size_t>& axes)
{
    std::vector<Triplet> t;
    std::size_t offset = 0;
    for (auto axis : all_axes(grid, axes)) {
        const auto d = build_derivative(grid, axis);
        for (std::size_t r = 0; r < d.rows(); ++r) {
            for (std::size_t k = d.row_ptr()[r]; k < d.row_ptr()[r + 1]; ++k) {
                t.push_back({offset + r, d.col_idx()[k], d.values()[k]});
            }
        }
        offset += d.rows();
    }
    return SparseMatrix::from_triplets(offset, grid.size(), std::move(t));
}

LinearOperatorSpec LinearOperatorSpec::custom(SparseMatrix matrix, std::string source)
{
    return {Custom{std::make_shared<const SparseMatrix>(std::move(matrix)), std::move(source)}};
}

std::vector<std::string> LinearOperatorSpec::check(const ModelGrid& grid) const
{
    std::vector<std::string> issues;
    auto check_axis = [&](std::size_t axis) {
        if (axis >= grid.ndims()) {
            issues.push_back("derivative axis " + std::to_string(axis) + " out of range for grid " + grid.describe());
        } else if (grid.extent(axis) < 2) {
            issues.push_back("derivative axis " + std::to_string(axis) + " has extent 1");
        }
    };
    std::visit(overloaded{
                   [](const Identity&) {},
                   [&](const Derivative& d) { check_axis(d.axis); },
                   [&](const Gradient& g) {
                       for (auto a : all_axes(grid, g.axes)) {
                           check_axis(a);
                       }
                   },
                   [&](const Custom& c) {
                       if (!c.matrix) {
                           issues.push_back("custom operator has no matrix");
                       } else if (c.matrix->cols() != grid.size()) {
                           issues.push_back("custom operator " + c.source + " has " + std::to_string(c.matrix->cols())
                                            + " columns, grid has " + std::to_string(grid.size()) + " cells");
                       }
                   },
               },
               kind_);
    return issues;
}

std::size_t LinearOperatorSpec::output_size(const ModelGrid& grid) const
{
    return std::visit(overloaded{
                          [&](const Identity&) { return grid.size(); },
                          [&](const Derivative& d) { return derivative_rows(grid, d.axis); },
                          [&](const Gradient& g) {
                              std::size_t rows = 0;
                              for (auto a : all_axes(grid, g.axes)) {
                                  rows += derivative_rows(grid, a);
                              }
                              return rows;
                          },
                          [&](const Custom& c) { return c.matrix->rows(); },
                      },
                      kind_);
}

SparseMatrix LinearOperatorSpec::materialize(const ModelGrid& grid) const
{
    if (auto issues = check(grid); !issues.empty()) {
        throw ShapeError(issues.front());
    }
    return std::visit(overloaded{
                          [&](const Identity&) { return SparseMatrix::identity(grid.size()); },
                          [&](const Derivative& d) { return build_derivative(grid, d.axis); },
                          [&](const Gradient& g) { return build_gradient(grid, g.axes); },
                          [&](const Custom& c) { return *c.matrix; },
                      },
                      kind_);
}

std::string LinearOperatorSpec::describe() const
{
    return std::visit(overloaded{
                          [](const Identity&) { return std::string("identity"); },
                          [](const Derivative& d) { return "derivative(axis " + std::to_string(d.axis) + ")"; },
                          [](const Gradient& g) {
                              std::string s = "gradient(";
                              for (std::size_t i = 0; i < g.axes.size(); ++i) {
                                  s += (i ? "," : "") + std::to_string(g.axes[i]);
                              }
                              return s + ")";
                          },
                          [](const Custom& c) { return "custom(" + c.source + ")"; },
                      },
                      kind_);
}

} // namespace minkproj
