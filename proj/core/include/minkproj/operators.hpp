#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "minkproj/grid.hpp"
#include "minkproj/sparse.hpp"

namespace minkproj {

/// Forward first difference along one axis, without wrap-around:
/// (D m)[k] = m[k + stride] - m[k]. The output lives on the grid whose extent
/// along `axis` is one smaller, vectorized with the same first-axis-fastest
/// order, so it has N * (n_axis - 1) / n_axis rows.
SparseMatrix build_derivative(const ModelGrid& grid, std::size_t axis);

/// Vertical stack of first differences along each listed axis
/// (anisotropic total variation when followed by an l1 norm).
SparseMatrix build_gradient(const ModelGrid& grid, const std::vector<std::size_t>& axes);

/// Transform-domain operator attached to a constraint.
class LinearOperatorSpec {
public:
    struct Identity {};
    struct Derivative {
        std::size_t axis;
    };
    struct Gradient {
        std::vector<std::size_t> axes; // empty: every axis
    };
    struct Custom {
        std::shared_ptr<const SparseMatrix> matrix;
        std::string source;
    };
    using Kind = std::variant<Identity, Derivative, Gradient, Custom>;

    LinearOperatorSpec() = default;
    LinearOperatorSpec(Kind kind) : kind_(std::move(kind)) {}

    static LinearOperatorSpec identity() { return {Identity{}}; }
    static LinearOperatorSpec derivative(std::size_t axis) { return {Derivative{axis}}; }
    static LinearOperatorSpec gradient(std::vector<std::size_t> axes = {}) { return {Gradient{std::move(axes)}}; }
    static LinearOperatorSpec custom(SparseMatrix matrix, std::string source = "in-memory");

    const Kind& kind() const noexcept { return kind_; }
    bool is_identity() const noexcept { return std::holds_alternative<Identity>(kind_); }

    /// Problems with applying this operator on `grid` (empty when fine).
    std::vector<std::string> check(const ModelGrid& grid) const;
    std::size_t output_size(const ModelGrid& grid) const;
    SparseMatrix materialize(const ModelGrid& grid) const;
    std::string describe() const;

private:
    Kind kind_ = Identity{};
};

} // namespace minkproj
