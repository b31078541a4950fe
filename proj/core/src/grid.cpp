#include "minkproj/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minkproj/error.hpp"

namespace minkproj {

SpecError::SpecError(std::vector<std::string> issues)
    : Error([&] {
          std::string msg = "invalid specification";
          for (const auto& issue : issues) {
              msg += "\n  - " + issue;
          }
          return msg;
      }())
    , issues_(std::move(issues))
{
}

ModelGrid::ModelGrid(std::vector<std::size_t> dims, std::vector<std::string> labels)
    : dims_(std::move(dims))
    , labels_(std::move(labels))
{
    if (dims_.size() != 2 && dims_.size() != 3) {
        throw ShapeError("grid must have 2 or 3 dimensions, got " + std::to_string(dims_.size()));
    }
    if (std::any_of(dims_.begin(), dims_.end(), [](std::size_t n) { return n == 0; })) {
        throw ShapeError("grid extents must be >= 1");
    }
    if (labels_.empty()) {
        labels_ = dims_.size() == 2 ? std::vector<std::string>{"z", "x"}
                                    : std::vector<std::string>{"x", "y", "t"};
    }
    if (labels_.size() != dims_.size()) {
        throw ShapeError("grid needs one label per axis");
    }
    size_ = 1;
    for (auto n : dims_) {
        size_ *= n;
    }
}

std::size_t ModelGrid::extent(std::size_t axis) const
{
    if (axis >= dims_.size()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for " + describe());
    }
    return dims_[axis];
}

std::size_t ModelGrid::stride(std::size_t axis) const
{
    extent(axis);
    std::size_t s = 1;
    for (std::size_t a = 0; a < axis; ++a) {
        s *= dims_[a];
    }
    return s;
}

std::size_t ModelGrid::index(std::span<const std::size_t> subscript) const
{
    if (subscript.size() != dims_.size()) {
        throw ShapeError("subscript rank does not match grid");
    }
    std::size_t idx = 0;
    for (std::size_t a = dims_.size(); a-- > 0;) {
        if (subscript[a] >= dims_[a]) {
            throw ShapeError("subscript out of range");
        }
        idx = idx * dims_[a] + subscript[a];
    }
    return idx;
}

std::size_t ModelGrid::slice_size() const
{
    return size_ / dims_.back();
}

std::string ModelGrid::describe() const
{
    std::ostringstream os;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
        os << (a ? " x " : "") << dims_[a];
    }
    return os.str();
}

ModelVector::ModelVector(ModelGrid grid, Vector data)
    : grid_(std::move(grid))
    , data_(std::move(data))
{
    if (data_.size() != grid_.size()) {
        throw ShapeError("model vector has " + std::to_string(data_.size())
                         + " values but grid " + grid_.describe() + " has "
                         + std::to_string(grid_.size()) + " cells");
    }
    for (double x : data_) {
        if (!std::isfinite(x)) {
            throw ShapeError("model vector contains a non-finite value");
        }
    }
}

ModelVector ModelVector::zeros(const ModelGrid& grid)
{
    return constant(grid, 0.0);
}

ModelVector ModelVector::constant(const ModelGrid& grid, double value)
{
    return ModelVector(grid, Vector(grid.size(), value));
}

StackedVector::StackedVector(ModelVector u, ModelVector v)
    : u_(std::move(u))
    , v_(std::move(v))
{
    if (!(u_.grid() == v_.grid())) {
        throw ShapeError("components live on different grids: " + u_.grid().describe()
                         + " vs " + v_.grid().describe());
    }
}

Vector StackedVector::flat() const
{
    Vector x;
    x.reserve(size());
    x.insert(x.end(), u_.values().begin(), u_.values().end());
    x.insert(x.end(), v_.values().begin(), v_.values().end());
    return x;
}

StackedVector StackedVector::from_flat(const ModelGrid& grid, std::span<const double> x)
{
    const auto n = grid.size();
    if (x.size() != 2 * n) {
        throw ShapeError("stacked vector must have length 2N");
    }
    return {ModelVector(grid, Vector(x.begin(), x.begin() + n)),
            ModelVector(grid, Vector(x.begin() + n, x.end()))};
}

StackedVector join(ModelVector u, ModelVector v)
{
    return {std::move(u), std::move(v)};
}

std::pair<ModelVector, ModelVector> split(const StackedVector& x)
{
    return {x.u(), x.v()};
}

ModelVector sum_of(const StackedVector& x)
{
    Vector w(x.u().size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = x.u()[i] + x.v()[i];
    }
    return {x.grid(), std::move(w)};
}

ModelVector vectorize(const ModelGrid& grid, std::span<const double> c_order)
{
    if (c_order.size() != grid.size()) {
        throw ShapeError("array with " + std::to_string(c_order.size())
                         + " entries does not match grid " + grid.describe());
    }
    const auto& dims = grid.dims();
    Vector out(grid.size());
    std::vector<std::size_t> sub(dims.size(), 0);
    // Walk the C-order array with an odometer whose last axis runs fastest.
    for (std::size_t k = 0; k < c_order.size(); ++k) {
        out[grid.index(sub)] = c_order[k];
        for (std::size_t a = dims.size(); a-- > 0;) {
            if (++sub[a] < dims[a]) {
                break;
            }
            sub[a] = 0;
        }
    }
    return {grid, std::move(out)};
}

ModelVector vectorize(const ModelGrid& grid, const std::vector<std::vector<double>>& rows)
{
    if (grid.ndims() != 2 || rows.size() != grid.extent(0)) {
        throw ShapeError("nested array shape does not match grid " + grid.describe());
    }
    Vector c_order;
    c_order.reserve(grid.size());
    for (const auto& row : rows) {
        if (row.size() != grid.extent(1)) {
            throw ShapeError("ragged nested array for grid " + grid.describe());
        }
        c_order.insert(c_order.end(), row.begin(), row.end());
    }
    return vectorize(grid, c_order);
}

Vector devectorize(const ModelVector& m)
{
    const auto& grid = m.grid();
    const auto& dims = grid.dims();
    Vector out(grid.size());
    std::vector<std::size_t> sub(dims.size(), 0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = m[grid.index(sub)];
        for (std::size_t a = dims.size(); a-- > 0;) {
            if (++sub[a] < dims[a]) {
                break;
            }
            sub[a] = 0;
        }
    }
    return out;
}

Eigen::MatrixXd matricize_2d(const ModelVector& m)
{
    const auto& grid = m.grid();
    if (grid.ndims() != 2) {
        throw ShapeError("matricize_2d needs a 2D grid; handle 3D grids slice by slice");
    }
    return Eigen::Map<const Eigen::MatrixXd>(m.values().data(),
                                             static_cast<Eigen::Index>(grid.extent(0)),
                                             static_cast<Eigen::Index>(grid.extent(1)));
}

ModelVector dematricize_2d(const ModelGrid& grid, const Eigen::MatrixXd& matrix)
{
    if (grid.ndims() != 2 || static_cast<std::size_t>(matrix.rows()) != grid.extent(0)
        || static_cast<std::size_t>(matrix.cols()) != grid.extent(1)) {
        throw ShapeError("matrix shape does not match grid " + grid.describe());
    }
    return {grid, Vector(matrix.data(), matrix.data() + matrix.size())};
}

} // namespace minkproj
