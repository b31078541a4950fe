#include "minkproj/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "minkproj/error.hpp"
#include "minkproj/parallel.hpp"

namespace minkproj {

namespace {

template<class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double norm2(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return std::sqrt(s);
}

void check_bound_pair(const Bound& lower, const Bound& upper, const char* what, std::vector<std::string>& issues)
{
    if (!lower.is_scalar() && !upper.is_scalar() && lower.size() != upper.size()) {
        issues.push_back(std::string(what) + ": lower and upper bounds have different lengths");
        return;
    }
    const auto n = std::max(lower.size(), upper.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(lower[i]) || std::isnan(upper[i])) {
            issues.push_back(std::string(what) + ": NaN bound at entry " + std::to_string(i));
            return;
        }
        if (lower[i] > upper[i]) {
            issues.push_back(std::string(what) + ": lower bound exceeds upper bound at entry " + std::to_string(i)
                             + " (" + std::to_string(lower[i]) + " > " + std::to_string(upper[i]) + ")");
            return;
        }
    }
}

void check_length(const Bound& b, std::size_t dim, const char* what, std::vector<std::string>& issues)
{
    if (!b.is_scalar() && b.size() != dim) {
        issues.push_back(std::string(what) + " has " + std::to_string(b.size()) + " entries, expected "
                         + std::to_string(dim));
    }
}

void check_slices(const std::vector<IndexRange>& slices, std::size_t dim, std::size_t k,
                  std::vector<std::string>& issues)
{
    if (slices.empty()) {
        if (k > dim) {
            issues.push_back("cardinality k = " + std::to_string(k) + " exceeds length " + std::to_string(dim));
        }
        return;
    }
    for (const auto& s : slices) {
        if (s.begin + s.length > dim) {
            issues.push_back("cardinality slice [" + std::to_string(s.begin) + ", "
                             + std::to_string(s.begin + s.length) + ") exceeds length " + std::to_string(dim));
            return;
        }
        if (k > s.length) {
            issues.push_back("cardinality k = " + std::to_string(k) + " exceeds slice length "
                             + std::to_string(s.length));
            return;
        }
    }
}

void clamp_into(std::span<const double> y, const Bound& lower, const Bound& upper, std::span<double> out)
{
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = std::min(std::max(y[i], lower[i]), upper[i]);
    }
}

void l1_into(std::span<const double> y, double sigma, std::span<double> out)
{
    double l1 = 0.0;
    for (double v : y) {
        l1 += std::abs(v);
    }
    if (l1 <= sigma) {
        std::copy(y.begin(), y.end(), out.begin());
        return;
    }
    if (sigma <= 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    Vector mag(y.size());
    std::transform(y.begin(), y.end(), mag.begin(), [](double v) { return std::abs(v); });
    std::sort(mag.begin(), mag.end(), std::greater<>());
    // Largest j with mag[j] > (cumsum_j - sigma) / (j + 1) fixes the threshold.
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < mag.size(); ++j) {
        cumsum += mag[j];
        const double t = (cumsum - sigma) / static_cast<double>(j + 1);
        if (mag[j] - t > 0.0) {
            theta = t;
        } else {
            break;
        }
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double shrunk = std::max(std::abs(y[i]) - theta, 0.0);
        out[i] = std::copysign(shrunk, y[i]);
    }
}

void annulus_into(std::span<const double> y, double lo, double hi, std::span<const double> center,
                  std::span<double> out)
{
    auto c = [&](std::size_t i) { return center.empty() ? 0.0 : center[i]; };
    double n2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - c(i);
        n2 += r * r;
    }
    const double n = std::sqrt(n2);
    if (n >= lo && n <= hi) {
        std::copy(y.begin(), y.end(), out.begin());
        return;
    }
    if (n == 0.0) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            out[i] = c(i);
        }
        if (!out.empty()) {
            out[0] += lo;
        }
        return;
    }
    const double scale = (n > hi ? hi : lo) / n;
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = c(i) + scale * (y[i] - c(i));
    }
}

void cardinality_slice(std::span<const double> y, std::size_t k, std::span<double> out, std::vector<std::size_t>& idx)
{
    std::fill(out.begin(), out.end(), 0.0);
    if (k == 0) {
        return;
    }
    if (k >= y.size()) {
        std::copy(y.begin(), y.end(), out.begin());
        return;
    }
    idx.resize(y.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto before = [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(y[a]);
        const double mb = std::abs(y[b]);
        return ma != mb ? ma > mb : a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), before);
    // nth_element leaves the k best (in `before` order) in the first k slots.
    for (std::size_t j = 0; j < k; ++j) {
        out[idx[j]] = y[idx[j]];
    }
}

void rank_block(std::span<const double> y, std::size_t rank, std::size_t rows, std::size_t cols, std::span<double> out)
{
    const auto r = static_cast<Eigen::Index>(rows);
    const auto c = static_cast<Eigen::Index>(cols);
    Eigen::Map<const Eigen::MatrixXd> in(y.data(), r, c);
    Eigen::Map<Eigen::MatrixXd> dst(out.data(), r, c);
    if (rank >= std::min(rows, cols)) {
        dst = in;
        return;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(in, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto k = static_cast<Eigen::Index>(rank);
    dst = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal()
          * svd.matrixV().leftCols(k).transpose();
}

void subspace_block(std::span<const double> y, const Eigen::MatrixXd& basis, std::span<double> out)
{
    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::Map<const Eigen::VectorXd> in(y.data(), n);
    Eigen::Map<Eigen::VectorXd> dst(out.data(), n);
    const Eigen::VectorXd coeffs = basis.transpose() * in;
    dst.noalias() = basis * coeffs;
}

double orthonormality_error(const Eigen::MatrixXd& basis)
{
    const Eigen::MatrixXd g = basis.transpose() * basis;
    return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

} // namespace

std::vector<IndexRange> contiguous_slices(std::size_t total, std::size_t slice_length)
{
    if (slice_length == 0 || total % slice_length != 0) {
        throw ShapeError("length " + std::to_string(total) + " is not a multiple of slice length "
                         + std::to_string(slice_length));
    }
    std::vector<IndexRange> out;
    for (std::size_t b = 0; b < total; b += slice_length) {
        out.push_back({b, slice_length});
    }
    return out;
}

ElementarySet ElementarySet::box(Bound lower, Bound upper)
{
    std::vector<std::string> issues;
    check_bound_pair(lower, upper, "box", issues);
    if (!issues.empty()) {
        throw SpecError(std::move(issues));
    }
    return ElementarySet(sets::Box{std::move(lower), std::move(upper)});
}

ElementarySet ElementarySet::fixed(Bound value)
{
    for (double v : value.values()) {
        if (!std::isfinite(v)) {
            throw SpecError({"fixed set value must be finite"});
        }
    }
    return ElementarySet(sets::Fixed{std::move(value)});
}

ElementarySet ElementarySet::l1_ball(double sigma)
{
    if (!(sigma >= 0.0)) {
        throw SpecError({"l1 ball radius must be >= 0, got " + std::to_string(sigma)});
    }
    return ElementarySet(sets::L1Ball{sigma});
}

ElementarySet ElementarySet::l2_ball(double sigma, Vector center)
{
    if (!(sigma >= 0.0)) {
        throw SpecError({"l2 ball radius must be >= 0, got " + std::to_string(sigma)});
    }
    return ElementarySet(sets::L2Annulus{0.0, sigma, std::move(center)});
}

ElementarySet ElementarySet::l2_annulus(double sigma_lower, double sigma_upper, Vector center)
{
    if (!(sigma_lower >= 0.0) || !(sigma_lower < sigma_upper)) {
        throw SpecError({"l2 annulus needs 0 <= sigma_lower < sigma_upper, got [" + std::to_string(sigma_lower)
                         + ", " + std::to_string(sigma_upper) + "]"});
    }
    return ElementarySet(sets::L2Annulus{sigma_lower, sigma_upper, std::move(center)});
}

ElementarySet ElementarySet::cardinality(std::size_t k, std::vector<IndexRange> slices)
{
    std::vector<std::string> issues;
    for (const auto& s : slices) {
        if (k > s.length) {
            issues.push_back("cardinality k = " + std::to_string(k) + " exceeds slice length "
                             + std::to_string(s.length));
            break;
        }
    }
    if (!issues.empty()) {
        throw SpecError(std::move(issues));
    }
    return ElementarySet(sets::Cardinality{k, std::move(slices)});
}

ElementarySet ElementarySet::rank(std::size_t rank, std::size_t rows, std::size_t cols)
{
    if (rows == 0 || cols == 0) {
        throw SpecError({"rank set needs a non-empty matrix shape"});
    }
    if (rank < 1 || rank > std::min(rows, cols)) {
        throw SpecError({"rank must be in [1, " + std::to_string(std::min(rows, cols)) + "], got "
                         + std::to_string(rank)});
    }
    return ElementarySet(sets::Rank{rank, rows, cols});
}

ElementarySet ElementarySet::subspace(Eigen::MatrixXd basis)
{
    if (basis.cols() == 0 || basis.rows() == 0) {
        throw SpecError({"subspace basis is empty"});
    }
    if (basis.cols() > basis.rows() || orthonormality_error(basis) > 1e-10) {
        throw SpecError({"subspace basis columns are not orthonormal"});
    }
    return ElementarySet(sets::Subspace{std::make_shared<const Eigen::MatrixXd>(std::move(basis))});
}

ElementarySet ElementarySet::subspace_from_training(const Eigen::MatrixXd& training)
{
    if (training.cols() == 0 || training.rows() == 0) {
        throw SpecError({"no training frames for subspace"});
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(training, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        throw SpecError({"training frames are all zero"});
    }
    Eigen::Index keep = 0;
    while (keep < sv.size() && sv(keep) > 1e-10 * sv(0)) {
        ++keep;
    }
    return subspace(svd.matrixU().leftCols(keep));
}

ElementarySet ElementarySet::pointwise_datafit(Vector observed, Bound lower, Bound upper)
{
    std::vector<std::string> issues;
    check_bound_pair(lower, upper, "pointwise data fit", issues);
    check_length(lower, observed.size(), "data-fit lower bound", issues);
    check_length(upper, observed.size(), "data-fit upper bound", issues);
    if (!issues.empty()) {
        throw SpecError(std::move(issues));
    }
    return ElementarySet(sets::PointwiseDataFit{std::move(observed), std::move(lower), std::move(upper)});
}

std::string ElementarySet::kind_name() const
{
    return std::visit(overloaded{
                          [](const sets::Box&) { return "box"; },
                          [](const sets::Fixed&) { return "fixed"; },
                          [](const sets::L1Ball&) { return "l1_ball"; },
                          [](const sets::L2Annulus& a) { return a.sigma_lower > 0.0 ? "l2_annulus" : "l2_ball"; },
                          [](const sets::Cardinality&) { return "cardinality"; },
                          [](const sets::Rank&) { return "rank"; },
                          [](const sets::Subspace&) { return "subspace"; },
                          [](const sets::PointwiseDataFit&) { return "pointwise_datafit"; },
                      },
                      kind_);
}

bool ElementarySet::is_convex() const
{
    return std::visit(overloaded{
                          [](const sets::L2Annulus& a) { return a.sigma_lower == 0.0; },
                          [](const sets::Cardinality&) { return false; },
                          [](const sets::Rank&) { return false; },
                          [](const auto&) { return true; },
                      },
                      kind_);
}

std::vector<std::string> ElementarySet::check(std::size_t dim) const
{
    std::vector<std::string> issues;
    std::visit(overloaded{
                   [&](const sets::Box& b) {
                       check_length(b.lower, dim, "box lower bound", issues);
                       check_length(b.upper, dim, "box upper bound", issues);
                   },
                   [&](const sets::Fixed& f) { check_length(f.value, dim, "fixed value", issues); },
                   [](const sets::L1Ball&) {},
                   [&](const sets::L2Annulus& a) {
                       if (!a.center.empty() && a.center.size() != dim) {
                           issues.push_back("annulus center has " + std::to_string(a.center.size())
                                            + " entries, expected " + std::to_string(dim));
                       }
                   },
                   [&](const sets::Cardinality& c) { check_slices(c.slices, dim, c.k, issues); },
                   [&](const sets::Rank& r) {
                       if (dim % (r.rows * r.cols) != 0) {
                           issues.push_back("rank set matrix shape " + std::to_string(r.rows) + " x "
                                            + std::to_string(r.cols) + " does not tile length " + std::to_string(dim));
                       }
                   },
                   [&](const sets::Subspace& s) {
                       if (dim % static_cast<std::size_t>(s.basis->rows()) != 0) {
                           issues.push_back("subspace basis length " + std::to_string(s.basis->rows())
                                            + " does not tile length " + std::to_string(dim));
                       }
                   },
                   [&](const sets::PointwiseDataFit& d) {
                       if (d.observed.size() != dim) {
                           issues.push_back("observed data has " + std::to_string(d.observed.size())
                                            + " entries, operator produces " + std::to_string(dim));
                       }
                   },
               },
               kind_);
    return issues;
}

void ElementarySet::project(std::span<const double> in, std::span<double> out, std::size_t threads) const
{
    if (in.size() != out.size()) {
        throw ShapeError("projection input and output lengths differ");
    }
    std::visit(overloaded{
                   [&](const sets::Box& b) { clamp_into(in, b.lower, b.upper, out); },
                   [&](const sets::Fixed& f) {
                       for (std::size_t i = 0; i < out.size(); ++i) {
                           out[i] = f.value[i];
                       }
                   },
                   [&](const sets::L1Ball& b) { l1_into(in, b.sigma, out); },
                   [&](const sets::L2Annulus& a) { annulus_into(in, a.sigma_lower, a.sigma_upper, a.center, out); },
                   [&](const sets::Cardinality& c) {
                       if (c.slices.empty()) {
                           std::vector<std::size_t> idx;
                           cardinality_slice(in, c.k, out, idx);
                           return;
                       }
                       std::fill(out.begin(), out.end(), 0.0);
                       parallel_for(c.slices.size(), threads, [&](std::size_t s) {
                           thread_local std::vector<std::size_t> idx;
                           const auto& r = c.slices[s];
                           cardinality_slice(in.subspan(r.begin, r.length), c.k, out.subspan(r.begin, r.length), idx);
                       });
                   },
                   [&](const sets::Rank& r) {
                       const auto block = r.rows * r.cols;
                       parallel_for(in.size() / block, threads, [&](std::size_t s) {
                           rank_block(in.subspan(s * block, block), r.rank, r.rows, r.cols,
                                      out.subspan(s * block, block));
                       });
                   },
                   [&](const sets::Subspace& sp) {
                       const auto block = static_cast<std::size_t>(sp.basis->rows());
                       parallel_for(in.size() / block, threads, [&](std::size_t s) {
                           subspace_block(in.subspan(s * block, block), *sp.basis, out.subspan(s * block, block));
                       });
                   },
                   [&](const sets::PointwiseDataFit& d) {
                       for (std::size_t i = 0; i < out.size(); ++i) {
                           const double r = in[i] - d.observed[i];
                           out[i] = d.observed[i] + std::min(std::max(r, d.lower[i]), d.upper[i]);
                       }
                   },
               },
               kind_);
}

Vector ElementarySet::project(std::span<const double> in) const
{
    Vector out(in.size());
    project(in, out);
    return out;
}

Vector project_box(std::span<const double> y, const Bound& lower, const Bound& upper)
{
    return ElementarySet::box(lower, upper).project(y);
}

Vector project_fixed(std::span<const double> y, const Bound& value)
{
    return ElementarySet::fixed(value).project(y);
}

Vector project_l1_ball(std::span<const double> y, double sigma)
{
    return ElementarySet::l1_ball(sigma).project(y);
}

Vector project_l2_annulus(std::span<const double> y, double sigma_lower, double sigma_upper,
                          std::span<const double> center)
{
    const auto set = sigma_lower == 0.0 ? ElementarySet::l2_ball(sigma_upper, Vector(center.begin(), center.end()))
                                        : ElementarySet::l2_annulus(sigma_lower, sigma_upper,
                                                                    Vector(center.begin(), center.end()));
    return set.project(y);
}

Vector project_cardinality(std::span<const double> y, std::size_t k, const std::vector<IndexRange>& slices)
{
    const auto set = ElementarySet::cardinality(k, slices);
    if (auto issues = set.check(y.size()); !issues.empty()) {
        throw SpecError(std::move(issues));
    }
    return set.project(y);
}

ModelVector project_rank(const ModelVector& y, std::size_t rank)
{
    const auto& grid = y.grid();
    if (grid.ndims() != 2) {
        throw ShapeError("project_rank needs a 2D grid; use a per-slice rank set for 3D grids");
    }
    const auto set = ElementarySet::rank(rank, grid.extent(0), grid.extent(1));
    return {grid, set.project(y.span())};
}

Vector project_subspace(std::span<const double> y, const Eigen::MatrixXd& basis)
{
    const auto set = ElementarySet::subspace(basis);
    if (auto issues = set.check(y.size()); !issues.empty()) {
        throw SpecError(std::move(issues));
    }
    return set.project(y);
}

Vector project_pointwise_datafit(std::span<const double> y, std::span<const double> observed, const Bound& lower,
                                 const Bound& upper)
{
    if (observed.size() != y.size()) {
        throw ShapeError("observed data length does not match input");
    }
    return ElementarySet::pointwise_datafit(Vector(observed.begin(), observed.end()), lower, upper).project(y);
}

Vector project_monotone_derivative(std::span<const double> y, const Bound& lower, const Bound& upper)
{
    return project_box(y, lower, upper);
}

double feasibility_distance(std::span<const double> x, const ElementarySet& set, const SparseMatrix& transform)
{
    const Vector tx = transform.matvec(x);
    const Vector p = set.project(tx);
    double d2 = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        d2 += (p[i] - tx[i]) * (p[i] - tx[i]);
    }
    return std::sqrt(d2) / std::max(norm2(tx), 1.0);
}

double feasibility_distance(const ModelVector& x, const ElementarySet& set, const LinearOperatorSpec& transform)
{
    return feasibility_distance(x.span(), set, transform.materialize(x.grid()));
}

} // namespace minkproj
