#include "minkproj/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "minkproj/error.hpp"

namespace minkproj {

namespace {

// Uniform draws written out explicitly: std::uniform_*_distribution output
// differs across standard libraries, and generated files must be portable.
double uniform(std::mt19937_64& rng, double lo, double hi)
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi)
{
    // inclusive range
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

} // namespace

BlockySample blocky_anomaly_2d(const BlockyParams& p, std::uint64_t seed)
{
    std::vector<std::string> issues;
    if (p.nz < 3 || p.nx < 3) {
        issues.push_back("blocky-anomaly-2d: extents must be >= 3");
    }
    if (!(p.anomaly_min <= p.anomaly_max)) {
        issues.push_back("blocky-anomaly-2d: anomaly_min must not exceed anomaly_max");
    }
    if (!(p.min_fraction > 0.0 && p.min_fraction <= p.max_fraction && p.max_fraction < 1.0)) {
        issues.push_back("blocky-anomaly-2d: need 0 < min_fraction <= max_fraction < 1");
    }
    if (!issues.empty()) {
        throw SpecError(std::move(issues));
    }
    std::mt19937_64 rng(seed);
    const ModelGrid grid({p.nz, p.nx});
    auto side = [&](std::size_t n) {
        const auto lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(p.min_fraction * n)));
        const auto hi = std::max(lo, static_cast<std::size_t>(std::floor(p.max_fraction * n)));
        return uniform_index(rng, lo, hi);
    };
    const auto hz = side(p.nz);
    const auto hx = side(p.nx);
    const auto z0 = uniform_index(rng, 0, p.nz - hz);
    const auto x0 = uniform_index(rng, 0, p.nx - hx);
    const double value = uniform(rng, p.anomaly_min, p.anomaly_max);

    Vector anomaly(grid.size(), 0.0);
    std::vector<std::uint8_t> support(grid.size(), 0);
    for (auto x = x0; x < x0 + hx; ++x) {
        for (auto z = z0; z < z0 + hz; ++z) {
            anomaly[z + p.nz * x] = value;
            support[z + p.nz * x] = 1;
        }
    }
    Vector model(grid.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        model[i] = p.background + anomaly[i];
    }
    return {ModelVector(grid, std::move(model)), ModelVector(grid, std::move(anomaly)), std::move(support),
            z0, z0 + hz, x0, x0 + hx, value};
}

SparseMatrix random_mask(std::size_t n, double fraction, std::uint64_t seed)
{
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw SpecError({"mask fraction must lie in (0, 1]"});
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Fisher-Yates with the portable index draw above.
    for (std::size_t i = n; i > 1; --i) {
        std::swap(idx[i - 1], idx[uniform_index(rng, 0, i - 1)]);
    }
    const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * n)));
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    std::vector<Triplet> t;
    for (std::size_t r = 0; r < keep; ++r) {
        t.push_back({r, idx[r], 1.0});
    }
    return SparseMatrix::from_triplets(keep, n, std::move(t));
}

VideoSample lowrank_sparse_video(const VideoParams& p, std::uint64_t seed)
{
    std::vector<std::string> issues;
    if (p.nx < 2 || p.ny < 2 || p.nt < 1) {
        issues.push_back("lowrank-sparse-video: need nx, ny >= 2 and nt >= 1");
    }
    if (p.training_frames < 1 || p.training_frames > p.nt) {
        issues.push_back("lowrank-sparse-video: training_frames must lie in [1, nt]");
    }
    if (p.rank < 1) {
        issues.push_back("lowrank-sparse-video: rank must be >= 1");
    }
    if (p.persons > 0 && (p.person_width > p.nx || p.persons * p.person_height > p.ny || p.person_height < 3)) {
        issues.push_back("lowrank-sparse-video: persons do not fit in separate horizontal bands");
    }
    if (!(p.intensity_min > 0.0 && p.intensity_min <= p.intensity_max)) {
        issues.push_back("lowrank-sparse-video: need 0 < intensity_min <= intensity_max");
    }
    if (!issues.empty()) {
        throw SpecError(std::move(issues));
    }
    std::mt19937_64 rng(seed);
    const ModelGrid grid({p.nx, p.ny, p.nt});
    const auto px = p.nx * p.ny;
    constexpr double pi = std::numbers::pi;
    const double mid = 0.5 * (p.value_min + p.value_max);
    const double span = p.value_max - p.value_min;

    // Spatial patterns: a bright base with soft structure, then striped
    // "escalator step" patterns with random phases.
    std::vector<Vector> pattern(p.rank, Vector(px));
    std::vector<double> phase(p.rank);
    for (std::size_t k = 0; k < p.rank; ++k) {
        phase[k] = uniform(rng, 0.0, 2.0 * pi);
    }
    for (std::size_t y = 0; y < p.ny; ++y) {
        for (std::size_t x = 0; x < p.nx; ++x) {
            const double fx = static_cast<double>(x) / static_cast<double>(p.nx);
            const double fy = static_cast<double>(y) / static_cast<double>(p.ny);
            pattern[0][x + p.nx * y] = mid + 0.15 * span * std::sin(2.0 * pi * fx + phase[0]) * std::cos(pi * fy);
            for (std::size_t k = 1; k < p.rank; ++k) {
                const double kk = static_cast<double>(k);
                pattern[k][x + p.nx * y] = 0.1 * span * std::sin(2.0 * pi * (kk * 2.0 * fy + fx / kk) + phase[k]);
            }
        }
    }
    auto coefficient = [&](std::size_t k, std::size_t t) {
        const double arg = 2.0 * pi * static_cast<double>(t) / static_cast<double>(p.training_frames) + phase[k];
        return k == 0 ? 1.0 + 0.1 * std::cos(arg) : std::sin(arg + static_cast<double>(k));
    };

    Vector background(grid.size(), 0.0);
    for (std::size_t t = 0; t < p.nt; ++t) {
        for (std::size_t k = 0; k < p.rank; ++k) {
            const double a = coefficient(k, t);
            for (std::size_t i = 0; i < px; ++i) {
                background[t * px + i] += a * pattern[k][i];
            }
        }
    }

    Vector video = background;
    const auto active_frames = p.nt - p.training_frames;
    const auto band = p.persons > 0 ? p.ny / p.persons : 0;
    for (std::size_t person = 0; person < p.persons; ++person) {
        const auto y0 = person * band + uniform_index(rng, 0, band - p.person_height);
        auto x = static_cast<long>(uniform_index(rng, 0, p.nx - p.person_width));
        long step = (rng() & 1U) ? 1 : -1;
        const auto seg = p.person_height / 3;
        double level[3];
        for (auto& l : level) {
            const double sign = (rng() & 1U) ? 1.0 : -1.0;
            l = sign * uniform(rng, p.intensity_min, p.intensity_max);
        }
        for (std::size_t t = 0; t < active_frames; ++t) {
            for (std::size_t dy = 0; dy < p.person_height; ++dy) {
                const double l = level[std::min<std::size_t>(dy / seg, 2)];
                for (std::size_t dx = 0; dx < p.person_width; ++dx) {
                    const auto i = t * px + static_cast<std::size_t>(x) + dx + p.nx * (y0 + dy);
                    video[i] = std::clamp(background[i] + l, p.value_min, p.value_max);
                }
            }
            const long next = x + step;
            if (next < 0 || next + static_cast<long>(p.person_width) > static_cast<long>(p.nx)) {
                step = -step;
            }
            x += step;
        }
    }

    Vector anomaly(grid.size());
    std::vector<std::uint8_t> support(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        anomaly[i] = video[i] - background[i];
        support[i] = anomaly[i] != 0.0 ? 1 : 0;
    }
    return {ModelVector(grid, std::move(video)), ModelVector(grid, std::move(background)),
            ModelVector(grid, std::move(anomaly)), std::move(support)};
}

} // namespace minkproj
