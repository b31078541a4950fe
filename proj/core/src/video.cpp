#include "minkproj/video.hpp"

#include <algorithm>
#include <limits>

#include "minkproj/error.hpp"

namespace minkproj {

std::size_t derivative_budget(std::size_t persons, std::size_t pixels, std::size_t boundaries)
{
    return persons * pixels * boundaries;
}

std::size_t default_anomaly_budget(const ModelGrid& grid)
{
    return (grid.extent(0) / 4) * (grid.extent(1) / 4);
}

namespace {

void check_video(const ModelGrid& g, const VideoOptions& opts)
{
    if (g.ndims() != 3) {
        throw ShapeError("video decomposition needs an (n_x, n_y, n_t) grid, got " + g.describe());
    }
    std::vector<std::string> issues;
    if (opts.training_frames < 1) {
        issues.push_back("video: training_frames must be >= 1");
    }
    if (opts.training_frames > g.extent(2)) {
        issues.push_back("video: training_frames = " + std::to_string(opts.training_frames) + " exceeds the "
                         + std::to_string(g.extent(2)) + " frames available");
    }
    if (!(opts.value_min < opts.value_max)) {
        issues.push_back("video: value_min must be below value_max");
    }
    if (!issues.empty()) {
        throw SpecError(std::move(issues));
    }
}

std::vector<IndexRange> frames_of(std::size_t length, std::size_t frames)
{
    return contiguous_slices(length, length / frames);
}

} // namespace

GeneralizedMinkowskiSpec build_video_spec(const ModelVector& centered, const Vector& frame_means,
                                          const VideoOptions& opts)
{
    const auto& g = centered.grid();
    check_video(g, opts);
    const auto px = g.slice_size();
    const auto nt = g.slice_count();
    if (frame_means.size() != nt) {
        throw ShapeError("expected " + std::to_string(nt) + " frame means, got " + std::to_string(frame_means.size()));
    }
    const auto first_training = nt - opts.training_frames;

    // Background bounds: per-pixel range over the training frames, same for every frame.
    Vector lo(px, std::numeric_limits<double>::infinity());
    Vector hi(px, -std::numeric_limits<double>::infinity());
    Eigen::MatrixXd training(static_cast<Eigen::Index>(px),
                             static_cast<Eigen::Index>(opts.training_frames + (opts.subspace_with_constant ? 1 : 0)));
    for (std::size_t t = first_training; t < nt; ++t) {
        for (std::size_t p = 0; p < px; ++p) {
            const double v = centered[t * px + p];
            lo[p] = std::min(lo[p], v);
            hi[p] = std::max(hi[p], v);
            training(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(t - first_training)) = v;
        }
    }
    if (opts.subspace_with_constant) {
        training.col(training.cols() - 1).setOnes();
    }

    Vector d1_lo(g.size()), d1_hi(g.size()), f1_lo(g.size()), f1_hi(g.size()), e1_lo(g.size()), e1_hi(g.size());
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t p = 0; p < px; ++p) {
            const auto i = t * px + p;
            d1_lo[i] = lo[p];
            d1_hi[i] = hi[p];
            f1_lo[i] = opts.value_min - frame_means[t];
            f1_hi[i] = opts.value_max - frame_means[t];
            e1_lo[i] = f1_lo[i] - d1_hi[i];
            e1_hi[i] = f1_hi[i] - d1_lo[i];
        }
    }

    GeneralizedMinkowskiSpec spec(g);
    const auto id = LinearOperatorSpec::identity();
    spec.add({Target::component_u, id, ElementarySet::box(std::move(d1_lo), std::move(d1_hi)), "background bounds"});
    spec.add({Target::component_u, id, ElementarySet::subspace_from_training(training), "background subspace"});
    spec.add({Target::component_v, id, ElementarySet::box(std::move(e1_lo), std::move(e1_hi)), "anomaly bounds"});
    const auto budget = opts.anomaly_budget.value_or(default_anomaly_budget(g));
    spec.add({Target::component_v, id, ElementarySet::cardinality(budget, frames_of(g.size(), nt)),
              "anomaly cardinality"});
    if (opts.vertical_budget) {
        const auto op = LinearOperatorSpec::derivative(1);
        const auto rows = op.output_size(g);
        spec.add({Target::component_v, op, ElementarySet::cardinality(*opts.vertical_budget, frames_of(rows, nt)),
                  "anomaly vertical-derivative cardinality"});
    }
    if (opts.horizontal_budget) {
        const auto op = LinearOperatorSpec::derivative(0);
        const auto rows = op.output_size(g);
        spec.add({Target::component_v, op, ElementarySet::cardinality(*opts.horizontal_budget, frames_of(rows, nt)),
                  "anomaly horizontal-derivative cardinality"});
    }
    spec.add({Target::sum, id, ElementarySet::box(std::move(f1_lo), std::move(f1_hi)), "pixel range"});
    require_valid(spec);
    return spec;
}

VideoDecomposition video_decompose(const ModelVector& video, const VideoOptions& opts)
{
    const auto& g = video.grid();
    check_video(g, opts);
    const auto px = g.slice_size();
    const auto nt = g.slice_count();

    Vector means(nt, 0.0);
    Vector centered = video.values();
    for (std::size_t t = 0; t < nt; ++t) {
        double s = 0.0;
        for (std::size_t p = 0; p < px; ++p) {
            s += video[t * px + p];
        }
        means[t] = s / static_cast<double>(px);
        for (std::size_t p = 0; p < px; ++p) {
            centered[t * px + p] -= means[t];
        }
    }
    ModelVector c(g, std::move(centered));
    auto spec = build_video_spec(c, means, opts);
    auto projection = admm_project(c, spec, opts.admm);

    Vector background = projection.u.values();
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t p = 0; p < px; ++p) {
            background[t * px + p] += means[t];
        }
    }
    return {ModelVector(g, std::move(background)), projection.v, std::move(means), std::move(spec),
            std::move(projection)};
}

} // namespace minkproj
