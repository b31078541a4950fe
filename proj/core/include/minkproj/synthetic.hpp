#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "minkproj/grid.hpp"
#include "minkproj/sparse.hpp"

namespace minkproj {

/// Constant background with one rectangular negative anomaly.
struct BlockyParams {
    std::size_t nz = 20;
    std::size_t nx = 20;
    double background = 2500.0;
    double anomaly_min = -150.0;   ///< anomaly value drawn uniformly from [anomaly_min, anomaly_max]
    double anomaly_max = -75.0;
    double min_fraction = 1.0 / 3.0;   ///< rectangle side as a fraction of the extent
    double max_fraction = 1.0 / 2.0;
};

struct BlockySample {
    ModelVector model;
    ModelVector anomaly;
    std::vector<std::uint8_t> support;
    std::size_t z0, z1, x0, x1;   ///< half-open rectangle
    double value;
};

BlockySample blocky_anomaly_2d(const BlockyParams& params, std::uint64_t seed);

/// Selection operator keeping round(fraction * n) distinct entries, rows in
/// increasing column order.
SparseMatrix random_mask(std::size_t n, double fraction, std::uint64_t seed);

/// Rank-r periodic background plus walking "persons": rectangles of three
/// stacked segments (head, body, legs) with distinct intensities. The last
/// training_frames frames carry no persons; the background period equals
/// training_frames so those frames span the background's full range.
struct VideoParams {
    std::size_t nx = 32;
    std::size_t ny = 24;
    std::size_t nt = 40;
    std::size_t training_frames = 10;
    std::size_t rank = 2;
    std::size_t persons = 2;          ///< per frame; 0 gives a pure background
    std::size_t person_width = 3;
    std::size_t person_height = 6;
    double intensity_min = 40.0;      ///< segment contrast magnitude range
    double intensity_max = 80.0;
    double value_min = 0.0;
    double value_max = 255.0;
};

struct VideoSample {
    ModelVector video;
    ModelVector background;
    ModelVector anomaly;
    std::vector<std::uint8_t> support;
};

VideoSample lowrank_sparse_video(const VideoParams& params, std::uint64_t seed);

} // namespace minkproj
