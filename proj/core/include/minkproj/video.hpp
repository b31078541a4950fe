#pragma once

#include <cstddef>
#include <optional>

#include "minkproj/admm.hpp"
#include "minkproj/setspec.hpp"

namespace minkproj {

/// Cardinality budget for a spatial derivative of one frame:
/// persons x pixels across x boundaries per pixel line.
std::size_t derivative_budget(std::size_t persons, std::size_t pixels, std::size_t boundaries);

/// Default per-frame anomaly budget floor(n_x / 4) * floor(n_y / 4).
std::size_t default_anomaly_budget(const ModelGrid& grid);

struct VideoOptions {
    std::size_t training_frames = 0;      ///< trailing frames without anomalies
    double value_min = 0.0;               ///< admissible pixel range of the raw video
    double value_max = 255.0;
    std::optional<std::size_t> anomaly_budget;     ///< nonzeros per frame; default_anomaly_budget if unset
    std::optional<std::size_t> vertical_budget;    ///< nonzeros of the y-derivative per frame; no set if unset
    std::optional<std::size_t> horizontal_budget;  ///< nonzeros of the x-derivative per frame; no set if unset
    /// Add the constant frame to the background subspace. Mean subtraction
    /// shifts each frame by an anomaly-dependent constant that the training
    /// frames alone cannot represent.
    bool subspace_with_constant = true;
    AdmmOptions admm;
};

struct VideoDecomposition {
    ModelVector background;   ///< original units (frame means restored)
    ModelVector anomaly;
    Vector frame_means;
    GeneralizedMinkowskiSpec spec;   ///< built on the mean-subtracted video
    Projection projection;           ///< raw solver output on the mean-subtracted video
};

/// Constraint sets for a mean-subtracted video: per-pixel bounds and the
/// training-frame subspace on the background, the pixel range on the sum,
/// bounds and per-frame sparsity of values and derivatives on the anomaly.
GeneralizedMinkowskiSpec build_video_spec(const ModelVector& centered, const Vector& frame_means,
                                          const VideoOptions& opts);

/// Background/anomaly split of an (n_x, n_y, n_t) video by projection onto
/// the generalized Minkowski set of build_video_spec.
VideoDecomposition video_decompose(const ModelVector& video, const VideoOptions& opts);

} // namespace minkproj
