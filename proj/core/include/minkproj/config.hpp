#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "minkproj/admm.hpp"
#include "minkproj/linear_inverse.hpp"
#include "minkproj/setspec.hpp"
#include "minkproj/spg.hpp"
#include "minkproj/synthetic.hpp"
#include "minkproj/video.hpp"

namespace minkproj {

/// f(m) = 1/2 ||m - target||^2.
struct ProximityObjective {
    ModelVector target;
};

/// f(m) = 1/2 ||G m - observed||^2.
struct LeastSquaresObjective {
    SparseMatrix forward;
    Vector observed;
};

struct ObjectiveConfig {
    std::variant<ProximityObjective, LeastSquaresObjective> kind;
    std::optional<ModelVector> initial;   ///< starting model; the grid's zero model if unset
};

ObjectiveOracle make_oracle(const ObjectiveConfig& objective);

struct VideoConfig {
    std::filesystem::path input;
    VideoOptions options;   ///< options.admm is filled from the admm section
};

struct GenerateConfig {
    std::variant<BlockyParams, VideoParams> params;
    std::optional<double> mask_fraction;   ///< also emit a random mask and masked data (blocky only)
};

/// Seed vectors for `sample` draw entries uniformly from [low, high].
struct SampleConfig {
    double low = -1.0;
    double high = 1.0;
};

/// Parsed configuration file. Paths are resolved against the directory of
/// the file. Every section is optional; commands check for what they need.
struct RunConfig {
    std::filesystem::path source;
    std::optional<GeneralizedMinkowskiSpec> spec;
    std::optional<ModelVector> input;
    std::optional<DataFitConstraint> datafit;
    std::optional<ObjectiveConfig> objective;
    std::optional<VideoConfig> video;
    std::optional<GenerateConfig> generate;
    SampleConfig sample;
    AdmmOptions admm;
    SpgOptions spg;
    std::uint64_t seed = 0;
    std::size_t threads = 0;   ///< 0: hardware concurrency
    bool pgm = false;
};

/// Throws SpecError listing every problem with its location in the file
/// (e.g. "sets[1] 'tv': sigma must be >= 0") and IoError for unreadable files.
RunConfig parse_config(const std::string& text, const std::filesystem::path& source);
RunConfig load_config(const std::filesystem::path& path);

} // namespace minkproj
