#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "minkproj/grid.hpp"
#include "minkproj/sparse.hpp"

namespace minkproj {

/// GMSK grid file: "GMSK", u32 ndims, ndims x u32 extents, then N f64 values
/// in vectorization order. All integers and floats little-endian.
std::vector<std::uint8_t> encode_grid(const ModelVector& m);
ModelVector decode_grid(const std::vector<std::uint8_t>& bytes, const std::string& source = "buffer");

void write_grid(const std::filesystem::path& path, const ModelVector& m);
ModelVector read_grid(const std::filesystem::path& path);

/// Sparse operator text file: header "rows cols nnz", then nnz lines
/// "row col value" with 0-based indices. Values are written with 17
/// significant digits so files round-trip exactly.
void write_sparse(const std::filesystem::path& path, const SparseMatrix& a);
SparseMatrix read_sparse(const std::filesystem::path& path);
SparseMatrix parse_sparse(const std::string& text, const std::string& source = "text");

/// 8-bit binary PGM of a height x width image stored row-major. Values are
/// mapped linearly from [lo, hi] to [0, 255]; lo == hi uses the data range.
void write_pgm(const std::filesystem::path& path, std::span<const double> pixels, std::size_t width,
               std::size_t height, double lo = 0.0, double hi = 0.0);

/// One PGM per 2D slice. A 2D grid (n_z, n_x) gives one image with depth
/// down the rows; a 3D grid (n_x, n_y, n_t) gives one image per time slice
/// named <stem>_tNNNN.pgm. All slices share one gray scale. Returns the
/// files written.
std::vector<std::filesystem::path> write_pgm_slices(const std::filesystem::path& dir, const std::string& stem,
                                                    const ModelVector& m);

} // namespace minkproj
