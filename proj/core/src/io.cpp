#include "minkproj/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "minkproj/error.hpp"

namespace minkproj {

namespace {

constexpr char magic[4] = {'G', 'M', 'S', 'K'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int b = 0; b < 4; ++b) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    }
}

void put_f64(std::vector<std::uint8_t>& out, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
}

class Reader {
public:
    Reader(const std::vector<std::uint8_t>& bytes, const std::string& source) : bytes_(bytes), source_(source) {}

    std::uint64_t take(std::size_t width)
    {
        if (pos_ + width > bytes_.size()) {
            throw IoError(source_ + ": truncated GMSK file (needed " + std::to_string(pos_ + width) + " bytes, have "
                          + std::to_string(bytes_.size()) + ")");
        }
        std::uint64_t v = 0;
        for (std::size_t b = 0; b < width; ++b) {
            v |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
        }
        pos_ += width;
        return v;
    }

    std::size_t position() const { return pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    const std::string& source_;
    std::size_t pos_ = 4;
};

std::vector<std::uint8_t> slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const void* data, std::size_t size)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace

std::vector<std::uint8_t> encode_grid(const ModelVector& m)
{
    const auto& dims = m.grid().dims();
    std::vector<std::uint8_t> out(std::begin(magic), std::end(magic));
    out.reserve(8 + 4 * dims.size() + 8 * m.size());
    put_u32(out, static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) {
        put_u32(out, static_cast<std::uint32_t>(d));
    }
    for (double v : m.values()) {
        put_f64(out, v);
    }
    return out;
}

ModelVector decode_grid(const std::vector<std::uint8_t>& bytes, const std::string& source)
{
    if (bytes.size() < 4 || !std::equal(std::begin(magic), std::end(magic), bytes.begin())) {
        throw IoError(source + ": missing GMSK magic");
    }
    Reader r(bytes, source);
    const auto ndims = r.take(4);
    if (ndims != 2 && ndims != 3) {
        throw IoError(source + ": GMSK ndims must be 2 or 3, got " + std::to_string(ndims));
    }
    std::vector<std::size_t> dims;
    for (std::uint64_t k = 0; k < ndims; ++k) {
        dims.push_back(r.take(4));
    }
    ModelGrid grid(dims);
    if (bytes.size() != r.position() + 8 * grid.size()) {
        throw IoError(source + ": GMSK payload has " + std::to_string(bytes.size() - r.position())
                      + " bytes, expected " + std::to_string(8 * grid.size()));
    }
    Vector values(grid.size());
    for (auto& v : values) {
        v = std::bit_cast<double>(r.take(8));
    }
    try {
        return ModelVector(grid, std::move(values));
    } catch (const Error& e) {
        throw IoError(source + ": " + e.what());
    }
}

void write_grid(const std::filesystem::path& path, const ModelVector& m)
{
    const auto bytes = encode_grid(m);
    dump(path, bytes.data(), bytes.size());
}

ModelVector read_grid(const std::filesystem::path& path)
{
    return decode_grid(slurp(path), path.string());
}

void write_sparse(const std::filesystem::path& path, const SparseMatrix& a)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (auto k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", a.values()[k]);
            out << i << ' ' << a.col_idx()[k] << ' ' << buf << '\n';
        }
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

SparseMatrix parse_sparse(const std::string& text, const std::string& source)
{
    std::istringstream in(text);
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(in >> rows >> cols >> nnz)) {
        throw IoError(source + ": expected header 'rows cols nnz'");
    }
    std::vector<Triplet> triplets;
    triplets.reserve(nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
        long long i = 0, j = 0;
        std::string value;
        if (!(in >> i >> j >> value)) {
            throw IoError(source + ": expected " + std::to_string(nnz) + " entries, found " + std::to_string(k));
        }
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= rows || static_cast<std::size_t>(j) >= cols) {
            throw IoError(source + ": entry " + std::to_string(k) + " index (" + std::to_string(i) + ", "
                          + std::to_string(j) + ") outside " + std::to_string(rows) + " x " + std::to_string(cols));
        }
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(value, &used);
            if (used != value.size()) {
                throw std::invalid_argument(value);
            }
        } catch (const std::exception&) {
            throw IoError(source + ": entry " + std::to_string(k) + " has malformed value '" + value + "'");
        }
        if (!std::isfinite(v)) {
            throw IoError(source + ": entry " + std::to_string(k) + " is not finite");
        }
        triplets.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), v});
    }
    std::string extra;
    if (in >> extra) {
        throw IoError(source + ": trailing content after " + std::to_string(nnz) + " entries");
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

SparseMatrix read_sparse(const std::filesystem::path& path)
{
    const auto bytes = slurp(path);
    return parse_sparse(std::string(bytes.begin(), bytes.end()), path.string());
}

void write_pgm(const std::filesystem::path& path, std::span<const double> pixels, std::size_t width,
               std::size_t height, double lo, double hi)
{
    if (pixels.size() != width * height) {
        throw ShapeError("PGM pixel count " + std::to_string(pixels.size()) + " does not match "
                         + std::to_string(width) + " x " + std::to_string(height));
    }
    if (lo == hi && !pixels.empty()) {
        const auto [mn, mx] = std::minmax_element(pixels.begin(), pixels.end());
        lo = *mn;
        hi = *mx;
    }
    const std::string header = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    for (double v : pixels) {
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
        out.push_back(static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(t, 0.0, 1.0))));
    }
    dump(path, out.data(), out.size());
}

std::vector<std::filesystem::path> write_pgm_slices(const std::filesystem::path& dir, const std::string& stem,
                                                    const ModelVector& m)
{
    const auto& g = m.grid();
    const auto [mn, mx] = std::minmax_element(m.values().begin(), m.values().end());
    std::vector<std::filesystem::path> written;
    if (g.ndims() == 2) {
        // Row z, column x.
        const auto nz = g.extent(0), nx = g.extent(1);
        Vector img(m.size());
        for (std::size_t z = 0; z < nz; ++z) {
            for (std::size_t x = 0; x < nx; ++x) {
                img[z * nx + x] = m[z + nz * x];
            }
        }
        written.push_back(dir / (stem + ".pgm"));
        write_pgm(written.back(), img, nx, nz, *mn, *mx);
        return written;
    }
    // Frame t is the contiguous block t; x runs fastest, so it is already row-major in y.
    const auto nx = g.extent(0), ny = g.extent(1);
    for (std::size_t t = 0; t < g.slice_count(); ++t) {
        char name[32];
        std::snprintf(name, sizeof name, "_t%04zu.pgm", t);
        written.push_back(dir / (stem + name));
        write_pgm(written.back(), m.span().subspan(t * nx * ny, nx * ny), nx, ny, *mn, *mx);
    }
    return written;
}

} // namespace minkproj
