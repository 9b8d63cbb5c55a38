#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sfp {

// Error hierarchy shared by every module. The `kind()` strings are stable:
// the CLI prints them verbatim in its single-line error report.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& what) : Error("shape", what) {}
};

struct DegenerateSystemError : Error {
    explicit DegenerateSystemError(const std::string& what) : Error("degenerate", what) {}
};

template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Planed = Plane<double>;
using Mask = Plane<bool>;

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3d = Vec3<double>;

struct Dims {
    Eigen::Index width = 0;
    Eigen::Index height = 0;

    Eigen::Index pixels() const { return width * height; }
    friend bool operator==(const Dims&, const Dims&) = default;
};

std::string to_string(const Dims& d);

template <typename Derived>
Dims dims_of(const Eigen::DenseBase<Derived>& plane) {
    return {plane.cols(), plane.rows()};
}

/// Per-pixel unit normals in camera space, stored as one row per pixel in
/// row-major pixel order (index = y * width + x).
template <typename Scalar>
struct NormalMap {
    using Rows = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;

    Eigen::Index width = 0;
    Eigen::Index height = 0;
    Rows normals;
    Mask mask;

    NormalMap() = default;
    NormalMap(Eigen::Index w, Eigen::Index h)
        : width(w), height(h), normals(w * h, 3), mask(Mask::Constant(h, w, true)) {
        normals.rowwise() = Vec3<Scalar>::UnitZ().transpose();
    }
    explicit NormalMap(Dims d) : NormalMap(d.width, d.height) {}

    Dims dims() const { return {width, height}; }
    Eigen::Index index(Eigen::Index x, Eigen::Index y) const { return y * width + x; }

    Vec3<Scalar> at(Eigen::Index x, Eigen::Index y) const {
        return normals.row(index(x, y)).transpose();
    }
    void set(Eigen::Index x, Eigen::Index y, const Vec3<Scalar>& n) {
        normals.row(index(x, y)) = n.transpose();
    }
    bool valid(Eigen::Index x, Eigen::Index y) const { return mask(y, x); }

    template <typename Other>
    NormalMap<Other> cast() const {
        NormalMap<Other> out;
        out.width = width;
        out.height = height;
        out.normals = normals.template cast<Other>();
        out.mask = mask;
        return out;
    }
};

using NormalMapd = NormalMap<double>;

/// Throws ShapeError naming both dimension pairs when they differ.
void require_same_dims(const Dims& a, const Dims& b, const std::string& what);

/// Number of worker threads for tile-parallel loops. Read from SFP_THREADS,
/// falling back to the hardware concurrency.
unsigned thread_count();

/// Runs body(row_begin, row_end, tile_index) over fixed-height row tiles.
/// Tile boundaries depend only on `rows` and `tile_rows`, never on the
/// thread count, so per-tile RNG streams stay reproducible.
template <typename Body>
void for_each_row_tile(Eigen::Index rows, Eigen::Index tile_rows, Body&& body);

}  // namespace sfp

#include "sfp/detail/parallel.hpp"
