#pragma once

#include <complex>
#include <string>
#include <vector>

#include "supframe/errors.hpp"

namespace supframe {

/// Uniform grid on [-lx, lx) x [-ly, ly), node x_i = (i - n/2) * dx.
/// Power-of-two sizes keep the spectral machinery happy, and the origin
/// (the fixed point of every rotation here) is always a node.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;  // half-width per axis
    double ly = 0.0;

    GridSpec() = default;
    GridSpec(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        auto pow2 = [](int n) { return n > 0 && (n & (n - 1)) == 0; };
        if (!pow2(nx) || !pow2(ny))
            throw ValidationError("grid sizes must be powers of two, got " +
                                  std::to_string(nx) + "x" + std::to_string(ny));
        if (!(lx > 0.0) || !(ly > 0.0))
            throw ValidationError("grid half-widths must be positive");
    }

    static GridSpec square(int n, double l) { return GridSpec(n, n, l, l); }

    double dx() const { return 2.0 * lx / nx; }
    double dy() const { return 2.0 * ly / ny; }
    double x(int ix) const { return (ix - nx / 2) * dx(); }
    double y(int iy) const { return (iy - ny / 2) * dy(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    double cell_area() const { return dx() * dy(); }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.nx == b.nx && a.ny == b.ny && a.lx == b.lx && a.ly == b.ly;
    }
    friend bool operator!=(const GridSpec& a, const GridSpec& b) { return !(a == b); }
};

/// Complex wavefunction of one particle sampled on a 2-D grid.
struct WaveField {
    GridSpec grid;
    std::vector<std::complex<double>> values;  // row-major, index iy * nx + ix
    double time = 0.0;

    std::complex<double>& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * grid.nx + ix]; }
    const std::complex<double>& at(int ix, int iy) const {
        return values[static_cast<std::size_t>(iy) * grid.nx + ix];
    }
};

/// Wavefunction of two particles on a line; axis 0 is particle 1's
/// coordinate, axis 1 is particle 2's.  Same storage as WaveField but a
/// different meaning, so the two do not convert silently.
struct MultiParticleField {
    GridSpec grid;
    std::vector<std::complex<double>> values;
    double time = 0.0;

    std::complex<double>& at(int i1, int i2) { return values[static_cast<std::size_t>(i2) * grid.nx + i1]; }
    const std::complex<double>& at(int i1, int i2) const {
        return values[static_cast<std::size_t>(i2) * grid.nx + i1];
    }
};

inline WaveField make_field(GridSpec grid) {
    return {grid, std::vector<std::complex<double>>(grid.size(), {0.0, 0.0}), 0.0};
}

inline MultiParticleField make_pair_field(GridSpec grid) {
    return {grid, std::vector<std::complex<double>>(grid.size(), {0.0, 0.0}), 0.0};
}

}  // namespace supframe
