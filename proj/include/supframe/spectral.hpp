#pragma once

#include <complex>
#include <vector>

#include "supframe/grid.hpp"

namespace supframe {

/// FFT engine for one grid shape.  Owns its FFTW plans and aligned
/// buffers; transforms copy through them, which costs nothing next to
/// the FFT itself.  Inverse is normalized (forward then inverse is the
/// identity).  Plans use FFTW_ESTIMATE so results never depend on
/// runtime measurement.
class Spectral2D {
public:
    explicit Spectral2D(const GridSpec& grid);
    ~Spectral2D();

    Spectral2D(const Spectral2D&) = delete;
    Spectral2D& operator=(const Spectral2D&) = delete;

    void forward(std::vector<std::complex<double>>& values) const;
    void inverse(std::vector<std::complex<double>>& values) const;

    const GridSpec& grid() const { return grid_; }

    /// Angular wavenumber of mode index i on an axis with n nodes and
    /// half-width l (standard FFT ordering, negative modes in the upper
    /// half).
    static double wavenumber(int i, int n, double l);

private:
    GridSpec grid_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    std::complex<double>* buf_ = nullptr;
};

/// Spectral partial derivative along axis 0 (x) or 1 (y).  The Nyquist
/// mode is zeroed, as usual for odd-order spectral derivatives.
std::vector<std::complex<double>> spectral_derivative(const GridSpec& grid,
                                                      const std::vector<std::complex<double>>& values,
                                                      int axis);

/// Spectral Laplacian (multiplication by -k^2 in Fourier space).
std::vector<std::complex<double>> spectral_laplacian(const GridSpec& grid,
                                                     const std::vector<std::complex<double>>& values);

/// Fraction of the total spectral weight carried by modes in the outer
/// 10% band of wavenumbers; a resolution diagnostic.
double spectral_tail_fraction(const GridSpec& grid,
                              const std::vector<std::complex<double>>& values);

}  // namespace supframe
