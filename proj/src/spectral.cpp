#include "supframe/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <numbers>

namespace supframe {

Spectral2D::Spectral2D(const GridSpec& grid) : grid_(grid) {
    buf_ = reinterpret_cast<std::complex<double>*>(
        fftw_malloc(sizeof(fftw_complex) * grid.size()));
    auto* fbuf = reinterpret_cast<fftw_complex*>(buf_);
    // Row-major [iy][ix]: slowest dimension first for FFTW.
    plan_fwd_ = fftw_plan_dft_2d(grid.ny, grid.nx, fbuf, fbuf, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_2d(grid.ny, grid.nx, fbuf, fbuf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Spectral2D::~Spectral2D() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(buf_);
}

void Spectral2D::forward(std::vector<std::complex<double>>& values) const {
    std::memcpy(buf_, values.data(), sizeof(std::complex<double>) * values.size());
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    std::memcpy(values.data(), buf_, sizeof(std::complex<double>) * values.size());
}

void Spectral2D::inverse(std::vector<std::complex<double>>& values) const {
    std::memcpy(buf_, values.data(), sizeof(std::complex<double>) * values.size());
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t i = 0; i < values.size(); ++i) buf_[i] *= scale;
    std::memcpy(values.data(), buf_, sizeof(std::complex<double>) * values.size());
}

double Spectral2D::wavenumber(int i, int n, double l) {
    const int f = (i <= n / 2) ? i : i - n;
    return std::numbers::pi * f / l;
}

std::vector<std::complex<double>> spectral_derivative(
    const GridSpec& grid, const std::vector<std::complex<double>>& values, int axis) {
    Spectral2D fft(grid);
    std::vector<std::complex<double>> out = values;
    fft.forward(out);
    const std::complex<double> iunit{0.0, 1.0};
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const int i = axis == 0 ? ix : iy;
            const int n = axis == 0 ? grid.nx : grid.ny;
            const double l = axis == 0 ? grid.lx : grid.ly;
            double k = Spectral2D::wavenumber(i, n, l);
            if (i == n / 2) k = 0.0;  // Nyquist
            out[static_cast<std::size_t>(iy) * grid.nx + ix] *= iunit * k;
        }
    }
    fft.inverse(out);
    return out;
}

std::vector<std::complex<double>> spectral_laplacian(
    const GridSpec& grid, const std::vector<std::complex<double>>& values) {
    Spectral2D fft(grid);
    std::vector<std::complex<double>> out = values;
    fft.forward(out);
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double ky = Spectral2D::wavenumber(iy, grid.ny, grid.ly);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double kx = Spectral2D::wavenumber(ix, grid.nx, grid.lx);
            out[static_cast<std::size_t>(iy) * grid.nx + ix] *= -(kx * kx + ky * ky);
        }
    }
    fft.inverse(out);
    return out;
}

double spectral_tail_fraction(const GridSpec& grid,
                              const std::vector<std::complex<double>>& values) {
    Spectral2D fft(grid);
    std::vector<std::complex<double>> hat = values;
    fft.forward(hat);
    const double kx_max = std::numbers::pi * (grid.nx / 2) / grid.lx;
    const double ky_max = std::numbers::pi * (grid.ny / 2) / grid.ly;
    double total = 0.0, tail = 0.0;
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double ky = Spectral2D::wavenumber(iy, grid.ny, grid.ly);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double kx = Spectral2D::wavenumber(ix, grid.nx, grid.lx);
            const double w = std::norm(hat[static_cast<std::size_t>(iy) * grid.nx + ix]);
            total += w;
            if (std::abs(kx) > 0.9 * kx_max || std::abs(ky) > 0.9 * ky_max) tail += w;
        }
    }
    return total > 0.0 ? tail / total : 0.0;
}

}  // namespace supframe
