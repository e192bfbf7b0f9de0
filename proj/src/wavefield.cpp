#include "supframe/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "supframe/spectral.hpp"

namespace supframe {

namespace {

using Complex = std::complex<double>;

double gaussian_norm_2d(double sigma) {
    // L2-normalized exp(-r^2 / 2 sigma^2) in two dimensions.
    return 1.0 / (sigma * std::sqrt(std::numbers::pi));
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

/// Input sample location as an affine map of the output node:
/// p = m x' + v.  Covers both the 2-D single-particle case (m = R) and
/// the diagonal shift of the two-particle case (m = I, v = (a, a)).
struct AffineMap2 {
    Eigen::Matrix2d m;
    Eigen::Vector2d v;
};

struct ExactMap {
    bool ok = false;
    int quarter = 0;  // rotation as a multiple of 90 degrees, 0..3
    long long sx = 0;
    long long sy = 0;
};

ExactMap classify_exact(const AffineMap2& map, const GridSpec& grid) {
    ExactMap e;
    const double angle = std::atan2(map.m(1, 0), map.m(0, 0));
    const double quarter = angle / (std::numbers::pi / 2.0);
    const long long q = std::llround(quarter);
    if (std::abs(quarter - q) > 1e-12 / (std::numbers::pi / 2.0)) return e;
    const int m = static_cast<int>(((q % 4) + 4) % 4);
    Eigen::Matrix2d r;
    switch (m) {
        case 0: r << 1, 0, 0, 1; break;
        case 1: r << 0, -1, 1, 0; break;
        case 2: r << -1, 0, 0, -1; break;
        default: r << 0, 1, -1, 0; break;
    }
    if ((map.m - r).norm() > 1e-12) return e;
    if (m % 2 == 1 && (grid.nx != grid.ny || grid.lx != grid.ly)) return e;

    const double ux = map.v[0] / grid.dx();
    const double uy = map.v[1] / grid.dy();
    const long long sx = std::llround(ux);
    const long long sy = std::llround(uy);
    if (std::abs(ux - sx) > 1e-9 || std::abs(uy - sy) > 1e-9) return e;
    e.ok = true;
    e.quarter = m;
    e.sx = sx;
    e.sy = sy;
    return e;
}

/// Gather by exact index permutation with periodic wrap.
void gather_exact(const std::vector<Complex>& in, const GridSpec& grid,
                  const ExactMap& e, const Complex& amp, std::vector<Complex>& out) {
    const int nx = grid.nx;
    const int ny = grid.ny;
    const int cx = nx / 2;
    const int cy = ny / 2;
    const int sx = static_cast<int>(((e.sx % nx) + nx) % nx);
    const int sy = static_cast<int>(((e.sy % ny) + ny) % ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int ii, jj;
            switch (e.quarter) {
                case 0:
                    ii = i;
                    jj = j;
                    break;
                case 1:
                    ii = 2 * cx - j;
                    jj = i;
                    break;
                case 2:
                    ii = 2 * cx - i;
                    jj = 2 * cy - j;
                    break;
                default:
                    ii = j;
                    jj = 2 * cy - i;
                    break;
            }
            ii = wrap(ii + sx, nx);
            jj = wrap(jj + sy, ny);
            out[static_cast<std::size_t>(j) * nx + i] +=
                amp * in[static_cast<std::size_t>(jj) * nx + ii];
        }
    }
}

/// Catmull-Rom weights for fractional offset f in [0, 1).
void cubic_weights(double f, double w[4]) {
    const double f2 = f * f;
    const double f3 = f2 * f;
    w[0] = 0.5 * (-f3 + 2.0 * f2 - f);
    w[1] = 0.5 * (3.0 * f3 - 5.0 * f2 + 2.0);
    w[2] = 0.5 * (-3.0 * f3 + 4.0 * f2 + f);
    w[3] = 0.5 * (f3 - f2);
}

/// Bicubic sample at grid coordinates (u, v) in units of nodes; points
/// whose stencil leaves the grid contribute zero from the missing taps.
Complex sample_bicubic(const std::vector<Complex>& in, const GridSpec& grid, double u,
                       double v) {
    const int i0 = static_cast<int>(std::floor(u));
    const int j0 = static_cast<int>(std::floor(v));
    double wu[4], wv[4];
    cubic_weights(u - i0, wu);
    cubic_weights(v - j0, wv);
    Complex acc{0.0, 0.0};
    for (int b = 0; b < 4; ++b) {
        const int j = j0 - 1 + b;
        if (j < 0 || j >= grid.ny) continue;
        Complex row{0.0, 0.0};
        for (int a = 0; a < 4; ++a) {
            const int i = i0 - 1 + a;
            if (i < 0 || i >= grid.nx) continue;
            row += wu[a] * in[static_cast<std::size_t>(j) * grid.nx + i];
        }
        acc += wv[b] * row;
    }
    return acc;
}

void gather_bicubic(const std::vector<Complex>& in, const GridSpec& grid,
                    const AffineMap2& map, const Complex& amp,
                    std::vector<Complex>& out) {
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            const Eigen::Vector2d p = map.m * Eigen::Vector2d(x, y) + map.v;
            const double u = (p[0] + grid.lx) / grid.dx();
            const double v = (p[1] + grid.ly) / grid.dy();
            out[static_cast<std::size_t>(j) * grid.nx + i] +=
                amp * sample_bicubic(in, grid, u, v);
        }
    }
}

/// |psi|^2 mass at input nodes the inverse map sends off the grid:
/// that part of the state is unreachable from the output and gets
/// replaced by padding zeros.
double unreachable_mass(const std::vector<Complex>& in, const GridSpec& grid,
                        const AffineMap2& map) {
    const Eigen::Matrix2d minv = map.m.inverse();
    double lost = 0.0;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Eigen::Vector2d x(grid.x(i), grid.y(j));
            const Eigen::Vector2d xp = minv * (x - map.v);
            if (xp[0] < -grid.lx || xp[0] >= grid.lx || xp[1] < -grid.ly ||
                xp[1] >= grid.ly)
                lost += std::norm(in[static_cast<std::size_t>(j) * grid.nx + i]);
        }
    }
    return lost * grid.cell_area();
}

std::vector<Complex> apply_affine_superposition(const std::vector<Complex>& in,
                                                const GridSpec& grid,
                                                const std::vector<AffineMap2>& maps,
                                                const std::vector<Complex>& amps,
                                                TransformStats* stats) {
    std::vector<Complex> out(in.size(), Complex{0.0, 0.0});
    double mass = 0.0;
    for (const auto& c : in) mass += std::norm(c);
    mass *= grid.cell_area();

    double weight_total = 0.0;
    double clipped = 0.0;
    bool all_exact = true;
    for (std::size_t k = 0; k < maps.size(); ++k) {
        const double w = std::norm(amps[k]);
        weight_total += w;
        const ExactMap e = classify_exact(maps[k], grid);
        if (e.ok) {
            gather_exact(in, grid, e, amps[k], out);
        } else {
            all_exact = false;
            if (mass > 0.0) clipped += w * unreachable_mass(in, grid, maps[k]) / mass;
            gather_bicubic(in, grid, maps[k], amps[k], out);
        }
    }
    const double fraction = weight_total > 0.0 ? clipped / weight_total : 0.0;
    if (stats) {
        stats->clipped_mass_fraction = fraction;
        stats->all_terms_exact = all_exact;
    }
    if (fraction > kMaxClippedMassFraction)
        throw ClippingError("transform pushes " + std::to_string(fraction) +
                            " of the state's mass off the grid");
    return out;
}

}  // namespace

WaveField gaussian_field(const GridSpec& grid, const Eigen::Vector2d& center,
                         double sigma, const Eigen::Vector2d& momentum) {
    if (!(sigma > 0.0)) throw ValidationError("gaussian width must be positive");
    WaveField f = make_field(grid);
    const double a = gaussian_norm_2d(sigma);
    const Complex iunit{0.0, 1.0};
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j) - center[1];
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i) - center[0];
            const double r2 = x * x + y * y;
            f.at(i, j) = a * std::exp(-r2 / (2.0 * sigma * sigma) +
                                      iunit * (momentum[0] * grid.x(i) +
                                               momentum[1] * grid.y(j)));
        }
    }
    return f;
}

WaveField spike_field(const GridSpec& grid, int ix, int iy) {
    if (ix < 0 || ix >= grid.nx || iy < 0 || iy >= grid.ny)
        throw DomainError("spike node out of range");
    WaveField f = make_field(grid);
    f.at(ix, iy) = Complex{1.0, 0.0};
    return f;
}

WaveField coherent_field(const GridSpec& grid, const Eigen::Vector2d& center,
                         const Eigen::Vector2d& momentum, double omega) {
    if (!(omega > 0.0)) throw ValidationError("trap frequency must be positive");
    return gaussian_field(grid, center, 1.0 / std::sqrt(omega), momentum);
}

MultiParticleField gaussian_pair_field(const GridSpec& grid, double center1,
                                       double sigma1, double center2, double sigma2) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
        throw ValidationError("gaussian widths must be positive");
    MultiParticleField f = make_pair_field(grid);
    const double a1 = 1.0 / std::sqrt(sigma1 * std::sqrt(std::numbers::pi));
    const double a2 = 1.0 / std::sqrt(sigma2 * std::sqrt(std::numbers::pi));
    for (int j = 0; j < grid.ny; ++j) {
        const double x2 = grid.y(j) - center2;
        const double g2 = a2 * std::exp(-x2 * x2 / (2.0 * sigma2 * sigma2));
        for (int i = 0; i < grid.nx; ++i) {
            const double x1 = grid.x(i) - center1;
            f.at(i, j) = a1 * std::exp(-x1 * x1 / (2.0 * sigma1 * sigma1)) * g2;
        }
    }
    return f;
}

namespace {

double norm_impl(const std::vector<Complex>& v, double cell) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s * cell);
}

double dist_impl(const std::vector<Complex>& a, const std::vector<Complex>& b,
                 double cell) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s * cell);
}

}  // namespace

double l2_norm(const WaveField& f) { return norm_impl(f.values, f.grid.cell_area()); }
double l2_norm(const MultiParticleField& f) {
    return norm_impl(f.values, f.grid.cell_area());
}

double l2_distance(const WaveField& a, const WaveField& b) {
    if (a.grid != b.grid) throw MismatchError("fields live on different grids");
    return dist_impl(a.values, b.values, a.grid.cell_area());
}

double l2_distance(const MultiParticleField& a, const MultiParticleField& b) {
    if (a.grid != b.grid) throw MismatchError("fields live on different grids");
    return dist_impl(a.values, b.values, a.grid.cell_area());
}

bool lattice_exact(const EuclideanTransform& t, const GridSpec& grid) {
    AffineMap2 map;
    if (t.dim() == 1) {
        map.m = Eigen::Matrix2d::Identity();
        map.v = Eigen::Vector2d(t.translation()[0], t.translation()[0]);
    } else if (t.dim() == 2) {
        map.m = t.rotation().topLeftCorner<2, 2>();
        map.v = t.translation().head<2>();
    } else {
        return false;
    }
    return classify_exact(map, grid).ok;
}

WaveField transform_field(const WaveField& psi, const FrameSuperposition& sup,
                          TransformStats* stats) {
    if (sup.dim() != 2)
        throw MismatchError("2-D fields require 2-D transforms, got dimension " +
                            std::to_string(sup.dim()));
    std::vector<AffineMap2> maps;
    std::vector<Complex> amps;
    for (const auto& term : sup.terms()) {
        maps.push_back({term.transform.rotation().topLeftCorner<2, 2>(),
                        term.transform.translation().head<2>()});
        amps.push_back(term.amplitude);
    }
    WaveField out = psi;
    out.values = apply_affine_superposition(psi.values, psi.grid, maps, amps, stats);
    return out;
}

MultiParticleField transform_multiparticle(const MultiParticleField& psi,
                                           const FrameSuperposition& sup,
                                           TransformStats* stats) {
    if (sup.dim() != 1)
        throw MismatchError("two particles on a line require 1-D transforms, got dimension " +
                            std::to_string(sup.dim()));
    std::vector<AffineMap2> maps;
    std::vector<Complex> amps;
    for (const auto& term : sup.terms()) {
        const double a = term.transform.translation()[0];
        maps.push_back({Eigen::Matrix2d::Identity(), Eigen::Vector2d(a, a)});
        amps.push_back(term.amplitude);
    }
    MultiParticleField out = psi;
    out.values = apply_affine_superposition(psi.values, psi.grid, maps, amps, stats);
    return out;
}

namespace {

std::vector<Complex> discrete_gradient(const GridSpec& grid,
                                       const std::vector<Complex>& values, int axis,
                                       DerivScheme scheme) {
    if (scheme == DerivScheme::spectral) return spectral_derivative(grid, values, axis);
    std::vector<Complex> out(values.size());
    const double inv2h = 1.0 / (2.0 * (axis == 0 ? grid.dx() : grid.dy()));
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            int ip = i, im = i, jp = j, jm = j;
            if (axis == 0) {
                ip = wrap(i + 1, grid.nx);
                im = wrap(i - 1, grid.nx);
            } else {
                jp = wrap(j + 1, grid.ny);
                jm = wrap(j - 1, grid.ny);
            }
            out[static_cast<std::size_t>(j) * grid.nx + i] =
                (values[static_cast<std::size_t>(jp) * grid.nx + ip] -
                 values[static_cast<std::size_t>(jm) * grid.nx + im]) *
                inv2h;
        }
    }
    return out;
}

std::vector<Complex> discrete_laplacian(const GridSpec& grid,
                                        const std::vector<Complex>& values,
                                        DerivScheme scheme) {
    if (scheme == DerivScheme::spectral) return spectral_laplacian(grid, values);
    std::vector<Complex> out(values.size());
    const double ihx2 = 1.0 / (grid.dx() * grid.dx());
    const double ihy2 = 1.0 / (grid.dy() * grid.dy());
    for (int j = 0; j < grid.ny; ++j) {
        const int jp = wrap(j + 1, grid.ny);
        const int jm = wrap(j - 1, grid.ny);
        for (int i = 0; i < grid.nx; ++i) {
            const int ip = wrap(i + 1, grid.nx);
            const int im = wrap(i - 1, grid.nx);
            const Complex c = values[static_cast<std::size_t>(j) * grid.nx + i];
            out[static_cast<std::size_t>(j) * grid.nx + i] =
                (values[static_cast<std::size_t>(j) * grid.nx + ip] +
                 values[static_cast<std::size_t>(j) * grid.nx + im] - 2.0 * c) *
                    ihx2 +
                (values[static_cast<std::size_t>(jp) * grid.nx + i] +
                 values[static_cast<std::size_t>(jm) * grid.nx + i] - 2.0 * c) *
                    ihy2;
        }
    }
    return out;
}

}  // namespace

double check_derivative_transform(const WaveField& psi, const FrameSuperposition& sup,
                                  const ScalarField2& grad_x, const ScalarField2& grad_y,
                                  DerivScheme scheme) {
    const WaveField transformed = transform_field(psi, sup);
    const auto gx = discrete_gradient(psi.grid, transformed.values, 0, scheme);
    const auto gy = discrete_gradient(psi.grid, transformed.values, 1, scheme);

    double worst = 0.0;
    const GridSpec& grid = psi.grid;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Eigen::Vector2d xp(grid.x(i), grid.y(j));
            Complex rx{0.0, 0.0}, ry{0.0, 0.0};
            for (const auto& term : sup.terms()) {
                const Eigen::Matrix2d r = term.transform.rotation().topLeftCorner<2, 2>();
                const Eigen::Vector2d p = r * xp + term.transform.translation().head<2>();
                const Complex dx = grad_x(p[0], p[1]);
                const Complex dy = grad_y(p[0], p[1]);
                // chain rule: components pick up R^T
                rx += term.amplitude * (r(0, 0) * dx + r(1, 0) * dy);
                ry += term.amplitude * (r(0, 1) * dx + r(1, 1) * dy);
            }
            const std::size_t idx = static_cast<std::size_t>(j) * grid.nx + i;
            worst = std::max(worst, std::abs(gx[idx] - rx));
            worst = std::max(worst, std::abs(gy[idx] - ry));
        }
    }
    return worst;
}

double check_laplacian_transform(const WaveField& psi, const FrameSuperposition& sup,
                                 const ScalarField2& laplacian, DerivScheme scheme) {
    const WaveField transformed = transform_field(psi, sup);
    const auto lap = discrete_laplacian(psi.grid, transformed.values, scheme);

    double worst = 0.0;
    const GridSpec& grid = psi.grid;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Eigen::Vector2d xp(grid.x(i), grid.y(j));
            Complex ref{0.0, 0.0};
            for (const auto& term : sup.terms()) {
                const Eigen::Vector2d p =
                    term.transform.rotation().topLeftCorner<2, 2>() * xp +
                    term.transform.translation().head<2>();
                ref += term.amplitude * laplacian(p[0], p[1]);
            }
            const std::size_t idx = static_cast<std::size_t>(j) * grid.nx + i;
            worst = std::max(worst, std::abs(lap[idx] - ref));
        }
    }
    return worst;
}

}  // namespace supframe
