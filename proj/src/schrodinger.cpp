#include "supframe/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "supframe/spectral.hpp"

namespace supframe {

namespace {

using Complex = std::complex<double>;

double lerp_table(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = it - xs.begin();
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

}  // namespace

Potential Potential::free_space() { return Potential(Kind::free_space); }

Potential Potential::isotropic_harmonic(double omega) {
    if (!(omega > 0.0)) throw ValidationError("trap frequency must be positive");
    Potential p(Kind::isotropic_harmonic);
    p.omega_x_ = p.omega_y_ = omega;
    return p;
}

Potential Potential::anisotropic_harmonic(double omega_x, double omega_y) {
    if (!(omega_x > 0.0) || !(omega_y > 0.0))
        throw ValidationError("trap frequencies must be positive");
    Potential p(Kind::anisotropic_harmonic);
    p.omega_x_ = omega_x;
    p.omega_y_ = omega_y;
    return p;
}

Potential Potential::pairwise_central(std::vector<double> radii, std::vector<double> values) {
    if (radii.size() < 2 || radii.size() != values.size())
        throw ValidationError("pairwise potential needs matching r/v tables with >= 2 points");
    if (!std::is_sorted(radii.begin(), radii.end()))
        throw ValidationError("pairwise potential radii must be increasing");
    if (radii.front() < 0.0)
        throw ValidationError("pairwise potential radii must be nonnegative");
    Potential p(Kind::pairwise_central);
    p.radii_ = std::move(radii);
    p.values_ = std::move(values);
    return p;
}

double Potential::value_single(double x, double y) const {
    switch (kind_) {
        case Kind::free_space:
            return 0.0;
        case Kind::isotropic_harmonic:
            return 0.5 * omega_x_ * omega_x_ * (x * x + y * y);
        case Kind::anisotropic_harmonic:
            return 0.5 * (omega_x_ * omega_x_ * x * x + omega_y_ * omega_y_ * y * y);
        case Kind::pairwise_central:
            throw DomainError("pairwise potential needs at least two particles");
    }
    return 0.0;
}

double Potential::value_pair(double x1, double x2) const {
    switch (kind_) {
        case Kind::free_space:
            return 0.0;
        case Kind::pairwise_central:
            return lerp_table(radii_, values_, std::abs(x1 - x2));
        case Kind::isotropic_harmonic:
            return 0.5 * omega_x_ * omega_x_ * (x1 * x1 + x2 * x2);
        case Kind::anisotropic_harmonic:
            return 0.5 * (omega_x_ * omega_x_ * x1 * x1 + omega_y_ * omega_y_ * x2 * x2);
    }
    return 0.0;
}

std::vector<double> Potential::table_single(const GridSpec& grid) const {
    std::vector<double> t(grid.size());
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            t[static_cast<std::size_t>(j) * grid.nx + i] = value_single(grid.x(i), grid.y(j));
    return t;
}

std::vector<double> Potential::table_pair(const GridSpec& grid) const {
    std::vector<double> t(grid.size());
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            t[static_cast<std::size_t>(j) * grid.nx + i] = value_pair(grid.x(i), grid.y(j));
    return t;
}

void EvolutionParams::validate() const {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (steps < 0) throw ValidationError("steps must be nonnegative");
    if (masses.empty() || masses.size() > 2)
        throw ValidationError("one or two particle masses are supported");
    for (double m : masses)
        if (!(m > 0.0)) throw ValidationError("masses must be positive");
}

namespace {

/// Core split-step loop over a 2-axis grid.  `mass_x`/`mass_y` are the
/// masses attached to the two grid axes: equal for one particle in the
/// plane, per-particle for two particles on a line.
void evolve_values(std::vector<Complex>& values, const GridSpec& grid,
                   const std::vector<double>& vtable, double mass_x, double mass_y,
                   double dt, long steps) {
    if (steps == 0) return;
    Spectral2D fft(grid);
    const Complex iunit{0.0, 1.0};

    std::vector<Complex> half_kick(vtable.size());
    for (std::size_t i = 0; i < vtable.size(); ++i)
        half_kick[i] = std::exp(-iunit * vtable[i] * (0.5 * dt));

    std::vector<Complex> drift(grid.size());
    for (int j = 0; j < grid.ny; ++j) {
        const double ky = Spectral2D::wavenumber(j, grid.ny, grid.ly);
        for (int i = 0; i < grid.nx; ++i) {
            const double kx = Spectral2D::wavenumber(i, grid.nx, grid.lx);
            const double kinetic =
                kx * kx / (2.0 * mass_x) + ky * ky / (2.0 * mass_y);
            drift[static_cast<std::size_t>(j) * grid.nx + i] =
                std::exp(-iunit * kinetic * dt);
        }
    }

    for (long s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] *= half_kick[i];
        fft.forward(values);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] *= drift[i];
        fft.inverse(values);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] *= half_kick[i];
    }
}

void fill_diagnostics(const GridSpec& grid, const std::vector<Complex>& before,
                      const std::vector<Complex>& after,
                      const std::vector<double>& vtable, double dt,
                      EvolveDiagnostics* diag) {
    if (!diag) return;
    auto norm_of = [&](const std::vector<Complex>& v) {
        double s = 0.0;
        for (const auto& c : v) s += std::norm(c);
        return std::sqrt(s * grid.cell_area());
    };
    diag->initial_norm = norm_of(before);
    diag->final_norm = norm_of(after);
    diag->spectral_tail_fraction = spectral_tail_fraction(grid, before);
    diag->resolution_warning = diag->spectral_tail_fraction > 1e-10;
    double vmax = 0.0;
    for (double v : vtable) vmax = std::max(vmax, std::abs(v));
    diag->stability_warning = dt * vmax > 0.1;
}

void require_finite(const std::vector<Complex>& values) {
    for (const auto& c : values)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw Error("evolution produced a non-finite amplitude");
}

}  // namespace

WaveField evolve(const WaveField& psi, const Potential& v, const EvolutionParams& p,
                 EvolveDiagnostics* diag) {
    p.validate();
    const std::vector<double> vtable = v.table_single(psi.grid);
    const double m = p.masses[0];
    WaveField out = psi;
    evolve_values(out.values, psi.grid, vtable, m, m, p.dt, p.steps);
    require_finite(out.values);
    out.time = psi.time + p.dt * p.steps;
    fill_diagnostics(psi.grid, psi.values, out.values, vtable, p.dt, diag);
    return out;
}

MultiParticleField evolve(const MultiParticleField& psi, const Potential& v,
                          const EvolutionParams& p, EvolveDiagnostics* diag) {
    p.validate();
    const std::vector<double> vtable = v.table_pair(psi.grid);
    const double m1 = p.masses[0];
    const double m2 = p.masses.size() > 1 ? p.masses[1] : p.masses[0];
    MultiParticleField out = psi;
    evolve_values(out.values, psi.grid, vtable, m1, m2, p.dt, p.steps);
    require_finite(out.values);
    out.time = psi.time + p.dt * p.steps;
    fill_diagnostics(psi.grid, psi.values, out.values, vtable, p.dt, diag);
    return out;
}

double commutation_residual(const WaveField& psi0, const Potential& v,
                            const EvolutionParams& p, const FrameSuperposition& sup) {
    const WaveField evolve_then_transform = transform_field(evolve(psi0, v, p), sup);
    const WaveField transform_then_evolve = evolve(transform_field(psi0, sup), v, p);
    const double scale = l2_norm(evolve_then_transform);
    if (!(scale > 0.0)) throw DegenerateStateError("transformed state has zero norm");
    return l2_distance(evolve_then_transform, transform_then_evolve) / scale;
}

double commutation_residual(const MultiParticleField& psi0, const Potential& v,
                            const EvolutionParams& p, const FrameSuperposition& sup) {
    const MultiParticleField a = transform_multiparticle(evolve(psi0, v, p), sup);
    const MultiParticleField b = evolve(transform_multiparticle(psi0, sup), v, p);
    const double scale = l2_norm(a);
    if (!(scale > 0.0)) throw DegenerateStateError("transformed state has zero norm");
    return l2_distance(a, b) / scale;
}

double check_potential_invariance(const Potential& v, const FrameSuperposition& sup,
                                  const GridSpec& grid) {
    if (sup.dim() != 2)
        throw MismatchError("single-particle invariance check needs 2-D transforms");
    double worst = 0.0;
    for (const auto& term : sup.terms()) {
        const Eigen::Matrix2d r = term.transform.rotation().topLeftCorner<2, 2>();
        const Eigen::Vector2d t = term.transform.translation().head<2>();
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                const Eigen::Vector2d x(grid.x(i), grid.y(j));
                const Eigen::Vector2d tx = r * x + t;
                worst = std::max(worst, std::abs(v.value_single(tx[0], tx[1]) -
                                                 v.value_single(x[0], x[1])));
            }
        }
    }
    return worst;
}

double check_potential_invariance_pair(const Potential& v, const FrameSuperposition& sup,
                                       const GridSpec& grid) {
    if (sup.dim() != 1)
        throw MismatchError("two-particle invariance check needs 1-D transforms");
    double worst = 0.0;
    for (const auto& term : sup.terms()) {
        const double a = term.transform.translation()[0];
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                const double x1 = grid.x(i);
                const double x2 = grid.y(j);
                worst = std::max(worst, std::abs(v.value_pair(x1 + a, x2 + a) -
                                                 v.value_pair(x1, x2)));
            }
        }
    }
    return worst;
}

WaveField schrodinger_rhs(const WaveField& psi, const Potential& v,
                          const std::vector<double>& masses) {
    const double m = masses.empty() ? 1.0 : masses[0];
    WaveField out = psi;
    out.values = spectral_laplacian(psi.grid, psi.values);
    const std::vector<double> vtable = v.table_single(psi.grid);
    const Complex iunit{0.0, 1.0};
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const Complex h = -out.values[i] / (2.0 * m) + vtable[i] * psi.values[i];
        out.values[i] = -iunit * h;
    }
    return out;
}

double check_time_derivative_transform(const WaveField& psi, const Potential& v,
                                       const EvolutionParams& p,
                                       const FrameSuperposition& sup) {
    p.validate();
    const std::vector<double> vtable = v.table_single(psi.grid);
    const double m = p.masses[0];

    // One step forward and one step back from t, then a centered
    // difference of the transformed trajectory.
    WaveField fwd = psi, bwd = psi;
    evolve_values(fwd.values, psi.grid, vtable, m, m, p.dt, 1);
    evolve_values(bwd.values, psi.grid, vtable, m, m, -p.dt, 1);
    const WaveField tf = transform_field(fwd, sup);
    const WaveField tb = transform_field(bwd, sup);

    const WaveField rhs = transform_field(schrodinger_rhs(psi, v, p.masses), sup);

    double worst = 0.0;
    const double inv2dt = 1.0 / (2.0 * p.dt);
    for (std::size_t i = 0; i < rhs.values.size(); ++i) {
        const Complex lhs = (tf.values[i] - tb.values[i]) * inv2dt;
        worst = std::max(worst, std::abs(lhs - rhs.values[i]));
    }
    return worst;
}

double energy_expectation(const WaveField& psi, const Potential& v,
                          const std::vector<double>& masses) {
    const double m = masses.empty() ? 1.0 : masses[0];
    const auto lap = spectral_laplacian(psi.grid, psi.values);
    const std::vector<double> vtable = v.table_single(psi.grid);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const Complex h = -lap[i] / (2.0 * m) + vtable[i] * psi.values[i];
        num += (std::conj(psi.values[i]) * h).real();
        den += std::norm(psi.values[i]);
    }
    if (!(den > 0.0)) throw DegenerateStateError("energy of a zero state");
    return num / den;
}

}  // namespace supframe
