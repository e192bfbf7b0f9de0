#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "supframe/errors.hpp"
#include "supframe/schrodinger.hpp"
#include "supframe/spectral.hpp"

using namespace supframe;

namespace {

constexpr double kPi = std::numbers::pi;
const FrameId O{"O"};
const FrameId O1{"O'"};

using Complex = std::complex<double>;

FrameSuperposition quarter_turn_pair() {
    const double c = 1.0 / std::sqrt(2.0);
    return FrameSuperposition::make(
        O, O1,
        {{EuclideanTransform::planar(kPi / 2), {c, 0.0}},
         {EuclideanTransform::planar(-kPi / 2), {c, 0.0}}});
}

double variance_x(const WaveField& f) {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) {
            const double w = std::norm(f.at(i, j));
            const double x = f.grid.x(i);
            m0 += w;
            m1 += w * x;
            m2 += w * x * x;
        }
    const double mean = m1 / m0;
    return m2 / m0 - mean * mean;
}

Eigen::Vector2d centroid(const WaveField& f) {
    double m0 = 0.0, mx = 0.0, my = 0.0;
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) {
            const double w = std::norm(f.at(i, j));
            m0 += w;
            mx += w * f.grid.x(i);
            my += w * f.grid.y(j);
        }
    return {mx / m0, my / m0};
}

}  // namespace

TEST_CASE("parameter validation") {
    EvolutionParams p;
    p.dt = -1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.masses = {};
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.masses = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.masses = {-2.0};
    CHECK_THROWS_AS(p.validate(), ValidationError);

    CHECK_THROWS_AS(Potential::isotropic_harmonic(-1.0), ValidationError);
    CHECK_THROWS_AS(Potential::pairwise_central({0.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(Potential::pairwise_central({1.0, 0.5}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(Potential::pairwise_central({0.0, 1.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(Potential::free_space().value_pair(0, 0) +
                        Potential::pairwise_central({0, 1}, {0, 1}).value_single(0, 0),
                    DomainError);
}

TEST_CASE("zero steps is the identity") {
    const GridSpec g = GridSpec::square(64, 4.0);
    const WaveField psi = gaussian_field(g, {0.2, 0.0}, 0.5);
    EvolutionParams p;
    p.steps = 0;
    const WaveField out = evolve(psi, Potential::free_space(), p);
    CHECK(l2_distance(out, psi) == 0.0);
    CHECK(out.time == psi.time);
}

TEST_CASE("free gaussian follows the analytic spreading law") {
    // |psi(t)|^2 of exp(-r^2 / 2 s0^2) has width s(t)^2 = s0^2 (1 + t^2/s0^4);
    // the position variance per axis is s(t)^2 / 2.
    const GridSpec g = GridSpec::square(256, 8.0);
    const double s0 = 1.0;
    const WaveField psi0 = gaussian_field(g, {0.0, 0.0}, s0);

    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 1000;
    EvolveDiagnostics diag;
    const WaveField psi1 = evolve(psi0, Potential::free_space(), p, &diag);
    CHECK_FALSE(diag.resolution_warning);

    const double t = 1.0;
    const double expected = s0 * s0 * (1.0 + t * t / (s0 * s0 * s0 * s0));
    const double measured = 2.0 * variance_x(psi1);
    CHECK(std::abs(measured - expected) / expected < 1e-6);
}

TEST_CASE("norm and energy behaviour over a thousand steps") {
    const GridSpec g = GridSpec::square(128, 8.0);
    const WaveField psi0 = coherent_field(g, {1.0, 0.0}, {0.0, 1.0}, 1.0);
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 1000;

    SUBCASE("free: norm to rounding, energy exactly conserved by the exact step") {
        EvolveDiagnostics diag;
        const WaveField out = evolve(psi0, Potential::free_space(), p, &diag);
        CHECK(std::abs(diag.final_norm - diag.initial_norm) < 1e-12);
        const double e0 = energy_expectation(psi0, Potential::free_space(), p.masses);
        const double e1 = energy_expectation(out, Potential::free_space(), p.masses);
        CHECK(std::abs(e1 - e0) / std::abs(e0) < 1e-12);
    }

    SUBCASE("harmonic: norm to rounding, energy wobble at the dt^2 splitting scale") {
        const Potential v = Potential::isotropic_harmonic(1.0);
        EvolveDiagnostics diag;
        const WaveField out = evolve(psi0, v, p, &diag);
        CHECK(std::abs(diag.final_norm - diag.initial_norm) < 1e-12);

        // the energy error of the split step oscillates instead of
        // drifting; track the max deviation along the trajectory
        const auto max_wobble = [&](const WaveField& state0, double dt, long chunk,
                                    int chunks) {
            const double e0 = energy_expectation(state0, v, p.masses);
            EvolutionParams step;
            step.dt = dt;
            step.steps = chunk;
            WaveField state = state0;
            double worst = 0.0;
            for (int k = 0; k < chunks; ++k) {
                state = evolve(state, v, step);
                worst = std::max(worst,
                                 std::abs(energy_expectation(state, v, p.masses) - e0));
            }
            return worst / e0;
        };

        // coherent states ride the splitting so smoothly the wobble
        // sits at rounding level
        CHECK(max_wobble(psi0, 1e-3, 100, 10) < 1e-8);

        // a squeezed state exposes the generic dt^2 wobble
        const WaveField squeezed = gaussian_field(g, {1.0, 0.0}, 0.8, {0.0, 1.0});
        const double wobble = max_wobble(squeezed, 1e-3, 100, 10);
        CHECK(wobble < 1e-6);
        const double wobble2 = max_wobble(squeezed, 5e-4, 200, 10);
        CHECK(wobble2 / wobble == doctest::Approx(0.25).epsilon(0.35));
    }
}

TEST_CASE("evolution is linear") {
    const GridSpec g = GridSpec::square(64, 4.0);
    const WaveField f = gaussian_field(g, {0.3, 0.0}, 0.5);
    const WaveField h = gaussian_field(g, {-0.2, 0.2}, 0.4, {1.0, 0.0});
    const Potential v = Potential::isotropic_harmonic(1.0);
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 50;

    const Complex alpha{0.6, -0.2}, beta{0.1, 0.9};
    WaveField combo = f;
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = alpha * f.values[i] + beta * h.values[i];

    const WaveField lhs = evolve(combo, v, p);
    const WaveField ef = evolve(f, v, p);
    const WaveField eh = evolve(h, v, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
        worst = std::max(worst,
                         std::abs(lhs.values[i] - alpha * ef.values[i] - beta * eh.values[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("coherent state follows the classical circle and revives") {
    const GridSpec g = GridSpec::square(128, 8.0);
    const Potential v = Potential::isotropic_harmonic(1.0);
    // center (1, 0), momentum (0, 1): classical orbit (cos t, sin t)
    const WaveField psi0 = coherent_field(g, {1.0, 0.0}, {0.0, 1.0}, 1.0);

    EvolutionParams p;
    p.steps = 1500;
    p.dt = (kPi / 2) / p.steps;
    const WaveField quarter = evolve(psi0, v, p);
    const Eigen::Vector2d c_quarter = centroid(quarter);
    CHECK(std::abs(c_quarter[0] - 0.0) < 1e-5);
    CHECK(std::abs(c_quarter[1] - 1.0) < 1e-5);

    p.steps = 6000;
    p.dt = (2.0 * kPi) / p.steps;
    const WaveField full = evolve(psi0, v, p);
    // fidelity |<psi0|psi(2pi)>| (norms are 1)
    Complex overlap{0.0, 0.0};
    for (std::size_t i = 0; i < full.values.size(); ++i)
        overlap += std::conj(psi0.values[i]) * full.values[i];
    const double fidelity = std::abs(overlap) * g.cell_area();
    CHECK(fidelity >= 1.0 - 1e-6);
}

TEST_CASE("split-step matches the dense matrix exponential on a small grid") {
    const GridSpec g = GridSpec::square(16, 8.0);
    const int n = static_cast<int>(g.size());
    const Potential v = Potential::isotropic_harmonic(1.0);
    const std::vector<double> masses = {1.0};

    // assemble H column by column through the spectral generator
    Eigen::MatrixXcd h(n, n);
    for (int col = 0; col < n; ++col) {
        WaveField basis = make_field(g);
        basis.values[col] = {1.0, 0.0};
        const WaveField rhs = schrodinger_rhs(basis, v, masses);
        for (int row = 0; row < n; ++row)
            h(row, col) = Complex{0.0, 1.0} * rhs.values[row];  // H = i (-iH)
    }
    const Eigen::MatrixXcd h_sym = 0.5 * (h + h.adjoint());
    CHECK((h - h_sym).norm() < 1e-10);

    const WaveField psi0 = gaussian_field(g, {0.0, 0.0}, 2.0);
    Eigen::VectorXcd x0(n);
    for (int i = 0; i < n; ++i) x0[i] = psi0.values[i];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h_sym);
    const auto propagate = [&](double t) {
        const Eigen::VectorXcd phases =
            (eig.eigenvalues().array() * Complex{0.0, -1.0} * t).exp();
        return (eig.eigenvectors() * phases.asDiagonal() *
                eig.eigenvectors().adjoint() * x0).eval();
    };

    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 20;
    const Eigen::VectorXcd exact = propagate(p.dt * p.steps);

    const auto solver_error = [&](const EvolutionParams& params) {
        const WaveField out = evolve(psi0, v, params);
        double err = 0.0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(out.values[i] - exact[i]));
        return err;
    };

    const double err_fine = solver_error(p);
    CHECK(err_fine < 1e-5);

    EvolutionParams coarse = p;
    coarse.dt = 2e-3;
    coarse.steps = 10;
    const double err_coarse = solver_error(coarse);
    CHECK(err_coarse / err_fine == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("potential invariance check") {
    const GridSpec g = GridSpec::square(64, 8.0);

    SUBCASE("isotropic trap under arbitrary rotations") {
        const auto sup = FrameSuperposition::make(
            O, O1,
            {{EuclideanTransform::planar(0.53), {0.8, 0.0}},
             {EuclideanTransform::planar(-1.21), {0.0, 0.6}}});
        CHECK(check_potential_invariance(Potential::isotropic_harmonic(1.0), sup, g) <
              1e-12);
    }

    SUBCASE("pairwise potential under common translations") {
        const auto sup = FrameSuperposition::make(
            O, O1,
            {{EuclideanTransform::line_translation(0.5), {1.0, 0.0}},
             {EuclideanTransform::line_translation(-1.25), {1.0, 0.0}}});
        const Potential v = Potential::pairwise_central({0.0, 1.0, 2.0, 4.0, 16.0},
                                                        {2.0, 0.5, 0.1, 0.0, 0.0});
        CHECK(check_potential_invariance_pair(v, sup, g) < 1e-12);
    }

    SUBCASE("anisotropic trap under a 30-degree rotation is caught") {
        const auto sup = make_delta(EuclideanTransform::planar(kPi / 6), O, O1);
        const double dev =
            check_potential_invariance(Potential::anisotropic_harmonic(1.0, 2.0), sup, g);
        CHECK(dev > 1e-3);
    }
}

TEST_CASE("time-derivative transformation rule") {
    // The wide test state needs a box big enough that its periodized
    // tails stay flat: boundary kinks get k^6-amplified into the
    // third time derivative the centered difference exposes.
    const GridSpec g = GridSpec::square(256, 12.0);
    const WaveField psi = gaussian_field(g, {0.0, 0.0}, 2.0);
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 1;

    SUBCASE("the spectral generator matches the analytic free derivative") {
        // oracle: for the free particle, d psi/dt = (i/2) lap psi
        const WaveField narrow = gaussian_field(g, {0.0, 0.0}, 1.0);
        const WaveField rhs = schrodinger_rhs(narrow, Potential::free_space(), p.masses);
        const double s2 = 1.0;
        double worst = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x(i), y = g.y(j);
                const double r2 = x * x + y * y;
                const Complex lap = narrow.at(i, j) * (r2 / (s2 * s2) - 2.0 / s2);
                const Complex want = Complex{0.0, 0.5} * lap;
                worst = std::max(worst, std::abs(rhs.at(i, j) - want));
            }
        CHECK(worst < 1e-9);
    }

    SUBCASE("identity superposition: pure centered-difference truncation") {
        const auto id = make_delta(EuclideanTransform::identity(2), O, O1);
        const double d =
            check_time_derivative_transform(psi, Potential::free_space(), p, id);
        CHECK(d > 1e-12);  // genuinely the dt^2 term, not zero
        CHECK(d < 1e-8);
    }

    SUBCASE("quarter-turn superposition on the free gaussian") {
        const double d = check_time_derivative_transform(psi, Potential::free_space(), p,
                                                         quarter_turn_pair());
        CHECK(d < 1e-8);

        EvolutionParams doubled = p;
        doubled.dt = 2e-3;
        const double d2 = check_time_derivative_transform(psi, Potential::free_space(),
                                                          doubled, quarter_turn_pair());
        CHECK(d2 / d == doctest::Approx(4.0).epsilon(0.2));
    }

    SUBCASE("harmonic potential adds the splitting commutator at the same order") {
        const GridSpec g8 = GridSpec::square(256, 8.0);
        const WaveField narrow = gaussian_field(g8, {0.0, 0.0}, 1.0);
        const double d = check_time_derivative_transform(
            narrow, Potential::isotropic_harmonic(1.0), p, quarter_turn_pair());
        CHECK(d < 1e-5);
    }
}

TEST_CASE("commutation residual") {
    EvolutionParams p;
    p.dt = 1e-3;
    p.steps = 200;

    SUBCASE("identity superposition commutes to rounding") {
        const GridSpec g = GridSpec::square(128, 8.0);
        const WaveField psi = gaussian_field(g, {0.5, 0.0}, 1.0);
        const auto id = make_delta(EuclideanTransform::identity(2), O, O1);
        CHECK(commutation_residual(psi, Potential::free_space(), p, id) < 1e-13);
    }

    SUBCASE("lattice-exact superpositions: free and harmonic") {
        const GridSpec g = GridSpec::square(128, 8.0);
        const WaveField psi = gaussian_field(g, {0.5, 0.25}, 1.0);
        CHECK(commutation_residual(psi, Potential::free_space(), p, quarter_turn_pair()) <
              1e-10);
        CHECK(commutation_residual(psi, Potential::isotropic_harmonic(1.0), p,
                                   quarter_turn_pair()) < 1e-10);
    }

    SUBCASE("generic angle: interpolation-limited but small") {
        const GridSpec g = GridSpec::square(128, 8.0);
        const WaveField psi = gaussian_field(g, {0.0, 0.0}, 1.0);
        const double c = 1.0 / std::sqrt(2.0);
        const auto sup = FrameSuperposition::make(
            O, O1,
            {{EuclideanTransform::planar(kPi / 6), {c, 0.0}},
             {EuclideanTransform::planar(-kPi / 6), {c, 0.0}}});
        const double r = commutation_residual(psi, Potential::free_space(), p, sup);
        CHECK(r < 4e-3);
    }

    SUBCASE("negative control: non-invariant trap breaks commutation") {
        const GridSpec g = GridSpec::square(128, 8.0);
        const WaveField psi = gaussian_field(g, {0.5, 0.0}, 1.0);
        const Potential bad = Potential::anisotropic_harmonic(1.0, 2.0);
        const double r = commutation_residual(psi, bad, p, quarter_turn_pair());
        CHECK(r > 1e-3);
    }

    SUBCASE("two particles with a pairwise potential and common shifts") {
        const GridSpec g = GridSpec::square(64, 4.0);
        const MultiParticleField psi = gaussian_pair_field(g, 0.4, 0.35, -0.4, 0.3);
        // densely tabulated smooth well; a coarse kinky table sprays
        // spectral tails that reach the wrap seam, where a pairwise
        // potential genuinely is not shift invariant
        std::vector<double> radii, values;
        for (int i = 0; i <= 200; ++i) {
            const double r = 8.0 * i / 200.0;
            radii.push_back(r);
            values.push_back(-std::exp(-r * r / 2.0));
        }
        const Potential v = Potential::pairwise_central(radii, values);
        EvolutionParams pp;
        pp.dt = 1e-3;
        pp.steps = 100;
        pp.masses = {1.0, 1.5};
        const double c = 1.0 / std::sqrt(2.0);
        const auto sup = FrameSuperposition::make(
            O, O1,
            {{EuclideanTransform::line_translation(0.5), {c, 0.0}},
             {EuclideanTransform::line_translation(-0.25), {0.0, c}}});
        CHECK(commutation_residual(psi, v, pp, sup) < 5e-12);
    }
}

TEST_CASE("NaN input is rejected") {
    const GridSpec g = GridSpec::square(32, 4.0);
    WaveField psi = gaussian_field(g, {0.0, 0.0}, 0.8);
    psi.values[5] = {std::numeric_limits<double>::quiet_NaN(), 0.0};
    EvolutionParams p;
    p.steps = 1;
    CHECK_THROWS_AS(evolve(psi, Potential::free_space(), p), Error);
}
