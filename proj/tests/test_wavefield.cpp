#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "supframe/errors.hpp"
#include "supframe/spectral.hpp"
#include "supframe/wavefield.hpp"

using namespace supframe;

namespace {

constexpr double kPi = std::numbers::pi;
const FrameId O{"O"};
const FrameId O1{"O'"};

using Complex = std::complex<double>;

FrameSuperposition delta2(const EuclideanTransform& t) { return make_delta(t, O, O1); }

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(GridSpec::square(100, 4.0), ValidationError);
    CHECK_THROWS_AS(GridSpec::square(64, -1.0), ValidationError);
    const GridSpec g = GridSpec::square(64, 4.0);
    CHECK(g.dx() == doctest::Approx(0.125));
    CHECK(g.x(32) == 0.0);  // origin is a node
    CHECK(g.x(0) == -4.0);
}

TEST_CASE("gaussian builder is L2-normalized") {
    const GridSpec g = GridSpec::square(128, 8.0);
    const WaveField psi = gaussian_field(g, {0.0, 0.0}, 1.0);
    CHECK(l2_norm(psi) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(l2_distance(psi, psi) == 0.0);

    const WaveField boosted = gaussian_field(g, {0.5, -0.25}, 1.2, {2.0, 1.0});
    CHECK(l2_norm(boosted) == doctest::Approx(1.0).epsilon(1e-10));

    CHECK_THROWS_AS(l2_distance(psi, gaussian_field(GridSpec::square(64, 8.0), {0, 0}, 1.0)),
                    MismatchError);
}

TEST_CASE("spectral round trip preserves the field and its norm") {
    const GridSpec g = GridSpec::square(64, 4.0);
    const WaveField psi = gaussian_field(g, {0.3, -0.2}, 0.7, {1.0, -2.0});
    Spectral2D fft(g);
    std::vector<Complex> work = psi.values;
    fft.forward(work);
    // Parseval: sum |psi|^2 dx dy == sum |psi_hat|^2 / (nx ny) * dx dy
    double direct = 0.0, spectral = 0.0;
    for (const auto& c : psi.values) direct += std::norm(c);
    for (const auto& c : work) spectral += std::norm(c);
    CHECK(spectral / static_cast<double>(g.size()) ==
          doctest::Approx(direct).epsilon(1e-12));
    fft.inverse(work);
    double diff = 0.0;
    for (std::size_t i = 0; i < work.size(); ++i)
        diff = std::max(diff, std::abs(work[i] - psi.values[i]));
    CHECK(diff < 1e-12);
}

TEST_CASE("identity superposition transforms a field to itself") {
    const GridSpec g = GridSpec::square(64, 4.0);
    const WaveField psi = gaussian_field(g, {0.4, 0.1}, 0.6, {1.5, 0.0});
    TransformStats stats;
    const WaveField out = transform_field(psi, delta2(EuclideanTransform::identity(2)), &stats);
    CHECK(stats.all_terms_exact);
    CHECK(stats.clipped_mass_fraction == 0.0);
    CHECK(l2_distance(out, psi) == 0.0);
}

TEST_CASE("a spike maps to one spike per support term") {
    const GridSpec g = GridSpec::square(32, 2.0);  // dx = 0.125
    const WaveField psi = spike_field(g, 16, 16);  // spike at the origin

    const Amplitude c1{0.6, 0.0}, c2{0.0, 0.8};
    const auto sup = FrameSuperposition::make(
        O, O1,
        {{EuclideanTransform::planar(0.0, {0.5, 0.0}), c1},      // +4 steps in x
         {EuclideanTransform::planar(0.0, {-0.25, 0.25}), c2}});  // (-2, +2) steps
    const WaveField out = transform_field(psi, sup);

    // psi'(x') = sum c_k psi(x' + a_k): spikes land at -a_k
    int nonzero = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (std::abs(out.at(i, j)) > 0.0) ++nonzero;
    CHECK(nonzero == 2);
    CHECK(out.at(12, 16) == c1);
    CHECK(out.at(18, 14) == c2);
}

TEST_CASE("rotation-invariant states are fixed by quarter-turn superpositions") {
    const GridSpec g = GridSpec::square(128, 8.0);
    const WaveField psi = gaussian_field(g, {0.0, 0.0}, 1.1);
    const auto sup = FrameSuperposition::make(
        O, O1,
        {{EuclideanTransform::planar(kPi / 2), {0.25, 0.0}},
         {EuclideanTransform::planar(-kPi / 2), {0.375, 0.0}},
         {EuclideanTransform::planar(kPi), {0.375, 0.0}}});  // amplitudes sum to 1
    TransformStats stats;
    const WaveField out = transform_field(psi, sup, &stats);
    CHECK(stats.all_terms_exact);
    CHECK(l2_distance(out, psi) < 1e-12);
}

TEST_CASE("transform_field is linear in the field and in the terms") {
    const GridSpec g = GridSpec::square(64, 4.0);
    const WaveField f = gaussian_field(g, {0.2, 0.0}, 0.5);
    const WaveField h = gaussian_field(g, {-0.3, 0.1}, 0.7, {1.0, 0.0});
    const auto t1 = EuclideanTransform::planar(kPi / 2);
    const auto t2 = EuclideanTransform::planar(0.0, {0.25, -0.5});
    const auto sup = FrameSuperposition::make(O, O1, {{t1, {0.4, 0.2}}, {t2, {0.0, 0.9}}});

    const Complex alpha{0.3, -0.7}, beta{1.1, 0.4};
    WaveField combo = f;
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = alpha * f.values[i] + beta * h.values[i];

    const WaveField lhs = transform_field(combo, sup);
    const WaveField tf = transform_field(f, sup);
    const WaveField th = transform_field(h, sup);
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
        worst = std::max(worst,
                         std::abs(lhs.values[i] - alpha * tf.values[i] - beta * th.values[i]));
    CHECK(worst < 1e-12);

    // term-union linearity
    const auto s1 = FrameSuperposition::make(O, O1, {{t1, {0.4, 0.2}}});
    const auto s2 = FrameSuperposition::make(O, O1, {{t2, {0.0, 0.9}}});
    const WaveField u1 = transform_field(f, s1);
    const WaveField u2 = transform_field(f, s2);
    const WaveField both = transform_field(f, sup);
    worst = 0.0;
    for (std::size_t i = 0; i < both.values.size(); ++i)
        worst = std::max(worst, std::abs(both.values[i] - u1.values[i] - u2.values[i]));
    CHECK(worst < 1e-15);
}

TEST_CASE("transforming by a composition equals transforming along the chain") {
    // a relates O <- O', b relates O' <- O'': carrying a field from O
    // to O' (with a) and on to O'' (with b) must agree with the single
    // transform by compose(a, b).
    const GridSpec g = GridSpec::square(64, 4.0);
    const WaveField psi = gaussian_field(g, {0.25, -0.125}, 0.5);

    const FrameId O2{"O''"};
    const auto a = FrameSuperposition::make(
        O, O1,
        {{EuclideanTransform::planar(kPi / 2), {0.7, 0.0}},
         {EuclideanTransform::planar(0.0, {0.125, 0.0}), {0.0, 0.7}}});
    const auto b = FrameSuperposition::make(
        O1, O2,
        {{EuclideanTransform::planar(kPi, {0.375, -0.25}), {0.6, 0.0}},
         {EuclideanTransform::planar(-kPi / 2), {0.0, -0.8}}});

    const WaveField via_composition = transform_field(psi, compose(a, b));
    const WaveField stepwise = transform_field(transform_field(psi, a), b);
    CHECK(l2_distance(via_composition, stepwise) < 1e-12);

    // deltas: the two-step chain is exactly the composed delta
    const auto da = make_delta(EuclideanTransform::planar(kPi / 2, {0.25, 0.0}), O, O1);
    const auto db = make_delta(EuclideanTransform::planar(kPi), O1, O2);
    CHECK(l2_distance(transform_field(psi, compose(da, db)),
                      transform_field(transform_field(psi, da), db)) < 1e-15);
}

TEST_CASE("bicubic resampling tracks the analytic rotated field") {
    const GridSpec g = GridSpec::square(256, 8.0);
    const double sx = 0.8, sy = 1.4;
    WaveField psi = make_field(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            psi.at(i, j) = std::exp(-x * x / (2 * sx * sx) - y * y / (2 * sy * sy));
        }

    const double theta = kPi / 6;
    TransformStats stats;
    const WaveField out =
        transform_field(psi, delta2(EuclideanTransform::planar(theta)), &stats);
    CHECK_FALSE(stats.all_terms_exact);
    CHECK(stats.clipped_mass_fraction < 1e-6);

    const Eigen::Matrix2d r = Eigen::Rotation2Dd(theta).toRotationMatrix();
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Eigen::Vector2d p = r * Eigen::Vector2d(g.x(i), g.y(j));
            const double exact =
                std::exp(-p[0] * p[0] / (2 * sx * sx) - p[1] * p[1] / (2 * sy * sy));
            worst = std::max(worst, std::abs(out.at(i, j) - exact));
        }
    CHECK(worst < 2e-4);
}

TEST_CASE("excessive clipping raises an error") {
    const GridSpec g = GridSpec::square(64, 4.0);
    const WaveField psi = gaussian_field(g, {0.0, 0.0}, 0.5);
    // non-lattice shift dragging most of the state off the grid
    CHECK_THROWS_AS(
        transform_field(psi, delta2(EuclideanTransform::planar(0.0, {3.3, 0.0}))),
        ClippingError);
    // small non-lattice shift: fine
    TransformStats stats;
    transform_field(psi, delta2(EuclideanTransform::planar(0.0, {0.33, 0.0})), &stats);
    CHECK(stats.clipped_mass_fraction < 1e-6);
}

TEST_CASE("lattice_exact classifies transforms") {
    const GridSpec g = GridSpec::square(64, 4.0);  // dx = 0.125
    CHECK(lattice_exact(EuclideanTransform::identity(2), g));
    CHECK(lattice_exact(EuclideanTransform::planar(kPi / 2), g));
    CHECK(lattice_exact(EuclideanTransform::planar(-kPi / 2, {0.25, 0.5}), g));
    CHECK(lattice_exact(EuclideanTransform::planar(kPi), g));
    CHECK_FALSE(lattice_exact(EuclideanTransform::planar(kPi / 6), g));
    CHECK_FALSE(lattice_exact(EuclideanTransform::planar(0.0, {0.1, 0.0}), g));
    CHECK(lattice_exact(EuclideanTransform::line_translation(0.25), g));
    CHECK_FALSE(lattice_exact(EuclideanTransform::line_translation(0.1), g));
    // 90-degree turns need a square grid
    const GridSpec rect(64, 128, 4.0, 8.0);
    CHECK_FALSE(lattice_exact(EuclideanTransform::planar(kPi / 2), rect));
    CHECK(lattice_exact(EuclideanTransform::planar(kPi), rect));
}

TEST_CASE("two-particle transform: diagonal shifts against a direct oracle") {
    const GridSpec g = GridSpec::square(32, 2.0);  // dx = 0.125
    const MultiParticleField psi = gaussian_pair_field(g, 0.2, 0.35, -0.2, 0.3);
    const double a = 0.5;  // 4 grid steps
    const double c = 1.0 / std::sqrt(2.0);
    const auto sup = FrameSuperposition::make(
        O, O1,
        {{EuclideanTransform::line_translation(a), {c, 0.0}},
         {EuclideanTransform::line_translation(-a), {c, 0.0}}});

    TransformStats stats;
    const MultiParticleField out = transform_multiparticle(psi, sup, &stats);
    CHECK(stats.all_terms_exact);

    // oracle: psi'(x1, x2) = c psi(x1+a, x2+a) + c psi(x1-a, x2-a),
    // indices shifted by 4 with periodic wrap
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Complex want = c * psi.at((i + 4) % 32, (j + 4) % 32) +
                                 c * psi.at((i + 28) % 32, (j + 28) % 32);
            worst = std::max(worst, std::abs(out.at(i, j) - want));
        }
    CHECK(worst == 0.0);

    // product states stay products of the commonly shifted factors
    // (margins kept above 6 sigma so periodic wrap stays negligible)
    const MultiParticleField product = gaussian_pair_field(g, 0.3, 0.3, 0.1, 0.25);
    const double shift = 0.25;
    const MultiParticleField single = transform_multiparticle(
        product, make_delta(EuclideanTransform::line_translation(shift), O, O1));
    const MultiParticleField expected =
        gaussian_pair_field(g, 0.3 - shift, 0.3, 0.1 - shift, 0.25);
    CHECK(l2_distance(single, expected) < 1e-7);

    CHECK_THROWS_AS(
        transform_multiparticle(psi, delta2(EuclideanTransform::identity(2))),
        MismatchError);
    CHECK_THROWS_AS(
        transform_field(gaussian_field(g, {0, 0}, 0.4),
                        make_delta(EuclideanTransform::line_translation(a), O, O1)),
        MismatchError);
}

namespace {

struct GaussianRef {
    double sigma;
    Complex value(double x, double y) const {
        const double a = 1.0 / (sigma * std::sqrt(kPi));
        return a * std::exp(-(x * x + y * y) / (2 * sigma * sigma));
    }
    Complex gx(double x, double y) const { return value(x, y) * (-x / (sigma * sigma)); }
    Complex gy(double x, double y) const { return value(x, y) * (-y / (sigma * sigma)); }
    Complex lap(double x, double y) const {
        const double s2 = sigma * sigma;
        return value(x, y) * ((x * x + y * y) / (s2 * s2) - 2.0 / s2);
    }
};

double gradient_check(int n, const FrameSuperposition& sup, DerivScheme scheme) {
    const GridSpec g = GridSpec::square(n, 8.0);
    const GaussianRef ref{1.2};
    const WaveField psi = gaussian_field(g, {0.0, 0.0}, ref.sigma);
    return check_derivative_transform(
        psi, sup, [&](double x, double y) { return ref.gx(x, y); },
        [&](double x, double y) { return ref.gy(x, y); }, scheme);
}

double laplacian_check(int n, const FrameSuperposition& sup, DerivScheme scheme) {
    const GridSpec g = GridSpec::square(n, 8.0);
    const GaussianRef ref{1.2};
    const WaveField psi = gaussian_field(g, {0.0, 0.0}, ref.sigma);
    return check_laplacian_transform(
        psi, sup, [&](double x, double y) { return ref.lap(x, y); }, scheme);
}

}  // namespace

TEST_CASE("centered differences converge at second order in dx") {
    const auto id = delta2(EuclideanTransform::identity(2));
    const double e64 = gradient_check(64, id, DerivScheme::central2);
    const double e128 = gradient_check(128, id, DerivScheme::central2);
    const double e256 = gradient_check(256, id, DerivScheme::central2);
    CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(e128 / e256 == doctest::Approx(4.0).epsilon(0.15));

    const double l64 = laplacian_check(64, id, DerivScheme::central2);
    const double l128 = laplacian_check(128, id, DerivScheme::central2);
    CHECK(l64 / l128 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("derivative transformation rule holds through quarter-turn superpositions") {
    const double c = 1.0 / std::sqrt(2.0);
    const auto sup = FrameSuperposition::make(
        O, O1,
        {{EuclideanTransform::planar(kPi / 2), {c, 0.0}},
         {EuclideanTransform::planar(-kPi / 2), {c, 0.0}}});
    // spectral derivatives of a resolved state: discrepancy far below
    // the 1e-6 budget
    CHECK(gradient_check(256, sup, DerivScheme::spectral) < 1e-6);
    CHECK(laplacian_check(256, sup, DerivScheme::spectral) < 1e-6);
    // centered differences stay at their truncation level
    CHECK(gradient_check(256, sup, DerivScheme::central2) < 1e-2);
}
