#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "supframe/grid.hpp"
#include "supframe/superposition.hpp"

namespace supframe {

/// Normalized Gaussian packet exp(-|x-c|^2 / 2 sigma^2 + i p.x), unit L2 norm.
WaveField gaussian_field(const GridSpec& grid, const Eigen::Vector2d& center,
                         double sigma,
                         const Eigen::Vector2d& momentum = Eigen::Vector2d::Zero());

/// Position eigenstate proxy: a single nonzero node.
WaveField spike_field(const GridSpec& grid, int ix, int iy);

/// Ground-width coherent state of the isotropic trap with frequency
/// omega (unit mass): Gaussian of width 1/sqrt(omega) with a momentum
/// boost.
WaveField coherent_field(const GridSpec& grid, const Eigen::Vector2d& center,
                         const Eigen::Vector2d& momentum, double omega);

/// Product of two 1-D Gaussians on the two particle axes, unit norm.
MultiParticleField gaussian_pair_field(const GridSpec& grid, double center1,
                                       double sigma1, double center2, double sigma2);

double l2_norm(const WaveField& f);
double l2_norm(const MultiParticleField& f);
double l2_distance(const WaveField& a, const WaveField& b);
double l2_distance(const MultiParticleField& a, const MultiParticleField& b);

/// True when the rigid motion maps grid nodes to grid nodes: the
/// rotation is a multiple of 90 degrees (on a square grid when odd)
/// and the translation is an integer number of grid steps.  Such
/// transforms act as exact index permutations (periodic wrap), so they
/// carry no resampling error at all.
bool lattice_exact(const EuclideanTransform& t, const GridSpec& grid);

struct TransformStats {
    /// Born-weighted fraction of |psi|^2 mass that no term could reach
    /// (its preimage lies off the grid).  Only resampled terms clip;
    /// lattice-exact terms wrap.
    double clipped_mass_fraction = 0.0;
    bool all_terms_exact = true;
};

/// Fraction above which transform_field refuses to silently zero-pad.
inline constexpr double kMaxClippedMassFraction = 1e-6;

/// Transformation of a wavefunction into a superposed frame:
/// psi'(x') = sum_k c_k psi(T_k x').  Lattice-exact terms are gathered
/// by index permutation; anything else is resampled bicubically with
/// zero padding off the grid.  Linear in psi and in the amplitudes.
/// Throws ClippingError when more than kMaxClippedMassFraction of the
/// mass falls off the grid (see TransformStats).
WaveField transform_field(const WaveField& psi, const FrameSuperposition& sup,
                          TransformStats* stats = nullptr);

/// Two particles on a line, the same 1-D rigid motion applied to every
/// particle coordinate within each term:
/// psi'(x1', x2') = sum_k c_k psi(T_k x1', T_k x2').
MultiParticleField transform_multiparticle(const MultiParticleField& psi,
                                           const FrameSuperposition& sup,
                                           TransformStats* stats = nullptr);

enum class DerivScheme {
    central2,  // second-order centered differences, periodic wrap
    spectral,  // FFT derivative
};

using ScalarField2 = std::function<std::complex<double>(double, double)>;

/// Residual of the gradient transformation rule: compares the discrete
/// gradient of transform_field(psi, sup) against the combination
/// sum_k c_k R_k^T (grad psi)(T_k x') built from the supplied gradient
/// (normally the analytic gradient of the test field).  Max-norm over
/// nodes and components.
double check_derivative_transform(const WaveField& psi, const FrameSuperposition& sup,
                                  const ScalarField2& grad_x, const ScalarField2& grad_y,
                                  DerivScheme scheme = DerivScheme::central2);

/// Same for the Laplacian, whose transformation has no rotation factor
/// left: lap psi'(x') = sum_k c_k (lap psi)(T_k x').
double check_laplacian_transform(const WaveField& psi, const FrameSuperposition& sup,
                                 const ScalarField2& laplacian,
                                 DerivScheme scheme = DerivScheme::central2);

}  // namespace supframe
