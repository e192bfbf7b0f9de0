#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "supframe/philox.hpp"
#include "supframe/transform.hpp"

namespace supframe {

using Amplitude = std::complex<double>;

/// One supported transform together with its complex amplitude.
struct WeightedTransform {
    EuclideanTransform transform;
    Amplitude amplitude;
};

/// Finite complex-weighted set of rigid motions between two frames.
///
/// A superposition with a single supported transform is an ordinary,
/// definite coordinate relation between the frames; more than one term
/// means the frames are in superposition relative to each other.
///
/// Representation invariants, enforced at construction:
///   * all transforms share one dimension,
///   * no two terms carry the same transform (equal transforms are
///     merged, amplitudes adding coherently),
///   * terms are sorted by the fixed total order on transforms, so two
///     equal superpositions have identical term sequences regardless of
///     how they were assembled,
///   * at least one amplitude magnitude exceeds kZeroAmplitude.
///
/// Values are immutable; every operation returns a new value.  States
/// are stored unnormalized; normalization happens only inside the
/// probability queries.
class FrameSuperposition {
public:
    /// Amplitudes at or below this magnitude are treated as absent.
    static constexpr double kZeroAmplitude = 1e-15;

    static FrameSuperposition make(FrameId source, FrameId target,
                                   std::vector<WeightedTransform> terms);

    const FrameId& source_frame() const { return source_; }
    const FrameId& target_frame() const { return target_; }
    const std::vector<WeightedTransform>& terms() const { return terms_; }
    int dim() const { return terms_.front().transform.dim(); }
    std::size_t size() const { return terms_.size(); }

    /// Index of the support term equal (within tol) to `t`, or -1.
    int find(const EuclideanTransform& t,
             double tol = EuclideanTransform::kEqualityTol) const;

private:
    FrameSuperposition(FrameId source, FrameId target,
                       std::vector<WeightedTransform> terms)
        : source_(std::move(source)), target_(std::move(target)),
          terms_(std::move(terms)) {}

    FrameId source_;
    FrameId target_;
    std::vector<WeightedTransform> terms_;
};

/// Single-term superposition pinning the frames to one definite transform.
FrameSuperposition make_delta(const EuclideanTransform& t, FrameId source,
                              FrameId target);

/// Composition of superposed frame relations along a frame chain:
/// `a` relates source<-middle, `b` relates middle<-target; the result
/// relates source<-target.  Its support is every pairwise composition
/// t_a ∘ t_b, and when several pairs land on the same transform their
/// amplitude products add coherently.
FrameSuperposition compose(const FrameSuperposition& a, const FrameSuperposition& b);

/// Reversed relation: each term (t, c) becomes (t^-1, conj(c)) and the
/// frames swap roles.
FrameSuperposition reverse(const FrameSuperposition& a);

/// How far compose(a, reverse(a)) is from a pure identity relation:
/// sum of |amplitude| over non-identity support divided by |amplitude|
/// at the identity.  Zero for singleton support; +infinity when no
/// amplitude survives at the identity.
double identity_deviation(const FrameSuperposition& a);

/// Born weights |c_k|^2 normalized over the support, in canonical term
/// order.  Probabilities sum to one.
std::vector<std::pair<EuclideanTransform, double>> born_probabilities(
    const FrameSuperposition& a);

/// Deterministic Born-rule sampler: draw j of seed s selects the first
/// support index whose cumulative probability exceeds the Philox
/// uniform u(s, j).  Sequences are bit-reproducible across runs.
class BornSampler {
public:
    BornSampler(const FrameSuperposition& a, std::uint64_t seed);

    const EuclideanTransform& next();
    std::size_t next_index();

private:
    std::vector<EuclideanTransform> support_;
    std::vector<double> cumulative_;  // unnormalized cumulative weights
    double total_;
    Philox rng_;
};

/// Single Born-rule draw (the first draw of BornSampler(a, seed)).
EuclideanTransform born_sample(const FrameSuperposition& a, std::uint64_t seed);

/// Post-interaction state: the delta superposition on the selected
/// transform, which must lie in the support.
FrameSuperposition collapse(const FrameSuperposition& a,
                            const EuclideanTransform& selected);

/// Total Born probability of the support subset satisfying `member`.
double probability_mass(const FrameSuperposition& a,
                        const std::function<bool(const EuclideanTransform&)>& member);

/// Term-for-term comparison (frames, transforms and amplitudes).
bool approx_equal(const FrameSuperposition& a, const FrameSuperposition& b,
                  double tol = EuclideanTransform::kEqualityTol);

}  // namespace supframe
