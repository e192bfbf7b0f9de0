#include "supframe/superposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "supframe/errors.hpp"

namespace supframe {

namespace {

bool term_order(const WeightedTransform& a, const WeightedTransform& b) {
    return a.transform < b.transform;
}

/// Sort by the canonical order and merge tolerance-equal neighbours,
/// repeating until stable so chains of nearly-equal transforms collapse
/// into one support point.  Terms whose merged amplitude vanishes are
/// dropped: the support is exactly where amplitude lives.
std::vector<WeightedTransform> canonicalize(std::vector<WeightedTransform> terms) {
    std::sort(terms.begin(), terms.end(), term_order);
    bool merged = true;
    while (merged) {
        merged = false;
        std::vector<WeightedTransform> out;
        out.reserve(terms.size());
        for (auto& term : terms) {
            if (!out.empty() &&
                out.back().transform.approx_equal(term.transform)) {
                out.back().amplitude += term.amplitude;
                merged = true;
            } else {
                out.push_back(std::move(term));
            }
        }
        terms = std::move(out);
    }
    std::erase_if(terms, [](const WeightedTransform& t) {
        return std::abs(t.amplitude) <= FrameSuperposition::kZeroAmplitude;
    });
    return terms;
}

double total_weight(const std::vector<WeightedTransform>& terms) {
    double w = 0.0;
    for (const auto& t : terms) w += std::norm(t.amplitude);
    return w;
}

}  // namespace

FrameSuperposition FrameSuperposition::make(FrameId source, FrameId target,
                                            std::vector<WeightedTransform> terms) {
    if (source.label.empty() || target.label.empty())
        throw ValidationError("frame labels must be nonempty");
    if (terms.empty())
        throw ValidationError("superposition needs at least one term");
    const int dim = terms.front().transform.dim();
    for (const auto& t : terms) {
        if (t.transform.dim() != dim)
            throw ValidationError("all transforms in a superposition must share one dimension");
        if (!std::isfinite(t.amplitude.real()) || !std::isfinite(t.amplitude.imag()))
            throw ValidationError("amplitudes must be finite");
    }
    terms = canonicalize(std::move(terms));
    if (terms.empty())
        throw DegenerateStateError("superposition has no amplitude above " +
                                   std::to_string(kZeroAmplitude));
    return FrameSuperposition(std::move(source), std::move(target), std::move(terms));
}

int FrameSuperposition::find(const EuclideanTransform& t, double tol) const {
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].transform.approx_equal(t, tol)) return static_cast<int>(i);
    return -1;
}

FrameSuperposition make_delta(const EuclideanTransform& t, FrameId source,
                              FrameId target) {
    return FrameSuperposition::make(std::move(source), std::move(target),
                                    {{t, Amplitude{1.0, 0.0}}});
}

FrameSuperposition compose(const FrameSuperposition& a, const FrameSuperposition& b) {
    if (a.target_frame() != b.source_frame())
        throw MismatchError("frame chain mismatch: '" + a.target_frame().label +
                            "' vs '" + b.source_frame().label + "'");
    std::vector<WeightedTransform> products;
    products.reserve(a.size() * b.size());
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms())
            products.push_back({ta.transform.compose(tb.transform),
                                ta.amplitude * tb.amplitude});
    return FrameSuperposition::make(a.source_frame(), b.target_frame(),
                                    std::move(products));
}

FrameSuperposition reverse(const FrameSuperposition& a) {
    std::vector<WeightedTransform> terms;
    terms.reserve(a.size());
    for (const auto& t : a.terms())
        terms.push_back({t.transform.inverse(), std::conj(t.amplitude)});
    return FrameSuperposition::make(a.target_frame(), a.source_frame(),
                                    std::move(terms));
}

double identity_deviation(const FrameSuperposition& a) {
    if (a.source_frame() == a.target_frame())
        throw DomainError("identity_deviation expects distinct source and target frames");
    const FrameSuperposition round_trip = compose(a, reverse(a));
    const EuclideanTransform id = EuclideanTransform::identity(a.dim());
    double at_identity = 0.0;
    double elsewhere = 0.0;
    for (const auto& term : round_trip.terms()) {
        if (term.transform.approx_equal(id))
            at_identity += std::abs(term.amplitude);
        else
            elsewhere += std::abs(term.amplitude);
    }
    if (at_identity == 0.0) return std::numeric_limits<double>::infinity();
    return elsewhere / at_identity;
}

std::vector<std::pair<EuclideanTransform, double>> born_probabilities(
    const FrameSuperposition& a) {
    double total = 0.0;
    for (const auto& t : a.terms()) total += std::norm(t.amplitude);
    if (!(total > 0.0))
        throw DegenerateStateError("total Born weight vanishes");
    std::vector<std::pair<EuclideanTransform, double>> probs;
    probs.reserve(a.size());
    for (const auto& t : a.terms())
        probs.emplace_back(t.transform, std::norm(t.amplitude) / total);
    return probs;
}

BornSampler::BornSampler(const FrameSuperposition& a, std::uint64_t seed)
    : total_(0.0), rng_(seed) {
    support_.reserve(a.size());
    cumulative_.reserve(a.size());
    for (const auto& t : a.terms()) {
        total_ += std::norm(t.amplitude);
        support_.push_back(t.transform);
        cumulative_.push_back(total_);
    }
    if (!(total_ > 0.0))
        throw DegenerateStateError("total Born weight vanishes");
}

std::size_t BornSampler::next_index() {
    const double u = rng_.next_uniform() * total_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(it - cumulative_.begin(), support_.size() - 1);
}

const EuclideanTransform& BornSampler::next() { return support_[next_index()]; }

EuclideanTransform born_sample(const FrameSuperposition& a, std::uint64_t seed) {
    return BornSampler(a, seed).next();
}

FrameSuperposition collapse(const FrameSuperposition& a,
                            const EuclideanTransform& selected) {
    const int idx = a.find(selected);
    if (idx < 0)
        throw DomainError("collapse target is not in the superposition support");
    return make_delta(a.terms()[idx].transform, a.source_frame(), a.target_frame());
}

double probability_mass(const FrameSuperposition& a,
                        const std::function<bool(const EuclideanTransform&)>& member) {
    double mass = 0.0;
    for (const auto& [transform, p] : born_probabilities(a))
        if (member(transform)) mass += p;
    return mass;
}

bool approx_equal(const FrameSuperposition& a, const FrameSuperposition& b,
                  double tol) {
    if (a.source_frame() != b.source_frame() || a.target_frame() != b.target_frame())
        return false;
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& ta = a.terms()[i];
        const auto& tb = b.terms()[i];
        if (!ta.transform.approx_equal(tb.transform, tol)) return false;
        if (std::abs(ta.amplitude - tb.amplitude) > tol) return false;
    }
    return true;
}

}  // namespace supframe
