#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "supframe/philox.hpp"

namespace supframe {

/// Finite group given by its Cayley table.  Desk-scale model for exact
/// checks of the composition calculus: every restricted pair-sum over
/// transformations becomes a finite sum over table entries, so the
/// algebra can be verified with no discretization error at all.
///
/// Construction checks the table is a Latin square, derives identity
/// and inverses, and verifies associativity for every triple (orders
/// are capped at kMaxOrder, so the cubic scan stays cheap).
class FiniteGroup {
public:
    static constexpr int kMaxOrder = 64;

    FiniteGroup(std::string name, std::vector<std::vector<int>> cayley);

    const std::string& name() const { return name_; }
    int order() const { return static_cast<int>(cayley_.size()); }
    int op(int f, int g) const { return cayley_[f][g]; }
    int identity() const { return identity_; }
    int inverse(int f) const { return inverse_[f]; }

    bool same_as(const FiniteGroup& other) const;

    // Built-in catalog.
    static FiniteGroup cyclic(int n);                 // C_n, n <= 16
    static FiniteGroup dihedral(int n);               // D_n (order 2n), n <= 8
    static FiniteGroup symmetric(int n);              // S_3 or S_4
    static FiniteGroup cube_rotations();              // 24 quarter-turn-generated cube rotations
    static FiniteGroup by_name(const std::string& name);
    static std::vector<std::string> catalog();

private:
    std::string name_;
    std::vector<std::vector<int>> cayley_;
    std::vector<int> inverse_;
    int identity_ = -1;
};

using GroupRef = std::shared_ptr<const FiniteGroup>;

/// Complex amplitude per group element: the desk-scale wavefunction
/// over transformations.
struct GroupWavefunction {
    GroupRef group;
    std::vector<std::complex<double>> amplitudes;
};

GroupWavefunction make_group_wavefunction(GroupRef group,
                                          std::vector<std::complex<double>> amplitudes);

/// Delta wavefunction: amplitude 1 on `element`, 0 elsewhere.
GroupWavefunction delta_wavefunction(GroupRef group, int element);

/// Constant amplitude 1/order on every element.
GroupWavefunction uniform_wavefunction(GroupRef group);

/// Independent standard-ish complex amplitudes (re, im uniform in [-1, 1)).
GroupWavefunction random_wavefunction(GroupRef group, Philox& rng);

/// Rescale to unit total weight sum |a[f]|^2 = 1.
GroupWavefunction normalized(const GroupWavefunction& a);

/// Group-algebra convolution: out[h] = sum over pairs f∘g = h of
/// a[f] b[g], accumulated by a direct double loop over the table.
GroupWavefunction convolve(const GroupWavefunction& a, const GroupWavefunction& b);

/// Literal restricted pair-sum for one target element: enumerate all
/// ordered pairs, keep those composing to h, add the products.  Same
/// arithmetic as convolve, organized as the defining sum; kept separate
/// so the two routes stay independent checks of each other.
std::complex<double> brute_force_restricted_sum(const GroupWavefunction& a,
                                                const GroupWavefunction& b, int h);

/// Reverse wavefunction: a[f] -> conj(a[f^-1]).
GroupWavefunction reverse_group(const GroupWavefunction& a);

/// |convolve(a, reverse_group(a))[identity]|; equals sum |a[f]|^2, so 1
/// for normalized input.
double verify_identity_relation(const GroupWavefunction& a);

/// Distributivity check: |sum_h convolve(a,b)[h] - (sum_f a[f])(sum_g b[g])|.
/// Summing the restricted sums over every target must recover the
/// unrestricted double sum.
double total_sum_check(const GroupWavefunction& a, const GroupWavefunction& b);

}  // namespace supframe
