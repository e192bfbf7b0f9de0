#include "supframe/group.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "supframe/errors.hpp"

namespace supframe {

FiniteGroup::FiniteGroup(std::string name, std::vector<std::vector<int>> cayley)
    : name_(std::move(name)), cayley_(std::move(cayley)) {
    const int n = static_cast<int>(cayley_.size());
    if (n < 1 || n > kMaxOrder)
        throw ValidationError("group order must be in [1, " +
                              std::to_string(kMaxOrder) + "], got " + std::to_string(n));
    for (const auto& row : cayley_)
        if (static_cast<int>(row.size()) != n)
            throw ValidationError("Cayley table must be square");

    // Latin square: every row and column is a permutation of 0..n-1.
    for (int i = 0; i < n; ++i) {
        std::vector<bool> row_seen(n, false), col_seen(n, false);
        for (int j = 0; j < n; ++j) {
            const int r = cayley_[i][j];
            const int c = cayley_[j][i];
            if (r < 0 || r >= n || c < 0 || c >= n)
                throw ValidationError("Cayley entry out of range");
            if (row_seen[r] || col_seen[c])
                throw ValidationError("Cayley table rows/columns must be permutations");
            row_seen[r] = col_seen[c] = true;
        }
    }

    for (int e = 0; e < n; ++e) {
        bool is_id = true;
        for (int f = 0; f < n && is_id; ++f)
            is_id = cayley_[e][f] == f && cayley_[f][e] == f;
        if (is_id) {
            identity_ = e;
            break;
        }
    }
    if (identity_ < 0) throw ValidationError("Cayley table has no identity element");

    inverse_.assign(n, -1);
    for (int f = 0; f < n; ++f) {
        for (int g = 0; g < n; ++g) {
            if (cayley_[f][g] == identity_) {
                if (cayley_[g][f] != identity_)
                    throw ValidationError("one-sided inverse in Cayley table");
                inverse_[f] = g;
                break;
            }
        }
        if (inverse_[f] < 0) throw ValidationError("element without inverse");
    }

    for (int f = 0; f < n; ++f)
        for (int g = 0; g < n; ++g)
            for (int h = 0; h < n; ++h)
                if (cayley_[cayley_[f][g]][h] != cayley_[f][cayley_[g][h]])
                    throw ValidationError("Cayley table is not associative");
}

bool FiniteGroup::same_as(const FiniteGroup& other) const {
    return this == &other || cayley_ == other.cayley_;
}

FiniteGroup FiniteGroup::cyclic(int n) {
    if (n < 1 || n > 16) throw ValidationError("cyclic groups are built in for n in [1, 16]");
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) table[i][j] = (i + j) % n;
    return FiniteGroup("C" + std::to_string(n), std::move(table));
}

FiniteGroup FiniteGroup::dihedral(int n) {
    if (n < 2 || n > 8) throw ValidationError("dihedral groups are built in for n in [2, 8]");
    // Element 2k = rotation r^k, element 2k+1 = reflection s r^k, with
    // s r^k s = r^-k.
    const int order = 2 * n;
    auto idx = [n](int k, int flip) { return 2 * ((k % n + n) % n) + flip; };
    std::vector<std::vector<int>> table(order, std::vector<int>(order));
    for (int k1 = 0; k1 < n; ++k1)
        for (int f1 = 0; f1 < 2; ++f1)
            for (int k2 = 0; k2 < n; ++k2)
                for (int f2 = 0; f2 < 2; ++f2)
                    table[idx(k1, f1)][idx(k2, f2)] =
                        idx(f1 ? k1 - k2 : k1 + k2, f1 ^ f2);
    return FiniteGroup("D" + std::to_string(n), std::move(table));
}

FiniteGroup FiniteGroup::symmetric(int n) {
    if (n != 3 && n != 4) throw ValidationError("symmetric groups are built in for n = 3, 4");
    std::vector<int> base(n);
    std::iota(base.begin(), base.end(), 0);
    std::vector<std::vector<int>> perms;
    std::vector<int> p = base;
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));

    std::map<std::vector<int>, int> index;
    for (std::size_t i = 0; i < perms.size(); ++i) index[perms[i]] = static_cast<int>(i);

    const int order = static_cast<int>(perms.size());
    std::vector<std::vector<int>> table(order, std::vector<int>(order));
    std::vector<int> prod(n);
    for (int f = 0; f < order; ++f)
        for (int g = 0; g < order; ++g) {
            for (int i = 0; i < n; ++i) prod[i] = perms[f][perms[g][i]];
            table[f][g] = index.at(prod);
        }
    return FiniteGroup("S" + std::to_string(n), std::move(table));
}

FiniteGroup FiniteGroup::cube_rotations() {
    using Mat = std::array<int, 9>;
    auto mul = [](const Mat& a, const Mat& b) {
        Mat c{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                int s = 0;
                for (int k = 0; k < 3; ++k) s += a[3 * i + k] * b[3 * k + j];
                c[3 * i + j] = s;
            }
        return c;
    };
    const Mat id = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    const Mat qx = {1, 0, 0, 0, 0, -1, 0, 1, 0};   // quarter turn about x
    const Mat qz = {0, -1, 0, 1, 0, 0, 0, 0, 1};   // quarter turn about z

    // Closure of the two generators; integer matrices make it exact.
    std::vector<Mat> elements = {id};
    for (std::size_t i = 0; i < elements.size(); ++i) {
        for (const Mat& gen : {qx, qz}) {
            const Mat next = mul(elements[i], gen);
            if (std::find(elements.begin(), elements.end(), next) == elements.end())
                elements.push_back(next);
        }
    }
    std::sort(elements.begin(), elements.end());

    const int order = static_cast<int>(elements.size());
    std::vector<std::vector<int>> table(order, std::vector<int>(order));
    for (int f = 0; f < order; ++f)
        for (int g = 0; g < order; ++g) {
            const Mat prod = mul(elements[f], elements[g]);
            const auto it = std::lower_bound(elements.begin(), elements.end(), prod);
            table[f][g] = static_cast<int>(it - elements.begin());
        }
    return FiniteGroup("cube", std::move(table));
}

FiniteGroup FiniteGroup::by_name(const std::string& name) {
    if (name == "cube") return cube_rotations();
    if (name.size() >= 2 && (name[0] == 'C' || name[0] == 'D' || name[0] == 'S')) {
        int n = -1;
        try {
            n = std::stoi(name.substr(1));
        } catch (const std::exception&) {
            n = -1;
        }
        if (n > 0) {
            if (name[0] == 'C' && n <= 16) return cyclic(n);
            if (name[0] == 'D' && n >= 2 && n <= 8) return dihedral(n);
            if (name[0] == 'S' && (n == 3 || n == 4)) return symmetric(n);
        }
    }
    std::string known;
    for (const auto& g : catalog()) known += (known.empty() ? "" : ", ") + g;
    throw DomainError("unknown group '" + name + "'; built-in groups: " + known);
}

std::vector<std::string> FiniteGroup::catalog() {
    std::vector<std::string> names;
    for (int n = 1; n <= 16; ++n) names.push_back("C" + std::to_string(n));
    for (int n = 2; n <= 8; ++n) names.push_back("D" + std::to_string(n));
    names.push_back("S3");
    names.push_back("S4");
    names.push_back("cube");
    return names;
}

namespace {

void require_same_group(const GroupWavefunction& a, const GroupWavefunction& b) {
    if (!a.group || !b.group || !a.group->same_as(*b.group))
        throw MismatchError("wavefunctions live on different groups");
}

void require_valid(const GroupWavefunction& a) {
    if (!a.group) throw ValidationError("wavefunction has no group");
    if (static_cast<int>(a.amplitudes.size()) != a.group->order())
        throw ValidationError("amplitude count must equal the group order");
    for (const auto& c : a.amplitudes)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw ValidationError("amplitudes must be finite");
}

}  // namespace

GroupWavefunction make_group_wavefunction(GroupRef group,
                                          std::vector<std::complex<double>> amplitudes) {
    GroupWavefunction a{std::move(group), std::move(amplitudes)};
    require_valid(a);
    return a;
}

GroupWavefunction delta_wavefunction(GroupRef group, int element) {
    if (element < 0 || element >= group->order())
        throw DomainError("delta element out of range");
    std::vector<std::complex<double>> amps(group->order(), {0.0, 0.0});
    amps[element] = {1.0, 0.0};
    return {std::move(group), std::move(amps)};
}

GroupWavefunction uniform_wavefunction(GroupRef group) {
    const double v = 1.0 / group->order();
    std::vector<std::complex<double>> amps(group->order(), {v, 0.0});
    return {std::move(group), std::move(amps)};
}

GroupWavefunction random_wavefunction(GroupRef group, Philox& rng) {
    std::vector<std::complex<double>> amps(group->order());
    for (auto& c : amps) {
        const double re = rng.next_uniform(-1.0, 1.0);
        const double im = rng.next_uniform(-1.0, 1.0);
        c = {re, im};
    }
    return {std::move(group), std::move(amps)};
}

GroupWavefunction normalized(const GroupWavefunction& a) {
    require_valid(a);
    double w = 0.0;
    for (const auto& c : a.amplitudes) w += std::norm(c);
    if (!(w > 0.0)) throw DegenerateStateError("cannot normalize a zero wavefunction");
    GroupWavefunction out = a;
    const double s = 1.0 / std::sqrt(w);
    for (auto& c : out.amplitudes) c *= s;
    return out;
}

GroupWavefunction convolve(const GroupWavefunction& a, const GroupWavefunction& b) {
    require_valid(a);
    require_valid(b);
    require_same_group(a, b);
    const int n = a.group->order();
    std::vector<std::complex<double>> out(n, {0.0, 0.0});
    for (int f = 0; f < n; ++f)
        for (int g = 0; g < n; ++g)
            out[a.group->op(f, g)] += a.amplitudes[f] * b.amplitudes[g];
    return {a.group, std::move(out)};
}

std::complex<double> brute_force_restricted_sum(const GroupWavefunction& a,
                                                const GroupWavefunction& b, int h) {
    require_valid(a);
    require_valid(b);
    require_same_group(a, b);
    const int n = a.group->order();
    if (h < 0 || h >= n) throw DomainError("target element out of range");
    std::complex<double> sum{0.0, 0.0};
    for (int f = 0; f < n; ++f)
        for (int g = 0; g < n; ++g)
            if (a.group->op(f, g) == h) sum += a.amplitudes[f] * b.amplitudes[g];
    return sum;
}

GroupWavefunction reverse_group(const GroupWavefunction& a) {
    require_valid(a);
    const int n = a.group->order();
    std::vector<std::complex<double>> out(n);
    for (int f = 0; f < n; ++f) out[f] = std::conj(a.amplitudes[a.group->inverse(f)]);
    return {a.group, std::move(out)};
}

double verify_identity_relation(const GroupWavefunction& a) {
    const GroupWavefunction round_trip = convolve(a, reverse_group(a));
    return std::abs(round_trip.amplitudes[a.group->identity()]);
}

double total_sum_check(const GroupWavefunction& a, const GroupWavefunction& b) {
    const GroupWavefunction conv = convolve(a, b);
    std::complex<double> lhs{0.0, 0.0};
    for (const auto& c : conv.amplitudes) lhs += c;
    std::complex<double> sa{0.0, 0.0}, sb{0.0, 0.0};
    for (const auto& c : a.amplitudes) sa += c;
    for (const auto& c : b.amplitudes) sb += c;
    return std::abs(lhs - sa * sb);
}

}  // namespace supframe
