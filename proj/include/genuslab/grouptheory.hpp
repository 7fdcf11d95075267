#pragma once

// Finite abelian groups given by cyclic factors, subset sums s(A), the
// greedy growth algorithm, the three-way structure classifier for sets
// whose subset sums miss part of the group, and additive-combinatorics
// diagnostics (energy, symmetry groups, Kneser, near-coset measures).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genuslab/arith.hpp"
#include "genuslab/element_set.hpp"

namespace genuslab {

/// Z/d_0 x Z/d_1 x ... with elements encoded as mixed-radix indices
/// index = c_0 + d_0 * (c_1 + d_1 * (c_2 + ...)).
class FiniteAbelianGroup {
public:
    FiniteAbelianGroup() : FiniteAbelianGroup(std::vector<i64>{}) {}
    /// Factors of order 1 are dropped; an empty list is the trivial group.
    explicit FiniteAbelianGroup(std::vector<i64> orders);

    std::size_t size() const { return size_; }
    std::size_t rank() const { return orders_.size(); }
    const std::vector<i64>& orders() const { return orders_; }

    Element zero() const { return 0; }
    Element add(Element a, Element b) const;
    Element neg(Element a) const;
    Element sub(Element a, Element b) const { return add(a, neg(b)); }
    Element multiple(i64 k, Element a) const;
    i64 order(Element a) const;

    std::vector<i64> coords(Element a) const;
    Element from_coords(std::span<const i64> c) const;

    ElementSet empty_set() const { return ElementSet(size_); }
    ElementSet translate(const ElementSet& s, Element x) const;
    ElementSet negate(const ElementSet& s) const;
    /// Sumset U + V.
    ElementSet sumset(const ElementSet& u, const ElementSet& v) const;
    /// Subgroup generated by the given elements.
    ElementSet generated(std::span<const Element> gens) const;
    bool is_subgroup(const ElementSet& s) const;

    std::string describe() const;

    bool operator==(const FiniteAbelianGroup& o) const { return orders_ == o.orders_; }

private:
    std::vector<i64> orders_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
    std::vector<std::uint32_t> coords_;  // size_ * rank, coordinate table
};

/// Cross-correlation |S ∩ (S + x)| for every x, computed with a
/// multi-dimensional FFT over the group and rounded to integers.
std::vector<i64> self_overlap_counts(const ElementSet& s, const FiniteAbelianGroup& g);

/// Set of sums of distinct elements of A, including the empty sum 0.
/// Repeated elements in A are collapsed first.
ElementSet subset_sums(std::span<const Element> a, const FiniteAbelianGroup& g);

struct GreedyTranscript {
    std::vector<Element> chosen;
    /// densities[j] = |s(x_1..x_j)| / h' for j = 0..k (densities[0] = 1/h').
    std::vector<double> densities;
    std::vector<std::size_t> sizes;
    ElementSet sums;
};

/// Greedy growth: repeatedly add the element of A maximising
/// |s(x_1..x_j, x)|, ties to the smallest index.  Stops at the density
/// target, when A is exhausted or when no element grows the sum set.
GreedyTranscript greedy_grow(std::span<const Element> a, const FiniteAbelianGroup& g, double density_target = 1.0);

/// Elements x whose addition barely grows s(x_1..x_j):
///   delta <= 1/2:  |s(..,x)| < (2 - eps) delta h'
///   delta >  1/2:  |s(..,x)| < (1 - (1 - delta)^{3/2}) h'
ElementSet omega_set(std::span<const Element> chosen, const FiniteAbelianGroup& g, double eps);

enum class Alternative { SumsAll, Subgroup, SmallOmega };
std::string to_string(Alternative a);

struct Theorem1Params {
    double eps = 0.1;
    double eps_max = 0.5;
    /// Growth threshold parameter of the augmented greedy; <= 0 selects the default schedule.
    double eps1 = -1.0;
    /// Absolute constants left implicit in the theorem; <= 0 selects defaults.
    double c_eps = -1.0;
    double c_loglog = 3.0;

    double resolved_eps1() const;
    double resolved_c_eps() const;
    double kappa1() const { return eps * eps; }
    double kappa() const;
};

struct Theorem1Report {
    Alternative alternative = Alternative::SumsAll;
    Theorem1Params params;
    std::size_t group_size = 0;
    std::size_t sums_size = 0;  // |s(A)|
    // SMALL_OMEGA witness
    std::vector<Element> chosen;
    ElementSet omega;
    double k_bound = 0.0;
    double omega_bound = 0.0;
    // SUBGROUP witness
    ElementSet subgroup;
    std::size_t index = 0;
    std::vector<Element> exceptional;  // A \ H
    bool bounds_met = true;
    GreedyTranscript transcript;
};

/// Decides which alternative holds for A in G and returns a witness.
Theorem1Report classify_theorem1(std::span<const Element> a, const FiniteAbelianGroup& g,
                                 const Theorem1Params& params = {});

struct Theorem1Check {
    bool ok = false;
    std::string reason;
};

/// Re-verifies a report by direct recomputation.
Theorem1Check verify_theorem1(const Theorem1Report& report, std::span<const Element> a, const FiniteAbelianGroup& g);

/// E(U, V) = #{(u1, v1, u2, v2) : u1 + v1 = u2 + v2}; E(U, U) is the additive energy.
i64 additive_energy(const ElementSet& u, const ElementSet& v, const FiniteAbelianGroup& g);

/// Symmetry group {x : T + x = T}.
ElementSet sym1(const ElementSet& t, const FiniteAbelianGroup& g);

struct KneserCheck {
    std::size_t difference_size = 0;  // |T - T|
    std::size_t set_size = 0;         // |T|
    std::size_t stabilizer_size = 0;  // |Sym1(T - T)|
    bool holds = false;
};

KneserCheck kneser_check(const ElementSet& t, const FiniteAbelianGroup& g);

/// All subgroups H with [G:H] <= max_index (G itself included).
std::vector<ElementSet> subgroups_up_to_index(const FiniteAbelianGroup& g, std::size_t max_index);

/// All subgroups with lo <= |H| <= hi.  Throws std::length_error if the
/// enumeration exceeds `budget` subgroups.
std::vector<ElementSet> subgroups_with_order(const FiniteAbelianGroup& g, std::size_t lo, std::size_t hi,
                                             std::size_t budget = 200000);

struct Lemma1Witness {
    ElementSet subgroup;
    Element shift = 0;  // the coset is H - shift
    double distance = 0.0;  // ||mu - 1_{H - z}/|H| ||_1
    bool meets_bound = false;  // distance <= c kappa^{1/12}
};

struct Lemma1Result {
    double kappa = 0.0;  // 1 - ||mu*mu||_2 / ||mu||_2
    double l2_norm = 0.0;
    std::optional<Lemma1Witness> witness;
};

/// Near-coset search for a probability vector mu on G.  When the measured
/// kappa is at most kappa_max, every subgroup with
/// ||mu||_2^{-2}/2 < |H| < 2 ||mu||_2^{-2} and every coset is scanned and the
/// L1-closest normalised coset indicator is returned.
Lemma1Result lemma1_witness(std::span<const double> mu, const FiniteAbelianGroup& g, double kappa_max,
                            double c = 1.0);

}  // namespace genuslab
