#pragma once

// Positive definite binary quadratic forms ax^2 + bxy + cy^2 of negative
// discriminant, their reduction and composition, and the form class group.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "genuslab/arith.hpp"
#include "genuslab/element_set.hpp"
#include "genuslab/grouptheory.hpp"
#include "json.hpp"

namespace genuslab {

struct Discriminant {
    i64 value = -4;
    i64 fundamental = -4;  // discriminant of the maximal order
    i64 conductor = 1;     // value = fundamental * conductor^2
    bool is_fundamental = true;

    /// Validates D < 0 and D = 0, 1 (mod 4); throws std::invalid_argument otherwise.
    static Discriminant make(i64 d);
};

struct QuadForm {
    i64 a = 1, b = 0, c = 1;

    i64 discriminant() const { return b * b - 4 * a * c; }
    i64 eval(i64 x, i64 y) const { return a * x * x + b * x * y + c * y * y; }
    bool is_primitive() const { return gcd(gcd(a, b), c) == 1; }
    bool is_reduced() const;
    std::string str() const;

    bool operator==(const QuadForm&) const = default;
};

/// Canonical reduced representative of the proper equivalence class of f.
/// Throws std::invalid_argument for forms that are not positive definite or not primitive.
QuadForm reduce(const QuadForm& f);

/// Dirichlet composition of two forms of the same discriminant, reduced.
QuadForm compose_forms(const QuadForm& f, const QuadForm& g);

/// Bitmap over [0, limit]: entry n is set when f(x, y) = n for some
/// (x, y) != (0, 0), or for some coprime (x, y) when primitive_only is set.
std::vector<bool> representation_bitmap(const QuadForm& f, i64 limit, bool primitive_only = false);

/// Kronecker symbol (D | p) for a prime p.  Throws std::invalid_argument for composite p.
int chi_D(i64 p, i64 d);

using ClassIndex = std::size_t;

class ClassGroup {
public:
    explicit ClassGroup(i64 d);

    const Discriminant& discriminant() const { return disc_; }
    i64 D() const { return disc_.value; }
    std::size_t h() const { return forms_.size(); }
    const std::vector<QuadForm>& forms() const { return forms_; }
    const QuadForm& form(ClassIndex i) const { return forms_.at(i); }

    ClassIndex identity() const { return 0; }
    ClassIndex inverse(ClassIndex i) const { return inverse_.at(i); }
    ClassIndex compose(ClassIndex x, ClassIndex y) const;
    ClassIndex power(ClassIndex x, i64 k) const;
    i64 order(ClassIndex x) const;

    /// Index of a reduced form of this discriminant; throws if it is not one.
    ClassIndex index_of(const QuadForm& reduced) const;
    /// Class of an arbitrary primitive form of this discriminant.
    ClassIndex class_of(const QuadForm& f) const { return index_of(reduce(f)); }

    /// Pairs (generator, order) with orders d_1 | d_2 | ... and product h.
    const std::vector<std::pair<ClassIndex, i64>>& cyclic_decomposition() const { return cyclic_; }
    const std::vector<ClassIndex>& ambiguous() const { return ambiguous_; }
    std::size_t genera_count() const { return ambiguous_.size(); }

    /// Abstract group Z/d_1 x ... isomorphic to the class group via the cyclic decomposition.
    const FiniteAbelianGroup& abelian() const { return abelian_; }
    Element to_abelian(ClassIndex i) const { return to_abelian_.at(i); }
    ClassIndex from_abelian(Element e) const { return from_abelian_.at(e); }

    /// Composition table built from form composition (only for h <= cayley_limit).
    bool has_cayley() const { return !cayley_.empty(); }
    const std::vector<std::uint32_t>& cayley() const { return cayley_; }
    static constexpr std::size_t cayley_limit = 2048;

private:
    Discriminant disc_;
    std::vector<QuadForm> forms_;
    std::vector<ClassIndex> inverse_;
    std::vector<std::uint32_t> cayley_;
    std::vector<std::pair<ClassIndex, i64>> cyclic_;
    std::vector<ClassIndex> ambiguous_;
    FiniteAbelianGroup abelian_;
    std::vector<Element> to_abelian_;
    std::vector<ClassIndex> from_abelian_;
    bool iso_ready_ = false;
};

/// All primitive reduced forms of discriminant d, ordered by (a, |b|, b < 0 last).
std::vector<QuadForm> reduced_forms(i64 d);

inline ClassGroup enumerate_class_group(i64 d) { return ClassGroup(d); }

struct PrimeClasses {
    ClassIndex cls = 0;
    ClassIndex inv = 0;
    bool ramified = false;
};

/// Classes representing the prime p.  For split p the pair {C, C^-1}; for
/// ramified p the single ambiguous class (cls == inv, ramified set).
/// Throws std::domain_error when p is inert or no primitive form represents
/// it, std::invalid_argument for composite p.
PrimeClasses prime_to_class(i64 p, const ClassGroup& g);

/// Subgroups of index at most `max_index`, as sets of class indices.
std::vector<ElementSet> subgroups_up_to_index(const ClassGroup& g, std::size_t max_index);

/// Map a set in abelian coordinates to class indices, and back.
ElementSet to_class_indices(const ElementSet& s, const ClassGroup& g);
ElementSet to_abelian_set(const ElementSet& s, const ClassGroup& g);

nlohmann::json to_json(const QuadForm& f);
nlohmann::json to_json(const ClassGroup& g, bool with_cayley = false);

}  // namespace genuslab
