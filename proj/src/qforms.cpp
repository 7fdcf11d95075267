#include "genuslab/qforms.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace genuslab {

Discriminant Discriminant::make(i64 d) {
    if (d >= 0) throw std::invalid_argument("discriminant must be negative");
    if (mod(d, 4) != 0 && mod(d, 4) != 1) throw std::invalid_argument("discriminant must be 0 or 1 mod 4");
    Discriminant out;
    out.value = d;
    const i64 k = squarefree_kernel(d);
    out.fundamental = mod(k, 4) == 1 ? k : 4 * k;
    out.conductor = isqrt(d / out.fundamental);
    out.is_fundamental = out.conductor == 1;
    return out;
}

bool QuadForm::is_reduced() const {
    const i64 ab = b < 0 ? -b : b;
    if (!(ab <= a && a <= c)) return false;
    if ((ab == a || a == c) && b < 0) return false;
    return true;
}

std::string QuadForm::str() const {
    std::ostringstream os;
    os << "(" << a << "," << b << "," << c << ")";
    return os.str();
}

QuadForm reduce(const QuadForm& f) {
    if (f.a <= 0 || f.discriminant() >= 0) throw std::invalid_argument("reduce: form is not positive definite");
    if (!f.is_primitive()) throw std::invalid_argument("reduce: form is not primitive");
    i128 a = f.a, b = f.b, c = f.c;
    for (;;) {
        // Bring b into (-a, a] with x -> x + k y.
        if (b <= -a || b > a) {
            const i128 two_a = 2 * a;
            i128 k = (a - b) / two_a;
            if ((a - b) % two_a != 0 && (a - b) < 0) --k;
            c = a * k * k + b * k + c;
            b = b + two_a * k;
        }
        if (a > c) {
            std::swap(a, c);
            b = -b;
            continue;
        }
        break;
    }
    if (a == c && b < 0) b = -b;
    return {static_cast<i64>(a), static_cast<i64>(b), static_cast<i64>(c)};
}

QuadForm compose_forms(const QuadForm& f, const QuadForm& g) {
    const i64 d = f.discriminant();
    if (g.discriminant() != d) throw std::invalid_argument("compose_forms: discriminant mismatch");
    QuadForm f1 = f, f2 = g;
    if (f1.a > f2.a) std::swap(f1, f2);
    const i64 a1 = f1.a, b1 = f1.b, a2 = f2.a, b2 = f2.b, c2 = f2.c;
    const i64 s = (b1 + b2) / 2;
    const i64 n = b2 - s;
    i64 y1 = 0, dd = a1;
    if (a2 % a1 != 0) {
        const ExtGcd e = ext_gcd(a2, a1);
        dd = e.g;
        y1 = e.x;
    }
    i64 x2 = 0, y2 = -1, d1 = dd;
    if (s % dd != 0) {
        const ExtGcd e = ext_gcd(s, dd);
        d1 = e.g;
        x2 = e.x;
        y2 = -e.y;
    }
    const i64 v1 = a1 / d1, v2 = a2 / d1;
    const i128 r128 = (static_cast<i128>(y1) * y2 % v1 * n - static_cast<i128>(x2) * c2) % v1;
    i64 r = static_cast<i64>(r128);
    if (r < 0) r += v1;
    const i128 b3 = static_cast<i128>(b2) + static_cast<i128>(2) * v2 * r;
    const i128 a3 = static_cast<i128>(v1) * v2;
    const i128 num = b3 * b3 - d;
    if (num % (4 * a3) != 0) throw std::logic_error("compose_forms: non-integral composite");
    const QuadForm h{static_cast<i64>(a3), static_cast<i64>(b3), static_cast<i64>(num / (4 * a3))};
    return reduce(h);
}

std::vector<bool> representation_bitmap(const QuadForm& f, i64 limit, bool primitive_only) {
    std::vector<bool> out(static_cast<std::size_t>(std::max<i64>(limit, 0)) + 1, false);
    if (limit < 1) return out;
    const i64 ad = -f.discriminant();
    if (f.a <= 0 || ad <= 0) throw std::invalid_argument("representation_bitmap: form is not positive definite");
    // f(x, y) <= limit forces |D| y^2 <= 4 a limit; f(-x, -y) = f(x, y) so y >= 0 suffices.
    const i64 ymax = isqrt(4 * f.a * limit / ad);
    for (i64 y = 0; y <= ymax; ++y) {
        const i64 disc = 4 * f.a * limit - ad * y * y;
        if (disc < 0) continue;
        const i64 root = isqrt(disc);
        const i64 lo = (-f.b * y - root) / (2 * f.a) - 1;
        const i64 hi = (-f.b * y + root) / (2 * f.a) + 1;
        for (i64 x = (y == 0 ? 1 : lo); x <= hi; ++x) {
            const i64 v = f.eval(x, y);
            if (v < 1 || v > limit) continue;
            if (primitive_only && gcd(x, y) != 1) continue;
            out[static_cast<std::size_t>(v)] = true;
        }
    }
    return out;
}

int chi_D(i64 p, i64 d) {
    if (!is_prime(p)) throw std::invalid_argument("chi_D: modulus must be prime");
    return kronecker(d, p);
}

std::vector<QuadForm> reduced_forms(i64 d) {
    Discriminant::make(d);
    std::vector<QuadForm> out;
    const i64 ad = -d;
    for (i64 a = 1; 3 * a * a <= ad; ++a) {
        for (i64 b = 0; b <= a; ++b) {
            if ((b - d) % 2 != 0) continue;
            const i64 num = b * b - d;
            if (num % (4 * a) != 0) continue;
            const i64 c = num / (4 * a);
            if (c < a) continue;
            for (int sign : {1, -1}) {
                if (sign < 0 && (b == 0 || b == a || a == c)) continue;
                const i64 sb = sign * b;
                const QuadForm f{a, sb, c};
                if (f.is_primitive()) out.push_back(f);
            }
        }
    }
    return out;
}

ClassGroup::ClassGroup(i64 d) : disc_(Discriminant::make(d)), forms_(reduced_forms(d)) {
    const std::size_t h = forms_.size();
    inverse_.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
        const QuadForm& f = forms_[i];
        inverse_[i] = index_of(reduce({f.a, -f.b, f.c}));
    }
    if (h <= cayley_limit) {
        cayley_.resize(h * h);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = i; j < h; ++j) {
                const auto k = static_cast<std::uint32_t>(index_of(compose_forms(forms_[i], forms_[j])));
                cayley_[i * h + j] = k;
                cayley_[j * h + i] = k;
            }
    }
    for (std::size_t i = 0; i < h; ++i)
        if (inverse_[i] == i) ambiguous_.push_back(i);

    // Cyclic decomposition: repeatedly split off a cyclic subgroup <y> whose
    // order equals the exponent of G/S and meets S trivially.
    std::vector<std::size_t> elem_order(h);
    for (std::size_t i = 0; i < h; ++i) elem_order[i] = static_cast<std::size_t>(order(i));
    std::vector<char> in_s(h, 0);
    in_s[0] = 1;
    std::vector<ClassIndex> s_members{0};
    std::vector<std::pair<ClassIndex, i64>> picked;
    while (s_members.size() < h) {
        std::vector<std::size_t> image_order(h, 0);
        std::size_t exponent = 0;
        for (std::size_t y = 0; y < h; ++y) {
            if (in_s[y]) continue;
            std::size_t m = 1;
            ClassIndex cur = y;
            while (!in_s[cur]) {
                cur = compose(cur, y);
                ++m;
            }
            image_order[y] = m;
            exponent = std::max(exponent, m);
        }
        std::size_t best_order = 0;
        ClassIndex best = 0;
        for (std::size_t y = 0; y < h; ++y) {
            if (image_order[y] == exponent && elem_order[y] == exponent) {
                best_order = exponent;
                best = y;
                break;
            }
        }
        if (best_order == 0) throw std::logic_error("ClassGroup: cyclic decomposition failed");
        picked.emplace_back(best, static_cast<i64>(best_order));
        const std::vector<ClassIndex> base = s_members;
        ClassIndex step = best;
        for (std::size_t k = 1; k < best_order; ++k) {
            for (ClassIndex b : base) {
                const ClassIndex e = compose(b, step);
                if (!in_s[e]) {
                    in_s[e] = 1;
                    s_members.push_back(e);
                }
            }
            step = compose(step, best);
        }
    }
    std::reverse(picked.begin(), picked.end());
    cyclic_ = picked;

    std::vector<i64> orders;
    for (const auto& [gen, ord] : cyclic_) orders.push_back(ord);
    abelian_ = FiniteAbelianGroup(orders);
    from_abelian_.assign(h, 0);
    to_abelian_.assign(h, 0);
    // Element with coordinates (k_i) maps to prod g_i^{k_i}; generators of order 1 are absent.
    std::vector<ClassIndex> gens;
    for (const auto& [gen, ord] : cyclic_)
        if (ord > 1) gens.push_back(gen);
    for (std::size_t e = 0; e < abelian_.size(); ++e) {
        const auto c = abelian_.coords(static_cast<Element>(e));
        ClassIndex cls = 0;
        for (std::size_t i = 0; i < gens.size(); ++i) cls = compose(cls, power(gens[i], c[i]));
        from_abelian_[e] = cls;
        to_abelian_[cls] = static_cast<Element>(e);
    }
    iso_ready_ = true;
}

ClassIndex ClassGroup::compose(ClassIndex x, ClassIndex y) const {
    const std::size_t h = forms_.size();
    if (x >= h || y >= h) throw std::out_of_range("ClassGroup::compose: index out of range");
    if (!cayley_.empty()) return cayley_[x * h + y];
    if (iso_ready_)
        return from_abelian_[abelian_.add(to_abelian_[x], to_abelian_[y])];
    return index_of(compose_forms(forms_[x], forms_[y]));
}

ClassIndex ClassGroup::power(ClassIndex x, i64 k) const {
    if (k < 0) {
        x = inverse(x);
        k = -k;
    }
    ClassIndex result = 0, base = x;
    while (k > 0) {
        if (k & 1) result = compose(result, base);
        base = compose(base, base);
        k >>= 1;
    }
    return result;
}

i64 ClassGroup::order(ClassIndex x) const {
    i64 m = 1;
    ClassIndex cur = x;
    while (cur != 0) {
        cur = compose(cur, x);
        ++m;
    }
    return m;
}

ClassIndex ClassGroup::index_of(const QuadForm& reduced) const {
    auto key = [](const QuadForm& f) { return std::make_tuple(f.a, f.b < 0 ? -f.b : f.b, f.b < 0); };
    auto it = std::lower_bound(forms_.begin(), forms_.end(), reduced,
                               [&](const QuadForm& x, const QuadForm& y) { return key(x) < key(y); });
    if (it == forms_.end() || !(*it == reduced)) throw std::invalid_argument("index_of: not a reduced form of this discriminant");
    return static_cast<ClassIndex>(it - forms_.begin());
}

PrimeClasses prime_to_class(i64 p, const ClassGroup& g) {
    if (!is_prime(p)) throw std::invalid_argument("prime_to_class: p must be prime");
    const i64 d = g.D();
    const int chi = kronecker(d, p);
    if (chi == -1) throw std::domain_error("prime_to_class: p is inert");
    if (chi == 1) {
        i64 b = 0;
        if (p == 2) {
            b = 1;
        } else {
            b = sqrt_mod_prime(mod(d, p), p);
            if ((b - d) % 2 != 0) b = p - b;
        }
        const QuadForm f{p, b, (b * b - d) / (4 * p)};
        const ClassIndex c = g.class_of(f);
        return {c, g.inverse(c), false};
    }
    for (i64 b = 0; b < 2 * p; ++b) {
        if ((b - d) % 2 != 0) continue;
        const i64 num = b * b - d;
        if (num % (4 * p) != 0) continue;
        const QuadForm f{p, b, num / (4 * p)};
        if (!f.is_primitive()) continue;
        const ClassIndex c = g.class_of(f);
        return {c, c, true};
    }
    throw std::domain_error("prime_to_class: no primitive form of this discriminant represents p");
}

ElementSet to_class_indices(const ElementSet& s, const ClassGroup& g) {
    ElementSet out(g.h());
    s.for_each([&](Element e) { out.insert(static_cast<Element>(g.from_abelian(e))); });
    return out;
}

ElementSet to_abelian_set(const ElementSet& s, const ClassGroup& g) {
    ElementSet out(g.h());
    s.for_each([&](Element e) { out.insert(g.to_abelian(e)); });
    return out;
}

std::vector<ElementSet> subgroups_up_to_index(const ClassGroup& g, std::size_t max_index) {
    std::vector<ElementSet> out;
    for (const auto& s : subgroups_up_to_index(g.abelian(), max_index)) out.push_back(to_class_indices(s, g));
    return out;
}

nlohmann::json to_json(const QuadForm& f) {
    return nlohmann::json::array({f.a, f.b, f.c});
}

nlohmann::json to_json(const ClassGroup& g, bool with_cayley) {
    nlohmann::json j;
    j["D"] = g.D();
    j["fundamental"] = g.discriminant().is_fundamental;
    j["conductor"] = g.discriminant().conductor;
    j["h"] = g.h();
    j["genera"] = g.genera_count();
    nlohmann::json forms = nlohmann::json::array();
    for (const auto& f : g.forms()) forms.push_back(to_json(f));
    j["forms"] = forms;
    nlohmann::json cyc = nlohmann::json::array();
    for (const auto& [gen, ord] : g.cyclic_decomposition()) cyc.push_back({{"generator", to_json(g.form(gen))}, {"order", ord}});
    j["cyclic_decomposition"] = cyc;
    nlohmann::json amb = nlohmann::json::array();
    for (auto i : g.ambiguous()) amb.push_back(to_json(g.form(i)));
    j["ambiguous"] = amb;
    if (with_cayley && g.has_cayley()) j["cayley"] = g.cayley();
    return j;
}

}  // namespace genuslab
