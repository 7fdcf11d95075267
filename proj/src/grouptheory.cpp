#include "genuslab/grouptheory.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace genuslab {

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<i64> orders) {
    for (i64 d : orders) {
        if (d <= 0) throw std::invalid_argument("FiniteAbelianGroup: orders must be positive");
        if (d > 1) orders_.push_back(d);
    }
    size_ = 1;
    for (i64 d : orders_) {
        strides_.push_back(size_);
        size_ *= static_cast<std::size_t>(d);
        if (size_ > (std::size_t{1} << 31)) throw std::length_error("FiniteAbelianGroup: group too large");
    }
    coords_.resize(size_ * orders_.size());
    for (std::size_t e = 0; e < size_; ++e) {
        std::size_t rest = e;
        for (std::size_t i = 0; i < orders_.size(); ++i) {
            const auto d = static_cast<std::size_t>(orders_[i]);
            coords_[e * orders_.size() + i] = static_cast<std::uint32_t>(rest % d);
            rest /= d;
        }
    }
}

Element FiniteAbelianGroup::add(Element a, Element b) const {
    const std::size_t r = orders_.size();
    std::size_t out = 0;
    for (std::size_t i = 0; i < r; ++i) {
        std::size_t s = coords_[a * r + i] + coords_[b * r + i];
        const auto d = static_cast<std::size_t>(orders_[i]);
        if (s >= d) s -= d;
        out += s * strides_[i];
    }
    return static_cast<Element>(out);
}

Element FiniteAbelianGroup::neg(Element a) const {
    const std::size_t r = orders_.size();
    std::size_t out = 0;
    for (std::size_t i = 0; i < r; ++i) {
        const std::size_t c = coords_[a * r + i];
        if (c != 0) out += (static_cast<std::size_t>(orders_[i]) - c) * strides_[i];
    }
    return static_cast<Element>(out);
}

Element FiniteAbelianGroup::multiple(i64 k, Element a) const {
    const std::size_t r = orders_.size();
    std::size_t out = 0;
    for (std::size_t i = 0; i < r; ++i) {
        const i64 c = mod(static_cast<i64>(coords_[a * r + i]) * mod(k, orders_[i]), orders_[i]);
        out += static_cast<std::size_t>(c) * strides_[i];
    }
    return static_cast<Element>(out);
}

i64 FiniteAbelianGroup::order(Element a) const {
    const std::size_t r = orders_.size();
    i64 o = 1;
    for (std::size_t i = 0; i < r; ++i) {
        const i64 c = coords_[a * r + i];
        o = lcm(o, orders_[i] / gcd(c, orders_[i]));
    }
    return o;
}

std::vector<i64> FiniteAbelianGroup::coords(Element a) const {
    const std::size_t r = orders_.size();
    std::vector<i64> out(r);
    for (std::size_t i = 0; i < r; ++i) out[i] = coords_[a * r + i];
    return out;
}

Element FiniteAbelianGroup::from_coords(std::span<const i64> c) const {
    if (c.size() != orders_.size()) throw std::invalid_argument("from_coords: rank mismatch");
    std::size_t out = 0;
    for (std::size_t i = 0; i < c.size(); ++i) out += static_cast<std::size_t>(mod(c[i], orders_[i])) * strides_[i];
    return static_cast<Element>(out);
}

ElementSet FiniteAbelianGroup::translate(const ElementSet& s, Element x) const {
    ElementSet out(size_);
    s.for_each([&](Element e) { out.insert(add(e, x)); });
    return out;
}

ElementSet FiniteAbelianGroup::negate(const ElementSet& s) const {
    ElementSet out(size_);
    s.for_each([&](Element e) { out.insert(neg(e)); });
    return out;
}

ElementSet FiniteAbelianGroup::sumset(const ElementSet& u, const ElementSet& v) const {
    ElementSet out(size_);
    u.for_each([&](Element a) { v.for_each([&](Element b) { out.insert(add(a, b)); }); });
    return out;
}

ElementSet FiniteAbelianGroup::generated(std::span<const Element> gens) const {
    ElementSet h(size_);
    h.insert(0);
    std::vector<Element> members{0};
    for (Element g : gens) {
        if (h.contains(g)) continue;
        // H <- H + <g>: walk multiples of g until they fall back into H.
        const std::vector<Element> base = members;
        Element step = g;
        while (!h.contains(step)) {
            for (Element b : base) {
                const Element e = add(b, step);
                h.insert(e);
                members.push_back(e);
            }
            step = add(step, g);
        }
    }
    return h;
}

bool FiniteAbelianGroup::is_subgroup(const ElementSet& s) const {
    if (s.universe() != size_ || !s.contains(0)) return false;
    const auto elems = s.elements();
    return generated(elems) == s;
}

std::string FiniteAbelianGroup::describe() const {
    if (orders_.empty()) return "trivial";
    std::ostringstream os;
    for (std::size_t i = 0; i < orders_.size(); ++i) os << (i ? " x " : "") << "Z/" << orders_[i];
    return os.str();
}

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Forward multidimensional DFT of a real function on G.  FFTW is row-major
// (last index fastest) while element indices have coordinate 0 fastest, so
// the dimension list is reversed.
std::vector<std::complex<double>> group_dft(std::span<const double> f, const FiniteAbelianGroup& g, int sign) {
    const std::size_t n = g.size();
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = f[i];
    if (g.rank() == 0) return buf;
    std::vector<int> dims(g.orders().rbegin(), g.orders().rend());
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), data, data, sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return buf;
}

std::vector<double> group_idft_real(std::vector<std::complex<double>> spec, const FiniteAbelianGroup& g) {
    const std::size_t n = g.size();
    std::vector<double> out(n);
    if (g.rank() == 0) {
        out[0] = spec[0].real();
        return out;
    }
    std::vector<int> dims(g.orders().rbegin(), g.orders().rend());
    auto* data = reinterpret_cast<fftw_complex*>(spec.data());
    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real() / static_cast<double>(n);
    return out;
}

std::vector<i64> overlap_direct(const ElementSet& s, const FiniteAbelianGroup& g) {
    std::vector<i64> out(g.size(), 0);
    const auto elems = s.elements();
    for (Element a : elems)
        for (Element b : elems) ++out[g.sub(a, b)];
    return out;
}

std::vector<i64> overlap_fft(const ElementSet& s, const FiniteAbelianGroup& g) {
    std::vector<double> f(g.size(), 0.0);
    s.for_each([&](Element e) { f[e] = 1.0; });
    auto spec = group_dft(f, g, FFTW_FORWARD);
    for (auto& z : spec) z = std::norm(z);
    const auto corr = group_idft_real(std::move(spec), g);
    std::vector<i64> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = std::nearbyint(corr[i]);
        if (std::abs(corr[i] - r) > 0.25) throw std::runtime_error("overlap_fft: rounding tolerance exceeded");
        out[i] = static_cast<i64>(r);
    }
    return out;
}

}  // namespace

std::vector<i64> self_overlap_counts(const ElementSet& s, const FiniteAbelianGroup& g) {
    const double pairs = static_cast<double>(s.size()) * static_cast<double>(s.size());
    const double fft_cost = 8.0 * static_cast<double>(g.size()) * std::log2(static_cast<double>(g.size()) + 2.0);
    if (pairs <= fft_cost) return overlap_direct(s, g);
    return overlap_fft(s, g);
}

ElementSet subset_sums(std::span<const Element> a, const FiniteAbelianGroup& g) {
    ElementSet s(g.size());
    s.insert(0);
    ElementSet seen(g.size());
    for (Element x : a) {
        if (seen.contains(x)) continue;
        seen.insert(x);
        s |= g.translate(s, x);
        if (s.is_full()) break;
    }
    return s;
}

GreedyTranscript greedy_grow(std::span<const Element> a, const FiniteAbelianGroup& g, double density_target) {
    const auto hp = static_cast<double>(g.size());
    std::vector<Element> pool(a.begin(), a.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

    GreedyTranscript t;
    t.sums = ElementSet(g.size());
    t.sums.insert(0);
    t.sizes.push_back(1);
    t.densities.push_back(1.0 / hp);
    while (!pool.empty() && t.densities.back() < density_target) {
        const auto ov = self_overlap_counts(t.sums, g);
        const auto cur = static_cast<i64>(t.sums.size());
        std::size_t best_pos = 0;
        i64 best = -1;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const i64 sz = 2 * cur - ov[pool[i]];
            if (sz > best) {
                best = sz;
                best_pos = i;
            }
        }
        if (best <= cur) break;
        const Element x = pool[best_pos];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best_pos));
        t.sums |= g.translate(t.sums, x);
        t.chosen.push_back(x);
        t.sizes.push_back(t.sums.size());
        t.densities.push_back(static_cast<double>(t.sums.size()) / hp);
    }
    return t;
}

ElementSet omega_set(std::span<const Element> chosen, const FiniteAbelianGroup& g, double eps) {
    const ElementSet s = subset_sums(chosen, g);
    const auto hp = static_cast<double>(g.size());
    const double delta = static_cast<double>(s.size()) / hp;
    const double threshold =
        delta <= 0.5 ? (2.0 - eps) * delta * hp : (1.0 - std::pow(1.0 - delta, 1.5)) * hp;
    const auto ov = self_overlap_counts(s, g);
    const auto cur = static_cast<i64>(s.size());
    ElementSet omega(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
        if (static_cast<double>(2 * cur - ov[x]) < threshold) omega.insert(static_cast<Element>(x));
    }
    return omega;
}

std::string to_string(Alternative a) {
    switch (a) {
        case Alternative::SumsAll: return "SUMS_ALL";
        case Alternative::Subgroup: return "SUBGROUP";
        case Alternative::SmallOmega: return "SMALL_OMEGA";
    }
    return "?";
}

double Theorem1Params::kappa() const {
    return std::max(std::exp2(-100.0 / eps), std::exp2(-30.0));
}

double Theorem1Params::resolved_eps1() const {
    if (eps1 > 0) return eps1;
    return std::max(std::min(1e-3 * eps * eps * eps, kappa()), std::exp2(-30.0));
}

double Theorem1Params::resolved_c_eps() const {
    if (c_eps > 0) return c_eps;
    return std::ceil(20.0 / (eps * eps));
}

namespace {

double k_bound_for(const Theorem1Params& p, std::size_t h) {
    const auto hp = static_cast<double>(h);
    const double loglog = hp > std::exp(1.0) ? std::log(std::log(hp)) : 0.0;
    return (1.0 + p.eps) * std::log2(hp) + p.c_loglog * std::max(0.0, loglog) + p.resolved_c_eps();
}

// Elements x with |s ∪ (s + x)| below the stalled-growth threshold.
ElementSet stall_set(const ElementSet& s, const FiniteAbelianGroup& g, double eps1) {
    const auto hp = static_cast<double>(g.size());
    const auto cur = static_cast<i64>(s.size());
    const double threshold = (1.0 - eps1) * static_cast<double>(cur) + eps1 * hp;
    const auto ov = self_overlap_counts(s, g);
    ElementSet out(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
        if (static_cast<double>(2 * cur - ov[x]) < threshold) out.insert(static_cast<Element>(x));
    }
    return out;
}

// Kernels of the characters G -> Z/p for every prime p < bound dividing |G|,
// one per line of characters (first non-zero coefficient normalised to 1).
std::vector<ElementSet> maximal_subgroups_below(const FiniteAbelianGroup& g, double index_bound,
                                                std::size_t budget) {
    std::vector<ElementSet> out;
    const auto& d = g.orders();
    const std::size_t rank = g.rank();
    std::vector<i64> table;
    table.reserve(g.size() * rank);
    for (std::size_t x = 0; x < g.size(); ++x)
        for (i64 c : g.coords(static_cast<Element>(x))) table.push_back(c);
    for (i64 p = 2; static_cast<double>(p) < index_bound; ++p) {
        if (!is_prime(p)) continue;
        std::vector<std::size_t> axes;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d[i] % p == 0) axes.push_back(i);
        if (axes.empty()) continue;
        const std::size_t r = axes.size();
        std::vector<i64> y(r, 0);
        // Iterate coefficient vectors in Z/p^r, keep normalised ones.
        double total = std::pow(static_cast<double>(p), static_cast<double>(r));
        if (total > 4.0 * static_cast<double>(budget)) throw std::length_error("maximal subgroup enumeration too large");
        for (i64 code = 1; code < static_cast<i64>(total); ++code) {
            i64 c = code;
            for (std::size_t j = 0; j < r; ++j) {
                y[j] = c % p;
                c /= p;
            }
            std::size_t lead = 0;
            while (y[lead] == 0) ++lead;
            if (y[lead] != 1) continue;
            ElementSet h(g.size());
            for (std::size_t x = 0; x < g.size(); ++x) {
                const i64* cx = &table[x * rank];
                i64 v = 0;
                for (std::size_t j = 0; j < r; ++j) v += y[j] * cx[axes[j]];
                if (v % p == 0) h.insert(static_cast<Element>(x));
            }
            out.push_back(std::move(h));
            if (out.size() > budget) throw std::length_error("maximal subgroup enumeration too large");
        }
    }
    return out;
}

}  // namespace

Theorem1Report classify_theorem1(std::span<const Element> a, const FiniteAbelianGroup& g,
                                 const Theorem1Params& params) {
    if (!(params.eps > 0.0 && params.eps < params.eps_max))
        throw std::invalid_argument("classify_theorem1: eps must lie in (0, eps_max)");
    if (g.size() < 2) throw std::invalid_argument("classify_theorem1: group must have at least 2 elements");

    std::vector<Element> set(a.begin(), a.end());
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());

    Theorem1Report rep;
    rep.params = params;
    rep.group_size = g.size();
    const ElementSet full_sums = subset_sums(set, g);
    rep.sums_size = full_sums.size();
    rep.transcript = greedy_grow(set, g);
    if (full_sums.is_full()) {
        rep.alternative = Alternative::SumsAll;
        return rep;
    }

    const double index_bound = 2.0 / params.eps;
    const ElementSet aset = ElementSet::of(g.size(), set);
    std::optional<ElementSet> best_h;
    std::size_t best_out = 0;
    for (auto& h : maximal_subgroups_below(g, index_bound, 1U << 20U)) {
        const std::size_t outside = aset.minus(h).size();
        if (!best_h || outside < best_out) {
            best_out = outside;
            best_h = std::move(h);
        }
    }
    const auto subgroup_report = [&] {
        rep.alternative = Alternative::Subgroup;
        rep.subgroup = *best_h;
        rep.index = g.size() / best_h->size();
        rep.exceptional = aset.minus(*best_h).elements();
        return rep;
    };
    // A set trapped inside a proper subgroup is reported as such, whatever its sumset looks like.
    if (best_h && best_out == 0) return subgroup_report();

    const double eps1 = params.resolved_eps1();
    const auto hp = static_cast<double>(g.size());
    ElementSet s(g.size());
    s.insert(0);
    std::vector<Element> pool = set;
    std::vector<Element> chosen;
    while (!pool.empty()) {
        const auto ov = self_overlap_counts(s, g);
        const auto cur = static_cast<i64>(s.size());
        const double threshold = (1.0 - eps1) * static_cast<double>(cur) + eps1 * hp;
        std::size_t best_pos = 0;
        i64 best = -1;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const i64 sz = 2 * cur - ov[pool[i]];
            if (sz > best) {
                best = sz;
                best_pos = i;
            }
        }
        if (static_cast<double>(best) < threshold) break;
        chosen.push_back(pool[best_pos]);
        s |= g.translate(s, pool[best_pos]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best_pos));
    }

    const ElementSet stalled = stall_set(s, g, eps1);
    rep.chosen = chosen;
    rep.k_bound = k_bound_for(params, g.size());
    rep.omega_bound = params.eps * hp + static_cast<double>(chosen.size());
    if (static_cast<double>(stalled.size()) <= params.eps * hp) {
        rep.alternative = Alternative::SmallOmega;
        rep.omega = stalled;
        for (Element x : chosen) rep.omega.insert(x);
        rep.bounds_met = static_cast<double>(chosen.size()) < rep.k_bound;
        return rep;
    }

    if (best_h && static_cast<double>(best_out) <= params.resolved_c_eps()) return subgroup_report();

    rep.alternative = Alternative::SmallOmega;
    rep.omega = stalled;
    for (Element x : chosen) rep.omega.insert(x);
    rep.bounds_met = false;
    return rep;
}

Theorem1Check verify_theorem1(const Theorem1Report& report, std::span<const Element> a, const FiniteAbelianGroup& g) {
    const ElementSet aset = ElementSet::of(g.size(), a);
    const auto& p = report.params;
    switch (report.alternative) {
        case Alternative::SumsAll:
            if (!subset_sums(a, g).is_full()) return {false, "s(A) is not the whole group"};
            return {true, ""};
        case Alternative::Subgroup: {
            const ElementSet& h = report.subgroup;
            if (!g.is_subgroup(h)) return {false, "witness is not a subgroup"};
            if (h.is_full()) return {false, "witness subgroup is not proper"};
            const std::size_t index = g.size() / h.size();
            if (index != report.index) return {false, "reported index is wrong"};
            if (!(static_cast<double>(index) < 2.0 / p.eps)) return {false, "index is not below 2/eps"};
            const ElementSet outside = aset.minus(h);
            if (outside.elements() != report.exceptional) return {false, "exceptional set mismatch"};
            if (static_cast<double>(outside.size()) > p.resolved_c_eps()) return {false, "|A \\ H| exceeds c(eps)"};
            return {true, ""};
        }
        case Alternative::SmallOmega: {
            for (Element x : report.chosen)
                if (!aset.contains(x)) return {false, "chosen element outside A"};
            if (!aset.subset_of(report.omega)) return {false, "A is not contained in Omega"};
            ElementSet rebuilt = stall_set(subset_sums(report.chosen, g), g, p.resolved_eps1());
            for (Element x : report.chosen) rebuilt.insert(x);
            if (!(rebuilt == report.omega)) return {false, "Omega is not determined by the chosen elements"};
            const auto k = static_cast<double>(report.chosen.size());
            if (static_cast<double>(report.omega.size()) > p.eps * static_cast<double>(g.size()) + k)
                return {false, "|Omega| exceeds eps h' + k"};
            if (!(k < k_bound_for(p, g.size()))) return {false, "k exceeds the length bound"};
            return {true, ""};
        }
    }
    return {false, "unknown alternative"};
}

i64 additive_energy(const ElementSet& u, const ElementSet& v, const FiniteAbelianGroup& g) {
    const auto ru = self_overlap_counts(u, g);
    const auto rv = (&u == &v || u == v) ? ru : self_overlap_counts(v, g);
    i64 e = 0;
    for (std::size_t x = 0; x < g.size(); ++x) e += ru[x] * rv[x];
    return e;
}

ElementSet sym1(const ElementSet& t, const FiniteAbelianGroup& g) {
    const auto ov = self_overlap_counts(t, g);
    ElementSet out(g.size());
    const auto n = static_cast<i64>(t.size());
    for (std::size_t x = 0; x < g.size(); ++x)
        if (ov[x] == n) out.insert(static_cast<Element>(x));
    return out;
}

KneserCheck kneser_check(const ElementSet& t, const FiniteAbelianGroup& g) {
    KneserCheck k;
    const ElementSet diff = g.sumset(t, g.negate(t));
    k.difference_size = diff.size();
    k.set_size = t.size();
    k.stabilizer_size = sym1(diff, g).size();
    k.holds = k.difference_size + k.stabilizer_size >= 2 * k.set_size;
    return k;
}

namespace {

struct WordsHash {
    std::size_t operator()(const std::vector<std::uint64_t>& w) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (auto x : w) h = (h ^ x) * 1099511628211ULL;
        return h;
    }
};

// Breadth-first enumeration of all subgroups of order <= max_order.
std::vector<ElementSet> small_subgroups(const FiniteAbelianGroup& g, std::size_t max_order, std::size_t budget) {
    std::vector<ElementSet> all;
    std::unordered_set<std::vector<std::uint64_t>, WordsHash> seen;
    ElementSet trivial(g.size());
    trivial.insert(0);
    all.push_back(trivial);
    seen.insert(trivial.words());
    for (std::size_t head = 0; head < all.size(); ++head) {
        const ElementSet k = all[head];
        if (k.size() * 2 > max_order) continue;
        const auto kelems = k.elements();
        ElementSet done = k;
        for (std::size_t x = 0; x < g.size(); ++x) {
            const auto e = static_cast<Element>(x);
            if (done.contains(e)) continue;
            for (Element m : kelems) done.insert(g.add(m, e));
            std::vector<Element> gens = kelems;
            gens.push_back(e);
            ElementSet bigger = g.generated(gens);
            if (bigger.size() > max_order) continue;
            if (seen.insert(bigger.words()).second) {
                all.push_back(std::move(bigger));
                if (all.size() > budget) throw std::length_error("subgroup enumeration budget exceeded");
            }
        }
    }
    return all;
}

// Annihilator of K under the pairing <x, y> = sum x_i y_i (L / d_i) mod L.
ElementSet annihilator(const ElementSet& k, const FiniteAbelianGroup& g) {
    const auto& d = g.orders();
    i64 l = 1;
    for (i64 di : d) l = lcm(l, di);
    std::vector<std::vector<i64>> ys;
    // Generators suffice: a minimal generating list drawn from K.
    ElementSet acc(g.size());
    acc.insert(0);
    std::vector<Element> gens;
    k.for_each([&](Element y) {
        if (acc.contains(y)) return;
        gens.push_back(y);
        acc = g.generated(gens);
    });
    for (Element y : gens) ys.push_back(g.coords(y));
    ElementSet out(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
        const auto cx = g.coords(static_cast<Element>(x));
        bool ok = true;
        for (const auto& cy : ys) {
            i128 v = 0;
            for (std::size_t i = 0; i < d.size(); ++i) v += static_cast<i128>(cx[i]) * cy[i] * (l / d[i]);
            if (v % l != 0) {
                ok = false;
                break;
            }
        }
        if (ok) out.insert(static_cast<Element>(x));
    }
    return out;
}

}  // namespace

std::vector<ElementSet> subgroups_up_to_index(const FiniteAbelianGroup& g, std::size_t max_index) {
    if (max_index == 0) return {};
    std::vector<ElementSet> out;
    for (const auto& k : small_subgroups(g, max_index, 200000)) out.push_back(annihilator(k, g));
    std::sort(out.begin(), out.end(), [](const ElementSet& x, const ElementSet& y) {
        if (x.size() != y.size()) return x.size() > y.size();
        return x.words() < y.words();
    });
    return out;
}

std::vector<ElementSet> subgroups_with_order(const FiniteAbelianGroup& g, std::size_t lo, std::size_t hi,
                                             std::size_t budget) {
    std::vector<ElementSet> out;
    if (hi < lo || hi == 0) return out;
    const std::size_t n = g.size();
    // Subgroups of order >= lo are annihilators of subgroups of order <= n / lo.
    const std::size_t dual_max = lo == 0 ? n : n / lo;
    if (dual_max < hi) {
        for (const auto& k : small_subgroups(g, dual_max, budget)) {
            ElementSet h = annihilator(k, g);
            if (h.size() >= lo && h.size() <= hi) out.push_back(std::move(h));
        }
    } else {
        for (auto& h : small_subgroups(g, hi, budget))
            if (h.size() >= lo) out.push_back(std::move(h));
    }
    std::sort(out.begin(), out.end(), [](const ElementSet& x, const ElementSet& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x.words() < y.words();
    });
    return out;
}

Lemma1Result lemma1_witness(std::span<const double> mu, const FiniteAbelianGroup& g, double kappa_max, double c) {
    if (mu.size() != g.size()) throw std::invalid_argument("lemma1_witness: measure has wrong length");
    Lemma1Result res;
    const auto spec = group_dft(mu, g, FFTW_FORWARD);
    double s2 = 0.0, s4 = 0.0;
    for (const auto& z : spec) {
        const double a = std::norm(z);
        s2 += a;
        s4 += a * a;
    }
    const auto n = static_cast<double>(g.size());
    const double mu2 = std::sqrt(s2 / n);
    const double conv2 = std::sqrt(s4 / n);
    res.l2_norm = mu2;
    res.kappa = 1.0 - conv2 / mu2;
    if (res.kappa > kappa_max) return res;

    const double target = 1.0 / (mu2 * mu2);
    const auto lo = static_cast<std::size_t>(std::floor(target / 2.0));
    const auto hi = std::min(g.size(), static_cast<std::size_t>(std::floor(2.0 * target)));
    for (const auto& h : subgroups_with_order(g, lo, hi)) {
        const auto hs = static_cast<double>(h.size());
        if (!(hs > target / 2.0 && hs < 2.0 * target)) continue;
        const auto helems = h.elements();
        std::vector<char> labelled(g.size(), 0);
        for (std::size_t r = 0; r < g.size(); ++r) {
            if (labelled[r]) continue;
            // Coset r + H: distance = 1 + sum over the coset of (|mu - 1/|H|| - mu).
            double dist = 1.0;
            for (Element e : helems) {
                const Element x = g.add(e, static_cast<Element>(r));
                labelled[x] = 1;
                dist += std::abs(mu[x] - 1.0 / hs) - mu[x];
            }
            if (!res.witness || dist < res.witness->distance - 1e-15) {
                Lemma1Witness w;
                w.subgroup = h;
                w.shift = g.neg(static_cast<Element>(r));
                w.distance = std::max(0.0, dist);
                res.witness = std::move(w);
            }
        }
    }
    if (res.witness) res.witness->meets_bound = 
            res.witness->distance <= c * std::pow(std::max(0.0, res.kappa), 1.0 / 12.0);
    return res;
}

}  // namespace genuslab
