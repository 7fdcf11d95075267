#include "genuslab/genus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace genuslab {

GenusPartition genus_partition(const ClassGroup& g) {
    const std::size_t h = g.h();
    GenusPartition gp;
    gp.squares = ElementSet(h);
    for (ClassIndex c = 0; c < h; ++c) gp.squares.insert(static_cast<Element>(g.compose(c, c)));
    gp.genus_of.assign(h, h);
    const auto sq = gp.squares.elements();
    for (ClassIndex c = 0; c < h; ++c) {
        if (gp.genus_of[c] != h) continue;
        const std::size_t id = gp.genera.size();
        std::vector<ClassIndex> members;
        for (Element s : sq) {
            const ClassIndex x = g.compose(c, s);
            gp.genus_of[x] = id;
            members.push_back(x);
        }
        std::sort(members.begin(), members.end());
        gp.genera.push_back(std::move(members));
    }
    return gp;
}

namespace {

// A value f(x, y) with gcd(x, y) = 1 and gcd(value, modulus) = 1, together with (x, y).
struct Represented {
    i64 value, x, y;
};

Represented coprime_value(const QuadForm& f, i64 modulus) {
    for (i64 r = 1; r < 200; ++r) {
        for (i64 y = 0; y <= r; ++y) {
            for (i64 x : {r - y, -(r - y)}) {
                if (gcd(x, y) != 1) continue;
                const i64 v = f.eval(x, y);
                if (v > 0 && gcd(v, modulus) == 1) return {v, x, y};
            }
        }
    }
    throw std::logic_error("coprime_value: no small value coprime to the modulus");
}

}  // namespace

std::vector<int> genus_characters(const QuadForm& f) {
    const i64 d = f.discriminant();
    const i64 r = coprime_value(f, 2 * d).value;
    std::vector<int> out;
    for (const auto& pp : factorize(d)) {
        if (pp.prime == 2) continue;
        out.push_back(legendre(r, pp.prime));
    }
    if (mod(d, 4) == 0) {
        const i64 n = -d / 4;
        const int delta = mod(r, 4) == 1 ? 1 : -1;
        const int eps = (mod(r, 8) == 1 || mod(r, 8) == 7) ? 1 : -1;
        if (mod(n, 4) == 1 || mod(n, 8) == 4) {
            out.push_back(delta);
        } else if (mod(n, 8) == 2) {
            out.push_back(delta * eps);
        } else if (mod(n, 8) == 6) {
            out.push_back(eps);
        } else if (mod(n, 8) == 0) {
            out.push_back(delta);
            out.push_back(eps);
        }
    }
    return out;
}

ElementSet classes_representing(i64 n, const ClassGroup& g) {
    if (n < 1) throw std::invalid_argument("classes_representing: n must be positive");
    const std::size_t h = g.h();
    ElementSet cur(h);
    cur.insert(static_cast<Element>(g.identity()));
    if (n == 1) return cur;
    for (const auto& pp : factorize(n)) {
        if (pp.exponent > 1) throw std::invalid_argument("classes_representing: n must be squarefree");
    }
    for (const auto& pp : factorize(n)) {
        PrimeClasses pc;
        try {
            pc = prime_to_class(pp.prime, g);
        } catch (const std::domain_error&) {
            return ElementSet(h);
        }
        ElementSet next(h);
        cur.for_each([&](Element c) {
            next.insert(static_cast<Element>(g.compose(c, pc.cls)));
            next.insert(static_cast<Element>(g.compose(c, pc.inv)));
        });
        cur = std::move(next);
    }
    return cur;
}

ElementSet classes_representing_subset_sums(i64 n, const ClassGroup& g) {
    if (n < 1) throw std::invalid_argument("classes_representing_subset_sums: n must be positive");
    const FiniteAbelianGroup& ab = g.abelian();
    Element offset = 0;
    std::vector<Element> squares;
    for (const auto& pp : (n == 1 ? Factorization{} : factorize(n))) {
        if (pp.exponent > 1) throw std::invalid_argument("classes_representing_subset_sums: n must be squarefree");
        PrimeClasses pc;
        try {
            pc = prime_to_class(pp.prime, g);
        } catch (const std::domain_error&) {
            return ElementSet(g.h());
        }
        offset = ab.add(offset, g.to_abelian(pc.inv));
        squares.push_back(g.to_abelian(g.compose(pc.cls, pc.cls)));
    }
    const ElementSet sums = ab.translate(subset_sums(squares, ab), offset);
    return to_class_indices(sums, g);
}

AppendixDiscriminant AppendixDiscriminant::make(i64 d_pos) {
    if (d_pos <= 0) throw std::invalid_argument("AppendixDiscriminant: D_pos must be positive");
    AppendixDiscriminant ad;
    ad.d_pos = d_pos;
    ad.factors = factorize(d_pos);
    i64 odd = d_pos;
    while (odd % 2 == 0) {
        odd /= 2;
        ++ad.theta2;
    }
    ad.odd_part = -odd;
    ad.kernel = squarefree_kernel(-d_pos);
    ad.fundamental = mod(ad.kernel, 4) == 1 ? ad.kernel : 4 * ad.kernel;
    return ad;
}

std::string LocalCriteriaReading::name() const {
    std::string s = signed_odd_part ? "signed-D2" : "positive-D2";
    switch (pairing) {
        case Row4Pairing::ResidueAWithMinusOne: return s + "/A-with-D2=-1";
        case Row4Pairing::ResidueAWithPlusOne: return s + "/A-with-D2=+1";
        case Row4Pairing::Union: return s + "/union";
    }
    return s;
}

QuadForm coprime_leading_form(const QuadForm& f) {
    const i64 d_pos = -f.discriminant();
    if (gcd(f.a, 2 * d_pos) == 1) return f;
    const Represented r = coprime_value(f, 2 * d_pos);
    // Complete (x, y) to a matrix [[x, u], [y, w]] of determinant 1.
    const ExtGcd e = ext_gcd(r.x, r.y);  // x*ex + y*ey = 1
    const i64 w = e.x, u = -e.y;
    const i64 b2 = 2 * f.a * r.x * u + f.b * (r.x * w + r.y * u) + 2 * f.c * r.y * w;
    return {r.value, b2, f.eval(u, w)};
}

int local_criteria_row(int eps2, int theta2) {
    if (eps2 == 0) {
        if (theta2 == 0) return 3;
        if (theta2 == 2) return 4;
        if (theta2 == 3) return 5;
        if (theta2 == 4) return 6;
        if (theta2 >= 5) return 7;
        return 0;
    }
    if (theta2 == 0) return 8;
    if (theta2 == 2) return 9;
    if (theta2 == 3) return 10;
    return 0;
}

namespace {

bool squarefree_i64(i64 m) {
    for (const auto& pp : factorize(m))
        if (pp.exponent > 1) return false;
    return true;
}

i64 row_tau(int row) {
    switch (row) {
        case 4: case 6: case 9: return 4;
        case 5: case 7: case 10: return 8;
        default: return 1;
    }
}

// Residues l (mod tau2) allowed for n by the 2-adic row; empty when the row
// excludes every n.
std::vector<i64> two_adic_residues(int row, i64 a, const AppendixDiscriminant& ad, const LocalCriteriaReading& rd) {
    const i64 d2 = rd.signed_odd_part ? ad.odd_part : -ad.odd_part;
    std::vector<i64> out;
    auto add = [&](i64 v, i64 m) {
        v = mod(v, m);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    switch (row) {
        case 3:
            if (mod(ad.d_pos, 4) == 3) add(0, 1);
            break;
        case 4: {
            const bool minus_one = mod(d2, 4) == 3;
            switch (rd.pairing) {
                case Row4Pairing::Union:
                    add(a, 4);
                    add(-a * d2, 4);
                    break;
                case Row4Pairing::ResidueAWithMinusOne:
                    add(minus_one ? a : -a * d2, 4);
                    break;
                case Row4Pairing::ResidueAWithPlusOne:
                    add(minus_one ? -a * d2 : a, 4);
                    break;
            }
            break;
        }
        case 5:
            add(a, 8);
            add(a * (1 - 2 * d2), 8);
            break;
        case 6: add(a, 4); break;
        case 7: add(a, 8); break;
        case 8:
            if (mod(ad.d_pos, 8) == 7) add(0, 1);
            break;
        case 9:
            if (mod(d2, 4) == 3) add(a * ((1 - d2) / 2), 4);
            break;
        case 10:
            add(-a * d2, 8);
            add(a * (2 - d2), 8);
            break;
        default: break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

void check_even_middle(const QuadForm& f) {
    if (f.b % 2 != 0) throw std::invalid_argument("local criteria need an even middle coefficient");
    if (f.a <= 0 || f.discriminant() >= 0) throw std::invalid_argument("form is not positive definite");
}

}  // namespace

bool genus_represents_local(i64 m, const QuadForm& f, const LocalCriteriaReading& reading) {
    check_even_middle(f);
    if (m < 1 || !squarefree_i64(m)) throw std::invalid_argument("genus_represents_local: m must be squarefree");
    const QuadForm g = coprime_leading_form(f);
    const AppendixDiscriminant ad = AppendixDiscriminant::make(-g.discriminant());
    if (gcd(m, ad.d_pos) > 2) throw std::invalid_argument("genus_represents_local: gcd(m, D) > 2");
    const int eps2 = m % 2 == 0 ? 1 : 0;
    const i64 n = m >> eps2;
    const i64 a2 = g.a << eps2;
    for (const auto& pp : ad.factors) {
        if (pp.prime == 2) continue;
        if (kronecker(n, pp.prime) != kronecker(a2, pp.prime)) return false;
    }
    if (n > 1) {
        for (const auto& pp : factorize(n))
            if (kronecker(-ad.d_pos, pp.prime) != 1) return false;
    }
    const int row = local_criteria_row(eps2, ad.theta2);
    const std::vector<i64> res = two_adic_residues(row, g.a, ad, reading);
    const i64 tau = row_tau(row);
    return std::find(res.begin(), res.end(), mod(n, tau)) != res.end();
}

bool LocalConditions::prime_admissible(i64 p) const {
    return kronecker(disc.kernel, p) == 1;
}

bool LocalConditions::represents(i64 m) const {
    if (m < 1 || (m % 2 == 0) != (eps2 == 1)) return false;
    const i64 n = m >> eps2;
    if (L.empty()) return false;
    if (n > 1) {
        for (const auto& pp : factorize(n))
            if (!prime_admissible(pp.prime)) return false;
    }
    return std::binary_search(L.begin(), L.end(), mod(n, Q));
}

LocalConditions build_L_set(const QuadForm& f, int eps2) {
    check_even_middle(f);
    if (eps2 != 0 && eps2 != 1) throw std::invalid_argument("build_L_set: eps2 must be 0 or 1");
    const QuadForm g = coprime_leading_form(f);
    LocalConditions lc;
    lc.eps2 = eps2;
    lc.leading = g.a;
    lc.disc = AppendixDiscriminant::make(-g.discriminant());
    lc.row = local_criteria_row(eps2, lc.disc.theta2);
    lc.tau2 = row_tau(lc.row);
    lc.l2 = two_adic_residues(lc.row, g.a, lc.disc, LocalCriteriaReading{});
    lc.kappa = static_cast<int>(lc.l2.size());
    lc.Q = lc.tau2;
    for (const auto& pp : lc.disc.factors) {
        if (pp.prime == 2) continue;
        lc.odd_primes.push_back(pp.prime);
        lc.Q *= pp.prime;
    }
    const i64 a2 = g.a << eps2;
    // Residues 0 < l < Q; when Q = 1 the single class is 0.
    for (i64 l = lc.Q == 1 ? 0 : 1; l < std::max<i64>(lc.Q, 1); ++l) {
        if (std::find(lc.l2.begin(), lc.l2.end(), mod(l, lc.tau2)) == lc.l2.end()) continue;
        bool ok = true;
        for (i64 p : lc.odd_primes)
            if (kronecker(mod(l, p), p) != kronecker(a2, p)) {
                ok = false;
                break;
            }
        if (ok) lc.L.push_back(l);
    }
    for (i64 l : lc.L)
        if (l > 0 && kronecker(lc.disc.kernel, l) != 1) lc.kernel_symbol_ok = false;
    return lc;
}

std::vector<bool> genus_representation_bitmap(const QuadForm& f, i64 limit) {
    const ClassGroup g(f.discriminant());
    const GenusPartition gp = genus_partition(g);
    const ClassIndex c = g.class_of(f);
    std::vector<bool> out(static_cast<std::size_t>(std::max<i64>(limit, 0)) + 1, false);
    for (ClassIndex member : gp.genera[gp.genus_of[c]]) {
        const auto bm = representation_bitmap(g.form(member), limit);
        for (std::size_t i = 0; i < bm.size(); ++i)
            if (bm[i]) out[i] = true;
    }
    return out;
}

std::vector<QuadForm> calibration_forms() {
    std::vector<QuadForm> out{{1, 0, 1}, {1, 0, 2}, {2, 2, 3}};
    for (i64 a = 1; a <= 12; ++a)
        for (const auto& f : reduced_forms(-4 * a * a))
            if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    return out;
}

std::vector<CalibrationResult> calibrate_local_criteria(const std::vector<QuadForm>& forms, i64 limit) {
    std::vector<CalibrationResult> results;
    for (bool signed_part : {true, false})
        for (Row4Pairing pr : {Row4Pairing::Union, Row4Pairing::ResidueAWithMinusOne, Row4Pairing::ResidueAWithPlusOne})
            results.push_back({LocalCriteriaReading{signed_part, pr}, 0, 0});
    std::vector<char> sqfree(static_cast<std::size_t>(limit) + 1, 1);
    for (i64 p = 2; p * p <= limit; ++p)
        for (i64 q = p * p; q <= limit; q += p * p) sqfree[static_cast<std::size_t>(q)] = 0;
    for (const auto& f : forms) {
        const i64 d_pos = -f.discriminant();
        const auto truth = genus_representation_bitmap(f, limit);
        for (i64 m = 1; m <= limit; ++m) {
            if (!sqfree[static_cast<std::size_t>(m)] || gcd(m, d_pos) > 2) continue;
            const bool t = truth[static_cast<std::size_t>(m)];
            for (auto& r : results) {
                ++r.tested;
                if (genus_represents_local(m, f, r.reading) != t) ++r.mismatches;
            }
        }
    }
    return results;
}

namespace {

struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

std::vector<i64> prime_divisors(i64 n) {
    std::vector<i64> out;
    for (const auto& pp : factorize(n)) out.push_back(pp.prime);
    return out;
}

struct C0Parts {
    double raw_log = 0.0;
    double accelerated_log = 0.0;
};

C0Parts c0_logs(i64 d_pos, i64 a, i64 truncation, const std::vector<i64>& primes, double log_l) {
    const AppendixDiscriminant ad = AppendixDiscriminant::make(d_pos);
    const i64 dfund = ad.fundamental;
    std::vector<i64> bad = prime_divisors(d_pos);
    for (i64 p : prime_divisors(a)) bad.push_back(p);
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    const auto divides_da = [&](i64 p) { return std::binary_search(bad.begin(), bad.end(), p); };

    Kahan shared;  // terms common to both evaluations
    shared.add(-std::numbers::egamma / 2.0);
    Kahan raw, acc;
    for (i64 p : bad) {
        const auto pd = static_cast<double>(p);
        shared.add(-0.5 * std::log1p(-1.0 / pd));
        acc.add(0.5 * std::log1p(-static_cast<double>(kronecker(dfund, p)) / pd));
    }
    for (i64 p : primes) {
        if (p > truncation) break;
        const auto pd = static_cast<double>(p);
        if (d_pos % p != 0 && kronecker(ad.kernel, p) == -1 && a % p != 0 && p > 2) {
            const double q = pd - 1.0;
            shared.add(std::log1p(-1.0 / (q * q)));
        }
        if (divides_da(p)) continue;
        const auto chi = static_cast<double>(kronecker(dfund, p));
        const double lp = std::log1p(-1.0 / pd);
        raw.add(-0.5 * chi * lp);
        acc.add(0.5 * std::log1p(-chi / pd) - 0.5 * chi * lp);
    }
    C0Parts out;
    out.raw_log = shared.sum + raw.sum;
    out.accelerated_log = shared.sum + acc.sum + 0.5 * log_l;
    return out;
}

}  // namespace

C0Result C0_constant(i64 d_pos, i64 a, i64 truncation) {
    if (d_pos <= 0) throw std::invalid_argument("C0_constant: D must be positive");
    if (a == 0) throw std::invalid_argument("C0_constant: shift must be non-zero");
    if (truncation < 4) throw std::invalid_argument("C0_constant: truncation too small");
    a = a < 0 ? -a : a;
    const AppendixDiscriminant ad = AppendixDiscriminant::make(d_pos);
    const i64 dfund = ad.fundamental;
    const ClassGroup cg(dfund);
    const double w = dfund == -3 ? 6.0 : (dfund == -4 ? 4.0 : 2.0);
    const double l_value =
        2.0 * std::numbers::pi * static_cast<double>(cg.h()) / (w * std::sqrt(static_cast<double>(-dfund)));
    const auto primes = primes_up_to(truncation);
    const C0Parts full = c0_logs(d_pos, a, truncation, primes, std::log(l_value));
    const C0Parts half = c0_logs(d_pos, a, truncation / 2, primes, std::log(l_value));
    C0Result r;
    r.d_pos = d_pos;
    r.a = a;
    r.truncation = truncation;
    r.l_value = l_value;
    r.value = std::exp(full.accelerated_log);
    r.value_half = std::exp(half.accelerated_log);
    r.raw = std::exp(full.raw_log);
    r.raw_half = std::exp(half.raw_log);
    return r;
}

double theta_objective(double s) {
    if (s <= 1.0) return 0.0;
    const double integral = 2.0 * std::log(std::sqrt(s) + std::sqrt(s - 1.0));
    const double penalty = 8.0 * s * s * std::sqrt(2.0 * (s - 1.0) / s) * std::log(2.0 * s - 1.0);
    return integral - penalty;
}

ThetaResult theta_constant() {
    constexpr double lo = 1.0, hi = 4.0 / 3.0;
    ThetaResult r;
    // Grid search with successive refinement around the best node.
    double a = lo, b = hi;
    double best_s = lo, best_f = theta_objective(lo);
    for (int round = 0; round < 60 && (b - a) > 1e-12; ++round) {
        constexpr int nodes = 1000;
        const double step = (b - a) / nodes;
        for (int i = 0; i <= nodes; ++i) {
            const double s = a + step * i;
            const double v = theta_objective(s);
            if (v > best_f) {
                best_f = v;
                best_s = s;
            }
        }
        a = std::max(lo, best_s - 2.0 * step);
        b = std::min(hi, best_s + 2.0 * step);
    }
    r.theta = best_f;
    r.argmax = best_s;

    // Golden-section search on the unimodal objective.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x0 = lo, x3 = hi;
    double x1 = x3 - invphi * (x3 - x0), x2 = x0 + invphi * (x3 - x0);
    double f1 = theta_objective(x1), f2 = theta_objective(x2);
    while (x3 - x0 > 1e-12) {
        if (f1 > f2) {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - invphi * (x3 - x0);
            f1 = theta_objective(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + invphi * (x3 - x0);
            f2 = theta_objective(x2);
        }
    }
    r.argmax_golden = 0.5 * (x0 + x3);
    r.theta_golden = theta_objective(r.argmax_golden);
    return r;
}

std::vector<HalfDimRow> half_dim_check(i64 d_pos, i64 e, const std::vector<double>& zs) {
    if (e < 1) throw std::invalid_argument("half_dim_check: E must be positive");
    const AppendixDiscriminant ad = AppendixDiscriminant::make(d_pos);
    double zmax = 0.0;
    for (double z : zs) {
        if (z < 1.0) throw std::invalid_argument("half_dim_check: z must be at least 1");
        zmax = std::max(zmax, z);
    }
    const auto primes = primes_up_to(static_cast<i64>(zmax));
    std::vector<HalfDimRow> out;
    for (double z : zs) {
        Kahan k;
        for (i64 p : primes) {
            if (static_cast<double>(p) > z) break;
            if (d_pos % p == 0 || kronecker(ad.kernel, p) != -1) continue;
            const double phi = e % p == 0 ? static_cast<double>(p) : static_cast<double>(p - 1);
            k.add(std::log(static_cast<double>(p)) / phi);
        }
        out.push_back({z, k.sum, std::abs(k.sum - 0.5 * std::log(z))});
    }
    return out;
}

OmegaResult omega_D(const QuadForm& f, i64 a, double x) {
    check_even_middle(f);
    OmegaResult r;
    const double cutoff = std::pow(std::log(x), 15.0);
    r.truncation_bound = 1.0 / std::pow(std::log(x), 6.0);
    for (int eps2 = 0; eps2 <= 1; ++eps2) {
        const i64 delta = i64{1} << eps2;
        const LocalConditions lc = build_L_set(f, eps2);
        const i64 modulus = lc.Q * delta;
        r.l_sizes.push_back(lc.L.size());
        r.moduli.push_back(modulus);
        const double weight = 1.0 / static_cast<double>(euler_phi(modulus));
        for (i64 l : lc.L) {
            if (gcd(delta * l + a, modulus) != 1) continue;
            r.omega += weight;
            if (static_cast<double>(modulus) <= cutoff) r.omega_truncated += weight;
        }
    }
    return r;
}

nlohmann::json constants_json(i64 d, i64 a, i64 truncation) {
    const Discriminant disc = Discriminant::make(d);
    const i64 d_pos = -disc.value;
    nlohmann::json j;
    j["schema"] = 1;
    j["D"] = d;
    j["a"] = a;
    j["truncation"] = truncation;
    const C0Result c0 = C0_constant(d_pos, a, truncation);
    j["C0"] = c0.value;
    j["C0_half_truncation"] = c0.value_half;
    j["C0_delta"] = c0.delta();
    j["C0_raw"] = c0.raw;
    j["C0_raw_delta"] = c0.raw_delta();
    j["L1"] = c0.l_value;
    const ThetaResult th = theta_constant();
    j["theta"] = th.theta;
    j["theta_argmax"] = th.argmax;
    j["theta_golden"] = th.theta_golden;
    j["theta_argmax_golden"] = th.argmax_golden;
    i64 e = 1;
    if (mod(d, 4) == 0) {
        const QuadForm principal{1, 0, d_pos / 4};
        const OmegaResult om = omega_D(principal, a);
        j["omega_D"] = om.omega;
        j["omega_D_truncated"] = om.omega_truncated;
        j["omega_c"] = 1;
        e = build_L_set(principal, 0).Q;
    } else {
        j["omega_D"] = nullptr;
    }
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : half_dim_check(d_pos, e, {1e2, 1e3, 1e4, 1e5, 1e6}))
        table.push_back({{"z", row.z}, {"sum", row.sum}, {"residual", row.residual}});
    j["residual_table"] = table;
    j["residual_modulus"] = e;
    return j;
}

}  // namespace genuslab
