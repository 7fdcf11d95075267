#include "genuslab/census.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "genuslab/genus.hpp"

namespace genuslab {

std::size_t memory_budget_bytes() {
    std::size_t mb = 4096;
    if (const char* env = std::getenv("GENUSLAB_MEM_MB")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) mb = static_cast<std::size_t>(v);
    }
    return mb * 1024 * 1024;
}

namespace {

void require_budget(double bytes, const char* what) {
    if (bytes > static_cast<double>(memory_budget_bytes())) {
        std::ostringstream os;
        os << what << " needs about " << static_cast<long long>(bytes / (1024 * 1024))
           << " MB, above the GENUSLAB_MEM_MB budget; rerun with --segmented or raise the budget";
        throw ResourceError(os.str());
    }
}

struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// Runs f(lo, hi) over the fixed windows [first + k B, first + (k+1) B) covering
// [first, last) and returns the results in window order.  Window boundaries do
// not depend on the thread count.
template <class R, class F>
std::vector<R> run_blocks(i64 first, i64 last, i64 block, int threads, F&& f) {
    if (last <= first) return {};
    const std::size_t n = static_cast<std::size_t>((last - first + block - 1) / block);
    std::vector<R> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n) return;
            const i64 lo = first + static_cast<i64>(k) * block;
            const i64 hi = std::min(last, lo + block);
            try {
                out[k] = f(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < t; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

void check_run(const RunOptions& opt, i64 x, double bytes_per_integer) {
    if (opt.threads < 1) throw std::invalid_argument("thread count must be positive");
    if (!opt.segmented && x > unsegmented_limit)
        throw ResourceError("X above 2e8 requires segmented mode (--segmented)");
    const double window = static_cast<double>(std::min<i64>(opt.window(), std::max<i64>(x, 1)));
    require_budget(window * bytes_per_integer * opt.threads, "census windows");
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// One bitmap per inverse pair {C, C^-1}: both forms represent the same integers.
struct PairForms {
    std::vector<ClassIndex> rep_of;        // class -> representative class of its pair
    std::vector<ClassIndex> representatives;
};

PairForms pair_forms(const ClassGroup& g) {
    PairForms p;
    p.rep_of.resize(g.h());
    for (ClassIndex c = 0; c < g.h(); ++c) {
        const ClassIndex r = std::min(c, g.inverse(c));
        p.rep_of[c] = r;
        if (r == c) p.representatives.push_back(c);
    }
    return p;
}

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_observed(const CensusRow& r) {
    if (r.integral) return std::to_string(static_cast<long long>(std::llround(r.observed)));
    return fmt12(r.observed);
}

const std::vector<double>& delta_grid() {
    static const std::vector<double> grid{0.0, 0.01, 0.02, 0.05, 0.1};
    return grid;
}

std::string delta_key(const std::string& prefix, double delta) {
    return prefix + ":delta=" + fmt12(delta);
}

}  // namespace

// ---------------------------------------------------------------------------

SieveTables::SieveTables(i64 limit) : limit_(limit) {
    if (limit < 2) throw std::invalid_argument("SieveTables: limit must be at least 2");
    require_budget(static_cast<double>(limit + 1) * 5.0 + static_cast<double>(limit) / std::log(static_cast<double>(limit)) * 8.0 * 1.3,
                   "sieve tables");
    const auto n = static_cast<std::size_t>(limit) + 1;
    spf_.assign(n, 0);
    squarefree_.assign(n, 1);
    for (std::size_t i = 2; i < n; ++i) {
        if (spf_[i] == 0) {
            primes_.push_back(static_cast<i64>(i));
            for (std::size_t j = i; j < n; j += i)
                if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
            const std::size_t sq = i * i;
            for (std::size_t j = sq; j < n && sq < n; j += sq) squarefree_[j] = 0;
        }
    }
    spf_[1] = 1;
}

std::size_t SieveTables::prime_count(i64 x) const {
    if (x > limit_) throw std::out_of_range("SieveTables::prime_count: x above the table limit");
    return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

std::vector<i64> SieveTables::prime_factors(i64 n) const {
    std::vector<i64> out;
    while (n > 1) {
        const i64 p = spf(n);
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<bool> prime_window(i64 lo, i64 hi) {
    lo = std::max<i64>(lo, 0);
    if (hi <= lo) return {};
    std::vector<bool> out(static_cast<std::size_t>(hi - lo), true);
    for (i64 n = lo; n < std::min<i64>(hi, 2); ++n) out[static_cast<std::size_t>(n - lo)] = false;
    for (i64 p : primes_up_to(isqrt(hi - 1))) {
        i64 start = std::max(p * p, (lo + p - 1) / p * p);
        for (i64 m = start; m < hi; m += p) out[static_cast<std::size_t>(m - lo)] = false;
    }
    return out;
}

std::vector<bool> squarefree_window(i64 lo, i64 hi) {
    lo = std::max<i64>(lo, 0);
    if (hi <= lo) return {};
    std::vector<bool> out(static_cast<std::size_t>(hi - lo), true);
    if (lo == 0) out[0] = false;
    for (i64 p : primes_up_to(isqrt(hi - 1))) {
        const i64 q = p * p;
        for (i64 m = (lo + q - 1) / q * q; m < hi; m += q) out[static_cast<std::size_t>(m - lo)] = false;
    }
    return out;
}

std::vector<NumberSummary> summarize_range(i64 lo, i64 hi, i64 d) {
    if (lo < 1) throw std::invalid_argument("summarize_range: lo must be positive");
    if (hi <= lo) return {};
    const auto len = static_cast<std::size_t>(hi - lo);
    std::vector<NumberSummary> out(len);
    std::vector<i64> rem(len);
    for (std::size_t i = 0; i < len; ++i) rem[i] = lo + static_cast<i64>(i);
    auto classify = [&](NumberSummary& s, int chi) {
        ++s.omega;
        if (chi > 0) ++s.split;
        else if (chi < 0) ++s.inert;
        else ++s.ramified;
    };
    for (i64 p : primes_up_to(isqrt(hi - 1))) {
        const int chi = kronecker(d, p);
        for (i64 m = (lo + p - 1) / p * p; m < hi; m += p) {
            const auto i = static_cast<std::size_t>(m - lo);
            int e = 0;
            while (rem[i] % p == 0) {
                rem[i] /= p;
                ++e;
            }
            if (e > 1) out[i].squarefree = false;
            classify(out[i], chi);
        }
    }
    for (std::size_t i = 0; i < len; ++i)
        if (rem[i] > 1) classify(out[i], kronecker(d, rem[i]));
    return out;
}

std::vector<bool> representation_window(const QuadForm& f, i64 lo, i64 hi, bool primitive_only) {
    lo = std::max<i64>(lo, 1);
    if (hi <= lo) return {};
    const i64 ad = -f.discriminant();
    if (f.a <= 0 || ad <= 0) throw std::invalid_argument("representation_window: form is not positive definite");
    std::vector<bool> out(static_cast<std::size_t>(hi - lo), false);
    const i64 top = hi - 1;
    const i64 ymax = isqrt(4 * f.a * top / ad);
    for (i64 y = 0; y <= ymax; ++y) {
        const i64 disc = 4 * f.a * top - ad * y * y;
        if (disc < 0) continue;
        const i64 root = isqrt(disc);
        i64 xlo = (-f.b * y - root) / (2 * f.a) - 1;
        i64 xhi = (-f.b * y + root) / (2 * f.a) + 1;
        if (y == 0) xlo = std::max<i64>(xlo, 1);
        // Interior run where f(x, y) < lo; f is convex in x so checking its endpoints suffices.
        i64 slo = 1, shi = 0;
        const i64 idisc = 4 * f.a * (lo - 1) - ad * y * y;
        if (idisc >= 0) {
            const i64 iroot = isqrt(idisc);
            slo = (-f.b * y - iroot) / (2 * f.a) + 1;
            shi = (-f.b * y + iroot) / (2 * f.a) - 1;
            if (y == 0) slo = std::max<i64>(slo, 1);
            while (slo <= shi && f.eval(slo, y) >= lo) ++slo;
            while (shi >= slo && f.eval(shi, y) >= lo) --shi;
        }
        auto visit = [&](i64 x) {
            const i64 v = f.eval(x, y);
            if (v < lo || v > top) return;
            if (primitive_only && gcd(x, y) != 1) return;
            out[static_cast<std::size_t>(v - lo)] = true;
        };
        if (slo > shi) {
            for (i64 x = xlo; x <= xhi; ++x) visit(x);
        } else {
            for (i64 x = xlo; x < slo; ++x) visit(x);
            for (i64 x = shi + 1; x <= xhi; ++x) visit(x);
        }
    }
    return out;
}

RepresentationBitmaps::RepresentationBitmaps(const ClassGroup& g, i64 lim, bool primitive)
    : limit(lim), primitive_only(primitive) {
    require_budget(static_cast<double>(lim) / 8.0 * static_cast<double>(g.h()), "representation bitmaps");
    by_class.resize(g.h());
    for (ClassIndex c = 0; c < g.h(); ++c) {
        const ClassIndex inv = g.inverse(c);
        if (inv < c) by_class[c] = by_class[inv];
        else by_class[c] = representation_bitmap(g.form(c), lim, primitive);
    }
}

std::vector<ClassIndex> RepresentationBitmaps::representing(i64 n) const {
    std::vector<ClassIndex> out;
    for (ClassIndex c = 0; c < by_class.size(); ++c)
        if (by_class[c].at(static_cast<std::size_t>(n))) out.push_back(c);
    return out;
}

bool RepresentationBitmaps::any(i64 n) const {
    for (const auto& bm : by_class)
        if (bm.at(static_cast<std::size_t>(n))) return true;
    return false;
}

i64 u_f(const QuadForm& f, i64 x) {
    if (x < 1) return 0;
    const auto counts = run_blocks<i64>(1, x + 1, i64{1} << 20, 1, [&](i64 lo, i64 hi) {
        const auto w = representation_window(f, lo, hi);
        return static_cast<i64>(std::count(w.begin(), w.end(), true));
    });
    i64 total = 0;
    for (i64 c : counts) total += c;
    return total;
}

// ---------------------------------------------------------------------------

namespace {

// Adaptive Simpson for e^u / u on [log 2, log x].
double simpson_step(const std::function<double(double)>& g, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_step(g, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_step(g, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double li(double x) {
    if (!(x > 1.0)) throw std::domain_error("li: x must exceed 1");
    if (x == 2.0) return 0.0;
    const std::function<double(double)> g = [](double u) { return std::exp(u) / u; };
    const double a = std::log(2.0), b = std::log(x);
    const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    // Absolute tolerance scaled to the size of the integral, about x / log x.
    const double scale = std::max(1.0, x / std::max(b, 1.0));
    return simpson_step(g, a, b, fa, fm, fb, whole, 1e-12 * scale, 60);
}

// ---------------------------------------------------------------------------

const CensusRow& CensusReport::row(const std::string& key) const {
    for (const auto& r : rows)
        if (r.key == key) return r;
    throw std::out_of_range("CensusReport: no row " + key);
}

std::string CensusReport::to_csv(bool header) const {
    std::ostringstream os;
    if (header) os << "experiment,D,X,a,seed,key,observed,predicted,ratio,formula,runtime_ms\n";
    for (const auto& r : rows) {
        os << experiment << ',' << D << ',' << X << ',' << (a ? std::to_string(*a) : std::string()) << ',' << seed
           << ',' << r.key << ',' << fmt_observed(r) << ',' << fmt12(r.predicted) << ',' << fmt12(r.ratio()) << ','
           << r.formula << ',' << fmt12(runtime_ms) << '\n';
    }
    return os.str();
}

nlohmann::json CensusReport::to_json() const {
    nlohmann::json j;
    j["schema"] = 1;
    j["experiment"] = experiment;
    j["D"] = D;
    j["X"] = X;
    j["a"] = a ? nlohmann::json(*a) : nlohmann::json(nullptr);
    j["seed"] = seed;
    j["runtime_ms"] = runtime_ms;
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o;
        o["key"] = r.key;
        if (r.integral) o["observed"] = static_cast<long long>(std::llround(r.observed));
        else o["observed"] = r.observed;
        o["predicted"] = r.predicted;
        o["ratio"] = r.ratio();
        o["formula"] = r.formula;
        rs.push_back(o);
    }
    j["rows"] = rs;
    return j;
}

// ---------------------------------------------------------------------------

namespace {

struct ExceptionalCounts {
    i64 window = 0;
    i64 cumulative = 0;
};

// Bitmask over pair representatives for every n in [lo, hi).
std::vector<std::uint64_t> representation_masks(const ClassGroup& g, const PairForms& pf, i64 lo, i64 hi) {
    std::vector<std::uint64_t> masks(static_cast<std::size_t>(std::max<i64>(hi - lo, 0)), 0);
    for (std::size_t k = 0; k < pf.representatives.size(); ++k) {
        const auto w = representation_window(g.form(pf.representatives[k]), lo, hi);
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i]) masks[i] |= std::uint64_t{1} << k;
    }
    return masks;
}

// Per genus: mask of pair representatives meeting it.
struct GenusMasks {
    std::vector<std::uint64_t> by_genus;
    bool trivial = true;  // every genus is one class
};

GenusMasks genus_masks(const ClassGroup& g, const PairForms& pf) {
    const auto gp = genus_partition(g);
    GenusMasks gm;
    for (const auto& members : gp.genera) {
        std::uint64_t m = 0;
        for (ClassIndex c : members) {
            const auto it = std::find(pf.representatives.begin(), pf.representatives.end(), pf.rep_of[c]);
            m |= std::uint64_t{1} << (it - pf.representatives.begin());
        }
        gm.by_genus.push_back(m);
        if (members.size() > 1) gm.trivial = false;
    }
    return gm;
}

bool exceptional_mask(std::uint64_t rep, const GenusMasks& gm) {
    for (std::uint64_t m : gm.by_genus) {
        const std::uint64_t hit = rep & m;
        if (hit != 0 && hit != m) return true;
    }
    return false;
}

void require_small_pairs(const PairForms& pf) {
    if (pf.representatives.size() > 64)
        throw std::invalid_argument("census: at most 64 inverse pairs of classes are supported");
}

}  // namespace

CensusReport exceptional_count(i64 d, i64 x, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (x < 2) throw std::invalid_argument("exceptional_count: X must be at least 2");
    const ClassGroup g(d);
    const PairForms pf = pair_forms(g);
    require_small_pairs(pf);
    check_run(opt, x, 10.0 + static_cast<double>(pf.representatives.size()) / 8.0);
    const GenusMasks gm = genus_masks(g, pf);
    const i64 half = x / 2;
    const auto parts = run_blocks<ExceptionalCounts>(1, x + 1, opt.window(), opt.threads, [&](i64 lo, i64 hi) {
        ExceptionalCounts c;
        if (gm.trivial) return c;
        const auto sf = squarefree_window(lo, hi);
        const auto masks = representation_masks(g, pf, lo, hi);
        for (i64 n = lo; n < hi; ++n) {
            const auto i = static_cast<std::size_t>(n - lo);
            if (!sf[i] || !exceptional_mask(masks[i], gm)) continue;
            ++c.cumulative;
            if (n > half) ++c.window;
        }
        return c;
    });
    ExceptionalCounts total;
    for (const auto& p : parts) {
        total.window += p.window;
        total.cumulative += p.cumulative;
    }
    CensusReport rep;
    rep.experiment = "exceptional";
    rep.D = d;
    rep.X = x;
    const double lx = std::log(static_cast<double>(x));
    for (double delta : delta_grid()) {
        const double shape = static_cast<double>(x) / std::pow(lx, 0.5 + delta);
        rep.rows.push_back({delta_key("window", delta), static_cast<double>(total.window), true, shape,
                            "X/(log X)^(1/2+delta)"});
    }
    for (double delta : delta_grid()) {
        const double shape = static_cast<double>(x) / std::pow(lx, 0.5 + delta);
        rep.rows.push_back({delta_key("cumulative", delta), static_cast<double>(total.cumulative), true, shape,
                            "X/(log X)^(1/2+delta)"});
    }
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

CensusReport shifted_prime_exceptional_count(i64 d, i64 x, i64 a, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (x < 2) throw std::invalid_argument("shifted_prime_exceptional_count: X must be at least 2");
    const ClassGroup g(d);
    const PairForms pf = pair_forms(g);
    require_small_pairs(pf);
    check_run(opt, x, 12.0 + static_cast<double>(pf.representatives.size()) / 8.0);
    const GenusMasks gm = genus_masks(g, pf);
    const i64 half = x / 2;
    const auto parts = run_blocks<ExceptionalCounts>(1, x + 1, opt.window(), opt.threads, [&](i64 lo, i64 hi) {
        ExceptionalCounts c;
        if (gm.trivial) return c;
        const auto sf = squarefree_window(lo, hi);
        const auto pr = prime_window(lo - a, hi - a);
        const i64 plo = std::max<i64>(lo - a, 0);
        const auto masks = representation_masks(g, pf, lo, hi);
        for (i64 n = lo; n < hi; ++n) {
            const i64 q = n - a;
            if (q < 2) continue;
            const auto i = static_cast<std::size_t>(n - lo);
            if (!pr[static_cast<std::size_t>(q - plo)] || !sf[i] || !exceptional_mask(masks[i], gm)) continue;
            ++c.cumulative;
            if (n > half) ++c.window;
        }
        return c;
    });
    ExceptionalCounts total;
    for (const auto& p : parts) {
        total.window += p.window;
        total.cumulative += p.cumulative;
    }
    CensusReport rep;
    rep.experiment = "shifted";
    rep.D = d;
    rep.X = x;
    rep.a = a;
    const double lx = std::log(static_cast<double>(x));
    for (const char* which : {"window", "cumulative"}) {
        const i64 obs = std::string(which) == "window" ? total.window : total.cumulative;
        for (double delta : delta_grid()) {
            const double shape = static_cast<double>(x) / std::pow(lx, 1.5 + delta);
            rep.rows.push_back({delta_key(which, delta), static_cast<double>(obs), true, shape,
                                "X/(log X)^(3/2+delta)"});
        }
    }
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

CensusReport corollary4_count(const QuadForm& f, i64 x, i64 a, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (x < 2) throw std::invalid_argument("corollary4_count: X must be at least 2");
    if (f.discriminant() >= 0 || f.a <= 0) throw std::invalid_argument("corollary4_count: form is not positive definite");
    check_run(opt, x, 4.0);
    struct Counts {
        i64 any = 0, primitive = 0;
    };
    const auto parts = run_blocks<Counts>(1, x + 1, opt.window(), opt.threads, [&](i64 lo, i64 hi) {
        Counts c;
        const auto any = representation_window(f, lo, hi);
        const auto prim = representation_window(f, lo, hi, true);
        const auto pr = prime_window(lo - a, hi - a);
        const i64 plo = std::max<i64>(lo - a, 0);
        for (i64 n = lo; n < hi; ++n) {
            const i64 q = n - a;
            if (q < 2 || !pr[static_cast<std::size_t>(q - plo)]) continue;
            const auto i = static_cast<std::size_t>(n - lo);
            if (any[i]) ++c.any;
            if (prim[i]) ++c.primitive;
        }
        return c;
    });
    Counts total;
    for (const auto& p : parts) {
        total.any += p.any;
        total.primitive += p.primitive;
    }
    CensusReport rep;
    rep.experiment = "corollary4";
    rep.D = f.discriminant();
    rep.X = x;
    rep.a = a;
    const double shape = static_cast<double>(x) / std::pow(std::log(static_cast<double>(x)), 1.5);
    rep.rows.push_back({"any", static_cast<double>(total.any), true, shape, "X/(log X)^(3/2)"});
    rep.rows.push_back({"primitive", static_cast<double>(total.primitive), true, shape, "X/(log X)^(3/2)"});
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

// ---------------------------------------------------------------------------

PrimeClassHistogram prime_class_histogram(i64 d, i64 xi, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (xi < 2) throw std::invalid_argument("prime_class_histogram: xi must be at least 2");
    check_run(opt, xi, 2.0);
    const ClassGroup g(d);
    const std::size_t h = g.h();
    struct Part {
        std::vector<i64> observed, pairs;
        i64 represented = 0;
    };
    const auto parts = run_blocks<Part>(2, xi + 1, opt.window(), opt.threads, [&](i64 lo, i64 hi) {
        Part p;
        p.observed.assign(h, 0);
        p.pairs.assign(h, 0);
        const auto pr = prime_window(lo, hi);
        for (i64 q = lo; q < hi; ++q) {
            if (!pr[static_cast<std::size_t>(q - lo)] || kronecker(d, q) == -1) continue;
            PrimeClasses pc;
            try {
                pc = prime_to_class(q, g);
            } catch (const std::domain_error&) {
                continue;
            }
            ++p.represented;
            ++p.observed[pc.cls];
            if (pc.inv != pc.cls) ++p.observed[pc.inv];
            ++p.pairs[std::min(pc.cls, pc.inv)];
        }
        return p;
    });
    PrimeClassHistogram hist;
    hist.D = d;
    hist.xi = xi;
    hist.h = h;
    hist.observed.assign(h, 0);
    hist.pair_counts.assign(h, 0);
    for (const auto& p : parts) {
        for (std::size_t c = 0; c < h; ++c) {
            hist.observed[c] += p.observed[c];
            hist.pair_counts[c] += p.pairs[c];
        }
        hist.represented_primes += p.represented;
    }
    const double l = li(static_cast<double>(xi));
    for (ClassIndex c = 0; c < h; ++c) {
        const int e = g.inverse(c) == c ? 2 : 1;
        hist.eps.push_back(e);
        hist.predicted.push_back(l / (e * static_cast<double>(h)));
    }
    const auto principal = representation_bitmap(g.form(0), std::min<i64>(xi, 100));
    for (i64 q = 2; q < static_cast<i64>(principal.size()); ++q)
        if (principal[static_cast<std::size_t>(q)] && is_prime(q)) hist.sample.push_back(q);
    hist.runtime_ms = elapsed_ms(start);
    return hist;
}

CensusReport to_report(const PrimeClassHistogram& hist) {
    CensusReport rep;
    rep.experiment = "primes-by-class";
    rep.D = hist.D;
    rep.X = hist.xi;
    rep.runtime_ms = hist.runtime_ms;
    const ClassGroup g(hist.D);
    for (ClassIndex c = 0; c < hist.h; ++c) {
        const auto& f = g.form(c);
        std::string key = "C=(" + std::to_string(f.a) + ";" + std::to_string(f.b) + ";" + std::to_string(f.c) + ")";
        rep.rows.push_back({key, static_cast<double>(hist.observed[c]), true, hist.predicted[c], "Li(xi)/(eps(C) h)"});
    }
    return rep;
}

CensusReport split_reciprocal_sum(i64 d, i64 x, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (x < 3) throw std::invalid_argument("split_reciprocal_sum: X must be at least 3");
    check_run(opt, x, 2.0);
    const auto parts = run_blocks<Kahan>(2, x, opt.window(), opt.threads, [&](i64 lo, i64 hi) {
        Kahan k;
        const auto pr = prime_window(lo, hi);
        for (i64 q = lo; q < hi; ++q)
            if (pr[static_cast<std::size_t>(q - lo)] && kronecker(d, q) != -1) k.add(1.0 / static_cast<double>(q));
        return k;
    });
    Kahan total;
    for (const auto& p : parts) total.add(p.sum);
    CensusReport rep;
    rep.experiment = "split-reciprocal";
    rep.D = d;
    rep.X = x;
    const double ll = std::log(std::log(static_cast<double>(x)));
    rep.rows.push_back({"sum", total.sum, false, 0.5 * ll, "(1/2) log log X"});
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

CensusReport k_factor_histogram(i64 d, i64 x, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (x < 3) throw std::invalid_argument("k_factor_histogram: X must be at least 3");
    check_run(opt, x, 14.0);
    constexpr int kmax = 16;
    using Hist = std::array<i64, kmax + 1>;
    const auto parts = run_blocks<Hist>(1, x + 1, opt.window(), opt.threads, [&](i64 lo, i64 hi) {
        Hist hst{};
        const auto s = summarize_range(lo, hi, d);
        for (const auto& e : s)
            if (e.squarefree && e.omega >= 1 && e.split == e.omega) ++hst[std::min<int>(e.omega, kmax)];
        return hst;
    });
    Hist total{};
    for (const auto& p : parts)
        for (int k = 0; k <= kmax; ++k) total[k] += p[k];
    CensusReport rep;
    rep.experiment = "kfactor";
    rep.D = d;
    rep.X = x;
    const double xd = static_cast<double>(x), lx = std::log(xd), ll = std::log(lx);
    int top = 1;
    for (int k = 1; k <= kmax; ++k)
        if (total[k] > 0) top = k;
    i64 sum = 0;
    for (int k = 1; k <= top; ++k) {
        const double pred = xd / lx / std::pow(2.0, k) * std::pow(ll, k - 1) / std::tgamma(static_cast<double>(k));
        rep.rows.push_back({"k=" + std::to_string(k), static_cast<double>(total[k]), true, pred,
                            "(X/log X) 2^-k (log log X)^(k-1)/(k-1)!"});
        sum += total[k];
    }
    rep.rows.push_back({"sum", static_cast<double>(sum), true, xd / std::sqrt(lx), "X/sqrt(log X)"});
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

CensusReport lemma3_count(i64 d, i64 x, int r, double eps, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (r < 0 || r > 12) throw std::invalid_argument("lemma3_count: r must lie in [0, 12]");
    if (x < 3) throw std::invalid_argument("lemma3_count: X must be at least 3");
    check_run(opt, x, 14.0);
    using Hist = std::array<i64, 13>;
    const auto parts = run_blocks<Hist>(1, x, opt.window(), opt.threads, [&](i64 lo, i64 hi) {
        Hist hst{};
        const auto s = summarize_range(lo, hi, d);
        for (const auto& e : s)
            if (e.squarefree && e.inert == 0 && e.omega <= 12) ++hst[e.omega];
        return hst;
    });
    Hist total{};
    for (const auto& p : parts)
        for (int k = 0; k <= 12; ++k) total[k] += p[k];
    CensusReport rep;
    rep.experiment = "lemma3";
    rep.D = d;
    rep.X = x;
    const double xd = static_cast<double>(x), lx = std::log(xd), ll = std::log(lx);
    i64 cum = 0;
    for (int rr = 0; rr <= r; ++rr) {
        cum += total[rr];
        double pred = 0.0;
        if (rr >= 1) {
            const double base = rr == 1 ? 1.0 : std::pow(std::exp(1.0) * (0.5 + eps) * ll / (rr - 1), rr - 1);
            pred = rr * xd / lx * base;
        }
        rep.rows.push_back({"r=" + std::to_string(rr), static_cast<double>(cum), true, pred,
                            "(r X/log X)(e(1/2+eps) log log X/(r-1))^(r-1)"});
    }
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

// ---------------------------------------------------------------------------

ResidueFamily random_residue_family(i64 y, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ResidueFamily fam;
    for (i64 l : primes_up_to(y - 1)) {
        const auto size = static_cast<int>(rng() % 3);
        std::vector<i64> res;
        while (static_cast<int>(res.size()) < std::min<i64>(size, l)) {
            const auto r = static_cast<i64>(rng() % static_cast<std::uint64_t>(l));
            if (std::find(res.begin(), res.end(), r) == res.end()) res.push_back(r);
        }
        std::sort(res.begin(), res.end());
        fam.classes.emplace_back(l, std::move(res));
    }
    return fam;
}

ResidueFamily primality_family(i64 z) {
    ResidueFamily fam;
    for (i64 l : primes_up_to(z)) fam.classes.push_back({l, {0}});
    return fam;
}

ResidueFamily two_residue_family(i64 z, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ResidueFamily fam;
    for (i64 l : primes_up_to(z - 1)) {
        if (l == 2) continue;
        const auto xi = 1 + static_cast<i64>(rng() % static_cast<std::uint64_t>(l - 1));
        fam.classes.push_back({l, {0, xi}});
    }
    return fam;
}

Lemma4Result lemma4_count(i64 y, const ResidueFamily& family) {
    if (y < 3) throw std::invalid_argument("lemma4_count: Y must be at least 3");
    std::vector<bool> removed(static_cast<std::size_t>(y), false);
    double main = static_cast<double>(y);
    for (const auto& [l, res] : family.classes) {
        if (res.size() > 2) throw std::invalid_argument("lemma4_count: at most two residues per prime");
        for (i64 r : res) {
            const i64 r0 = mod(r, l);
            for (i64 n = r0 == 0 ? l : r0; n < y; n += l) removed[static_cast<std::size_t>(n)] = true;
        }
        main *= 1.0 - static_cast<double>(res.size()) / static_cast<double>(l);
    }
    Lemma4Result out;
    for (i64 n = 1; n < y; ++n)
        if (!removed[static_cast<std::size_t>(n)]) ++out.observed;
    const double ly = std::log(static_cast<double>(y));
    out.main_term = main;
    out.bound = std::pow(std::log(ly), 3) * main + static_cast<double>(y) / std::pow(ly, 10);
    return out;
}

Lemma5Result lemma5_count(i64 d, i64 y, ClassIndex c, const ResidueFamily& family) {
    if (y < 3) throw std::invalid_argument("lemma5_count: Y must be at least 3");
    const ClassGroup g(d);
    if (c >= g.h()) throw std::out_of_range("lemma5_count: class index out of range");
    Lemma5Result out;
    const auto pr = prime_window(0, y);
    for (i64 p = 2; p < y; ++p) {
        if (!pr[static_cast<std::size_t>(p)] || kronecker(d, p) == -1) continue;
        PrimeClasses pc;
        try {
            pc = prime_to_class(p, g);
        } catch (const std::domain_error&) {
            continue;
        }
        if (pc.cls != c && pc.inv != c) continue;
        ++out.class_primes;
        bool ok = true;
        for (const auto& [l, res] : family.classes) {
            const i64 r = p % l;
            if (std::find(res.begin(), res.end(), r) != res.end()) {
                ok = false;
                break;
            }
        }
        if (ok) ++out.observed;
    }
    const double ly = std::log(static_cast<double>(y));
    out.predicted = static_cast<double>(y) / (static_cast<double>(g.h()) * ly * ly);
    return out;
}

// ---------------------------------------------------------------------------

double l_value_at_one(i64 d) {
    const Discriminant disc = Discriminant::make(d);
    if (!disc.is_fundamental) throw std::invalid_argument("l_value_at_one: discriminant is not fundamental");
    const double h = static_cast<double>(reduced_forms(d).size());
    const double w = d == -3 ? 6.0 : (d == -4 ? 4.0 : 2.0);
    return 2.0 * std::numbers::pi * h / (w * std::sqrt(static_cast<double>(-d)));
}

double IdealCountResult::ratio_error() const {
    return std::abs(static_cast<double>(observed) / static_cast<double>(x) - c1);
}

IdealCountResult ideal_count(i64 d, i64 x) {
    const Discriminant disc = Discriminant::make(d);
    if (!disc.is_fundamental) throw std::invalid_argument("ideal_count: discriminant is not fundamental");
    if (x < 1) throw std::invalid_argument("ideal_count: x must be positive");
    IdealCountResult out;
    out.x = x;
    out.c1 = l_value_at_one(d);
    for (i64 m = 1; m <= x; ++m) out.observed += kronecker(d, m) * (x / m);
    return out;
}

}  // namespace genuslab
