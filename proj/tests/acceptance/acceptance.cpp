// Acceptance gate: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion.  Exit status is nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "genuslab/census.hpp"
#include "genuslab/genus.hpp"
#include "genuslab/grouptheory.hpp"
#include "genuslab/qforms.hpp"
#include "oracles.hpp"

using namespace genuslab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond && pass) detail << "first failure: " << what << "; ";
        pass = pass && cond;
    }
};

bool is_fundamental(i64 d) {
    if (mod(d, 4) == 1) return oracle::is_squarefree(-d);
    if (mod(d, 4) != 0) return false;
    const i64 m = d / 4;
    return (mod(m, 4) == 2 || mod(m, 4) == 3) && oracle::is_squarefree(-m);
}

FiniteAbelianGroup random_group(std::mt19937_64& rng, std::size_t max_size) {
    for (;;) {
        std::vector<i64> orders;
        std::size_t size = 1;
        const int rank = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < rank; ++i) {
            const i64 o = 2 + static_cast<i64>(rng() % 64);
            orders.push_back(o);
            size *= static_cast<std::size_t>(o);
        }
        if (size <= max_size) return FiniteAbelianGroup(orders);
    }
}

QuadForm principal_form(i64 d) {
    return mod(d, 4) == 0 ? QuadForm{1, 0, -d / 4} : QuadForm{1, 1, (1 - d) / 4};
}

void class_groups(Outcome& o) {
    std::mt19937_64 rng(1);
    std::size_t discs = 0;
    for (i64 d = -3; d >= -2000; --d) {
        if (!is_fundamental(d)) continue;
        ++discs;
        const ClassGroup g(d);
        const auto triples = oracle::reduced_triples(d);
        o.require(g.h() == triples.size(), "h mismatch at D=" + std::to_string(d));
        std::set<std::array<i64, 3>> lib, ref(triples.begin(), triples.end());
        for (const auto& f : g.forms()) lib.insert({f.a, f.b, f.c});
        o.require(lib == ref, "form set mismatch at D=" + std::to_string(d));
        const std::size_t h = g.h();
        for (ClassIndex x = 0; x < h; ++x) {
            o.require(g.compose(g.identity(), x) == x, "identity");
            o.require(g.compose(x, g.inverse(x)) == g.identity(), "inverse");
        }
        for (int t = 0; t < 10000; ++t) {
            const ClassIndex x = rng() % h, y = rng() % h, z = rng() % h;
            if (g.compose(g.compose(x, y), z) != g.compose(x, g.compose(y, z))) {
                o.require(false, "associativity at D=" + std::to_string(d));
                break;
            }
        }
    }
    o.detail << discs << " fundamental discriminants, 10^4 associativity samples each";
}

void representing_classes(Outcome& o) {
    constexpr i64 limit = 100000;
    std::size_t tested = 0, mismatches = 0;
    for (i64 d : {-23L, -47L, -71L, -84L, -163L, -400L}) {
        const ClassGroup g(d);
        std::vector<std::vector<bool>> reps;
        for (const auto& f : g.forms()) reps.push_back(oracle::represented(f.a, f.b, f.c, limit));
        for (i64 n = 1; n <= limit; ++n) {
            if (oracle::gcd(n, 2 * d) != 1 || !oracle::is_squarefree(n)) continue;
            bool split = true;
            for (i64 m = n; m > 1 && split;) {
                const i64 p = oracle::smallest_prime_factor(m);
                split = oracle::kronecker(d, p) == 1;
                while (m % p == 0) m /= p;
            }
            if (!split) continue;
            ElementSet truth(g.h());
            for (ClassIndex c = 0; c < g.h(); ++c)
                if (reps[c][static_cast<std::size_t>(n)]) truth.insert(static_cast<Element>(c));
            ++tested;
            if (!(classes_representing(n, g) == truth)) ++mismatches;
        }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    o.detail << tested << " integers, " << mismatches << " mismatches";
}

void local_criteria(Outcome& o) {
    const auto results = calibrate_local_criteria(calibration_forms(), 100000);
    const std::string frozen = LocalCriteriaReading{}.name();
    auto it = std::find_if(results.begin(), results.end(),
                           [&](const CalibrationResult& r) { return r.reading.name() == frozen; });
    o.require(it != results.end(), "frozen reading missing from calibration");
    if (it != results.end()) {
        o.require(it->mismatches == 0, std::to_string(it->mismatches) + " mismatches");
        o.require(it->tested > 0, "nothing tested");
        o.detail << "reading " << frozen << ": " << it->tested << " pairs, " << it->mismatches << " mismatches; ";
    }
    const auto lc = build_L_set(QuadForm{1, 0, 1}, 0);
    o.require(lc.Q == 4 && lc.L == std::vector<i64>{1}, "x^2+y^2 residue set is not {1 mod 4}");
    o.detail << "x^2+y^2 residues mod " << lc.Q << ": {";
    for (std::size_t i = 0; i < lc.L.size(); ++i) o.detail << (i ? "," : "") << lc.L[i];
    o.detail << "}";
}

void prime_distribution(Outcome& o) {
    RunOptions opt;
    opt.threads = 4;
    const auto hist = prime_class_histogram(-23, 10000000, opt);
    for (std::size_t c = 0; c < hist.h; ++c) {
        const double r = static_cast<double>(hist.observed[c]) / hist.predicted[c];
        o.require(std::abs(r - 1.0) <= 0.05, "class " + std::to_string(c) + " ratio " + std::to_string(r));
        o.detail << "class " << c << " ratio " << r << "; ";
    }
    const auto small = prime_class_histogram(-4, 100, opt);
    o.require(small.observed.at(0) == 12, "pi_C(100) for D=-4 is " + std::to_string(small.observed.at(0)));
    o.detail << "D=-4 pi_C(100) = " << small.observed.at(0);
}

void split_reciprocals(Outcome& o) {
    RunOptions opt;
    opt.threads = 4;
    for (i64 d : {-4L, -23L}) {
        const double r = split_reciprocal_sum(d, 10000000, opt).row("sum").ratio();
        o.require(r >= 0.8 && r <= 1.3, "D=" + std::to_string(d) + " ratio " + std::to_string(r));
        o.detail << "D=" << d << " ratio " << r << "; ";
    }
}

void classifier(Outcome& o) {
    std::mt19937_64 rng(2024);
    std::map<Alternative, int> tally;
    for (int t = 0; t < 1000; ++t) {
        const auto g = random_group(rng, 4096);
        std::vector<Element> a;
        const int mode = t % 4;
        if (mode == 3) {
            // set confined to a random proper subgroup, plus a few stray elements
            const auto h = g.generated(std::vector<Element>{static_cast<Element>(rng() % g.size())});
            const auto hel = h.elements();
            const std::size_t k = 1 + rng() % 12;
            for (std::size_t i = 0; i < k; ++i) a.push_back(hel[rng() % hel.size()]);
            for (std::size_t i = rng() % 3; i > 0; --i) a.push_back(static_cast<Element>(rng() % g.size()));
        } else {
            const std::size_t k = 1 + rng() % (mode == 0 ? 6 : mode == 1 ? 16 : 40);
            for (std::size_t i = 0; i < k; ++i) a.push_back(static_cast<Element>(rng() % g.size()));
        }
        Theorem1Params params;
        params.eps = std::array<double, 3>{0.1, 0.2, 0.3}[rng() % 3];
        const auto rep = classify_theorem1(a, g, params);
        ++tally[rep.alternative];
        const auto chk = verify_theorem1(rep, a, g);
        o.require(chk.ok, "instance " + std::to_string(t) + ": " + chk.reason);
        if (rep.alternative == Alternative::SmallOmega)
            o.require(static_cast<double>(rep.chosen.size()) <= rep.k_bound,
                      "instance " + std::to_string(t) + ": k above bound");
    }
    for (int t = 0; t < 100; ++t) {
        const auto g = random_group(rng, 1024);
        ElementSet s(g.size());
        for (std::size_t i = 1 + rng() % g.size(); i > 0; --i) s.insert(static_cast<Element>(rng() % g.size()));
        i64 total = 0;
        for (Element x = 0; x < g.size(); ++x) {
            ElementSet u = s;
            u |= g.translate(s, x);
            total += static_cast<i64>(u.size());
        }
        const auto n = static_cast<i64>(s.size()), h = static_cast<i64>(g.size());
        o.require(total == 2 * n * h - n * n, "expectation identity on instance " + std::to_string(t));
    }
    o.detail << "alternatives SUMS_ALL/SUBGROUP/SMALL_OMEGA = " << tally[Alternative::SumsAll] << "/"
             << tally[Alternative::Subgroup] << "/" << tally[Alternative::SmallOmega];
}

void kneser_energy(Outcome& o) {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 1000; ++t) {
        const auto g = random_group(rng, 2048);
        ElementSet s(g.size());
        const std::size_t k = 1 + rng() % std::min<std::size_t>(g.size(), 64);
        while (s.size() < k) s.insert(static_cast<Element>(rng() % g.size()));
        o.require(kneser_check(s, g).holds, "Kneser fails on instance " + std::to_string(t));
    }
    std::size_t groups = 0;
    auto energy_full = [&](const FiniteAbelianGroup& g) {
        const auto full = ElementSet::full(g.size());
        const auto n = static_cast<i64>(g.size());
        o.require(additive_energy(full, full, g) == n * n * n, "energy of " + g.describe());
        ++groups;
    };
    for (i64 n = 1; n <= 256; ++n) energy_full(FiniteAbelianGroup({n}));
    for (i64 a = 2; a <= 16; ++a)
        for (i64 b = a; a * b <= 256; b += a) energy_full(FiniteAbelianGroup({a, b}));
    energy_full(FiniteAbelianGroup({2, 2, 2, 2, 2, 2, 2, 2}));
    energy_full(FiniteAbelianGroup({4, 4, 4, 4}));
    o.detail << "1000 random sets; " << groups << " full-group energies";
}

void near_coset(Outcome& o) {
    std::mt19937_64 rng(5);
    int instances = 0;
    for (int t = 0; t < 200; ++t) {
        const auto g = random_group(rng, 1024);
        std::vector<Element> gens{static_cast<Element>(rng() % g.size())};
        if (rng() % 2) gens.push_back(static_cast<Element>(rng() % g.size()));
        const ElementSet h = g.generated(gens);
        const Element z = static_cast<Element>(rng() % g.size());
        const ElementSet coset = g.translate(h, g.neg(z));
        const double rho = std::array<double, 4>{0.0, 0.005, 0.01, 0.02}[t % 4];
        std::vector<double> mu(g.size(), 0.0);
        for (Element x : coset.elements()) mu[x] = (1.0 - rho) / static_cast<double>(coset.size());
        mu[rng() % g.size()] += rho;
        const auto r = lemma1_witness(mu, g, 1.0);
        ++instances;
        if (!r.witness) {
            o.require(false, "no witness on instance " + std::to_string(t));
            continue;
        }
        o.require(g.translate(r.witness->subgroup, g.neg(r.witness->shift)) == coset,
                  "wrong coset on instance " + std::to_string(t));
        o.require(r.witness->distance <= 2.5 * rho + 1e-12, "distance above 2.5 rho on instance " + std::to_string(t));
    }
    o.detail << instances << " instances, rho in {0, 0.005, 0.01, 0.02}";
}

std::vector<i64> multi_class_genus_discriminants(std::size_t count) {
    std::vector<i64> out;
    for (i64 d = -3; out.size() < count; --d) {
        if (mod(d, 4) != 0 && mod(d, 4) != 1) continue;
        const ClassGroup g(d);
        if (g.h() / g.genera_count() >= 2) out.push_back(d);
    }
    return out;
}

bool non_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

const std::vector<i64> ladder{100000, 1000000, 10000000};

void exceptional_trend(Outcome& o) {
    RunOptions opt;
    opt.threads = 8;
    for (i64 d : multi_class_genus_discriminants(3)) {
        std::vector<double> ratios;
        for (i64 x : ladder) ratios.push_back(exceptional_count(d, x, opt).row("cumulative:delta=0").ratio());
        o.require(non_increasing(ratios), "D=" + std::to_string(d) + " ratios increase");
        o.detail << "D=" << d << " [" << ratios[0] << ", " << ratios[1] << ", " << ratios[2] << "]; ";
    }
}

void shifted_trend(Outcome& o) {
    constexpr double corollary4_floor = 0.1;
    RunOptions opt;
    opt.threads = 8;
    double min_cor4 = 1e300;
    for (i64 d : multi_class_genus_discriminants(3)) {
        for (i64 a : {1L, 2L}) {
            std::vector<double> ratios;
            for (i64 x : ladder) {
                ratios.push_back(shifted_prime_exceptional_count(d, x, a, opt).row("cumulative:delta=0").ratio());
                const auto cor = corollary4_count(principal_form(d), x, a, opt);
                for (const char* key : {"any", "primitive"}) {
                    const double r = cor.row(key).ratio();
                    min_cor4 = std::min(min_cor4, r);
                    o.require(r >= corollary4_floor, "corollary4 D=" + std::to_string(d) + " a=" + std::to_string(a) +
                                                         " X=" + std::to_string(x) + " ratio " + std::to_string(r));
                }
            }
            o.require(non_increasing(ratios), "D=" + std::to_string(d) + " a=" + std::to_string(a) + " ratios increase");
            o.detail << "D=" << d << ",a=" << a << " [" << ratios[0] << ", " << ratios[1] << ", " << ratios[2] << "]; ";
        }
    }
    o.detail << "min corollary4 ratio " << min_cor4 << " (floor " << corollary4_floor << ")";
}

void residue_sieve(Outcome& o) {
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const auto r = lemma4_count(100000, random_residue_family(100000, seed));
        worst = std::max(worst, static_cast<double>(r.observed) / r.bound);
        o.require(static_cast<double>(r.observed) <= r.bound, "random family seed " + std::to_string(seed));
    }
    const auto prim = lemma4_count(1000000, primality_family(1000));
    o.require(static_cast<double>(prim.observed) <= prim.bound, "primality family");
    o.detail << "max observed/bound over random families " << worst << "; primality family " << prim.observed
             << " <= " << prim.bound;
}

void constants(Outcome& o) {
    const auto t = theta_constant();
    o.require(std::abs(t.theta - t.theta_golden) < 1e-6, "theta optimizers disagree");
    const auto c6 = C0_constant(4, 1, 1000000), c5 = C0_constant(4, 1, 100000);
    const double dc = std::abs(c6.value - c5.value);
    o.require(dc < 5e-5, "C0 not stable to 4 decimals");
    const auto ic = ideal_count(-4, 1000000);
    const double err = std::abs(static_cast<double>(ic.observed) / 1e6 - std::numbers::pi / 4);
    o.require(err < 1e-2, "ideal count off pi/4");
    o.detail.precision(12);
    o.detail << "theta " << t.theta << " vs " << t.theta_golden << "; C0 " << c6.value << " vs " << c5.value
             << "; ideals/x - pi/4 = " << err;
}

std::string run_cli(const std::string& args) {
    const std::string cmd = std::string(GENUSLAB_CLI) + " " + args + " 2>&1";
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (p == nullptr) return "<popen failed>";
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), static_cast<int>(buf.size()), p)) out += buf.data();
    const int status = pclose(p);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) out += "<exit " + std::to_string(status) + ">";
    return out;
}

std::string strip_runtime(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        out += (pos == std::string::npos ? line : line.substr(0, pos)) + "\n";
    }
    return out;
}

void determinism(Outcome& o) {
    const std::vector<std::string> runs{
        "exceptional -D -23 -X 3000000",    "shifted -D -31 -X 3000000 -a 2",
        "corollary4 -D -39 -X 2000000 -a 1", "primes-by-class -D -47 -X 3000000",
        "kfactor -D -23 -X 2000000",         "lemma3 -D -4 -X 2000000 -r 4",
        "lemma4 -X 200000 --seed 11",        "lemma5 -D -23 -X 1000000 --seed 5",
        "ideals -D -84 -X 2000000",          "u_f -D -23 -X 2000000",
        "split-reciprocal -D -23 -X 3000000"};
    std::size_t compared = 0;
    for (const auto& r : runs) {
        const std::string base = strip_runtime(run_cli("census " + r + " --threads 1"));
        o.require(base.find("<exit") == std::string::npos, r + " failed");
        for (const char* variant : {" --threads 3", " --threads 8", " --threads 5 --segmented"}) {
            ++compared;
            o.require(strip_runtime(run_cli("census " + r + variant)) == base, r + variant + " differs");
        }
    }
    o.detail << runs.size() << " experiments, " << compared << " reruns compared";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"class groups and group axioms", class_groups},
        {"representing classes vs brute force", representing_classes},
        {"local criteria vs genus representation", local_criteria},
        {"primes by class", prime_distribution},
        {"split-prime reciprocal sums", split_reciprocals},
        {"sumset classifier", classifier},
        {"Kneser and additive energy", kneser_energy},
        {"near-coset witness", near_coset},
        {"exceptional integer trend", exceptional_trend},
        {"shifted-prime trend and represented shifted primes", shifted_trend},
        {"residue-class sieve bound", residue_sieve},
        {"constants", constants},
        {"thread determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("criterion %zu: %s  %s (%.1f s)  %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    secs, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
