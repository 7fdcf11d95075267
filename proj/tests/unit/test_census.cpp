#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "doctest.h"
#include "genuslab/census.hpp"
#include "genuslab/genus.hpp"
#include "oracles.hpp"

using namespace genuslab;

TEST_CASE("sieve tables") {
    const SieveTables t(1000000);
    CHECK(t.spf(12) == 2);
    CHECK(t.spf(91) == 7);
    CHECK(!t.squarefree(18));
    CHECK(t.squarefree(30));
    CHECK(t.prime_count(1000000) == 78498);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 2000; ++i) {
        const i64 n = 2 + static_cast<i64>(rng() % 999999);
        CHECK(t.spf(n) == static_cast<std::uint32_t>(oracle::smallest_prime_factor(n)));
        CHECK(t.squarefree(n) == oracle::is_squarefree(n));
    }
    CHECK(t.prime_factors(360) == std::vector<i64>{2, 3, 5});
    CHECK_THROWS_AS(SieveTables(1), std::invalid_argument);
}

TEST_CASE("segmented windows agree with the full tables") {
    const SieveTables t(300000);
    std::size_t primes = 0;
    for (i64 lo = 0; lo <= 300000; lo += 4099) {
        const i64 hi = std::min<i64>(lo + 4099, 300001);
        const auto pw = prime_window(lo, hi);
        const auto sw = squarefree_window(lo, hi);
        for (i64 n = lo; n < hi; ++n) {
            CHECK(pw[static_cast<std::size_t>(n - lo)] == t.is_prime(n));
            if (n >= 1) CHECK(sw[static_cast<std::size_t>(n - lo)] == t.squarefree(n));
            primes += pw[static_cast<std::size_t>(n - lo)] ? 1 : 0;
        }
    }
    CHECK(primes == t.prime_count(300000));
    const i64 d = -23;
    const auto s = summarize_range(1, 50001, d);
    for (i64 n = 1; n <= 50000; ++n) {
        const auto& e = s[static_cast<std::size_t>(n - 1)];
        const auto ps = t.prime_factors(n);
        int split = 0, inert = 0, ram = 0;
        for (i64 p : ps) {
            const int c = oracle::kronecker(d, p);
            split += c == 1;
            inert += c == -1;
            ram += c == 0;
        }
        CHECK(e.omega == ps.size());
        CHECK(e.split == split);
        CHECK(e.inert == inert);
        CHECK(e.ramified == ram);
        CHECK(e.squarefree == t.squarefree(n));
        CHECK(e.is_prime() == t.is_prime(n));
    }
}

TEST_CASE("representation windows match the full bitmap") {
    for (const QuadForm& f : {QuadForm{1, 0, 1}, QuadForm{2, 1, 3}, QuadForm{3, 2, 7}}) {
        for (bool prim : {false, true}) {
            const auto full = oracle::represented(f.a, f.b, f.c, 20000, prim);
            for (i64 lo : {1L, 7L, 1000L, 12345L}) {
                const i64 hi = std::min<i64>(lo + 3001, 20001);
                const auto w = representation_window(f, lo, hi, prim);
                for (i64 n = lo; n < hi; ++n) CHECK(w[static_cast<std::size_t>(n - lo)] == full[static_cast<std::size_t>(n)]);
            }
        }
    }
}

TEST_CASE("U_f") {
    CHECK(u_f({1, 0, 1}, 10) == 7);
    CHECK(u_f({1, 0, 1}, 0) == 0);
    i64 prev = 0;
    for (i64 x = 1; x < 200; ++x) {
        const i64 u = u_f({2, 1, 3}, x);
        CHECK(u >= prev);
        prev = u;
    }
    const auto ref = oracle::represented(1, 1, 6, 3000000);
    i64 count = 0;
    for (std::size_t n = 1; n < ref.size(); ++n) count += ref[n] ? 1 : 0;
    CHECK(u_f({1, 1, 6}, 3000000) == count);
}

TEST_CASE("representation bitmaps and the class-set formula") {
    for (i64 d : {-23L, -84L, -71L}) {
        const ClassGroup g(d);
        const RepresentationBitmaps bm(g, 20000);
        for (i64 n = 1; n <= 20000; ++n) {
            if (!oracle::is_squarefree(n) || oracle::gcd(n, 2 * d) != 1) continue;
            bool split = true;
            for (i64 m = n, p = 2; m > 1; ++p)
                if (m % p == 0) {
                    split = split && oracle::kronecker(d, p) == 1;
                    while (m % p == 0) m /= p;
                }
            if (!split) continue;
            const auto lib = classes_representing(n, g);
            std::vector<ClassIndex> expect;
            lib.for_each([&](Element e) { expect.push_back(e); });
            CHECK(bm.representing(n) == expect);
        }
    }
}

TEST_CASE("exceptional counts") {
    CHECK(exceptional_count(-4, 100000).row("cumulative:delta=0").observed == 0);
    CHECK(exceptional_count(-84, 100000).row("cumulative:delta=0").observed == 0);
    // 6 is represented by all three classes of D = -23, so it is never exceptional.
    const auto at6 = exceptional_count(-23, 6);
    const auto at5 = exceptional_count(-23, 5);
    CHECK(at6.row("cumulative:delta=0").observed == at5.row("cumulative:delta=0").observed);

    // Direct recount from bitmaps for D = -47.
    const ClassGroup g(-47);
    const auto gp = genus_partition(g);
    const RepresentationBitmaps bm(g, 50000);
    i64 brute = 0, window = 0;
    for (i64 n = 1; n <= 50000; ++n) {
        if (!oracle::is_squarefree(n)) continue;
        bool exc = false;
        for (const auto& members : gp.genera) {
            int hit = 0;
            for (ClassIndex c : members) hit += bm.by_class[c][static_cast<std::size_t>(n)] ? 1 : 0;
            if (hit > 0 && hit < static_cast<int>(members.size())) exc = true;
        }
        if (exc) {
            ++brute;
            if (n > 25000) ++window;
        }
    }
    const auto rep = exceptional_count(-47, 50000);
    CHECK(rep.row("cumulative:delta=0").observed == brute);
    CHECK(rep.row("window:delta=0").observed == window);
    CHECK(brute > 0);
}

TEST_CASE("no exceptional integers when every genus is a single class") {
    int checked = 0;
    for (i64 d = -3; d >= -3000 && checked < 40; --d) {
        if (mod(d, 4) != 0 && mod(d, 4) != 1) continue;
        const ClassGroup g(d);
        if (g.h() != g.genera_count() || g.h() == 1) continue;
        ++checked;
        CHECK_MESSAGE(exceptional_count(d, 20000).row("cumulative:delta=0").observed == 0, d);
    }
    CHECK(checked >= 20);
}

TEST_CASE("shifted-prime and corollary counts") {
    CHECK(shifted_prime_exceptional_count(-4, 100000, 1).row("cumulative:delta=0").observed == 0);
    CHECK(shifted_prime_exceptional_count(-84, 100000, 2).row("cumulative:delta=0").observed == 0);
    CHECK(shifted_prime_exceptional_count(-23, 100000, 1).row("cumulative:delta=0").observed > 0);

    CHECK(corollary4_count({1, 0, 1}, 100, 0).row("any").observed == 12);
    // q + 1 <= 100 a sum of two squares: 3 7 17 19 31 67 71 73 79 89 97
    const auto c1 = corollary4_count({1, 0, 1}, 100, 1);
    CHECK(c1.row("any").observed == 11);
    CHECK(c1.row("primitive").observed == 1);  // only 74 = 7^2 + 5^2
    const auto ref = oracle::represented(1, 0, 1, 100);
    int direct = 0;
    for (i64 q = 2; q + 1 <= 100; ++q) direct += (oracle::is_prime(q) && ref[static_cast<std::size_t>(q + 1)]) ? 1 : 0;
    CHECK(direct == 11);
}

TEST_CASE("prime class histogram") {
    const auto h4 = prime_class_histogram(-4, 100);
    CHECK(h4.observed == std::vector<i64>{12});
    CHECK(h4.sample == std::vector<i64>{2, 5, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97});
    CHECK(h4.eps == std::vector<int>{2});

    const ClassGroup g(-23);
    const auto h = prime_class_histogram(-23, 1000000);
    const ClassIndex c = g.class_of({2, 1, 3}), ci = g.class_of({2, -1, 3});
    CHECK(h.observed[c] == h.observed[ci]);
    i64 pairs = 0;
    for (i64 v : h.pair_counts) pairs += v;
    i64 split_or_ramified = 0;
    for (i64 p : primes_up_to(1000000)) split_or_ramified += kronecker(-23, p) != -1;
    CHECK(pairs == split_or_ramified);
    CHECK(h.represented_primes == split_or_ramified);
}

TEST_CASE("offset logarithmic integral") {
    CHECK(li(2.0) == 0.0);
    CHECK(li(1e6) == doctest::Approx(78626.504).epsilon(1e-8));
    CHECK(li(100) == doctest::Approx(29.080977804).epsilon(1e-8));
    CHECK_THROWS(li(1.0));
}

TEST_CASE("split reciprocal sums") {
    const auto r10 = split_reciprocal_sum(-4, 10);
    CHECK(r10.row("sum").observed == doctest::Approx(0.5 + 0.2));
    const auto r6 = split_reciprocal_sum(-4, 1000000);
    CHECK(r6.row("sum").ratio() > 0.8);
    CHECK(r6.row("sum").ratio() < 1.3);
    CHECK(split_reciprocal_sum(-4, 100000).row("sum").observed < r6.row("sum").observed);
}

TEST_CASE("k-factor histogram") {
    const auto rep = k_factor_histogram(-4, 1000000);
    i64 split_primes = 0;
    for (i64 p : primes_up_to(1000000)) split_primes += kronecker(-4, p) == 1;
    CHECK(rep.row("k=1").observed == split_primes);
    const double r2 = rep.row("k=2").ratio();
    CHECK(r2 > 0.5);
    CHECK(r2 < 2.0);
    double sum = 0;
    for (const auto& row : rep.rows)
        if (row.key != "sum") sum += row.observed;
    CHECK(rep.row("sum").observed == sum);
}

TEST_CASE("lemma 3 counts") {
    const auto rep = lemma3_count(-23, 1000000, 4);
    CHECK(rep.row("r=0").observed == 1);
    double prev = 0;
    for (int r = 0; r <= 4; ++r) {
        const double v = rep.row("r=" + std::to_string(r)).observed;
        CHECK(v >= prev);
        prev = v;
    }
    const double ratio = rep.row("r=1").ratio();
    CHECK(ratio > 1.0 / 3);
    CHECK(ratio < 3.0);
    CHECK_THROWS_AS(lemma3_count(-23, 1000, 13), std::invalid_argument);
}

TEST_CASE("lemma 4 counts") {
    CHECK(lemma4_count(1000, ResidueFamily{}).observed == 999);
    ResidueFamily evens;
    evens.classes.push_back({2, {1}});
    CHECK(lemma4_count(30, evens).observed == 14);
    const auto prim = lemma4_count(1000000, primality_family(1000));
    CHECK(prim.observed == 78498 - 168 + 1);  // 1 and the primes above 1000
    CHECK(prim.observed <= prim.bound);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = lemma4_count(100000, random_residue_family(100000, seed));
        CHECK(r.observed <= r.bound);
    }
    const auto a = random_residue_family(1000, 42), b = random_residue_family(1000, 42);
    CHECK(a.classes == b.classes);
}

TEST_CASE("lemma 5 counts") {
    const ClassGroup g(-23);
    const ClassIndex c = g.class_of({2, 1, 3});
    const auto hist = prime_class_histogram(-23, 999999);
    const auto plain = lemma5_count(-23, 1000000, c, ResidueFamily{});
    CHECK(plain.observed == hist.observed[c]);
    ResidueFamily odd_out;
    odd_out.classes.push_back({2, {1}});
    CHECK(lemma5_count(-23, 1000000, c, odd_out).observed <= 1);
    const auto generic = lemma5_count(-23, 1000000, c, two_residue_family(1000, 3));
    CHECK(generic.ratio() > 0.1);
    CHECK(generic.ratio() < 10);
}

TEST_CASE("ideal counts") {
    CHECK(ideal_count(-4, 1).observed == 1);
    CHECK(l_value_at_one(-4) == doctest::Approx(std::numbers::pi / 4));
    const auto r = ideal_count(-4, 1000000);
    CHECK(r.ratio_error() < 1e-2);
    CHECK_THROWS_AS(ideal_count(-16, 100), std::invalid_argument);
    // r(n) = sum_{d | n} chi(d) is multiplicative.
    auto r_of = [](i64 n) {
        i64 s = 0;
        for (i64 d = 1; d <= n; ++d)
            if (n % d == 0) s += oracle::kronecker(-23, d);
        return s;
    };
    for (auto [m, n] : {std::pair<i64, i64>{6, 35}, {2, 3}, {27, 8}, {13, 59}}) CHECK(r_of(m * n) == r_of(m) * r_of(n));
    i64 total = 0;
    for (i64 n = 1; n <= 2000; ++n) total += r_of(n);
    CHECK(ideal_count(-23, 2000).observed == total);
}

TEST_CASE("reports are independent of thread count and window size") {
    RunOptions one, four, seg;
    four.threads = 4;
    seg.segmented = true;
    seg.threads = 3;
    auto strip = [](CensusReport r) {
        r.runtime_ms = 0;
        return r.to_csv();
    };
    CHECK(strip(exceptional_count(-23, 3000000, one)) == strip(exceptional_count(-23, 3000000, four)));
    CHECK(strip(exceptional_count(-23, 3000000, one)) == strip(exceptional_count(-23, 3000000, seg)));
    CHECK(strip(split_reciprocal_sum(-23, 3000000, one)) == strip(split_reciprocal_sum(-23, 3000000, four)));
    CHECK(strip(k_factor_histogram(-23, 3000000, one)) == strip(k_factor_histogram(-23, 3000000, seg)));
}

TEST_CASE("report serialisation") {
    const auto rep = corollary4_count({1, 0, 1}, 100, 1);
    const auto csv = rep.to_csv();
    CHECK(csv.rfind("experiment,D,X,a,seed,key,observed,predicted,ratio,formula,runtime_ms\n", 0) == 0);
    CHECK(csv.find("corollary4,-4,100,1,0,any,11,") != std::string::npos);
    const auto j = rep.to_json();
    CHECK(j["schema"] == 1);
    CHECK(j["rows"].size() == 2);
    CHECK(j["a"] == 1);
}

TEST_CASE("memory budget") {
    setenv("GENUSLAB_MEM_MB", "1", 1);
    CHECK_THROWS_AS(SieveTables(10000000), ResourceError);
    RunOptions many;
    many.threads = 64;
    CHECK_THROWS_AS(exceptional_count(-23, 10000000, many), ResourceError);
    unsetenv("GENUSLAB_MEM_MB");
    RunOptions big;
    CHECK_THROWS_AS(exceptional_count(-23, 300000000, big), ResourceError);
}
