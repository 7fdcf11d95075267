#include <random>

#include "doctest.h"
#include "genuslab/arith.hpp"
#include "oracles.hpp"

using namespace genuslab;

TEST_CASE("gcd, lcm and extended Euclid") {
    CHECK(gcd(12, 18) == 6);
    CHECK(gcd(-12, 18) == 6);
    CHECK(gcd(0, 7) == 7);
    CHECK(lcm(4, 6) == 12);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const i64 a = static_cast<i64>(rng() % 200001) - 100000;
        const i64 b = static_cast<i64>(rng() % 200001) - 100000;
        const auto e = ext_gcd(a, b);
        CHECK(e.g == oracle::gcd(a, b));
        CHECK(a * e.x + b * e.y == e.g);
    }
}

TEST_CASE("mod is the least non-negative residue") {
    CHECK(mod(-1, 4) == 3);
    CHECK(mod(9, 4) == 1);
    CHECK(mod(-8, 4) == 0);
}

TEST_CASE("primality agrees with trial division") {
    for (i64 n = -5; n < 20000; ++n) CHECK(is_prime(n) == oracle::is_prime(n));
    CHECK(is_prime(1000000007));
    CHECK(!is_prime(1000000007LL * 998244353LL));
    CHECK(is_prime(9223372036854775783LL));
}

TEST_CASE("factorisation multiplies back and is squarefree-consistent") {
    for (i64 n = 1; n < 5000; ++n) {
        i64 prod = 1;
        for (const auto& pp : factorize(n)) {
            CHECK(oracle::is_prime(pp.prime));
            for (int e = 0; e < pp.exponent; ++e) prod *= pp.prime;
        }
        CHECK(prod == n);
        CHECK(is_squarefree(n) == oracle::is_squarefree(n));
    }
    CHECK(squarefree_kernel(-12) == -3);
    CHECK(squarefree_kernel(72) == 2);
    CHECK(euler_phi(36) == 12);
}

TEST_CASE("Kronecker symbol against Euler's criterion") {
    for (i64 a = -60; a <= 60; ++a)
        for (i64 n = -60; n <= 60; ++n) CHECK_MESSAGE(kronecker(a, n) == oracle::kronecker(a, n), a << " " << n);
    CHECK(kronecker(-23, 2) == 1);
    CHECK(kronecker(-4, 2) == 0);
    CHECK(kronecker(-4, 7) == -1);
}

TEST_CASE("square roots modulo primes") {
    for (i64 p : primes_up_to(400)) {
        if (p == 2) continue;
        for (i64 a = 0; a < p; ++a) {
            if (legendre(a, p) == -1) continue;
            const i64 r = sqrt_mod_prime(a, p);
            CHECK(r * r % p == a);
        }
    }
}

TEST_CASE("integer square root and prime lists") {
    for (i64 n = 0; n < 100000; n += 7) {
        const i64 r = isqrt(n);
        CHECK(r * r <= n);
        CHECK((r + 1) * (r + 1) > n);
    }
    CHECK(isqrt(4000000000000000000LL) == 2000000000LL);
    const auto ps = primes_up_to(10000);
    std::size_t count = 0;
    for (i64 n = 2; n <= 10000; ++n) count += oracle::is_prime(n) ? 1 : 0;
    CHECK(ps.size() == count);
    CHECK(primes_up_to(1).empty());
    CHECK(primes_up_to(2) == std::vector<i64>{2});
}
