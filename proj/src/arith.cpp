#include "genuslab/arith.hpp"

#include <cmath>
#include <stdexcept>

namespace genuslab {

i64 gcd(i64 a, i64 b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

i64 lcm(i64 a, i64 b) {
    if (a == 0 || b == 0) return 0;
    i64 g = gcd(a, b);
    i64 r = (a / g) * b;
    return r < 0 ? -r : r;
}

i64 mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

ExtGcd ext_gcd(i64 a, i64 b) {
    i64 old_r = a, r = b;
    i64 old_s = 1, s = 0;
    i64 old_t = 0, t = 1;
    while (r != 0) {
        i64 q = old_r / r;
        i64 tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) return {-old_r, -old_s, -old_t};
    return {old_r, old_s, old_t};
}

u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

u64 powmod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1U) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1U;
    }
    return result;
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = static_cast<u64>(n - 1);
    int s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    const auto un = static_cast<u64>(n);
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, un);
        if (x == 1 || x == un - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, un);
            if (x == un - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Factorization factorize(i64 n) {
    if (n == 0) throw std::invalid_argument("factorize: zero has no factorisation");
    u64 m = n < 0 ? static_cast<u64>(-n) : static_cast<u64>(n);
    Factorization out;
    for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p != 0) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        out.push_back({static_cast<i64>(p), e});
    }
    if (m > 1) out.push_back({static_cast<i64>(m), 1});
    return out;
}

bool is_squarefree(i64 n) {
    if (n == 0) return false;
    for (const auto& pp : factorize(n)) {
        if (pp.exponent > 1) return false;
    }
    return true;
}

i64 squarefree_kernel(i64 n) {
    if (n == 0) throw std::invalid_argument("squarefree_kernel: zero");
    i64 k = 1;
    for (const auto& pp : factorize(n)) {
        if (pp.exponent % 2 == 1) k *= pp.prime;
    }
    return n < 0 ? -k : k;
}

i64 euler_phi(i64 n) {
    if (n <= 0) throw std::invalid_argument("euler_phi: n must be positive");
    i64 r = n;
    for (const auto& pp : factorize(n)) r = r / pp.prime * (pp.prime - 1);
    return r;
}

namespace {

// Jacobi symbol (a | n) for odd n > 0.
int jacobi(i64 a, i64 n) {
    a = mod(a, n);
    int result = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            i64 r = n % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

}  // namespace

int kronecker(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    int v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    if (v > 0) {
        if (a % 2 == 0) return 0;
        if (v % 2 == 1) {
            i64 r = mod(a, 8);
            if (r == 3 || r == 5) result = -result;
        }
    }
    if (n == 1) return result;
    return result * jacobi(a, n);
}

int legendre(i64 a, i64 p) {
    return jacobi(a, p);
}

i64 sqrt_mod_prime(i64 a, i64 p) {
    a = mod(a, p);
    if (a == 0) return 0;
    if (p == 2) return a;
    const auto up = static_cast<u64>(p);
    if (p % 4 == 3) return static_cast<i64>(powmod(static_cast<u64>(a), (up + 1) / 4, up));
    // Tonelli-Shanks
    u64 q = up - 1;
    int s = 0;
    while ((q & 1U) == 0) {
        q >>= 1U;
        ++s;
    }
    u64 z = 2;
    while (legendre(static_cast<i64>(z), p) != -1) ++z;
    u64 m = static_cast<u64>(s);
    u64 c = powmod(z, q, up);
    u64 t = powmod(static_cast<u64>(a), q, up);
    u64 r = powmod(static_cast<u64>(a), (q + 1) / 2, up);
    while (t != 1) {
        u64 i = 0;
        u64 tt = t;
        while (tt != 1) {
            tt = mulmod(tt, tt, up);
            ++i;
            if (i == m) throw std::domain_error("sqrt_mod_prime: not a quadratic residue");
        }
        u64 b = c;
        for (u64 j = 0; j + 1 < m - i; ++j) b = mulmod(b, b, up);
        m = i;
        c = mulmod(b, b, up);
        t = mulmod(t, c, up);
        r = mulmod(r, b, up);
    }
    return static_cast<i64>(r);
}

i64 isqrt(i64 n) {
    if (n < 0) throw std::invalid_argument("isqrt: negative");
    auto r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<i128>(r) * r > n) --r;
    while (static_cast<i128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::vector<i64> primes_up_to(i64 n) {
    std::vector<i64> out;
    if (n < 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
    for (i64 p = 2; p <= n; ++p) {
        if (composite[static_cast<std::size_t>(p)]) continue;
        out.push_back(p);
        for (i64 q = p * p; q <= n; q += p) composite[static_cast<std::size_t>(q)] = true;
    }
    return out;
}

}  // namespace genuslab
