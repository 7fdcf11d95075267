#pragma once

// Elementary integer arithmetic shared by every module: gcds, modular
// powers, primality, factorisation, quadratic residues and the Kronecker
// symbol.  Everything works on 64-bit signed integers with 128-bit
// intermediates.

#include <cstdint>
#include <utility>
#include <vector>

namespace genuslab {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

struct PrimePower {
    i64 prime;
    int exponent;
    bool operator==(const PrimePower&) const = default;
};

using Factorization = std::vector<PrimePower>;

i64 gcd(i64 a, i64 b);
i64 lcm(i64 a, i64 b);

/// Least non-negative residue of a modulo m (m > 0).
i64 mod(i64 a, i64 m);

/// Extended Euclid: returns (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0.
struct ExtGcd {
    i64 g, x, y;
};
ExtGcd ext_gcd(i64 a, i64 b);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);

/// Deterministic Miller-Rabin for the full 64-bit range.
bool is_prime(i64 n);

/// Trial-division factorisation of |n|, primes ascending.  n != 0.
Factorization factorize(i64 n);

bool is_squarefree(i64 n);

/// Product of the primes dividing n to odd multiplicity, carrying the sign of n.
i64 squarefree_kernel(i64 n);

i64 euler_phi(i64 n);

/// Kronecker symbol (a | n) for any integer a and n.
int kronecker(i64 a, i64 n);

/// Legendre symbol for an odd prime p (no primality check).
int legendre(i64 a, i64 p);

/// A square root of a modulo the odd prime p, assuming (a|p) = 1 or p | a.
i64 sqrt_mod_prime(i64 a, i64 p);

/// Integer square root: largest r with r*r <= n (n >= 0).
i64 isqrt(i64 n);

/// All primes p <= n, ascending (sieve of Eratosthenes).
std::vector<i64> primes_up_to(i64 n);

}  // namespace genuslab
