#pragma once

// Sieve tables and counting experiments over integers and primes up to a
// desk-scale bound: representation censuses for a discriminant, prime
// distribution among classes, split-prime statistics, residue-class sieves
// and ideal counts.  Work is split into fixed windows so that results do not
// depend on the number of worker threads.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "genuslab/arith.hpp"
#include "genuslab/qforms.hpp"
#include "json.hpp"

namespace genuslab {

/// Raised when a run would exceed the configured memory budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Memory budget in bytes from GENUSLAB_MEM_MB (default 4096 MB).
std::size_t memory_budget_bytes();

/// Full smallest-prime-factor and squarefree tables on [0, limit].
class SieveTables {
public:
    explicit SieveTables(i64 limit);

    i64 limit() const { return limit_; }
    std::uint32_t spf(i64 n) const { return spf_.at(static_cast<std::size_t>(n)); }
    bool squarefree(i64 n) const { return squarefree_.at(static_cast<std::size_t>(n)) != 0; }
    bool is_prime(i64 n) const { return n >= 2 && spf(n) == static_cast<std::uint32_t>(n); }
    const std::vector<i64>& primes() const { return primes_; }
    /// Number of primes <= x (x <= limit).
    std::size_t prime_count(i64 x) const;
    /// Distinct prime factors of n, ascending.
    std::vector<i64> prime_factors(i64 n) const;

private:
    i64 limit_;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint8_t> squarefree_;
    std::vector<i64> primes_;
};

struct RunOptions {
    int threads = 1;
    bool segmented = false;
    /// Window length; 0 selects the default for the mode.
    i64 block = 0;

    i64 window() const { return block > 0 ? block : (segmented ? (i64{1} << 16) : (i64{1} << 20)); }
};

/// Largest X accepted without segmented mode.
constexpr i64 unsegmented_limit = 200000000;

/// Per-integer factorisation summary relative to a discriminant D.
struct NumberSummary {
    bool squarefree = true;
    std::uint8_t omega = 0;     // distinct prime factors
    std::uint8_t split = 0;     // with chi_D(p) = +1
    std::uint8_t inert = 0;     // with chi_D(p) = -1
    std::uint8_t ramified = 0;  // with chi_D(p) = 0
    bool is_prime() const { return squarefree && omega == 1; }
};

/// Summaries for n in [lo, hi), lo >= 1, by segmented trial sieving.
std::vector<NumberSummary> summarize_range(i64 lo, i64 hi, i64 d);

/// Primality of n in [lo, hi) by a segmented sieve of Eratosthenes.
std::vector<bool> prime_window(i64 lo, i64 hi);
/// Squarefreeness of n in [lo, hi).
std::vector<bool> squarefree_window(i64 lo, i64 hi);

/// Values of f in [lo, hi): entry n - lo is set when f(x, y) = n for some
/// (x, y) != (0, 0) (coprime (x, y) when primitive_only).
std::vector<bool> representation_window(const QuadForm& f, i64 lo, i64 hi, bool primitive_only = false);

/// Full per-form bitmaps on [0, limit] for every reduced form of D.
struct RepresentationBitmaps {
    i64 limit = 0;
    bool primitive_only = false;
    std::vector<std::vector<bool>> by_class;  // indexed by ClassIndex

    RepresentationBitmaps(const ClassGroup& g, i64 limit, bool primitive_only = false);
    /// Classes whose reduced form represents n.
    std::vector<ClassIndex> representing(i64 n) const;
    bool any(i64 n) const;
};

/// Number of positive integers <= X represented by f.
i64 u_f(const QuadForm& f, i64 x);

/// Offset logarithmic integral: integral from 2 to x of dt / log t.
double li(double x);

struct CensusRow {
    std::string key;
    double observed = 0.0;
    bool integral = true;
    double predicted = 0.0;
    std::string formula;
    double ratio() const { return predicted != 0.0 ? observed / predicted : 0.0; }
};

struct CensusReport {
    std::string experiment;
    i64 D = 0;
    i64 X = 0;
    std::optional<i64> a;
    std::uint64_t seed = 0;
    std::vector<CensusRow> rows;
    double runtime_ms = 0.0;

    const CensusRow& row(const std::string& key) const;
    std::string to_csv(bool header = true) const;
    nlohmann::json to_json() const;
};

/// Squarefree n represented by some form of D but not by every form of a
/// genus containing a representing form; counted over (X/2, X] ("window")
/// and [1, X] ("cumulative").
CensusReport exceptional_count(i64 d, i64 x, const RunOptions& opt = {});

/// Primes q with q + a squarefree and exceptional in the above sense.
CensusReport shifted_prime_exceptional_count(i64 d, i64 x, i64 a, const RunOptions& opt = {});

/// Primes q <= X - a with q + a represented by f (both any and coprime (x, y)).
CensusReport corollary4_count(const QuadForm& f, i64 x, i64 a, const RunOptions& opt = {});

struct PrimeClassHistogram {
    i64 D = 0;
    i64 xi = 0;
    std::size_t h = 0;
    std::vector<i64> observed;     // per class: primes <= xi represented by the class
    std::vector<int> eps;          // 2 for ambiguous classes, else 1
    std::vector<double> predicted; // li(xi) / (eps h)
    std::vector<i64> pair_counts;  // per class: primes whose pair {C, C^-1} has C as the smaller index
    i64 represented_primes = 0;    // primes <= xi represented by some class
    std::vector<i64> sample;       // primes <= min(xi, 100) represented by the principal class
    double runtime_ms = 0.0;
};

PrimeClassHistogram prime_class_histogram(i64 d, i64 xi, const RunOptions& opt = {});
CensusReport to_report(const PrimeClassHistogram& hist);

/// Sum over primes p < X with chi_D(p) != -1 of 1/p, against (1/2) log log X.
CensusReport split_reciprocal_sum(i64 d, i64 x, const RunOptions& opt = {});

/// Squarefree n <= X with exactly k prime factors, all split, per k.
CensusReport k_factor_histogram(i64 d, i64 x, const RunOptions& opt = {});

/// Squarefree n < X built from at most r primes with chi_D(p) != -1, for r' = 1..r.
CensusReport lemma3_count(i64 d, i64 x, int r, double eps = 0.1, const RunOptions& opt = {});

/// Residue classes R_l removed modulo primes l.
struct ResidueFamily {
    std::vector<std::pair<i64, std::vector<i64>>> classes;  // (l, R_l)
};

/// For each prime l < y: |R_l| uniform in {0, 1, 2} with random residues.
ResidueFamily random_residue_family(i64 y, std::uint64_t seed);
/// R_l = {0} for every prime l <= z.
ResidueFamily primality_family(i64 z);
/// R_l = {0, xi_l} with random non-zero xi_l for primes l < z.
ResidueFamily two_residue_family(i64 z, std::uint64_t seed);

struct Lemma4Result {
    i64 observed = 0;
    double main_term = 0.0;  // prod (1 - |R_l| / l) Y
    double bound = 0.0;      // (log log Y)^3 main_term + Y / (log Y)^10
};

/// #{1 <= n < Y : n mod l not in R_l for every l}.
Lemma4Result lemma4_count(i64 y, const ResidueFamily& family);

struct Lemma5Result {
    i64 observed = 0;
    i64 class_primes = 0;   // primes < Y represented by the class, no residue condition
    double predicted = 0.0; // Y / (h (log Y)^2)
    double ratio() const { return observed / predicted; }
};

/// Primes p < Y represented by class c whose residues avoid the family.
Lemma5Result lemma5_count(i64 d, i64 y, ClassIndex c, const ResidueFamily& family);

struct IdealCountResult {
    i64 observed = 0;  // ideals of norm <= x
    double c1 = 0.0;   // L(1, chi_D)
    double ratio_error() const;  // |observed / x - c1|
    i64 x = 0;
};

/// Integral ideals of norm <= x in the maximal order of discriminant d (fundamental).
IdealCountResult ideal_count(i64 d, i64 x);

/// L(1, chi_d) from the class number formula for a fundamental d < 0.
double l_value_at_one(i64 d);

}  // namespace genuslab
