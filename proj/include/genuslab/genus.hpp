#pragma once

// Genus theory for form class groups: genera as cosets of the squares,
// assigned characters, the class set representing a squarefree integer,
// local criteria for representation by a genus of an even-middle form
// Ax^2 + 2Bxy + Cy^2, and the half-dimensional sieve constants.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "genuslab/arith.hpp"
#include "genuslab/element_set.hpp"
#include "genuslab/qforms.hpp"
#include "json.hpp"

namespace genuslab {

struct GenusPartition {
    std::vector<std::size_t> genus_of;               // class index -> genus id
    std::vector<std::vector<ClassIndex>> genera;     // genus id -> classes, ascending
    ElementSet squares;                              // the principal genus C^2
    std::size_t count() const { return genera.size(); }
};

GenusPartition genus_partition(const ClassGroup& g);

/// Assigned characters of f: (r|p) for each odd p | D, followed by the
/// 2-adic characters required by D, evaluated at a value r represented by
/// f and coprime to 2D.
std::vector<int> genus_characters(const QuadForm& f);

/// Classes whose forms represent the squarefree n, as the product over the
/// primes p | n of {C_p, C_p^-1} (a singleton for ramified p).  Empty when
/// some prime factor is inert or not represented by a primitive form.
/// Throws std::invalid_argument when n < 1 or n is not squarefree.
ElementSet classes_representing(i64 n, const ClassGroup& g);

/// Same product computed in abelian coordinates from the subset sums of the
/// squares: (sum of inverses) + s({C_p^2}) with the squares kept as a set.
/// Coincides with classes_representing whenever the squares are distinct.
ElementSet classes_representing_subset_sums(i64 n, const ClassGroup& g);

/// 2-adic and odd-part data of D_pos = 4(AC - B^2) for an even-middle form.
struct AppendixDiscriminant {
    i64 d_pos = 4;
    Factorization factors;     // of d_pos
    int theta2 = 0;            // 2-adic valuation of d_pos
    i64 odd_part = 1;          // signed: -(d_pos / 2^theta2)
    i64 kernel = -1;           // squarefree kernel of -d_pos
    i64 fundamental = -4;      // fundamental discriminant of Q(sqrt(-d_pos))

    static AppendixDiscriminant make(i64 d_pos);
};

enum class Row4Pairing { ResidueAWithMinusOne, ResidueAWithPlusOne, Union };

/// A reading of the local-condition table: whether the odd part of D carries
/// the sign of the discriminant, and how the two alternatives of the
/// (eps2 = 0, theta2 = 2) row pair up.  The default is the calibrated reading.
struct LocalCriteriaReading {
    bool signed_odd_part = true;
    Row4Pairing pairing = Row4Pairing::Union;
    std::string name() const;
};

/// Equivalent form whose leading coefficient is a primitively represented
/// value coprime to 2 D_pos (f itself when its leading coefficient already is).
QuadForm coprime_leading_form(const QuadForm& f);

/// Local criterion for the squarefree m to be represented by the genus of the
/// even-middle form f.  Throws std::invalid_argument if f has odd middle
/// coefficient, m is not squarefree, or gcd(m, D_pos) > 2.
bool genus_represents_local(i64 m, const QuadForm& f, const LocalCriteriaReading& reading = {});

/// Row number (3)-(10) of the 2-adic part selected by (eps2, theta2), or 0 if none.
int local_criteria_row(int eps2, int theta2);

struct LocalConditions {
    int eps2 = 0;
    int row = 0;
    int kappa = 0;                  // |L_2|
    i64 tau2 = 1;
    i64 leading = 1;                // A used for the residue conditions
    AppendixDiscriminant disc;
    std::vector<i64> l2;            // residues mod tau2
    std::vector<i64> odd_primes;    // primes dividing the odd part
    i64 Q = 1;
    std::vector<i64> L;             // admissible residues 0 < L < Q
    bool kernel_symbol_ok = true;   // every L has (k(-D) | L) = 1

    /// p in P: (k(-D) | p) = 1.
    bool prime_admissible(i64 p) const;
    /// Full criterion: table conditions, prime factors of n in P, n = L (mod Q).
    bool represents(i64 m) const;
};

/// Residue data for m = delta * n with delta = 2^eps2.
LocalConditions build_L_set(const QuadForm& f, int eps2);

/// Brute-force: bitmap over [0, limit] of integers represented by some form
/// in the genus of f (any (x, y) != (0, 0)).
std::vector<bool> genus_representation_bitmap(const QuadForm& f, i64 limit);

struct CalibrationResult {
    LocalCriteriaReading reading;
    std::size_t tested = 0;
    std::size_t mismatches = 0;
};

/// Runs every candidate reading against the brute-force genus oracle over
/// squarefree m <= limit with gcd(m, D_pos) <= 2.
std::vector<CalibrationResult> calibrate_local_criteria(const std::vector<QuadForm>& forms, i64 limit);

/// Even-middle forms used by the calibration: x^2+y^2, x^2+2y^2,
/// 2x^2+2xy+3y^2 and all reduced forms of discriminant -4a^2, a <= 12.
std::vector<QuadForm> calibration_forms();

struct C0Result {
    i64 d_pos = 0;
    i64 a = 1;
    i64 truncation = 0;
    double value = 0.0;         // with L(1, chi) factored out exactly
    double value_half = 0.0;    // same at truncation / 2
    double raw = 0.0;           // plain truncated product
    double raw_half = 0.0;
    double l_value = 0.0;       // L(1, chi_d)
    double delta() const { return value - value_half; }
    double raw_delta() const { return raw - raw_half; }
};

/// Sieve constant of the half-dimensional sieve for D_pos > 0 and shift a.
C0Result C0_constant(i64 d_pos, i64 a, i64 truncation = 1000000);

struct ThetaResult {
    double theta = 0.0;
    double argmax = 0.0;
    double theta_golden = 0.0;
    double argmax_golden = 0.0;
};

/// F(s) = 2 log(sqrt s + sqrt(s-1)) - 8 s^2 sqrt(2(s-1)/s) log(2s-1).
double theta_objective(double s);
/// sup of F on (1, 4/3) by grid refinement and by golden-section search.
ThetaResult theta_constant();

struct HalfDimRow {
    double z = 0.0;
    double sum = 0.0;       // sum over p <= z in the inert set of log p / phi_E(p)
    double residual = 0.0;  // |sum - log(z)/2|
};

std::vector<HalfDimRow> half_dim_check(i64 d_pos, i64 e, const std::vector<double>& zs);

struct OmegaResult {
    double omega = 0.0;            // c = 1
    double omega_truncated = 0.0;  // only Q delta <= (log X)^15
    double truncation_bound = 0.0; // 1 / log^6 X
    std::vector<std::size_t> l_sizes;  // |L| for delta = 1, 2
    std::vector<i64> moduli;           // Q delta for delta = 1, 2
};

OmegaResult omega_D(const QuadForm& f, i64 a, double x = 1e7);

nlohmann::json constants_json(i64 d, i64 a, i64 truncation);

}  // namespace genuslab
