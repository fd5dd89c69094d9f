#pragma once

#include "qrkit/quadform.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace qrkit::series {

// Truncated lattice zeta sums over form classes, splitting-prime Euler
// products, and the numeric checks tying them together: the expansion
// identity (class sums = w * sum 2^mu / m^s = w * product), the fundamental
// identity (coprime class sums = k * zeta-like factor * product), the class
// number formulas via an epsilon schedule standing in for s -> 1, the
// h-ratio identity for p = 1 (mod 4), the L-series cross-check, and the
// divergence of the product over primes B = 3 (mod 4).

struct SeriesParams {
    double s = 2.0;                 // series exponent, strictly > 1
    uint64_t lattice_cutoff = 1000; // sum over lattice points with 0 < Q(x,y) <= M
    uint64_t prime_cutoff = 1000;   // products over primes p <= P
    uint64_t n_cutoff = 1000;       // the n-series runs over n <= N

    void validate() const; // throws PreconditionError
};

struct SeriesEvaluation {
    double value = 0.0;
    uint64_t terms_used = 0;
    double tail_bound = 0.0;       // estimate of what the truncation dropped
    bool tail_is_heuristic = true; // false only when tail_bound is rigorous
};

// The s -> 1 limit is realized as s = 1 + eps over this halving schedule
// plus linear extrapolation in eps; a true limit is not computable at desk
// scale. Every value is dyadic so the pow kernels take their fast path.
std::vector<double> default_eps_schedule(); // {0.5, 0.25, 0.125, 0.0625}

// Sum of 1/Q(x,y)^s over every class representative and all lattice points
// with 0 < Q(x,y) <= lattice_cutoff. proper_only keeps gcd(x,y) = 1 pairs
// (via Moebius inversion over scaled cutoffs, so the kernels still do the
// work); coprime_to_2D keeps values coprime to 2D (requires 4 | d). For
// d > 0 the sum runs over the cone y >= 1, U(2ax + by) >= 2Ty, which meets
// every automorph orbit exactly once; the Pell solution for D = d/4 is
// computed internally.
SeriesEvaluation epstein_partial(const quadform::ClassSet& classes, const SeriesParams& params,
                                 bool proper_only, bool coprime_to_2D);

// Exact integer companion to epstein_partial: how often each value
// m <= lattice_cutoff is hit, as a map value -> count (zero counts
// omitted). Slow (per-value enumeration) and capped at cutoff 10^5;
// intended for cross-checking the counting dichotomy and term patterns.
std::map<int64_t, uint64_t> epstein_term_counts(const quadform::ClassSet& classes,
                                                int64_t lattice_cutoff, bool proper_only,
                                                bool coprime_to_2D);

// Product of (1 + p^-s)/(1 - p^-s) over primes p <= prime_cutoff with
// p not dividing 2D and (D/p) = +1. mod4_restrict = 1 or 3 additionally
// keeps only p in that class mod 4 (0 = no restriction); the restricted
// variants exist to exercise the cancellation of the shared p = 1 (mod 4)
// factors between the +D and -D products.
SeriesEvaluation splitting_euler_product(int64_t D, const SeriesParams& params,
                                         int mod4_restrict = 0);

// w * sum of 2^mu(m)/m^s over m <= lattice_cutoff composed only of
// qualifying primes <= prime_cutoff, against w * the truncated product.
struct ExpansionCheck {
    double sum_side = 0.0;
    double product_side = 0.0;
    double residual = 0.0; // |sum - product| / product
};
ExpansionCheck dirichlet_series_expansion_check(int64_t D, const SeriesParams& params);

// Sum of n^(-2s) over n <= n_cutoff with gcd(n, 2D) = 1. Rigorous tail
// bound (integral comparison).
SeriesEvaluation coprime_zeta(int64_t D, const SeriesParams& params);

// Coprime-filtered class sums against k * coprime_zeta * splitting product,
// k = 2 for d < 0 and k = 1 for d > 0. Requires 4 | d.
struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0; // |lhs - rhs| / rhs
};
IdentityCheck fundamental_identity_check(const quadform::Discriminant& d,
                                         const SeriesParams& params);

// (s - 1) * (full, unfiltered class sums) evaluated at s = 1 + eps over the
// schedule, tail-completed by the empirical point density, extrapolated
// linearly to eps = 0, and compared against the closed form
//   d < 0:  h * 2*pi / sqrt(|d|)
//   d > 0:  h * ln(T + U*sqrt(D)) / (2*sqrt(D)),  D = d/4 (requires 4 | d).
struct FormulaCheck {
    std::vector<double> eps;
    std::vector<double> scaled;  // the tail-completed (s-1)-scaled values
    double extrapolated = 0.0;
    double closed_form = 0.0;
    double relative_deviation = 0.0;
    bool monotone = true; // extrapolation trustworthy only if the scaled
                          // sequence moved monotonically
};
FormulaCheck class_number_formula_check(const quadform::Discriminant& d,
                                        const std::vector<double>& eps_schedule);

// Partial sum of (D/n)/n over odd n <= N (the Jacobi symbol vanishes on
// gcd(n, D) > 1), stabilized by averaging the last two partial sums.
// Faster-converging independent check on the class number.
SeriesEvaluation l_series_crosscheck(int64_t D, uint64_t N);
double l_series_closed_form(int64_t D); // h*pi/(2 sqrt|D|), resp. the d > 0 form above

// Both sides of the h-ratio identity for p = 1 (mod 4):
// LHS = h(4p) * ln(T + U*sqrt(p)) / (h(-4p) * 2*pi) from exact class data,
// RHS = product(+p) / (2 * product(-p)) at s = 1 + eps over the schedule.
struct TeegeCheck {
    double lhs = 0.0;
    std::vector<double> eps;
    std::vector<double> rhs;       // ratio at each eps
    std::vector<double> deviation; // |rhs - lhs| at each eps
    double rhs_extrapolated = 0.0;
    bool deviation_decreasing = false; // strict decrease along the schedule
};
TeegeCheck teege_identity_check(uint64_t p, const SeriesParams& params);

// Smallest prime cutoff P* with (1/2) * product over primes B <= P*,
// B = 3 (mod 4), of (1 + 1/B)/(1 - 1/B) exceeding the target; the halved
// harmonic minorant sum (1/2) * sum 1/B is reported alongside. Hitting the
// ceiling is reported as incomplete, never as evidence the product stays
// bounded (it does not).
struct DivergenceWitness {
    bool complete = false;
    uint64_t p_star = 0;
    double half_product = 0.0;
    double half_minorant = 0.0;
    std::vector<uint64_t> leading_primes; // first qualifying primes (up to 8)
};
DivergenceWitness divergence_witness(double target, uint64_t ceiling = 100000000);

} // namespace qrkit::series
