#pragma once

#include <cstdint>
#include <vector>

namespace qrkit::witness {

// Witness machinery for the nonresidue lemma: every prime a = 1 (mod 4) has
// a prime beta = 3 (mod 4) with (a/beta) = -1, and the refinement that the
// minimal such beta is smaller than a. Plus the x^2 + p = B*b' descent that
// proves the refinement, and the ln p / p prime sums split by residue class
// and symbol value.

struct WitnessResult {
    enum class Method { direct_search, easy_construction, descent };

    uint64_t a = 0;    // prime = 1 (mod 4)
    uint64_t beta = 0; // prime = 3 (mod 4) with (a/beta) = -1
    Method method = Method::direct_search;
};

const char* method_name(WitnessResult::Method m); // "direct-search", ...

// Smallest prime beta = 3 (mod 4) with (a/beta) = -1. The lemma guarantees
// one exists; running past the ceiling throws SearchExhausted (never a
// claim of nonexistence).
WitnessResult find_witness(uint64_t a, uint64_t ceiling = 1000000);

// For a = 5 (mod 8): 1 + a = 2 * ((1+a)/2) with (1+a)/2 = 3 (mod 4), so
// (1+a)/2 has a prime divisor beta = 3 (mod 4), and a = -1 (mod beta) makes
// a a nonresidue of it. Returns the smallest such divisor.
WitnessResult easy_witness(uint64_t a);

// is the minimal witness below a? (expected always; a false return is a
// reportable counterexample, not an error)
struct WitnessBelow {
    bool below = false;
    WitnessResult witness;
};
WitnessBelow witness_below_check(uint64_t a, uint64_t ceiling = 1000000);

// ---- descent --------------------------------------------------------------

struct DescentStep {
    uint64_t x = 0;       // even, with x^2 + p = B * b_prime
    uint64_t B = 0;       // prime = 3 (mod 4), (-p/B) = +1
    uint64_t b_prime = 0; // the exact cofactor
};

struct DescentChain {
    uint64_t p = 0; // prime = 1 (mod 8)
    std::vector<DescentStep> steps;
    uint64_t terminal = 0; // prime = 3 (mod 4), terminal < p, (p/terminal) = -1
};

// From B_start = 3 (mod 4) with (-p/B_start) = +1, repeatedly solve
// x^2 = -p (mod B) with x even, split off from b' = (x^2 + p)/B the largest
// prime factor B' = 3 (mod 4) below B with (-p/B') = +1, and recurse until
// the prime drops below p. The B-sequence decreasing strictly is the content
// of the descent argument; a non-decreasing step would falsify it and
// throws InvariantViolation. B_start < p returns the empty chain.
DescentChain teege_descent(uint64_t p, uint64_t B_start);

WitnessResult witness_from_descent(const DescentChain& chain);

// ---- ln p / p sums ---------------------------------------------------------

struct SievedSum {
    double value = 0.0;
    double reference = 0.0; // the comparison line (ln x or ln x / 2)
    double deviation = 0.0; // value - reference
    uint64_t terms = 0;
};

// sum of ln p / p over odd primes p <= x, p not dividing D, with (D/p) = +1;
// reference line ln(x)/2
SievedSum selberg_sum(int64_t D, uint64_t x);

// sum of ln p / p over ALL primes p <= x; reference line ln(x)
SievedSum mertens_sum(uint64_t x);

// The four-way split of selberg-type sums by p mod 4 and symbol sign, one
// sieve pass. Each call also re-evaluates (-D/p) per prime and verifies the
// structural relation (-D/p) = (D/p) for p = 1 (mod 4), = -(D/p) for
// p = 3 (mod 4), which is exactly the D -> -D swap property of the four
// sums; a violation throws InvariantViolation.
struct RogersSums {
    int64_t D = 0;
    uint64_t x = 0;
    double s1_plus = 0.0, s1_minus = 0.0, s3_plus = 0.0, s3_minus = 0.0;
    uint64_t n1_plus = 0, n1_minus = 0, n3_plus = 0, n3_minus = 0; // term counts
    double quarter_ln_x = 0.0;
};
RogersSums rogers_partition(int64_t D, uint64_t x);

} // namespace qrkit::witness
