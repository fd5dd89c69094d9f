#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace qrkit::pell {

using BigInt = boost::multiprecision::cpp_int;

// Fundamental (least positive) solution of T^2 - D*U^2 = 1.
struct PellSolution {
    uint64_t D = 0;
    BigInt T, U;
};

// Continued-fraction expansion of sqrt(D); exact integer arithmetic
// throughout, result verified against the Pell equation before returning.
// D must be >= 2 and not a perfect square.
PellSolution fundamental_pell(uint64_t D);

// helpers for big integers
bool is_square(const BigInt& n, BigInt* root = nullptr);
double log_double(const BigInt& n); // natural log of n > 0, accurate to ~1e-15 relative

// ln(T + U*sqrt(D)) for a Pell solution; T + U*sqrt(D) = T + sqrt(T^2 - 1),
// so for large T this is ln(2T) to well below double precision.
double log_fundamental_unit(const PellSolution& s);

// ---- two-prime classification -------------------------------------------
//
// For distinct primes b, B, both = 3 (mod 4): the fundamental solution of
// T^2 - (bB) U^2 = 1 has T odd, U even, and exactly one of
//      b M^2 - B N^2 = 1      (first_prime_leads)
//      B M^2 - b N^2 = 1      (second_prime_leads)
// is solvable with (M, N) read off from the split
// (T+1)/2 * (T-1)/2 = bB * (U/2)^2 into coprime halves. The two remaining
// conceivable splits (neither prime on the +1 side, or both) are impossible;
// if one ever showed up it would sink the whole construction, so they raise
// InvariantViolation instead of being mapped to anything.

enum class TwoPrimeCase {
    first_prime_leads,  // b M^2 - B N^2 = 1
    second_prime_leads, // B M^2 - b N^2 = 1
};

struct TwoPrimeCaseResult {
    TwoPrimeCase which;
    uint64_t b, B;
    BigInt M, N;
    PellSolution pell;

    std::string equation() const; // e.g. "7*M^2 - 3*N^2 = 1 with (M,N) = (2,3)"
};

TwoPrimeCaseResult classify_two_prime_case(uint64_t b, uint64_t B);

// ---- six-equation solver --------------------------------------------------
//
// For a prime a = 1 (mod 4) and distinct primes b, beta = 3 (mod 4), exactly
// one of the six equations
//      a M^2 - b*beta N^2 = +-1
//      b M^2 - a*beta N^2 = +-1
//   beta M^2 -   a*b N^2 = +-1
// has a solution. Search order is deterministic: families in the order
// listed, sign +1 before -1, M ascending. If the bounded search comes up
// empty, the solver falls back to splitting the Pell solution of
// D = a*b*beta, which is exhaustive (and flags which route produced the
// answer). The fallback reuses the (T+-1)/2 split: the singleton side
// determines the family, the side carrying the lone factor the sign.

enum class SixFamily {
    a_vs_bbeta,  // a M^2 - (b*beta) N^2 = sign
    b_vs_abeta,  // b M^2 - (a*beta) N^2 = sign
    beta_vs_ab,  // beta M^2 - (a*b) N^2 = sign
};

enum class SixMethod { bounded_search, pell_split };

struct SixEquationResult {
    SixFamily family;
    int sign; // +1 or -1
    BigInt M, N;
    uint64_t a, b, beta;
    SixMethod method;

    // coefficient pair (u, v) with u M^2 - v N^2 = sign
    std::pair<uint64_t, uint64_t> coefficients() const;
    std::string equation() const; // e.g. "5*M^2 - 21*N^2 = -1"
};

SixEquationResult solve_six_equations(uint64_t a, uint64_t b, uint64_t beta,
                                      uint64_t search_bound = 10000);

} // namespace qrkit::pell
