#pragma once

// Independent re-derivations used only by the tests. Each one avoids the
// algorithm the library uses for the same question, so agreement means two
// different routes reached the same answer:
//
//   * symbol_by_square_table  -- literal residue table, no exponentiation
//   * pell_by_scan            -- brute scan over U, capped
//   * pell_by_chakravala      -- composition/descent, not continued fractions
//   * definite_class_count    -- connected components of the one-step move
//                                graph (S, T, T^-1), not reduction
//   * proper_count_by_scan    -- rectangle scan with a gcd per point

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracles {

using BigInt = boost::multiprecision::cpp_int;

// (a/p) from an exhaustive table of the squares mod p. O(p) memory and time.
int symbol_by_square_table(int64_t a, uint64_t p);

// Least U in [1, cap] with D*U^2 + 1 a perfect square, or nothing.
std::optional<std::pair<uint64_t, uint64_t>> pell_by_scan(uint64_t D, uint64_t cap);

// Fundamental solution of T^2 - D U^2 = 1 by the chakravala method.
std::pair<BigInt, BigInt> pell_by_chakravala(uint64_t D);

// h(d) for d < 0 as the number of connected components of the graph whose
// vertices are the primitive positive definite forms of discriminant d with
// a, c <= |d| and |b| <= 2|d|, and whose edges are single applications of
// (a,b,c) -> (c,-b,a) and (a,b,c) -> (a, b +- 2a, a +- b + c). Every
// reduction path stays inside that box (|b| only shrinks under the T steps
// taken toward reduction, and c = (b^2 + |d|)/(4a) shrinks with it), so the
// components are exactly the proper equivalence classes.
uint64_t definite_class_count(int64_t d);

// Proper representations of n by a x^2 + b x y + c y^2 (positive definite),
// counted over the whole plane by scanning the exact completed-square ranges
// |x| <= sqrt(4cn/|d|), |y| <= sqrt(4an/|d|).
uint64_t proper_count_by_scan(int64_t a, int64_t b, int64_t c, int64_t n);

// Naive primality by trial division, for cross-checking the sieves.
bool prime_by_trial_division(uint64_t n);

} // namespace oracles
