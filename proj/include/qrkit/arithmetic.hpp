#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace qrkit::arithmetic {

// ---- modular helpers --------------------------------------------------

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m);

// Deterministic Miller-Rabin, exact for all n < 2^64.
bool is_prime(uint64_t n);

// ---- integer square roots ---------------------------------------------

uint64_t isqrt64(uint64_t n);                 // floor(sqrt(n))
bool is_square64(uint64_t n, uint64_t* root = nullptr);

// ---- quadratic residue symbols ----------------------------------------

// Legendre symbol (a/p). Evaluated by Euler's criterion, i.e. a modular
// exponentiation mod p -- deliberately *not* by the reciprocity recursion,
// so that symbol values are an independent input to everything downstream
// that tests reciprocity rather than a restatement of it.
// p must be an odd prime; validation costs one primality test.
int legendre_symbol(int64_t a, uint64_t p);
int legendre_symbol_unchecked(int64_t a, uint64_t p); // caller owns the precondition

// Jacobi symbol (D/n) for odd n >= 1, via the factorization of n.
// Multiplicative closure of the Legendre symbol; keeps the same
// non-reciprocity evaluation discipline.
int jacobi_symbol(int64_t D, uint64_t n);

// ---- prime enumeration -------------------------------------------------

struct ResidueClassFilter {
    uint64_t modulus = 0;
    std::vector<uint64_t> allowed; // residues in [0, modulus)

    void validate() const; // throws PreconditionError
    bool accepts(uint64_t v) const;
};

// All primes <= limit by a plain sieve. Intended for small bases.
std::vector<uint32_t> simple_sieve(uint32_t limit);

// Segmented sieve over [lo, hi], calling fn(p) for each prime in order.
// Memory stays bounded by the segment size regardless of the range.
void for_primes(uint64_t lo, uint64_t hi, const std::function<void(uint64_t)>& fn);

std::vector<uint64_t> primes_in_range(uint64_t lo, uint64_t hi,
                                      const std::optional<ResidueClassFilter>& filter = {});

// ---- factoring ----------------------------------------------------------

// smallest prime factor for every n <= limit (spf[0] = spf[1] = 0)
std::vector<uint32_t> smallest_factor_table(uint32_t limit);

// Trial-division factorization, (prime, exponent) pairs in ascending order.
// Desk-scale only: cost is O(sqrt(n)).
std::vector<std::pair<uint64_t, int>> factorize(uint64_t n);

} // namespace qrkit::arithmetic
