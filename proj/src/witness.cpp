#include "qrkit/witness.hpp"

#include "qrkit/arithmetic.hpp"
#include "qrkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace qrkit::witness {

using arithmetic::factorize;
using arithmetic::for_primes;
using arithmetic::is_prime;
using arithmetic::legendre_symbol_unchecked;
using arithmetic::powmod;
using arithmetic::primes_in_range;
using arithmetic::ResidueClassFilter;

namespace {

constexpr uint64_t kDescentPrimeLimit = uint64_t{1} << 20;
constexpr uint64_t kDescentStartLimit = uint64_t{1} << 26;
constexpr int kDescentStepLimit = 10000;

void require_1mod4_prime(uint64_t a)
{
    if (!is_prime(a) || a % 4 != 1)
        throw PreconditionError("witness search needs a prime = 1 (mod 4), got " +
                                std::to_string(a));
}

} // namespace

const char* method_name(WitnessResult::Method m)
{
    switch (m) {
    case WitnessResult::Method::direct_search: return "direct-search";
    case WitnessResult::Method::easy_construction: return "easy-construction";
    case WitnessResult::Method::descent: return "descent";
    }
    return "?";
}

WitnessResult find_witness(uint64_t a, uint64_t ceiling)
{
    require_1mod4_prime(a);
    if (ceiling < 3)
        throw PreconditionError("witness ceiling must be >= 3");

    WitnessResult out;
    out.a = a;
    out.method = WitnessResult::Method::direct_search;

    const ResidueClassFilter filter{4, {3}};
    constexpr uint64_t kSegment = uint64_t{1} << 20;
    for (uint64_t lo = 3; lo <= ceiling; lo += kSegment) {
        const uint64_t hi = std::min(ceiling, lo + kSegment - 1);
        for (const uint64_t beta : primes_in_range(lo, hi, filter)) {
            if (legendre_symbol_unchecked(static_cast<int64_t>(a), beta) == -1) {
                out.beta = beta;
                return out;
            }
        }
    }
    throw SearchExhausted("no nonresidue prime = 3 (mod 4) found for " + std::to_string(a) +
                          " below " + std::to_string(ceiling) +
                          "; raise the ceiling (existence is guaranteed)");
}

WitnessResult easy_witness(uint64_t a)
{
    require_1mod4_prime(a);
    if (a % 8 != 5)
        throw PreconditionError("the 1+a construction needs a = 5 (mod 8), got " +
                                std::to_string(a));

    // (1+a)/2 = 3 (mod 4), so some prime divisor is = 3 (mod 4); a = -1 (mod
    // beta) then forces (a/beta) = (-1/beta) = -1. Pick the smallest divisor.
    const uint64_t half = (1 + a) / 2;
    WitnessResult out;
    out.a = a;
    out.method = WitnessResult::Method::easy_construction;
    for (const auto& [q, e] : factorize(half)) {
        (void)e;
        if (q % 4 == 3) {
            out.beta = q;
            break;
        }
    }
    if (out.beta == 0)
        throw InvariantViolation("1 + " + std::to_string(a) +
                                 " has no prime divisor = 3 (mod 4); impossible for a = 5 (mod 8)");
    if (legendre_symbol_unchecked(static_cast<int64_t>(a), out.beta) != -1)
        throw InvariantViolation("(" + std::to_string(a) + "/" + std::to_string(out.beta) +
                                 ") != -1 though " + std::to_string(out.beta) +
                                 " divides 1 + a; impossible");
    return out;
}

WitnessBelow witness_below_check(uint64_t a, uint64_t ceiling)
{
    WitnessBelow out;
    out.witness = find_witness(a, ceiling);
    out.below = out.witness.beta < a;
    return out;
}

// ---- descent --------------------------------------------------------------

DescentChain teege_descent(uint64_t p, uint64_t B_start)
{
    if (!is_prime(p) || p % 8 != 1)
        throw PreconditionError("descent needs a prime p = 1 (mod 8), got " + std::to_string(p));
    if (p > kDescentPrimeLimit || B_start > kDescentStartLimit)
        throw PreconditionError("descent inputs beyond the supported range");
    if (!is_prime(B_start) || B_start % 4 != 3)
        throw PreconditionError("descent start must be a prime = 3 (mod 4)");
    if (legendre_symbol_unchecked(-static_cast<int64_t>(p), B_start) != 1)
        throw PreconditionError("descent start needs (-p/B) = +1");

    DescentChain chain;
    chain.p = p;

    uint64_t B = B_start;
    while (B > p) {
        if (chain.steps.size() >= kDescentStepLimit)
            throw InvariantViolation("descent did not terminate; the decrease argument failed");

        // modular square root of -p: B = 3 (mod 4), so v^((B+1)/4) works
        const uint64_t v = (B - p % B) % B;
        uint64_t x = powmod(v, (B + 1) / 4, B);
        if (arithmetic::mulmod(x, x, B) != v)
            throw InvariantViolation("(-p/B) = +1 but the square root of -p (mod B) failed");
        if (x % 2 != 0)
            x = B - x; // B odd: exactly one of x, B - x is even
        const uint64_t b_prime = (x * x + p) / B;
        if (x * x + p != b_prime * B)
            throw InvariantViolation("descent arithmetic: B does not divide x^2 + p");
        chain.steps.push_back({x, B, b_prime});

        // Split b' into a next prime: drop any factors of p, then take the
        // largest prime factor = 3 (mod 4) with (-p/q) = +1 strictly below B.
        // x even and p = B*b' - x^2 force b' = 3 (mod 4) after stripping p
        // (p = 1 (mod 4)), so a qualifying factor must exist.
        uint64_t rest = b_prime;
        while (rest % p == 0)
            rest /= p;
        uint64_t next = 0;
        for (const auto& [q, e] : factorize(rest)) {
            (void)e;
            if (q % 4 != 3 || q >= B)
                continue;
            if (legendre_symbol_unchecked(-static_cast<int64_t>(p), q) != 1)
                continue;
            next = std::max(next, q);
        }
        if (next == 0)
            throw InvariantViolation(
                "no admissible prime below B divides x^2 + p; the descent claim failed at B = " +
                std::to_string(B));
        B = next;
    }

    chain.terminal = B;
    if (legendre_symbol_unchecked(static_cast<int64_t>(p), B) != -1)
        throw InvariantViolation("descent terminal " + std::to_string(B) +
                                 " is not a nonresidue witness for " + std::to_string(p));
    return chain;
}

WitnessResult witness_from_descent(const DescentChain& chain)
{
    WitnessResult out;
    out.a = chain.p;
    out.beta = chain.terminal;
    out.method = WitnessResult::Method::descent;
    return out;
}

// ---- ln p / p sums ---------------------------------------------------------

SievedSum selberg_sum(int64_t D, uint64_t x)
{
    if (x < 2)
        throw PreconditionError("sum bound must be >= 2");
    if (D == 0 || (D > 0 && arithmetic::is_square64(static_cast<uint64_t>(D))))
        throw PreconditionError("D must be a nonsquare nonzero integer");

    SievedSum out;
    const uint64_t absD = static_cast<uint64_t>(std::abs(D));
    for_primes(3, x, [&](uint64_t p) {
        if (absD % p == 0)
            return;
        if (legendre_symbol_unchecked(D, p) != 1)
            return;
        out.value += std::log(static_cast<double>(p)) / static_cast<double>(p);
        ++out.terms;
    });
    out.reference = 0.5 * std::log(static_cast<double>(x));
    out.deviation = out.value - out.reference;
    return out;
}

SievedSum mertens_sum(uint64_t x)
{
    if (x < 2)
        throw PreconditionError("sum bound must be >= 2");
    SievedSum out;
    for_primes(2, x, [&](uint64_t p) {
        out.value += std::log(static_cast<double>(p)) / static_cast<double>(p);
        ++out.terms;
    });
    out.reference = std::log(static_cast<double>(x));
    out.deviation = out.value - out.reference;
    return out;
}

RogersSums rogers_partition(int64_t D, uint64_t x)
{
    if (x < 2)
        throw PreconditionError("sum bound must be >= 2");
    if (D == 0 || (D > 0 && arithmetic::is_square64(static_cast<uint64_t>(D))))
        throw PreconditionError("D must be a nonsquare nonzero integer");

    RogersSums out;
    out.D = D;
    out.x = x;
    out.quarter_ln_x = 0.25 * std::log(static_cast<double>(x));

    const uint64_t absD = static_cast<uint64_t>(std::abs(D));
    for_primes(3, x, [&](uint64_t p) {
        if (absD % p == 0)
            return;
        const int sp = legendre_symbol_unchecked(D, p);
        const int sm = legendre_symbol_unchecked(-D, p);
        // (-1/p) = +1 or -1 by p mod 4; its failure would break the whole
        // four-sum bookkeeping, so check it on every prime
        const int expected = p % 4 == 1 ? sp : -sp;
        if (sm != expected)
            throw InvariantViolation("(-D/p) != (-1/p)(D/p) at p = " + std::to_string(p));
        const double term = std::log(static_cast<double>(p)) / static_cast<double>(p);
        if (p % 4 == 1) {
            if (sp == 1) {
                out.s1_plus += term;
                ++out.n1_plus;
            } else {
                out.s1_minus += term;
                ++out.n1_minus;
            }
        } else {
            if (sp == 1) {
                out.s3_plus += term;
                ++out.n3_plus;
            } else {
                out.s3_minus += term;
                ++out.n3_minus;
            }
        }
    });
    return out;
}

} // namespace qrkit::witness
