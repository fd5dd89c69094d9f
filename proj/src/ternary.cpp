#include "qrkit/ternary.hpp"
#include "qrkit/arithmetic.hpp"
#include "qrkit/errors.hpp"

#include <cstdlib>
#include <numeric>
#include <string>

namespace qrkit::ternary {

using arithmetic::factorize;
using arithmetic::isqrt64;
using arithmetic::legendre_symbol_unchecked;

namespace {

constexpr int64_t kCoeffLimit = 1'000'000;

bool squarefree(int64_t v)
{
    for (const auto& [p, e] : factorize(static_cast<uint64_t>(std::abs(v))))
        if (e > 1)
            return false;
    return true;
}

// is v a quadratic residue modulo every odd prime dividing |m|?
// (gcd(v, m) = 1 is guaranteed by pairwise coprimality; powers of 2 never
// obstruct at this level)
bool qr_mod_squarefree(int64_t v, int64_t m)
{
    uint64_t am = static_cast<uint64_t>(std::abs(m));
    if (am == 1)
        return true;
    for (const auto& [p, e] : factorize(am)) {
        (void)e;
        if (p == 2)
            continue;
        if (legendre_symbol_unchecked(v, p) != 1)
            return false;
    }
    return true;
}

} // namespace

void validate(const TernaryForm& f)
{
    for (int64_t v : {f.a, f.b, f.c}) {
        if (v == 0)
            throw PreconditionError("ternary form has a zero coefficient");
        if (std::abs(v) > kCoeffLimit)
            throw PreconditionError("ternary coefficient beyond desk scale");
    }
    if (!squarefree(f.a) || !squarefree(f.b) || !squarefree(f.c))
        throw PreconditionError("ternary coefficients must be squarefree");
    if (std::gcd(f.a, f.b) != 1 || std::gcd(f.b, f.c) != 1 || std::gcd(f.a, f.c) != 1)
        throw PreconditionError("ternary coefficients must be pairwise coprime");
}

SolvabilityReport ternary_conditions(const TernaryForm& f)
{
    validate(f);
    SolvabilityReport r;
    r.residue_a = qr_mod_squarefree(-f.b * f.c, f.a);
    r.residue_b = qr_mod_squarefree(-f.c * f.a, f.b);
    r.residue_c = qr_mod_squarefree(-f.a * f.b, f.c);
    const bool any_pos = f.a > 0 || f.b > 0 || f.c > 0;
    const bool any_neg = f.a < 0 || f.b < 0 || f.c < 0;
    r.sign_condition = any_pos && any_neg;
    return r;
}

std::optional<std::array<int64_t, 3>> ternary_solve(const TernaryForm& f)
{
    validate(f);
    // Any solvable form has a solution inside |x| <= sqrt|bc|,
    // |y| <= sqrt|ac|, |z| <= sqrt|ab|; the equation is even in each
    // variable, so scanning the nonnegative quadrant with z derived from
    // (x, y) is exhaustive.
    const auto X = static_cast<int64_t>(isqrt64(static_cast<uint64_t>(std::abs(f.b * f.c))));
    const auto Y = static_cast<int64_t>(isqrt64(static_cast<uint64_t>(std::abs(f.a * f.c))));
    for (int64_t x = 0; x <= X; ++x) {
        for (int64_t y = 0; y <= Y; ++y) {
            const int64_t r = f.a * x * x + f.b * y * y;
            if (r % f.c)
                continue;
            const int64_t q = -r / f.c;
            if (q < 0)
                continue;
            uint64_t z;
            if (!arithmetic::is_square64(static_cast<uint64_t>(q), &z))
                continue;
            if (x == 0 && y == 0 && z == 0)
                continue;
            std::array<int64_t, 3> w{x, y, static_cast<int64_t>(z)};
            const int64_t g = std::gcd(std::gcd(w[0], w[1]), w[2]);
            for (auto& v : w)
                v /= g;
            return w;
        }
    }
    return std::nullopt;
}

bool mod4_obstruction(const TernaryForm& f)
{
    validate(f);
    auto r4 = [](int64_t v) { return ((v % 4) + 4) % 4; };
    return r4(f.a) == 1 && r4(f.b) == 1 && r4(f.c) == 1;
}

ReciprocityReport verify_reciprocity_cases(uint64_t limit)
{
    if (limit < 7)
        throw PreconditionError("case sweep needs limit >= 7");

    // p, q odd primes; hypothesis symbol (p/q), conclusion (q/p). Each
    // ordered pair falls in exactly one row of the eight-case table:
    //   (1,3): (p/q) = -1 -> I expects -1;   +1 -> VII expects +1
    //   (3,1): (p/q) = +1 -> II expects +1;  -1 -> VIII expects -1
    //   (3,3): (p/q) = +1 -> III expects -1; -1 -> IV  expects +1
    //   (1,1): (p/q) = +1 -> V  expects +1;  -1 -> VI  expects -1
    const std::vector<uint64_t> primes = arithmetic::primes_in_range(3, limit - 1);

    ReciprocityReport rep;
    rep.prime_count = primes.size();
    for (uint64_t p : primes) {
        for (uint64_t q : primes) {
            if (p == q)
                continue;
            ++rep.pair_count;
            const int hyp = legendre_symbol_unchecked(static_cast<int64_t>(p), q);
            const int con = legendre_symbol_unchecked(static_cast<int64_t>(q), p);
            int idx;
            int expected;
            if (p % 4 == 1 && q % 4 == 3) {
                idx = hyp == -1 ? 0 : 6; // I or VII
                expected = hyp;
            } else if (p % 4 == 3 && q % 4 == 1) {
                idx = hyp == 1 ? 1 : 7; // II or VIII
                expected = hyp;
            } else if (p % 4 == 3 && q % 4 == 3) {
                idx = hyp == 1 ? 2 : 3; // III or IV
                expected = -hyp;
            } else {
                idx = hyp == 1 ? 4 : 5; // V or VI
                expected = hyp;
            }
            ++rep.case_counts[static_cast<size_t>(idx)];
            if (con != expected)
                rep.violations.push_back({p, q, idx});
        }
    }
    return rep;
}

} // namespace qrkit::ternary
