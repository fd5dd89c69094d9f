#include "qrkit/quadform.hpp"
#include "qrkit/arithmetic.hpp"
#include "qrkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace qrkit::quadform {

using arithmetic::is_square64;
using arithmetic::isqrt64;
using pell::BigInt;

namespace {

using i128 = __int128;

// Coefficient and value guards keep every intermediate inside i128 (and the
// common paths inside int64). Desk-scale arithmetic, checked loudly.
constexpr int64_t kCoeffLimit = int64_t(1) << 20;
constexpr int64_t kValueLimit = int64_t(1) << 40;

int64_t floor_div(int64_t n, int64_t d) // d > 0
{
    int64_t q = n / d;
    if (n % d != 0 && n < 0)
        --q;
    return q;
}

int64_t ceil_div(int64_t n, int64_t d) // d > 0
{
    int64_t q = n / d;
    if (n % d != 0 && n > 0)
        ++q;
    return q;
}

BigInt ceil_div_big(const BigInt& n, const BigInt& d) // d > 0
{
    BigInt q = n / d; // truncates toward zero
    if (n % d != 0 && n > 0)
        ++q;
    return q;
}

i128 isqrt_i128(i128 v)
{
    if (v < 0)
        throw PreconditionError("isqrt of a negative value");
    auto r = static_cast<i128>(std::sqrt(static_cast<long double>(v)));
    while (r > 0 && r * r > v)
        --r;
    while ((r + 1) * (r + 1) <= v)
        ++r;
    return r;
}

bool is_square_i128(i128 v, i128* root)
{
    if (v < 0)
        return false;
    i128 r = isqrt_i128(v);
    if (r * r != v)
        return false;
    if (root)
        *root = r;
    return true;
}

void check_coeffs(const QuadForm& q)
{
    if (std::abs(q.a) >= kCoeffLimit || std::abs(q.b) >= kCoeffLimit || std::abs(q.c) >= kCoeffLimit)
        throw PreconditionError("form " + q.str() + ": coefficients beyond desk scale (2^20)");
}

} // namespace

std::string QuadForm::str() const
{
    std::ostringstream os;
    os << "(" << a << "," << b << "," << c << ")";
    return os.str();
}

Discriminant make_discriminant(int64_t d)
{
    int64_t r4 = ((d % 4) + 4) % 4;
    if (r4 != 0 && r4 != 1)
        throw PreconditionError("discriminant " + std::to_string(d) + " is not 0 or 1 mod 4");
    if (d == 0)
        throw PreconditionError("discriminant must be nonzero");
    if (d > 0 && is_square64(static_cast<uint64_t>(d)))
        throw PreconditionError("discriminant " + std::to_string(d) +
                                " is a perfect square; such forms factor into linear parts");
    Discriminant out;
    out.d = d;
    if (r4 == 0)
        out.determinant = d / 4;
    return out;
}

Discriminant discriminant(const QuadForm& q)
{
    check_coeffs(q);
    return make_discriminant(q.b * q.b - 4 * q.a * q.c);
}

int64_t determinant_to_discriminant(int64_t D)
{
    if (std::abs(D) > (int64_t(1) << 60))
        throw PreconditionError("determinant out of range");
    return 4 * D;
}

bool is_primitive(const QuadForm& q)
{
    return std::gcd(std::gcd(q.a, q.b), q.c) == 1;
}

int unit_count(int64_t d)
{
    make_discriminant(d);
    if (d == -3)
        return 6;
    if (d == -4)
        return 4;
    return d < 0 ? 2 : 1;
}

// ---- reduction --------------------------------------------------------------

bool is_reduced_definite(const QuadForm& q)
{
    if (q.a <= 0 || q.c <= 0)
        return false;
    if (!(std::abs(q.b) <= q.a && q.a <= q.c))
        return false;
    if (q.b < 0 && (std::abs(q.b) == q.a || q.a == q.c))
        return false;
    return true;
}

bool is_reduced_indefinite(const QuadForm& q, int64_t d)
{
    // reduced  <=>  0 < b < sqrt(d)  and  |sqrt(d) - 2|a|| < b,
    // written squarefree-exactly (d is never a square here)
    if (q.b <= 0 || q.b * q.b >= d)
        return false;
    int64_t t = 2 * std::abs(q.a);
    if (d >= (t + q.b) * (t + q.b))
        return false;
    if (t > q.b && (t - q.b) * (t - q.b) >= d)
        return false;
    return true;
}

QuadForm rho_step(const QuadForm& q, int64_t d)
{
    if (q.c == 0)
        throw PreconditionError("rho_step: c = 0 means a square discriminant");
    const int64_t s = static_cast<int64_t>(isqrt64(static_cast<uint64_t>(d)));
    const int64_t ac = std::abs(q.c);
    const int64_t m = 2 * ac;
    // r = -b mod 2|c|, shifted into the window (hi - 2|c|, hi]
    const int64_t hi = ac > s ? ac : s;
    int64_t base = ((-q.b) % m + m) % m;
    int64_t r = base + m * floor_div(hi - base, m);
    QuadForm out;
    out.a = q.c;
    out.b = r;
    out.c = (r * r - d) / (4 * q.c);
    if (out.b * out.b - 4 * out.a * out.c != d)
        throw InvariantViolation("rho_step broke the discriminant of " + q.str());
    return out;
}

std::vector<QuadForm> reduction_cycle(const QuadForm& reduced, int64_t d)
{
    if (!is_reduced_indefinite(reduced, d))
        throw PreconditionError("reduction_cycle: " + reduced.str() + " is not reduced");
    std::vector<QuadForm> cycle{reduced};
    QuadForm f = reduced;
    for (;;) {
        f = rho_step(f, d);
        if (!is_reduced_indefinite(f, d))
            throw InvariantViolation("rho left the reduced cycle at " + f.str());
        if (f == reduced)
            return cycle;
        cycle.push_back(f);
        if (cycle.size() > 100000)
            throw InvariantViolation("reduction cycle of " + reduced.str() + " failed to close");
    }
}

namespace {

// translate b into (-a, a] keeping the class; a > 0
QuadForm translate_b(const QuadForm& q, int64_t d)
{
    const int64_t m = 2 * q.a;
    int64_t r = (q.b % m + m) % m; // [0, 2a)
    if (r > q.a)
        r -= m;
    QuadForm out{q.a, r, (r * r - d) / (4 * q.a)};
    return out;
}

QuadForm display_rep(const std::vector<QuadForm>& cycle, int64_t d)
{
    const QuadForm* best = nullptr;
    for (const auto& f : cycle) {
        if (f.a <= 0)
            continue;
        if (!best || f < *best)
            best = &f;
    }
    if (!best)
        throw InvariantViolation("reduction cycle contains no form with a > 0");
    return translate_b(*best, d);
}

} // namespace

QuadForm reduce(const QuadForm& q)
{
    Discriminant disc = discriminant(q);
    if (!is_primitive(q))
        throw PreconditionError("reduce: " + q.str() + " is imprimitive");
    const int64_t d = disc.d;

    if (d < 0) {
        if (q.a < 0)
            throw PreconditionError("reduce: " + q.str() +
                                    " is negative definite; pass its negation");
        QuadForm f = q;
        for (int iter = 0; iter < 10000; ++iter) {
            // normalize b into (-a, a]
            int64_t k = ceil_div(f.b - f.a, 2 * f.a);
            if (k != 0) {
                int64_t b2 = f.b - 2 * f.a * k;
                f.c = f.a * k * k - f.b * k + f.c;
                f.b = b2;
            }
            if (f.a > f.c) {
                f = QuadForm{f.c, -f.b, f.a};
                continue;
            }
            if (f.a == f.c && f.b < 0)
                f.b = -f.b;
            return f;
        }
        throw InvariantViolation("definite reduction of " + q.str() + " did not terminate");
    }

    // indefinite: rho until reduced, then pick the cycle's display form
    QuadForm f = q;
    for (int iter = 0; iter < 100000 && !is_reduced_indefinite(f, d); ++iter)
        f = rho_step(f, d);
    if (!is_reduced_indefinite(f, d))
        throw InvariantViolation("indefinite reduction of " + q.str() + " did not terminate");
    return display_rep(reduction_cycle(f, d), d);
}

// ---- class enumeration ------------------------------------------------------

namespace {

std::vector<QuadForm> reduced_definite_forms(int64_t d)
{
    std::vector<QuadForm> out;
    const int64_t ad = -d;
    for (int64_t a = 1; 3 * a * a <= ad; ++a) {
        for (int64_t b = (d % 2 == 0) ? 0 : 1; b <= a; b += 2) {
            const int64_t num = b * b + ad;
            if (num % (4 * a))
                continue;
            const int64_t c = num / (4 * a);
            if (c < a)
                continue;
            QuadForm f{a, b, c};
            if (!is_primitive(f))
                continue;
            out.push_back(f);
            if (b > 0 && b < a && c > a)
                out.push_back(QuadForm{a, -b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::set<QuadForm> reduced_indefinite_forms(int64_t d)
{
    std::set<QuadForm> out;
    const auto s = static_cast<int64_t>(isqrt64(static_cast<uint64_t>(d)));
    for (int64_t b = (d % 2 == 0) ? 2 : 1; b <= s; b += 2) {
        const int64_t prod = (b * b - d) / 4; // a*c, negative
        const int64_t ap = -prod;
        for (int64_t u = 1; u * u <= ap; ++u) {
            if (ap % u)
                continue;
            for (int64_t a : {u, ap / u}) {
                const int64_t c = prod / a;
                for (int sign : {+1, -1}) {
                    QuadForm f{sign * a, b, sign * c};
                    if (is_reduced_indefinite(f, d) && is_primitive(f))
                        out.insert(f);
                }
            }
        }
    }
    return out;
}

} // namespace

ClassSet class_number(int64_t d)
{
    ClassSet cs;
    cs.disc = make_discriminant(d);

    if (d < 0) {
        cs.representatives = reduced_definite_forms(d);
        return cs;
    }

    std::set<QuadForm> reduced = reduced_indefinite_forms(d);
    std::set<QuadForm> seen;
    for (const auto& f : reduced) {
        if (seen.count(f))
            continue;
        auto cycle = reduction_cycle(f, d);
        for (const auto& g : cycle) {
            if (!reduced.count(g))
                throw InvariantViolation("cycle member " + g.str() +
                                         " missing from the reduced enumeration of d = " +
                                         std::to_string(d));
            seen.insert(g);
        }
        cs.representatives.push_back(display_rep(cycle, d));
    }
    std::sort(cs.representatives.begin(), cs.representatives.end());
    return cs;
}

// ---- representations ----------------------------------------------------

bool in_automorph_domain(const QuadForm& q, const pell::PellSolution& pell, int64_t x, int64_t y)
{
    if (y <= 0)
        return false;
    // U * (2a x + b y) >= 2 T y, exact in big integers
    BigInt lhs = pell.U * (BigInt(2 * q.a) * x + BigInt(q.b) * y);
    BigInt rhs = BigInt(2) * pell.T * y;
    return lhs >= rhs;
}

int64_t automorph_min_x(const QuadForm& q, const pell::PellSolution& pell, int64_t y)
{
    if (q.a <= 0)
        throw PreconditionError("automorph domain needs a representative with a > 0");
    if (y <= 0)
        throw PreconditionError("automorph domain rows have y >= 1");
    // x >= y (2T - bU) / (2aU)
    BigInt num = BigInt(y) * (BigInt(2) * pell.T - BigInt(q.b) * pell.U);
    BigInt den = BigInt(2 * q.a) * pell.U;
    BigInt mx = ceil_div_big(num, den);
    if (mx > std::numeric_limits<int64_t>::max() || mx < std::numeric_limits<int64_t>::min())
        throw PreconditionError("automorph domain row bound exceeds int64");
    return mx.convert_to<int64_t>();
}

namespace {

void check_pell_matches(const Discriminant& disc, const pell::PellSolution& p)
{
    if (!disc.determinant || *disc.determinant <= 0 ||
        static_cast<uint64_t>(*disc.determinant) != p.D)
        throw PreconditionError("Pell data is for D = " + std::to_string(p.D) +
                                ", form has discriminant " + std::to_string(disc.d));
}

// solutions of q(x, y0) = m on one row, any x
void row_solutions(const QuadForm& q, int64_t m, int64_t y,
                   std::vector<std::pair<int64_t, int64_t>>& out)
{
    const i128 disc =
        i128(q.b * q.b - 4 * q.a * q.c) * y * y + i128(4) * q.a * m;
    i128 t;
    if (!is_square_i128(disc, &t))
        return;
    for (i128 tt : {t, -t}) {
        const i128 num = -i128(q.b) * y + tt;
        if (num % (2 * q.a))
            continue;
        const i128 x = num / (2 * q.a);
        if (x > std::numeric_limits<int64_t>::max() || x < std::numeric_limits<int64_t>::min())
            continue;
        out.emplace_back(static_cast<int64_t>(x), y);
        if (tt == 0)
            break; // double root, one x
    }
}

} // namespace

std::vector<std::pair<int64_t, int64_t>> proper_representations(const QuadForm& q, int64_t m,
                                                                const ReprDomain& domain)
{
    Discriminant disc = discriminant(q);
    if (!is_primitive(q))
        throw PreconditionError("proper_representations: " + q.str() + " is imprimitive");
    if (std::abs(m) >= kValueLimit)
        throw PreconditionError("represented value beyond desk scale");

    std::vector<std::pair<int64_t, int64_t>> found;

    if (disc.d < 0) {
        if (!std::holds_alternative<std::monostate>(domain))
            throw PreconditionError("definite forms take no representation domain");
        if (q.a <= 0)
            throw PreconditionError("definite path expects a positive definite form");
        if (m > 0) {
            // |d| y^2 <= 4 a m
            const int64_t ylim =
                static_cast<int64_t>(isqrt64(static_cast<uint64_t>(4 * q.a * m / (-disc.d)))) + 1;
            for (int64_t y = -ylim; y <= ylim; ++y)
                row_solutions(q, m, y, found);
        }
    } else if (const auto* cb = std::get_if<CoordBound>(&domain)) {
        if (cb->bound <= 0 || cb->bound > 10'000'000)
            throw PreconditionError("coordinate bound out of range");
        for (int64_t y = -cb->bound; y <= cb->bound; ++y)
            row_solutions(q, m, y, found);
        std::erase_if(found, [&](const auto& p) { return std::abs(p.first) > cb->bound; });
    } else if (const auto* ad = std::get_if<AutomorphDomain>(&domain)) {
        check_pell_matches(disc, ad->pell);
        if (q.a <= 0)
            throw PreconditionError("automorph domain needs a representative with a > 0");
        if (m <= 0)
            throw PreconditionError("automorph domain enumerates positive values only");
        // every orbit has its representative at y <= U * sqrt(a m) (the
        // domain's closing edge); pad and let the exact test decide
        BigInt ymax_big = ad->pell.U * (BigInt(isqrt64(static_cast<uint64_t>(q.a * m))) + 1) + 1;
        if (ymax_big > 10'000'000)
            throw PreconditionError("automorph domain too tall to enumerate at this scale");
        const auto ymax = ymax_big.convert_to<int64_t>();
        std::vector<std::pair<int64_t, int64_t>> row;
        for (int64_t y = 1; y <= ymax; ++y) {
            row.clear();
            row_solutions(q, m, y, row);
            for (const auto& p : row)
                if (in_automorph_domain(q, ad->pell, p.first, p.second))
                    found.push_back(p);
        }
    } else {
        throw PreconditionError("indefinite form needs CoordBound or AutomorphDomain");
    }

    std::erase_if(found, [](const auto& p) { return std::gcd(p.first, p.second) != 1; });
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

RepresentationCount counting_lemma_check(int64_t d, int64_t n)
{
    Discriminant disc = make_discriminant(d);
    if (!disc.determinant)
        throw PreconditionError("counting check needs 4 | d (an integer determinant)");
    const int64_t D = *disc.determinant;
    if (n <= 0)
        throw PreconditionError("counting check takes n >= 1");
    if (std::gcd(n, 2 * D) != 1)
        throw PreconditionError("counting check needs gcd(n, 2D) = 1, got n = " +
                                std::to_string(n) + ", D = " + std::to_string(D));

    ClassSet cs = class_number(d);
    ReprDomain domain; // monostate for definite
    if (d > 0)
        domain = AutomorphDomain{pell::fundamental_pell(static_cast<uint64_t>(D))};

    uint64_t total = 0;
    for (const auto& f : cs.representatives)
        total += proper_representations(f, n, domain).size();

    RepresentationCount rc;
    rc.n = n;
    rc.count = total;

    bool all_split = true;
    for (const auto& [p, e] : arithmetic::factorize(static_cast<uint64_t>(n))) {
        (void)e;
        ++rc.mu;
        if (arithmetic::legendre_symbol_unchecked(D, p) != 1)
            all_split = false;
    }

    const uint64_t expected =
        all_split ? static_cast<uint64_t>(unit_count(d)) << rc.mu : 0;
    if (total != expected)
        throw InvariantViolation("representation count dichotomy failed at d = " +
                                 std::to_string(d) + ", n = " + std::to_string(n) + ": counted " +
                                 std::to_string(total) + ", dichotomy demands " +
                                 std::to_string(expected));
    return rc;
}

std::vector<int64_t> representable_numbers(const QuadForm& q, int64_t limit)
{
    Discriminant disc = discriminant(q);
    if (limit < 0)
        return {};
    if (limit >= kValueLimit)
        throw PreconditionError("limit beyond desk scale");
    if (q.a <= 0)
        throw PreconditionError("representable_numbers expects a > 0");

    std::set<int64_t> values;
    values.insert(0);

    if (disc.d < 0) {
        const int64_t ylim =
            static_cast<int64_t>(isqrt64(static_cast<uint64_t>(4 * q.a * limit / (-disc.d)))) + 1;
        for (int64_t y = -ylim; y <= ylim; ++y) {
            // a x^2 + (b y) x + (c y^2 - limit) <= 0
            const i128 dd = i128(disc.d) * y * y + i128(4) * q.a * limit;
            if (dd < 0)
                continue;
            const i128 t = isqrt_i128(dd);
            const int64_t xlo = static_cast<int64_t>((-i128(q.b) * y - t) / (2 * q.a)) - 2;
            const int64_t xhi = static_cast<int64_t>((-i128(q.b) * y + t) / (2 * q.a)) + 2;
            for (int64_t x = xlo; x <= xhi; ++x) {
                const int64_t v = q.eval(x, y);
                if (v >= 0 && v <= limit)
                    values.insert(v);
            }
        }
    } else {
        if (!disc.determinant)
            throw PreconditionError("indefinite value enumeration needs 4 | d");
        const auto D = static_cast<uint64_t>(*disc.determinant);
        pell::PellSolution ps = pell::fundamental_pell(D);
        // y = 0 row: values a x^2
        for (int64_t x = 0; q.a * x * x <= limit; ++x)
            values.insert(q.a * x * x);
        // rows 1..U*sqrt(a*limit): every value's automorph-domain
        // representative lives this low, so scanning the full x-window of
        // 0 <= q <= limit on each row is exhaustive for values
        BigInt ymax_big = ps.U * (BigInt(isqrt64(static_cast<uint64_t>(q.a * limit))) + 1) + 1;
        if (ymax_big > 10'000'000)
            throw PreconditionError("value enumeration too tall at this scale");
        const auto ymax = ymax_big.convert_to<int64_t>();
        for (int64_t y = 1; y <= ymax; ++y) {
            const i128 d0 = i128(disc.d) * y * y;            // q = 0 level
            const i128 dL = d0 + i128(4) * q.a * limit;      // q = limit level
            if (dL < 0)
                continue;
            const i128 tL = isqrt_i128(dL);
            const i128 t0 = d0 >= 0 ? isqrt_i128(d0) : i128(-1);
            const i128 by = -i128(q.b) * y;
            auto scan = [&](i128 lo, i128 hi) {
                for (i128 x = lo - 2; x <= hi + 2; ++x) {
                    const i128 v = i128(q.a) * x * x + i128(q.b) * x * y + i128(q.c) * y * y;
                    if (v >= 0 && v <= limit)
                        values.insert(static_cast<int64_t>(v));
                }
            };
            if (t0 < 0) {
                scan((by - tL) / (2 * q.a), (by + tL) / (2 * q.a));
            } else {
                scan((by - tL) / (2 * q.a), (by - t0) / (2 * q.a));
                scan((by + t0) / (2 * q.a), (by + tL) / (2 * q.a));
            }
        }
    }
    return {values.begin(), values.end()};
}

} // namespace qrkit::quadform
