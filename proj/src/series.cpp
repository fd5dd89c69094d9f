#include "qrkit/series.hpp"

#include "qrkit/arithmetic.hpp"
#include "qrkit/errors.hpp"
#include "qrkit/kernels.hpp"
#include "qrkit/pell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <string>

namespace qrkit::series {

using arithmetic::factorize;
using arithmetic::for_primes;
using arithmetic::is_prime;
using arithmetic::isqrt64;
using arithmetic::legendre_symbol;
using arithmetic::legendre_symbol_unchecked;
using arithmetic::primes_in_range;
using arithmetic::ResidueClassFilter;
using arithmetic::smallest_factor_table;

namespace {

constexpr uint64_t kLatticeCutoffLimit = uint64_t{1} << 40; // exactness ceiling for the kernels
constexpr int64_t kTermCountCutoffLimit = 100000;           // per-value enumeration is slow
constexpr uint64_t kFormulaLatticeCutoff = uint64_t{1} << 18; // internal M for the eps runs
constexpr int64_t kRowLimit = 40000000;

int64_t checked_i64(__int128 v, const char* what)
{
    if (v >= (__int128{1} << 50) || v <= -(__int128{1} << 50))
        throw PreconditionError(std::string(what) + " exceeds the exact double range");
    return static_cast<int64_t>(v);
}

uint64_t radical(uint64_t n)
{
    uint64_t r = 1;
    for (const auto& [p, e] : factorize(n)) {
        (void)e;
        r *= p;
    }
    return r;
}

int mobius(uint64_t n)
{
    int sign = 1;
    for (const auto& [p, e] : factorize(n)) {
        (void)p;
        if (e > 1)
            return 0;
        sign = -sign;
    }
    return sign;
}

// value-residue mask keeping numbers coprime to 2D (modulus = radical(2|D|))
struct ValueMask {
    uint32_t modulus = 0;
    std::vector<uint8_t> table;

    kernels::ResidueMask view() const { return {modulus, table.data()}; }
};

ValueMask coprime_mask(int64_t D)
{
    const uint64_t L = radical(2 * static_cast<uint64_t>(std::abs(D)));
    if (L > 1024)
        throw PreconditionError("coprime-to-2D filter needs radical(2|D|) <= 1024");
    ValueMask m;
    m.modulus = static_cast<uint32_t>(L);
    m.table.resize(L);
    for (uint64_t r = 0; r < L; ++r)
        m.table[r] = std::gcd(r, L) == 1 ? 1 : 0;
    return m;
}

struct LatticeTotals {
    double value = 0.0;
    uint64_t points = 0;
};

// One class representative, all lattice points with 1 <= Q <= M (and the
// residue mask), summed with the row kernels. Definite forms split into the
// y = 0 axis row plus the y >= 1 half plane counted twice ((x,y) <-> (-x,-y));
// indefinite forms run over the automorph cone y >= 1, x >= min_x(y), whose
// rows stay below y = U*(sqrt(aM)+1)+1.
LatticeTotals eval_form(const quadform::QuadForm& q, int64_t d, double s, int64_t M,
                        const ValueMask* mask, const pell::PellSolution* ps)
{
    const auto recipe = kernels::PowRecipe::from_exponent(s);
    const kernels::ResidueMask rmask = mask ? mask->view() : kernels::ResidueMask{};
    LatticeTotals out;

    const int64_t a = q.a, b = q.b, c = q.c;
    auto window = [&](int64_t y, __int128 disc_y, int64_t& lo, int64_t& hi) {
        // all x with Q(x, y) <= M lie between the roots of the row parabola
        const double r = std::sqrt(static_cast<double>(disc_y));
        const double mid = static_cast<double>(-b) * static_cast<double>(y);
        lo = static_cast<int64_t>(std::floor((mid - r) / (2.0 * a))) - 1;
        hi = static_cast<int64_t>(std::ceil((mid + r) / (2.0 * a))) + 2;
    };
    auto make_row = [&](int64_t y, int64_t lo, int64_t hi) {
        kernels::RowSpec row;
        row.qa = a;
        row.qb = checked_i64(__int128(b) * y, "row coefficient");
        row.qc = checked_i64(__int128(c) * y * y, "row coefficient");
        row.x_begin = lo;
        row.x_end = hi;
        row.q_max = M;
        row.recipe = recipe;
        row.mask = rmask;
        return row;
    };

    if (d < 0) {
        kernels::LaneAccumulator axis, half;
        {
            const int64_t xm = static_cast<int64_t>(isqrt64(static_cast<uint64_t>(M / a))) + 2;
            kernels::accumulate_row(make_row(0, -xm, xm + 1), axis);
        }
        for (int64_t y = 1; y <= kRowLimit; ++y) {
            const __int128 disc_y = __int128(d) * y * y + __int128(4) * a * M;
            if (disc_y < 0)
                break;
            int64_t lo, hi;
            window(y, disc_y, lo, hi);
            kernels::accumulate_row(make_row(y, lo, hi), half);
        }
        out.value = axis.total() + 2.0 * half.total();
        out.points = axis.total_count() + 2 * half.total_count();
        return out;
    }

    // indefinite: a > 0 for the canonical representatives
    if (a <= 0)
        throw InvariantViolation("indefinite class representative with a <= 0");
    const pell::BigInt ylim_big =
        ps->U * (isqrt64(static_cast<uint64_t>(a) * static_cast<uint64_t>(M)) + 1) + 1;
    if (ylim_big > kRowLimit)
        throw PreconditionError("indefinite lattice cutoff needs too many rows");
    const int64_t ylim = ylim_big.convert_to<int64_t>();

    kernels::LaneAccumulator cone;
    for (int64_t y = 1; y <= ylim; ++y) {
        const __int128 disc_y = __int128(d) * y * y + __int128(4) * a * M;
        int64_t lo, hi;
        window(y, disc_y, lo, hi);
        lo = std::max(lo, quadform::automorph_min_x(q, *ps, y));
        if (lo >= hi)
            continue;
        kernels::accumulate_row(make_row(y, lo, hi), cone);
    }
    out.value = cone.total();
    out.points = cone.total_count();
    return out;
}

LatticeTotals eval_lattice(const quadform::ClassSet& classes, double s, int64_t M,
                           const ValueMask* mask)
{
    const int64_t d = classes.disc.d;
    pell::PellSolution ps;
    if (d > 0) {
        if (!classes.disc.determinant)
            throw PreconditionError("indefinite lattice sums need 4 | d (Pell data)");
        ps = pell::fundamental_pell(static_cast<uint64_t>(*classes.disc.determinant));
    }
    LatticeTotals out;
    for (const auto& q : classes.representatives) {
        const LatticeTotals one = eval_form(q, d, s, M, mask, d > 0 ? &ps : nullptr);
        out.value += one.value;
        out.points += one.points;
    }
    return out;
}

// shared filter for "qualifying" primes: p <= P, p not dividing 2D, (D/p) = +1
bool qualifying_prime(int64_t D, uint64_t p, int mod4_restrict)
{
    if (p == 2 || static_cast<uint64_t>(std::abs(D)) % p == 0)
        return false;
    if (mod4_restrict != 0 && p % 4 != static_cast<uint64_t>(mod4_restrict))
        return false;
    return legendre_symbol_unchecked(D, p) == 1;
}

void require_nonsquare(int64_t D)
{
    if (D == 0)
        throw PreconditionError("determinant must be nonzero");
    if (D > 0 && arithmetic::is_square64(static_cast<uint64_t>(D)))
        throw PreconditionError("determinant must not be a perfect square");
}

double linear_extrapolation(const std::vector<double>& eps, const std::vector<double>& v)
{
    const size_t n = v.size();
    if (n < 2)
        return v.back();
    const double e1 = eps[n - 2], e0 = eps[n - 1];
    return v[n - 1] + (v[n - 1] - v[n - 2]) * e0 / (e1 - e0);
}

} // namespace

void SeriesParams::validate() const
{
    if (!(s > 1.0))
        throw PreconditionError("series exponent must satisfy s > 1");
    if (lattice_cutoff < 1 || prime_cutoff < 1 || n_cutoff < 1)
        throw PreconditionError("series cutoffs must be >= 1");
    if (lattice_cutoff > kLatticeCutoffLimit)
        throw PreconditionError("lattice cutoff exceeds the exact-enumeration ceiling");
}

std::vector<double> default_eps_schedule() { return {0.5, 0.25, 0.125, 0.0625}; }

SeriesEvaluation epstein_partial(const quadform::ClassSet& classes, const SeriesParams& params,
                                 bool proper_only, bool coprime_to_2D)
{
    params.validate();
    const int64_t M = static_cast<int64_t>(params.lattice_cutoff);

    ValueMask mask;
    const ValueMask* mp = nullptr;
    if (coprime_to_2D) {
        if (!classes.disc.determinant)
            throw PreconditionError("coprime-to-2D filter needs 4 | d");
        mask = coprime_mask(*classes.disc.determinant);
        mp = &mask;
    }

    SeriesEvaluation out;
    double density = 0.0;
    if (!proper_only) {
        const LatticeTotals t = eval_lattice(classes, params.s, M, mp);
        out.value = t.value;
        out.terms_used = t.points;
        density = static_cast<double>(t.points) / static_cast<double>(M);
    } else {
        // Moebius inversion: every pair is a proper pair scaled by g, and
        // scaling multiplies the value by g^2, so the proper sum truncated
        // at M is sum_g mu(g) g^(-2s) * (full sum truncated at M/g^2).
        // With the coprime filter on, only g coprime to 2D contribute.
        for (int64_t g = 1; g * g <= M; ++g) {
            if (mp && std::gcd(static_cast<uint64_t>(g), static_cast<uint64_t>(mask.modulus)) != 1)
                continue;
            const int mu = mobius(static_cast<uint64_t>(g));
            if (mu == 0)
                continue;
            const LatticeTotals t = eval_lattice(classes, params.s, M / (g * g), mp);
            out.value += mu * std::pow(static_cast<double>(g), -2.0 * params.s) * t.value;
            out.terms_used += t.points;
            if (g == 1)
                density = static_cast<double>(t.points) / static_cast<double>(M);
        }
    }
    // point density is ~linear in the cutoff, so the dropped tail is about
    // density * integral_M^inf t^(-s) dt
    out.tail_bound = density * std::pow(static_cast<double>(M), 1.0 - params.s) / (params.s - 1.0);
    out.tail_is_heuristic = true;
    return out;
}

std::map<int64_t, uint64_t> epstein_term_counts(const quadform::ClassSet& classes,
                                                int64_t lattice_cutoff, bool proper_only,
                                                bool coprime_to_2D)
{
    if (lattice_cutoff < 1 || lattice_cutoff > kTermCountCutoffLimit)
        throw PreconditionError("term-count cutoff must lie in [1, 100000]");
    const int64_t d = classes.disc.d;
    quadform::ReprDomain domain; // monostate: definite
    if (d > 0) {
        if (!classes.disc.determinant)
            throw PreconditionError("indefinite term counts need 4 | d (Pell data)");
        domain = quadform::AutomorphDomain{
            pell::fundamental_pell(static_cast<uint64_t>(*classes.disc.determinant))};
    }
    uint64_t two_d = 0;
    if (coprime_to_2D) {
        if (!classes.disc.determinant)
            throw PreconditionError("coprime-to-2D filter needs 4 | d");
        two_d = 2 * static_cast<uint64_t>(std::abs(*classes.disc.determinant));
    }

    std::vector<uint64_t> proper(static_cast<size_t>(lattice_cutoff) + 1, 0);
    for (int64_t m = 1; m <= lattice_cutoff; ++m) {
        if (coprime_to_2D && std::gcd(static_cast<uint64_t>(m), two_d) != 1)
            continue;
        uint64_t total = 0;
        for (const auto& q : classes.representatives)
            total += quadform::proper_representations(q, m, domain).size();
        proper[static_cast<size_t>(m)] = total;
    }

    std::map<int64_t, uint64_t> out;
    for (int64_t m = 1; m <= lattice_cutoff; ++m) {
        if (coprime_to_2D && std::gcd(static_cast<uint64_t>(m), two_d) != 1)
            continue;
        uint64_t cnt = 0;
        if (proper_only) {
            cnt = proper[static_cast<size_t>(m)];
        } else {
            for (int64_t g = 1; g * g <= m; ++g)
                if (m % (g * g) == 0)
                    cnt += proper[static_cast<size_t>(m / (g * g))];
        }
        if (cnt > 0)
            out[m] = cnt;
    }
    return out;
}

SeriesEvaluation splitting_euler_product(int64_t D, const SeriesParams& params, int mod4_restrict)
{
    params.validate();
    require_nonsquare(D);
    if (mod4_restrict != 0 && mod4_restrict != 1 && mod4_restrict != 3)
        throw PreconditionError("mod-4 restriction must be 0, 1, or 3");

    SeriesEvaluation out;
    out.value = 1.0;
    for_primes(2, params.prime_cutoff, [&](uint64_t p) {
        if (!qualifying_prime(D, p, mod4_restrict))
            return;
        const double ps = std::pow(static_cast<double>(p), -params.s);
        out.value *= (1.0 + ps) / (1.0 - ps);
        ++out.terms_used;
    });
    // log of the dropped factors is ~ 2 * sum_{p > P} p^(-s); integral estimate
    const double P = static_cast<double>(params.prime_cutoff);
    out.tail_bound =
        out.value * 2.0 * std::pow(P, 1.0 - params.s) / ((params.s - 1.0) * std::log(P));
    out.tail_is_heuristic = true;
    return out;
}

ExpansionCheck dirichlet_series_expansion_check(int64_t D, const SeriesParams& params)
{
    params.validate();
    require_nonsquare(D);
    const uint64_t M = params.lattice_cutoff;

    std::vector<uint64_t> qual;
    for_primes(2, params.prime_cutoff, [&](uint64_t p) {
        if (qualifying_prime(D, p, 0))
            qual.push_back(p);
    });

    // all m <= M composed only of qualifying primes, with mu = #distinct
    std::vector<std::pair<uint64_t, int>> terms;
    auto expand = [&](auto&& self, size_t idx, uint64_t m, int mu) -> void {
        terms.emplace_back(m, mu);
        for (size_t i = idx; i < qual.size(); ++i) {
            uint64_t v = m;
            while (v <= M / qual[i]) {
                v *= qual[i];
                self(self, i + 1, v, mu + 1);
            }
        }
    };
    expand(expand, 0, 1, 0);
    std::sort(terms.begin(), terms.end());

    const int w = quadform::unit_count(quadform::determinant_to_discriminant(D));
    ExpansionCheck out;
    double sum = 0.0;
    for (const auto& [m, mu] : terms)
        sum += std::ldexp(1.0, mu) * std::pow(static_cast<double>(m), -params.s);
    double prod = 1.0;
    for (uint64_t p : qual) {
        const double ps = std::pow(static_cast<double>(p), -params.s);
        prod *= (1.0 + ps) / (1.0 - ps);
    }
    out.sum_side = w * sum;
    out.product_side = w * prod;
    out.residual = std::abs(sum - prod) / prod;
    return out;
}

SeriesEvaluation coprime_zeta(int64_t D, const SeriesParams& params)
{
    params.validate();
    require_nonsquare(D);
    const ValueMask mask = coprime_mask(D);

    kernels::RowSpec row;
    row.qa = 0;
    row.qb = 1;
    row.qc = 0;
    row.x_begin = 1;
    row.x_end = static_cast<int64_t>(params.n_cutoff) + 1;
    row.q_max = static_cast<int64_t>(params.n_cutoff);
    row.recipe = kernels::PowRecipe::from_exponent(2.0 * params.s);
    row.mask = mask.view();

    kernels::LaneAccumulator acc;
    kernels::accumulate_row(row, acc);

    SeriesEvaluation out;
    out.value = acc.total();
    out.terms_used = acc.total_count();
    // integral comparison: sum_{n > N} n^(-2s) <= N^(1-2s)/(2s-1), rigorous
    const double N = static_cast<double>(params.n_cutoff);
    out.tail_bound = std::pow(N, 1.0 - 2.0 * params.s) / (2.0 * params.s - 1.0);
    out.tail_is_heuristic = false;
    return out;
}

IdentityCheck fundamental_identity_check(const quadform::Discriminant& d,
                                         const SeriesParams& params)
{
    params.validate();
    if (!d.determinant)
        throw PreconditionError("fundamental identity needs 4 | d");
    const int64_t D = *d.determinant;

    const quadform::ClassSet classes = quadform::class_number(d.d);
    IdentityCheck out;
    out.lhs = epstein_partial(classes, params, false, true).value;
    const double k = d.d < 0 ? 2.0 : 1.0;
    out.rhs = k * coprime_zeta(D, params).value * splitting_euler_product(D, params).value;
    out.residual = std::abs(out.lhs - out.rhs) / out.rhs;
    return out;
}

FormulaCheck class_number_formula_check(const quadform::Discriminant& d,
                                        const std::vector<double>& eps_schedule)
{
    if (eps_schedule.empty())
        throw PreconditionError("epsilon schedule must be nonempty");
    for (size_t i = 0; i < eps_schedule.size(); ++i) {
        if (!(eps_schedule[i] > 0.0))
            throw PreconditionError("epsilon schedule entries must be positive");
        if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
            throw PreconditionError("epsilon schedule must be strictly decreasing");
    }

    const quadform::ClassSet classes = quadform::class_number(d.d);
    const double h = static_cast<double>(classes.h());

    FormulaCheck out;
    out.eps = eps_schedule;
    if (d.d < 0) {
        out.closed_form = h * 2.0 * std::numbers::pi_v<double> /
                          std::sqrt(static_cast<double>(-d.d));
    } else {
        if (!d.determinant)
            throw PreconditionError("indefinite closed form needs 4 | d (Pell data)");
        const auto ps = pell::fundamental_pell(static_cast<uint64_t>(*d.determinant));
        out.closed_form = h * pell::log_fundamental_unit(ps) /
                          (2.0 * std::sqrt(static_cast<double>(*d.determinant)));
    }

    const int64_t M = static_cast<int64_t>(kFormulaLatticeCutoff);
    for (const double eps : eps_schedule) {
        const LatticeTotals t = eval_lattice(classes, 1.0 + eps, M, nullptr);
        // tail completion: beyond M the point count grows ~linearly with
        // empirical density t.points / M, so the dropped mass of
        // (s-1) * sum Q^(-s) is about density * M^(-eps)
        const double density = static_cast<double>(t.points) / static_cast<double>(M);
        out.scaled.push_back(eps * t.value +
                             density * std::pow(static_cast<double>(M), -eps));
    }

    out.extrapolated = linear_extrapolation(out.eps, out.scaled);
    out.relative_deviation = std::abs(out.extrapolated - out.closed_form) / out.closed_form;
    int dir = 0;
    for (size_t i = 1; i < out.scaled.size(); ++i) {
        const double diff = out.scaled[i] - out.scaled[i - 1];
        if (std::abs(diff) <= 1e-12)
            continue;
        const int s = diff > 0 ? 1 : -1;
        if (dir == 0)
            dir = s;
        else if (s != dir)
            out.monotone = false;
    }
    return out;
}

SeriesEvaluation l_series_crosscheck(int64_t D, uint64_t N)
{
    require_nonsquare(D);
    if (N < 1)
        throw PreconditionError("L-series cutoff must be >= 1");
    if (N > 10000000)
        throw PreconditionError("L-series cutoff capped at 10^7 (factor table memory)");

    // chi(n) = (D/n) is completely multiplicative in n, so a smallest-factor
    // table extends the prime values in one linear pass
    const auto spf = smallest_factor_table(static_cast<uint32_t>(N));
    std::vector<int8_t> chi(static_cast<size_t>(N) + 1, 0);
    chi[1] = 1;
    const uint64_t absD = static_cast<uint64_t>(std::abs(D));
    for (uint64_t n = 2; n <= N; ++n) {
        const uint32_t p = spf[static_cast<size_t>(n)];
        if (n == p) {
            if (p == 2 || absD % p == 0)
                chi[static_cast<size_t>(n)] = 0;
            else
                chi[static_cast<size_t>(n)] =
                    static_cast<int8_t>(legendre_symbol_unchecked(D, p));
        } else {
            chi[static_cast<size_t>(n)] = static_cast<int8_t>(
                chi[p] * chi[static_cast<size_t>(n / p)]);
        }
    }

    SeriesEvaluation out;
    double sum = 0.0, last_term = 0.0;
    for (uint64_t n = 1; n <= N; ++n) {
        const int8_t c = chi[static_cast<size_t>(n)];
        if (c == 0)
            continue;
        last_term = static_cast<double>(c) / static_cast<double>(n);
        sum += last_term;
        ++out.terms_used;
    }
    // one averaging step of the last two partial sums damps the oscillation
    // of the conditionally convergent tail
    out.value = sum - 0.5 * last_term;
    out.tail_bound = static_cast<double>(2 * absD) / static_cast<double>(N);
    out.tail_is_heuristic = true;
    return out;
}

double l_series_closed_form(int64_t D)
{
    require_nonsquare(D);
    const int64_t d = quadform::determinant_to_discriminant(D);
    const double h = static_cast<double>(quadform::class_number(d).h());
    if (D < 0)
        return h * std::numbers::pi_v<double> / (2.0 * std::sqrt(static_cast<double>(-D)));
    const auto ps = pell::fundamental_pell(static_cast<uint64_t>(D));
    return h * pell::log_fundamental_unit(ps) / (2.0 * std::sqrt(static_cast<double>(D)));
}

TeegeCheck teege_identity_check(uint64_t p, const SeriesParams& params)
{
    params.validate();
    if (!is_prime(p) || p % 4 != 1)
        throw PreconditionError("h-ratio identity needs a prime p = 1 (mod 4)");

    TeegeCheck out;
    const double h_pos =
        static_cast<double>(quadform::class_number(
                                quadform::determinant_to_discriminant(static_cast<int64_t>(p)))
                                .h());
    const double h_neg =
        static_cast<double>(quadform::class_number(
                                quadform::determinant_to_discriminant(-static_cast<int64_t>(p)))
                                .h());
    const auto pellsol = pell::fundamental_pell(p);
    out.lhs = h_pos * pell::log_fundamental_unit(pellsol) /
              (h_neg * 2.0 * std::numbers::pi_v<double>);

    out.eps = default_eps_schedule();
    for (const double eps : out.eps) {
        SeriesParams q = params;
        q.s = 1.0 + eps;
        const double num = splitting_euler_product(static_cast<int64_t>(p), q).value;
        const double den = splitting_euler_product(-static_cast<int64_t>(p), q).value;
        out.rhs.push_back(num / (2.0 * den));
        out.deviation.push_back(std::abs(out.rhs.back() - out.lhs));
    }
    out.rhs_extrapolated = linear_extrapolation(out.eps, out.rhs);
    out.deviation_decreasing = true;
    for (size_t i = 1; i < out.deviation.size(); ++i)
        if (!(out.deviation[i] < out.deviation[i - 1]))
            out.deviation_decreasing = false;
    return out;
}

DivergenceWitness divergence_witness(double target, uint64_t ceiling)
{
    if (!(target > 0.0))
        throw PreconditionError("divergence target must be positive");
    if (ceiling < 3)
        throw PreconditionError("divergence ceiling must be >= 3");

    const ResidueClassFilter filter{4, {3}};
    DivergenceWitness out;
    double product = 1.0, minorant = 0.0;

    constexpr uint64_t kSegment = uint64_t{1} << 22;
    for (uint64_t lo = 3; lo <= ceiling && !out.complete; lo += kSegment) {
        const uint64_t hi = std::min(ceiling, lo + kSegment - 1);
        for (const uint64_t B : primes_in_range(lo, hi, filter)) {
            product *= static_cast<double>(B + 1) / static_cast<double>(B - 1);
            minorant += 1.0 / static_cast<double>(B);
            if (out.leading_primes.size() < 8)
                out.leading_primes.push_back(B);
            if (0.5 * product > target) {
                out.complete = true;
                out.p_star = B;
                break;
            }
        }
    }
    out.half_product = 0.5 * product;
    out.half_minorant = 0.5 * minorant;
    return out;
}

} // namespace qrkit::series
