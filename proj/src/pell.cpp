#include "qrkit/pell.hpp"
#include "qrkit/arithmetic.hpp"
#include "qrkit/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qrkit::pell {

using arithmetic::is_prime;
using arithmetic::is_square64;
using arithmetic::isqrt64;

PellSolution fundamental_pell(uint64_t D)
{
    if (D < 2)
        throw PreconditionError("fundamental_pell: D must be >= 2, got " + std::to_string(D));
    if (is_square64(D))
        throw PreconditionError("fundamental_pell: D = " + std::to_string(D) +
                                " is a perfect square; the equation is degenerate");

    // Standard P/Q recurrence for the continued fraction of sqrt(D):
    //   a0 = floor(sqrt(D)),  P_0 = 0, Q_0 = 1,
    //   P_{k+1} = a_k Q_k - P_k,  Q_{k+1} = (D - P_{k+1}^2) / Q_k,
    //   a_{k+1} = floor((a0 + P_{k+1}) / Q_{k+1}).
    // All of P, Q, a stay below 2*sqrt(D)+1, so 64-bit is ample; only the
    // convergents h/k need big integers.
    const uint64_t a0 = isqrt64(D);
    uint64_t P = 0, Q = 1, a = a0;

    BigInt h_prev = 1, h = a0; // h_{-1}, h_0
    BigInt k_prev = 0, k = 1;  // k_{-1}, k_0

    // Walk the period. Q returns to 1 exactly at the end of each period.
    uint64_t period = 0;
    BigInt x = h, y = k; // convergent at the end of the first period
    for (;;) {
        P = a * Q - P;
        Q = (D - P * P) / Q;
        a = (a0 + P) / Q;
        ++period;
        if (Q == 1) {
            x = h;
            y = k;
            break;
        }
        BigInt h_next = BigInt(a) * h + h_prev;
        BigInt k_next = BigInt(a) * k + k_prev;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        if (period > 4'000'000)
            throw InvariantViolation("fundamental_pell: continued fraction of sqrt(" +
                                     std::to_string(D) + ") failed to close");
    }

    PellSolution sol;
    sol.D = D;
    if (period % 2 == 0) {
        sol.T = x;
        sol.U = y;
    } else {
        // odd period: x^2 - D y^2 = -1; square up to the +1 solution
        sol.T = x * x + BigInt(D) * y * y;
        sol.U = 2 * x * y;
    }

    if (sol.T * sol.T - BigInt(D) * sol.U * sol.U != 1)
        throw InvariantViolation("fundamental_pell: convergent for D = " + std::to_string(D) +
                                 " does not satisfy the equation");
    return sol;
}

bool is_square(const BigInt& n, BigInt* root)
{
    if (n < 0)
        return false;
    BigInt r = boost::multiprecision::sqrt(n);
    if (r * r != n)
        return false;
    if (root)
        *root = r;
    return true;
}

double log_double(const BigInt& n)
{
    if (n <= 0)
        throw PreconditionError("log_double: argument must be positive");
    // Take the top 64 bits as a mantissa and account for the shift.
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(n)) + 1;
    if (bits <= 63)
        return std::log(static_cast<double>(n.convert_to<uint64_t>()));
    const unsigned shift = bits - 63;
    BigInt top = n >> shift;
    return std::log(static_cast<double>(top.convert_to<uint64_t>())) +
           static_cast<double>(shift) * std::numbers::ln2_v<double>;
}

double log_fundamental_unit(const PellSolution& s)
{
    // T + U*sqrt(D) = T + sqrt(T^2 - 1); once T is large the difference
    // between that and 2T is below 1/(2T), far under double resolution.
    if (s.T < (BigInt(1) << 50)) {
        const double t = s.T.convert_to<double>();
        const double u = s.U.convert_to<double>();
        return std::log(t + u * std::sqrt(static_cast<double>(s.D)));
    }
    return std::numbers::ln2_v<double> + log_double(s.T);
}

namespace {

void require_4n3_prime(uint64_t v, const char* name)
{
    if (!is_prime(v) || v % 4 != 3)
        throw PreconditionError(std::string("expected ") + name + " = " + std::to_string(v) +
                                " to be a prime congruent to 3 mod 4");
}

} // namespace

std::string TwoPrimeCaseResult::equation() const
{
    std::ostringstream os;
    uint64_t lead = which == TwoPrimeCase::first_prime_leads ? b : B;
    uint64_t trail = which == TwoPrimeCase::first_prime_leads ? B : b;
    os << lead << "*M^2 - " << trail << "*N^2 = 1 with (M,N) = (" << M << "," << N << ")";
    return os.str();
}

TwoPrimeCaseResult classify_two_prime_case(uint64_t b, uint64_t B)
{
    require_4n3_prime(b, "b");
    require_4n3_prime(B, "B");
    if (b == B)
        throw PreconditionError("classify_two_prime_case: primes must be distinct");
    if (b > UINT64_MAX / B)
        throw PreconditionError("classify_two_prime_case: product b*B overflows");

    const uint64_t D = b * B; // = 1 mod 4 automatically (3*3 = 9 = 1)
    PellSolution sol = fundamental_pell(D);

    if (sol.T % 2 != 1 || sol.U % 2 != 0)
        throw InvariantViolation("classify_two_prime_case: D = " + std::to_string(D) +
                                 " = 1 (mod 4) must give T odd, U even");

    // (T+1)/2 * (T-1)/2 = D * (U/2)^2 with coprime factors on the left, so
    // each of b, B divides exactly one side and the cofactors are squares.
    const BigInt Pp = (sol.T + 1) / 2;
    const BigInt Pm = (sol.T - 1) / 2;
    if (boost::multiprecision::gcd(Pp, Pm) != 1)
        throw InvariantViolation("classify_two_prime_case: (T+1)/2 and (T-1)/2 not coprime");

    const bool b_plus = Pp % b == 0;
    const bool B_plus = Pp % B == 0;

    if (b_plus == B_plus) {
        // Both primes on one side forces the other side to be a square y^2
        // with y^2 - D z^2 = -+1 below the fundamental solution -- the two
        // impossible cases. Seeing one falsifies the classification theorem.
        throw InvariantViolation("classify_two_prime_case: impossible split for (b,B) = (" +
                                 std::to_string(b) + "," + std::to_string(B) + "): " +
                                 (b_plus ? "both primes divide (T+1)/2" : "both primes divide (T-1)/2"));
    }

    TwoPrimeCaseResult res;
    res.b = b;
    res.B = B;
    res.pell = sol;
    // the prime dividing (T+1)/2 leads: lead*M^2 - trail*N^2 = +1
    const uint64_t lead = b_plus ? b : B;
    const uint64_t trail = b_plus ? B : b;
    res.which = b_plus ? TwoPrimeCase::first_prime_leads : TwoPrimeCase::second_prime_leads;

    BigInt M2 = Pp / lead, N2 = Pm / trail;
    BigInt M, N;
    if (!is_square(M2, &M) || !is_square(N2, &N))
        throw InvariantViolation("classify_two_prime_case: cofactors of the (T+-1)/2 split "
                                 "are not perfect squares");
    res.M = M;
    res.N = N;

    if (BigInt(lead) * M * M - BigInt(trail) * N * N != 1)
        throw InvariantViolation("classify_two_prime_case: reconstructed equation does not hold");
    return res;
}

std::pair<uint64_t, uint64_t> SixEquationResult::coefficients() const
{
    switch (family) {
    case SixFamily::a_vs_bbeta:
        return {a, b * beta};
    case SixFamily::b_vs_abeta:
        return {b, a * beta};
    case SixFamily::beta_vs_ab:
        return {beta, a * b};
    }
    throw InvariantViolation("SixEquationResult: bad family tag");
}

std::string SixEquationResult::equation() const
{
    auto [u, v] = coefficients();
    std::ostringstream os;
    os << u << "*M^2 - " << v << "*N^2 = " << (sign > 0 ? "+1" : "-1");
    return os.str();
}

namespace {

// bounded deterministic search for u M^2 - v N^2 = sign, M ascending
bool search_family(uint64_t u, uint64_t v, int sign, uint64_t bound, BigInt* M_out, BigInt* N_out)
{
    for (uint64_t M = 1; M <= bound; ++M) {
        // u M^2 - sign must be v * (perfect square)
        const BigInt t = BigInt(u) * M * M - sign;
        if (t <= 0 || t % v != 0)
            continue;
        BigInt N;
        if (!is_square(t / v, &N) || N == 0)
            continue;
        *M_out = M;
        *N_out = N;
        return true;
    }
    return false;
}

} // namespace

SixEquationResult solve_six_equations(uint64_t a, uint64_t b, uint64_t beta, uint64_t search_bound)
{
    if (!is_prime(a) || a % 4 != 1)
        throw PreconditionError("solve_six_equations: a = " + std::to_string(a) +
                                " must be a prime congruent to 1 mod 4");
    require_4n3_prime(b, "b");
    require_4n3_prime(beta, "beta");
    if (b == beta)
        throw PreconditionError("solve_six_equations: b and beta must be distinct");
    if (a >= (1ull << 21) || b >= (1ull << 21) || beta >= (1ull << 21))
        throw PreconditionError("solve_six_equations: primes above 2^21 are out of scope");
    if (search_bound == 0 || search_bound > 1'000'000)
        throw PreconditionError("solve_six_equations: search bound must be in [1, 10^6]");

    SixEquationResult res;
    res.a = a;
    res.b = b;
    res.beta = beta;

    const SixFamily families[] = {SixFamily::a_vs_bbeta, SixFamily::b_vs_abeta,
                                  SixFamily::beta_vs_ab};
    const uint64_t coeff_u[] = {a, b, beta};
    const uint64_t coeff_v[] = {b * beta, a * beta, a * b};

    for (int fi = 0; fi < 3; ++fi) {
        for (int sign : {+1, -1}) {
            BigInt M, N;
            if (search_family(coeff_u[fi], coeff_v[fi], sign, search_bound, &M, &N)) {
                res.family = families[fi];
                res.sign = sign;
                res.M = M;
                res.N = N;
                res.method = SixMethod::bounded_search;
                return res;
            }
        }
    }

    // Exhaustive fallback: split the Pell solution of D = a*b*beta. With
    // T odd and U even, (T+1)/2 = d1 M'^2 and (T-1)/2 = d2 N'^2 where
    // {d1, d2} partitions {a, b, beta}; the singleton side names the family.
    const uint64_t D = a * b * beta;
    PellSolution sol = fundamental_pell(D);
    if (sol.T % 2 != 1 || sol.U % 2 != 0)
        throw InvariantViolation("solve_six_equations: D = " + std::to_string(D) +
                                 " = 1 (mod 4) must give T odd, U even");
    const BigInt Pp = (sol.T + 1) / 2;
    const BigInt Pm = (sol.T - 1) / 2;

    uint64_t d1 = 1;
    for (uint64_t q : {a, b, beta})
        if (Pp % q == 0)
            d1 *= q;
    const uint64_t d2 = D / d1;
    if (d1 == 1 || d2 == 1)
        throw InvariantViolation("solve_six_equations: degenerate split d1 = " +
                                 std::to_string(d1) + " contradicts minimality of the "
                                 "fundamental solution");

    BigInt M, N;
    if (!is_square(Pp / d1, &M) || !is_square(Pm / d2, &N))
        throw InvariantViolation("solve_six_equations: Pell split cofactors are not squares");

    // d1 M^2 - d2 N^2 = +1. If d1 is the singleton prime, that is the +1
    // equation of its family; otherwise the complementary -1 equation.
    auto family_of = [&](uint64_t singleton) {
        if (singleton == a)
            return SixFamily::a_vs_bbeta;
        if (singleton == b)
            return SixFamily::b_vs_abeta;
        return SixFamily::beta_vs_ab;
    };
    if (d1 == a || d1 == b || d1 == beta) {
        res.family = family_of(d1);
        res.sign = +1;
        res.M = M;
        res.N = N;
    } else {
        res.family = family_of(d2);
        res.sign = -1;
        res.M = N; // d2 N'^2 - d1 M'^2 = -1 reads with roles swapped
        res.N = M;
    }
    res.method = SixMethod::pell_split;

    auto [u, v] = res.coefficients();
    if (BigInt(u) * res.M * res.M - BigInt(v) * res.N * res.N != res.sign)
        throw InvariantViolation("solve_six_equations: reconstructed equation does not hold");
    return res;
}

} // namespace qrkit::pell
