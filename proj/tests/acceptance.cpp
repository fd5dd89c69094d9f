// Acceptance gate: one section per claim the toolkit makes about itself,
// each printed as a single PASS/FAIL line with its runtime. Exit status is
// the number of failed sections. Sections re-derive their expectations from
// independent oracles (tests/oracles.*) or from frozen constants that were
// recorded from oracle runs; nothing here calls the code path it checks to
// produce its own expectation.

#include "oracles.hpp"
#include "qrkit/arithmetic.hpp"
#include "qrkit/errors.hpp"
#include "qrkit/kernels.hpp"
#include "qrkit/pell.hpp"
#include "qrkit/quadform.hpp"
#include "qrkit/series.hpp"
#include "qrkit/ternary.hpp"
#include "qrkit/witness.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

using namespace qrkit;

namespace {

int failures = 0;

void section(const char* name, double budget_s, const std::function<bool(std::string&)>& body)
{
    std::string detail;
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > budget_s) {
        ok = false;
        detail += detail.empty() ? "" : "; ";
        detail += "over budget";
    }
    std::printf("%s: %-28s %6.2fs/%gs%s%s\n", ok ? "PASS" : "FAIL", name, dt, budget_s,
                detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

bool symbol_sweep(std::string& detail)
{
    if (arithmetic::legendre_symbol(17, 3) != -1) {
        detail = "(17/3) != -1";
        return false;
    }
    uint64_t checked = 0;
    for (uint32_t p : arithmetic::simple_sieve(9999)) {
        if (p == 2)
            continue;
        std::vector<uint8_t> sq(p, 0);
        for (uint64_t x = 1; x < p; ++x)
            sq[x * x % p] = 1;
        for (uint64_t a = 0; a < p; ++a) {
            int expect = a == 0 ? 0 : (sq[a] ? 1 : -1);
            if (arithmetic::legendre_symbol((int64_t)a, p) != expect) {
                detail = "mismatch at (" + std::to_string(a) + "/" + std::to_string(p) + ")";
                return false;
            }
            ++checked;
        }
    }
    detail = std::to_string(checked) + " symbols";
    return true;
}

bool pell_and_two_prime(std::string& detail)
{
    using pell::BigInt;
    auto p5 = pell::fundamental_pell(5);
    if (p5.T != 9 || p5.U != 4) {
        detail = "D=5 fundamental solution wrong";
        return false;
    }
    for (uint64_t D = 2; D <= 200; ++D) {
        if (arithmetic::is_square64(D))
            continue;
        auto s = pell::fundamental_pell(D);
        if (s.T * s.T - BigInt(D) * s.U * s.U != 1) {
            detail = "equation fails at D=" + std::to_string(D);
            return false;
        }
        // minimality: scan up to the cap, fall back to chakravala beyond it
        const uint64_t cap = 2000000;
        if (s.U <= cap) {
            auto scan = oracles::pell_by_scan(D, cap);
            if (!scan || BigInt(scan->first) != s.T || BigInt(scan->second) != s.U) {
                detail = "scan oracle disagrees at D=" + std::to_string(D);
                return false;
            }
        } else {
            // scan certifies nothing exists below the cap, chakravala pins
            // down the actual minimum (scanning to U ~ 1.5e13 for D = 109 is
            // out of reach)
            if (oracles::pell_by_scan(D, cap)) {
                detail = "scan found a solution below U=" + s.U.str();
                return false;
            }
            auto [ct, cu] = oracles::pell_by_chakravala(D);
            if (ct != s.T || cu != s.U) {
                detail = "chakravala oracle disagrees at D=" + std::to_string(D);
                return false;
            }
        }
    }

    auto qprimes = arithmetic::primes_in_range(3, 100, arithmetic::ResidueClassFilter{4, {3}});
    uint64_t pairs = 0;
    for (size_t i = 0; i < qprimes.size(); ++i)
        for (size_t j = i + 1; j < qprimes.size(); ++j) {
            uint64_t b = qprimes[i], B = qprimes[j];
            // the two impossible splits raise InvariantViolation; any throw fails
            auto r = pell::classify_two_prime_case(b, B);
            BigInt lead = r.which == pell::TwoPrimeCase::first_prime_leads ? b : B;
            BigInt trail = r.which == pell::TwoPrimeCase::first_prime_leads ? B : b;
            if (lead * r.M * r.M - trail * r.N * r.N != 1) {
                detail = "unverified equation at (" + std::to_string(b) + "," + std::to_string(B) + ")";
                return false;
            }
            ++pairs;
        }
    detail = "199 D values, " + std::to_string(pairs) + " prime pairs";
    return true;
}

bool class_numbers(std::string& detail)
{
    auto cs20 = quadform::class_number(-20);
    if (cs20.h() != 2 || cs20.representatives[0] != quadform::QuadForm{1, 0, 5} ||
        cs20.representatives[1] != quadform::QuadForm{2, 2, 3}) {
        detail = "h(-20) representatives wrong";
        return false;
    }
    auto csp20 = quadform::class_number(20);
    if (csp20.h() != 1 || csp20.representatives[0] != quadform::QuadForm{1, 0, -5}) {
        detail = "h(+20) representative wrong";
        return false;
    }
    uint64_t tested = 0;
    for (int64_t d = -200; d < 0; ++d) {
        if ((((d % 4) + 4) % 4) > 1)
            continue;
        uint64_t mine = quadform::class_number(d).h();
        uint64_t oracle = oracles::definite_class_count(d);
        if (mine != oracle) {
            detail = "h(" + std::to_string(d) + ") = " + std::to_string(mine) + " vs closure " +
                     std::to_string(oracle);
            return false;
        }
        ++tested;
    }
    detail = std::to_string(tested) + " discriminants vs closure oracle";
    return true;
}

bool counting_lemma(std::string& detail)
{
    const std::map<int64_t, uint64_t> worked{{1, 2}, {7, 4}, {9, 4}, {21, 8}};
    uint64_t tested = 0;
    for (int64_t n = 1; n < 500; ++n) {
        if (std::gcd<int64_t>(n, 10) != 1)
            continue;
        auto r = quadform::counting_lemma_check(-20, n); // throws on dichotomy breach
        uint64_t brute = oracles::proper_count_by_scan(1, 0, 5, n) +
                         oracles::proper_count_by_scan(2, 2, 3, n);
        if (r.count != brute) {
            detail = "count(" + std::to_string(n) + ") != scan";
            return false;
        }
        // dichotomy re-derived: all prime factors split => 2 * 2^mu, else 0
        bool all_split = true;
        int mu = 0;
        for (auto [q, e] : arithmetic::factorize((uint64_t)n)) {
            ++mu;
            if (arithmetic::legendre_symbol(-20, q) != 1)
                all_split = false;
        }
        uint64_t expect = all_split ? (2ull << mu) : 0;
        if (r.count != expect) {
            detail = "dichotomy at n=" + std::to_string(n);
            return false;
        }
        if (auto it = worked.find(n); it != worked.end() && r.count != it->second) {
            detail = "worked value at n=" + std::to_string(n);
            return false;
        }
        ++tested;
    }
    detail = std::to_string(tested) + " values, exact";
    return true;
}

bool ternary_sweep(std::string& detail)
{
    auto squarefree = [](int64_t n) {
        n = n < 0 ? -n : n;
        if (n == 0)
            return false;
        for (int64_t q = 2; q * q <= n; ++q)
            if (n % (q * q) == 0)
                return false;
        return true;
    };
    uint64_t tested = 0, solvable = 0;
    for (int64_t a = -30; a <= 30; ++a) {
        if (!squarefree(a))
            continue;
        for (int64_t b = -30; b <= 30; ++b) {
            if (!squarefree(b) || std::gcd(a, b) != 1)
                continue;
            for (int64_t c = -30; c <= 30; ++c) {
                if (!squarefree(c) || std::gcd(a, c) != 1 || std::gcd(b, c) != 1)
                    continue;
                ternary::TernaryForm f{a, b, c};
                auto conds = ternary::ternary_conditions(f);
                auto wit = ternary::ternary_solve(f);
                if (conds.all_hold() != wit.has_value()) {
                    detail = "iff breaks at (" + std::to_string(a) + "," + std::to_string(b) +
                             "," + std::to_string(c) + ")";
                    return false;
                }
                if (wit) {
                    auto [x, y, z] = *wit;
                    if (a * x * x + b * y * y + c * z * z != 0 || (x | y | z) == 0) {
                        detail = "bad witness at (" + std::to_string(a) + "," +
                                 std::to_string(b) + "," + std::to_string(c) + ")";
                        return false;
                    }
                    ++solvable;
                }
                if (ternary::mod4_obstruction(f) && wit.has_value()) {
                    detail = "1 (mod 4) triple solved at (" + std::to_string(a) + "," +
                             std::to_string(b) + "," + std::to_string(c) + ")";
                    return false;
                }
                ++tested;
            }
        }
    }
    detail = std::to_string(tested) + " forms, " + std::to_string(solvable) + " solvable";
    return true;
}

bool eight_cases(std::string& detail)
{
    auto rep = ternary::verify_reciprocity_cases(1000);
    if (!rep.violations.empty()) {
        detail = std::to_string(rep.violations.size()) + " violations";
        return false;
    }
    for (int i = 0; i < 8; ++i)
        if (rep.case_counts[i] == 0) {
            detail = "case " + std::to_string(i + 1) + " never hit";
            return false;
        }
    detail = std::to_string(rep.pair_count) + " ordered pairs, zero violations";
    return true;
}

bool fundamental_identity(std::string& detail)
{
    series::SeriesParams p;
    p.s = 2.0;
    std::vector<double> residuals;
    for (uint64_t cut : {2000ull, 4000ull, 8000ull, 16000ull}) {
        p.lattice_cutoff = p.prime_cutoff = p.n_cutoff = cut;
        residuals.push_back(series::fundamental_identity_check(quadform::make_discriminant(-20), p)
                                .residual);
    }
    if (residuals[0] >= 1e-2) {
        detail = "residual " + std::to_string(residuals[0]) + " at (2000,2000,2000)";
        return false;
    }
    for (size_t i = 1; i < residuals.size(); ++i)
        if (residuals[i] > residuals[i - 1]) {
            detail = "residual grew on doubling " + std::to_string(i);
            return false;
        }
    char buf[128];
    std::snprintf(buf, sizeof buf, "residuals %.1e -> %.1e over three doublings",
                  residuals.front(), residuals.back());
    detail = buf;
    return true;
}

bool formula_checks(std::string& detail)
{
    auto neg = series::class_number_formula_check(quadform::make_discriminant(-20),
                                                  series::default_eps_schedule());
    double neg_closed = 2.0 * 2.0 * M_PI / std::sqrt(20.0); // h = 2
    if (std::abs(neg.closed_form - neg_closed) > 1e-9 || !neg.monotone ||
        neg.relative_deviation > 0.05) {
        detail = "d = -20 formula off";
        return false;
    }
    auto pos = series::class_number_formula_check(quadform::make_discriminant(20),
                                                  series::default_eps_schedule());
    double pos_closed = std::log(9.0 + 4.0 * std::sqrt(5.0)) / (2.0 * std::sqrt(5.0)); // h = 1
    if (std::abs(pos.closed_form - pos_closed) > 1e-9 || !pos.monotone ||
        pos.relative_deviation > 0.05) {
        detail = "d = +20 formula off";
        return false;
    }
    for (int64_t D : {-5, 5}) {
        auto ls = series::l_series_crosscheck(D, 1000000);
        double closed = series::l_series_closed_form(D);
        if (std::abs(ls.value - closed) / closed > 0.01) {
            detail = "l-series off at D=" + std::to_string(D);
            return false;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "deviations %.1e (d=-20), %.1e (d=+20); l-series within 1%%",
                  neg.relative_deviation, pos.relative_deviation);
    detail = buf;
    return true;
}

bool teege_identity(std::string& detail)
{
    series::SeriesParams p;
    p.prime_cutoff = 10000;
    auto t = series::teege_identity_check(5, p);
    if (std::abs(t.lhs - 0.22977) > 1e-4) {
        detail = "LHS " + std::to_string(t.lhs) + " != 0.22977";
        return false;
    }
    if (!t.deviation_decreasing) {
        detail = "deviation not strictly decreasing";
        return false;
    }
    // A-factor cancellation: restricting both products to 3 (mod 4) factors
    // must not move the ratio (the 1 (mod 4) factors are literally shared)
    series::SeriesParams cp{1.25, 100, 10000, 100};
    double full = series::splitting_euler_product(5, cp).value /
                  (2.0 * series::splitting_euler_product(-5, cp).value);
    double b_only = series::splitting_euler_product(5, cp, 3).value /
                    (2.0 * series::splitting_euler_product(-5, cp, 3).value);
    double cancel = std::abs(full - b_only) / full;
    if (cancel > 1e-12) {
        detail = "A factors fail to cancel: " + std::to_string(cancel);
        return false;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "LHS %.6f, deviations strictly down, cancel %.1e", t.lhs,
                  cancel);
    detail = buf;
    return true;
}

bool divergence(std::string& detail)
{
    series::DivergenceWitness last;
    for (double target : {1.0, 2.0, 5.0}) {
        last = series::divergence_witness(target);
        if (!last.complete || last.half_product <= target) {
            detail = "target " + std::to_string(target) + " not crossed";
            return false;
        }
    }
    // the target-5 run scans far enough to collect the leading primes
    if (last.leading_primes.size() < 4 || last.leading_primes[0] != 3 ||
        last.leading_primes[1] != 7 || last.leading_primes[2] != 11 ||
        last.leading_primes[3] != 19) {
        detail = "minorant primes not 3, 7, 11, 19";
        return false;
    }
    detail = "targets 1, 2, 5 crossed; minorant 1/3 + 1/7 + 1/11 + 1/19 + ...";
    return true;
}

bool witness_sweep(std::string& detail)
{
    uint64_t swept = 0;
    for (uint64_t a = 5; a < 10000; a += 4) {
        if (!arithmetic::is_prime(a))
            continue;
        auto w = witness::find_witness(a);
        if (w.beta >= a || arithmetic::legendre_symbol((int64_t)a, w.beta) != -1) {
            detail = "witness fails at a=" + std::to_string(a);
            return false;
        }
        if (a % 8 == 5) {
            auto easy = witness::easy_witness(a); // verifies (a/beta) = -1 itself
            if ((1 + a) % easy.beta != 0 || w.beta > easy.beta) {
                detail = "easy construction fails at a=" + std::to_string(a);
                return false;
            }
        }
        ++swept;
    }
    detail = std::to_string(swept) + " primes, minimal witness always below a";
    return true;
}

bool descent_sweep(std::string& detail)
{
    auto worked = witness::teege_descent(17, 23);
    if (worked.steps.size() != 1 || worked.steps[0].x != 12 || worked.steps[0].B != 23 ||
        worked.steps[0].b_prime != 7 || worked.terminal != 7) {
        detail = "worked instance 12^2 + 17 = 23*7 not reproduced";
        return false;
    }
    uint64_t chains = 0, longest = 0;
    for (uint64_t p = 17; p < 2000; p += 8) {
        if (!arithmetic::is_prime(p))
            continue;
        for (uint64_t B = 3; B < 5 * p; B += 4) {
            if (!arithmetic::is_prime(B))
                continue;
            if (arithmetic::legendre_symbol(-(int64_t)p, B) != 1)
                continue;
            auto chain = witness::teege_descent(p, B); // throws if a step fails to decrease
            uint64_t prev = UINT64_MAX;
            for (const auto& s : chain.steps) {
                if (s.x * s.x + p != s.B * s.b_prime || s.B >= prev) {
                    detail = "bad step at p=" + std::to_string(p) + " B=" + std::to_string(B);
                    return false;
                }
                prev = s.B;
            }
            if (chain.terminal >= p ||
                arithmetic::legendre_symbol((int64_t)p, chain.terminal) != -1) {
                detail = "terminal fails at p=" + std::to_string(p) + " B=" + std::to_string(B);
                return false;
            }
            longest = std::max<uint64_t>(longest, chain.steps.size());
            ++chains;
        }
    }
    detail = std::to_string(chains) + " chains, longest " + std::to_string(longest) + " steps";
    return true;
}

bool rogers_selberg(std::string& detail)
{
    const std::vector<uint64_t> xs{10000, 100000, 1000000, 10000000};
    // O(1) envelopes recorded from the oracle runs (max |s - ln(x)/4| was
    // 0.922 / 0.821 / 0.908); the claim under test is that one constant
    // works across the whole geometric schedule, i.e. nothing grows
    const std::map<int64_t, double> envelope{{5, 0.93}, {13, 0.83}, {17, 0.92}};

    std::map<uint64_t, witness::SievedSum> mertens;
    for (uint64_t x : xs)
        mertens[x] = witness::mertens_sum(x);

    for (auto [D, env] : envelope) {
        uint64_t prev_n3m = 0;
        for (uint64_t x : xs) {
            auto r = witness::rogers_partition(D, x);
            double q = r.quarter_ln_x;
            for (double s : {r.s1_plus, r.s1_minus, r.s3_plus, r.s3_minus})
                if (std::abs(s - q) > env) {
                    char buf[128];
                    std::snprintf(buf, sizeof buf, "envelope %.2f exceeded at D=%lld x=%llu", env,
                                  (long long)D, (unsigned long long)x);
                    detail = buf;
                    return false;
                }

            // partition identity vs mertens, excluded primes restored
            double excluded = std::log(2.0) / 2.0 + std::log((double)D) / (double)D;
            double lhs = ((r.s1_plus + r.s1_minus) + (r.s3_plus + r.s3_minus)) + excluded;
            if (std::abs(lhs - mertens[x].value) / mertens[x].value > 1e-9) {
                detail = "partition identity fails at D=" + std::to_string(D);
                return false;
            }

            // D -> -D swap identity
            auto rn = witness::rogers_partition(-D, x);
            auto rel = [](double u, double v) {
                return std::abs(u - v) / std::max({std::abs(u), std::abs(v), 1e-300});
            };
            if (rel(rn.s1_plus, r.s1_plus) > 1e-9 || rel(rn.s1_minus, r.s1_minus) > 1e-9 ||
                rel(rn.s3_plus, r.s3_minus) > 1e-9 || rel(rn.s3_minus, r.s3_plus) > 1e-9) {
                detail = "swap identity fails at D=" + std::to_string(D);
                return false;
            }

            if (r.n3_minus <= prev_n3m) {
                detail = "s3- count stopped growing at D=" + std::to_string(D);
                return false;
            }
            prev_n3m = r.n3_minus;
        }
    }
    detail = "envelopes hold, identities to 1e-9, s3- counts strictly grow";
    return true;
}

} // namespace

int main()
{
    std::printf("acceptance: %s backend active\n",
                kernels::active_backend() == kernels::Backend::avx2 ? "avx2" : "scalar");

    section("symbol-kernel", 30, symbol_sweep);
    section("pell-and-two-prime", 60, pell_and_two_prime);
    section("class-numbers", 120, class_numbers);
    section("counting-lemma", 60, counting_lemma);
    section("ternary-iff", 300, ternary_sweep);
    section("eight-cases", 30, eight_cases);
    section("fundamental-identity", 120, fundamental_identity);
    section("formula-checks", 300, formula_checks);
    section("teege-identity", 120, teege_identity);
    section("divergence-witness", 60, divergence);
    section("witness-sweep", 60, witness_sweep);
    section("descent-sweep", 120, descent_sweep);
    section("rogers-selberg", 600, rogers_selberg);

    if (failures)
        std::printf("%d section(s) failed\n", failures);
    else
        std::printf("all 13 sections passed\n");
    return failures;
}
