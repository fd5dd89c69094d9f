#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qrkit/arithmetic.hpp"
#include "qrkit/errors.hpp"
#include "qrkit/witness.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <set>

using namespace qrkit;
using namespace qrkit::witness;
using arithmetic::is_prime;
using arithmetic::legendre_symbol;

TEST_CASE("find_witness: minimal nonresidue moduli")
{
    auto check = [](uint64_t a, uint64_t beta) {
        auto w = find_witness(a);
        CHECK(w.a == a);
        CHECK(w.beta == beta);
        CHECK(w.method == WitnessResult::Method::direct_search);
        CHECK(legendre_symbol((int64_t)a, w.beta) == -1);
        CHECK(w.beta % 4 == 3);
    };
    check(5, 3);
    check(13, 7);
    check(17, 3);
    check(73, 7);
    check(97, 7);

    // minimality: no smaller 3 (mod 4) prime works for 73
    CHECK(legendre_symbol(73, 3) == 1);
    CHECK(std::strcmp(method_name(WitnessResult::Method::direct_search), "direct-search") == 0);
}

TEST_CASE("find_witness validates and reports exhaustion honestly")
{
    CHECK_THROWS_AS(find_witness(4), PreconditionError);
    CHECK_THROWS_AS(find_witness(7), PreconditionError);   // 3 mod 4
    CHECK_THROWS_AS(find_witness(15), PreconditionError);  // composite

    // witness for 73 is 7; a ceiling of 5 must exhaust, not lie
    CHECK_THROWS_AS(find_witness(73, 5), SearchExhausted);
}

TEST_CASE("easy witness for a = 5 (mod 8)")
{
    auto check = [](uint64_t a, uint64_t beta) {
        auto w = easy_witness(a);
        CHECK(w.beta == beta);
        CHECK(w.method == WitnessResult::Method::easy_construction);
        CHECK((1 + a) % w.beta == 0);
        CHECK(legendre_symbol((int64_t)a, w.beta) == -1);
    };
    check(5, 3);
    check(13, 7);
    check(29, 3);
    check(37, 19);

    CHECK_THROWS_AS(easy_witness(17), PreconditionError); // 1 mod 8
    CHECK_THROWS_AS(easy_witness(25), PreconditionError); // composite
}

TEST_CASE("easy witness never beats the minimal witness")
{
    for (uint64_t a = 5; a < 3000; a += 8) {
        if (!is_prime(a))
            continue;
        auto easy = easy_witness(a);
        auto minimal = find_witness(a);
        CHECK((1 + a) % easy.beta == 0);
        CHECK(minimal.beta <= easy.beta);
        CHECK(minimal.beta < a); // the refinement, spot-checked here
    }
}

TEST_CASE("witness_below_check")
{
    auto r = witness_below_check(17);
    CHECK(r.below);
    CHECK(r.witness.beta == 3);
    CHECK(witness_below_check(5).below);
    CHECK(witness_below_check(9973).below);
}

TEST_CASE("descent: worked single-step chains")
{
    auto chain = teege_descent(17, 23);
    CHECK(chain.p == 17);
    REQUIRE(chain.steps.size() == 1);
    CHECK(chain.steps[0].x == 12);
    CHECK(chain.steps[0].B == 23);
    CHECK(chain.steps[0].b_prime == 7);
    CHECK(12 * 12 + 17 == 23 * 7);
    CHECK(chain.terminal == 7);
    CHECK(legendre_symbol(17, 7) == -1);

    auto chain41 = teege_descent(41, 47);
    REQUIRE(chain41.steps.size() == 1);
    CHECK(chain41.steps[0].x == 10);
    CHECK(chain41.steps[0].b_prime == 3);
    CHECK(chain41.terminal == 3);

    // start already below p: empty chain
    auto trivial = teege_descent(17, 3);
    CHECK(trivial.steps.empty());
    CHECK(trivial.terminal == 3);

    auto w = witness_from_descent(chain);
    CHECK(w.a == 17);
    CHECK(w.beta == 7);
    CHECK(w.method == WitnessResult::Method::descent);
}

TEST_CASE("descent: every chain over a sweep decreases strictly")
{
    for (uint64_t p = 17; p < 600; p += 8) {
        if (!is_prime(p))
            continue;
        for (uint64_t B = 3; B < 5 * p; B += 4) {
            if (!is_prime(B))
                continue;
            if (legendre_symbol(-(int64_t)p, B) != 1)
                continue;
            auto chain = teege_descent(p, B);
            uint64_t prev = UINT64_MAX;
            for (size_t i = 0; i < chain.steps.size(); ++i) {
                const auto& step = chain.steps[i];
                CHECK(step.x % 2 == 0);
                CHECK(step.x * step.x + p == step.B * step.b_prime);
                CHECK(step.B < prev);
                CHECK(step.B % 4 == 3);
                CHECK(legendre_symbol(-(int64_t)p, step.B) == 1);
                // linkage: each B after the first was extracted from the
                // previous cofactor; the terminal from the last one
                if (i > 0)
                    CHECK(chain.steps[i - 1].b_prime % step.B == 0);
                prev = step.B;
            }
            CHECK(chain.terminal < p);
            CHECK(chain.terminal % 4 == 3);
            CHECK(is_prime(chain.terminal));
            CHECK(legendre_symbol((int64_t)p, chain.terminal) == -1);
            if (!chain.steps.empty()) {
                CHECK(chain.steps.front().B == B);
                CHECK(chain.steps.back().b_prime % chain.terminal == 0);
            } else {
                CHECK(chain.terminal == B);
            }
        }
    }
}

TEST_CASE("descent validates its inputs")
{
    CHECK_THROWS_AS(teege_descent(13, 23), PreconditionError);  // 13 = 5 mod 8
    CHECK_THROWS_AS(teege_descent(16, 23), PreconditionError);
    CHECK_THROWS_AS(teege_descent(17, 21), PreconditionError);  // composite B
    CHECK_THROWS_AS(teege_descent(17, 29), PreconditionError);  // 29 = 1 mod 4
    // (-17/19) = -1: inadmissible start
    REQUIRE(legendre_symbol(-17, 19) == -1);
    CHECK_THROWS_AS(teege_descent(17, 19), PreconditionError);
}

TEST_CASE("mertens sum: hand values and envelope")
{
    auto m2 = mertens_sum(2);
    CHECK(m2.value == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-15));
    CHECK(m2.terms == 1);

    auto m10 = mertens_sum(10);
    double hand = std::log(2.0) / 2 + std::log(3.0) / 3 + std::log(5.0) / 5 + std::log(7.0) / 7;
    CHECK(m10.value == doctest::Approx(hand).epsilon(1e-14));
    CHECK(m10.terms == 4);
    CHECK(m10.reference == doctest::Approx(std::log(10.0)).epsilon(1e-15));
    CHECK(m10.deviation == doctest::Approx(m10.value - m10.reference).epsilon(1e-12));

    auto m = mertens_sum(1000000);
    CHECK(std::abs(m.deviation) < 1.6); // the observed O(1) envelope
    CHECK(m.terms == 78498);

    CHECK_THROWS_AS(mertens_sum(1), PreconditionError);
}

TEST_CASE("selberg sum: splitting primes only")
{
    // x = 10, D = 5: qualifying p with (5/p) = +1 are p = 11, 19, ... none <= 10
    auto s10 = selberg_sum(5, 10);
    CHECK(s10.value == 0.0);
    CHECK(s10.terms == 0);

    // first two qualifying primes for D = 5 are 11 and 19
    auto s20 = selberg_sum(5, 20);
    CHECK(s20.terms == 2);
    CHECK(s20.value ==
          doctest::Approx(std::log(11.0) / 11 + std::log(19.0) / 19).epsilon(1e-14));

    auto s = selberg_sum(5, 1000000);
    CHECK(s.reference == doctest::Approx(0.5 * std::log(1e6)).epsilon(1e-12));
    CHECK(std::abs(s.deviation) < 1.5);

    auto sneg = selberg_sum(-5, 1000000);
    CHECK(std::abs(sneg.deviation) < 1.5);

    CHECK_THROWS_AS(selberg_sum(9, 100), PreconditionError); // square D
}

TEST_CASE("rogers partition: structure at small x")
{
    auto r = rogers_partition(5, 2);
    CHECK(r.s1_plus == 0.0);
    CHECK(r.s1_minus == 0.0);
    CHECK(r.s3_plus == 0.0);
    CHECK(r.s3_minus == 0.0);

    // x = 20, D = 5: 3 -> s3-, 7 -> s3-, 11 -> s3+, 13 -> s1-, 17 -> s1-, 19 -> s3+
    auto r20 = rogers_partition(5, 20);
    CHECK(r20.n3_minus == 2);
    CHECK(r20.n3_plus == 2);
    CHECK(r20.n1_minus == 2);
    CHECK(r20.n1_plus == 0);
    CHECK(r20.s3_minus == doctest::Approx(std::log(3.0) / 3 + std::log(7.0) / 7).epsilon(1e-14));
}

TEST_CASE("rogers partition: identities at x = 10^5")
{
    const uint64_t x = 100000;
    for (int64_t D : {5, 13, 17}) {
        auto r = rogers_partition(D, x);

        // partition completeness against mertens minus the excluded primes
        auto m = mertens_sum(x);
        double excluded = std::log(2.0) / 2.0;
        for (uint64_t p = 3; p <= (uint64_t)D; p += 2)
            if (is_prime(p) && (uint64_t)D % p == 0)
                excluded += std::log((double)p) / (double)p;
        double four = ((r.s1_plus + r.s1_minus) + (r.s3_plus + r.s3_minus)) + excluded;
        CHECK(four == doctest::Approx(m.value).epsilon(1e-9));

        // split side counts add up to the prime count
        CHECK(r.n1_plus + r.n1_minus + r.n3_plus + r.n3_minus + 1 +
                  (is_prime((uint64_t)D) ? 1 : (uint64_t)0) ==
              m.terms);

        // selberg is the +1 half
        auto s = rogers_partition(D, x);
        auto sel = selberg_sum(D, x);
        CHECK(s.s1_plus + s.s3_plus == doctest::Approx(sel.value).epsilon(1e-9));

        // D -> -D swap: 1 (mod 4) sums unchanged, 3 (mod 4) sums exchanged
        auto rn = rogers_partition(-D, x);
        CHECK(rn.s1_plus == r.s1_plus);
        CHECK(rn.s1_minus == r.s1_minus);
        CHECK(rn.s3_plus == r.s3_minus);
        CHECK(rn.s3_minus == r.s3_plus);
        CHECK(rn.n3_plus == r.n3_minus);
        CHECK(rn.n3_minus == r.n3_plus);
    }
}

TEST_CASE("rogers partition validates D")
{
    CHECK_THROWS_AS(rogers_partition(0, 100), PreconditionError);
    CHECK_THROWS_AS(rogers_partition(16, 100), PreconditionError);
    CHECK_NOTHROW(rogers_partition(-16, 100)); // negative values are never square
}
