#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qrkit/pell.hpp"

namespace qrkit::quadform {

// Binary quadratic form a x^2 + b x y + c y^2 with the full middle
// coefficient (discriminant d = b^2 - 4ac). Forms with 4 | d carry an
// integer determinant D = d/4, which is the convention the x^2 - D y^2
// material lives in; determinant_to_discriminant is the adapter.
struct QuadForm {
    int64_t a = 0, b = 0, c = 0;
    auto operator<=>(const QuadForm&) const = default;

    int64_t eval(int64_t x, int64_t y) const { return a * x * x + b * x * y + c * y * y; }
    std::string str() const; // "(a,b,c)"
};

struct Discriminant {
    int64_t d = 0;
    std::optional<int64_t> determinant; // d/4 when 4 | d

    bool definite() const { return d < 0; }
};

// validates d = 0 or 1 (mod 4), d != 0, d not a perfect square
Discriminant make_discriminant(int64_t d);
Discriminant discriminant(const QuadForm& q);
int64_t determinant_to_discriminant(int64_t D); // 4*D, overflow-checked

bool is_primitive(const QuadForm& q);

// number of automorphs counted by the representation bookkeeping:
// 6 for d = -3, 4 for d = -4, 2 for d < -4, 1 for d > 0
int unit_count(int64_t d);

// ---- reduction ------------------------------------------------------------

bool is_reduced_definite(const QuadForm& q);
bool is_reduced_indefinite(const QuadForm& q, int64_t d);

// One reduction step for indefinite forms: (a,b,c) -> (c, r, (r^2-d)/(4c))
// with r = -b (mod 2|c|) normalized into the reduced window. Maps reduced
// forms to reduced forms; iterating from a reduced form walks its cycle.
QuadForm rho_step(const QuadForm& q, int64_t d);
std::vector<QuadForm> reduction_cycle(const QuadForm& reduced, int64_t d);

// Canonical class representative reachable by unimodular substitutions.
// d < 0: the classically reduced form (|b| <= a <= c, b >= 0 on boundary),
//        requires a > 0 (positive definite half).
// d > 0: the principal-translate display form derived from the form's
//        reduction cycle -- take the lexicographically least cycle member
//        with a > 0 and translate b into (-a, a]. Idempotent, one per cycle.
QuadForm reduce(const QuadForm& q);

// ---- class enumeration ------------------------------------------------------

struct ClassSet {
    Discriminant disc;
    std::vector<QuadForm> representatives; // canonical, sorted
    uint64_t h() const { return representatives.size(); }
};

// Proper (determinant +1) equivalence classes of primitive forms of
// discriminant d. Definite d: reduced-form enumeration, positive definite
// half only. Indefinite d: one representative per reduction cycle.
ClassSet class_number(int64_t d);

// ---- representations ----------------------------------------------------

// Domain over which representations are enumerated:
//   monostate        definite forms; the whole plane (finitely many anyway)
//   CoordBound       indefinite; the finite window |x|,|y| <= bound
//   AutomorphDomain  indefinite; one representative per automorph orbit:
//                    y > 0 and U(2ax + by) >= 2Ty, boundary included. The
//                    inequality's boundary ray is the automorph image of the
//                    excluded ray y = 0, so the half-open cone meets every
//                    orbit of {+-A^k} exactly once.
struct CoordBound {
    int64_t bound;
};
struct AutomorphDomain {
    pell::PellSolution pell; // fundamental solution for D = d/4
};
using ReprDomain = std::variant<std::monostate, CoordBound, AutomorphDomain>;

// Proper representations (gcd(x,y) = 1) of m, sorted by (x, y).
std::vector<std::pair<int64_t, int64_t>> proper_representations(const QuadForm& q, int64_t m,
                                                                const ReprDomain& domain = {});

// in_automorph_domain / automorph_min_x expose the domain test for the
// series lattice enumeration (x >= min_x is the half-plane condition on a
// fixed row y >= 1).
bool in_automorph_domain(const QuadForm& q, const pell::PellSolution& pell, int64_t x, int64_t y);
int64_t automorph_min_x(const QuadForm& q, const pell::PellSolution& pell, int64_t y);

// Count of proper representations of n summed over all classes of
// discriminant d, checked against the w * 2^mu dichotomy (all prime factors
// of n split => w * 2^mu, any inert factor => 0). Requires 4 | d and
// gcd(n, 2D) = 1. A mismatch is an InvariantViolation.
struct RepresentationCount {
    int64_t n = 0;
    uint64_t count = 0;
    int mu = 0;
};
RepresentationCount counting_lemma_check(int64_t d, int64_t n);

// All values in [0, limit] represented by q (properly or not).
std::vector<int64_t> representable_numbers(const QuadForm& q, int64_t limit);

} // namespace qrkit::quadform
