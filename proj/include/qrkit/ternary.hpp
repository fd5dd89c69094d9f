#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace qrkit::ternary {

// Diagonal ternary form a x^2 + b y^2 + c z^2 = 0. The solvability theorem
// wants a, b, c squarefree, pairwise coprime, none zero.
struct TernaryForm {
    int64_t a = 0, b = 0, c = 0;
};

void validate(const TernaryForm& f); // throws PreconditionError

// The four solvability conditions: -bc QR mod a, -ca QR mod b, -ab QR mod c
// (residues taken against |modulus|; modulus 1 is vacuously fine), and the
// mixed-signs requirement. A witness, when present, is a nontrivial exact
// solution.
struct SolvabilityReport {
    bool residue_a = false, residue_b = false, residue_c = false;
    bool sign_condition = false;
    std::optional<std::array<int64_t, 3>> witness;

    bool all_hold() const { return residue_a && residue_b && residue_c && sign_condition; }
};

// Evaluates the four conditions only; never searches for a witness.
SolvabilityReport ternary_conditions(const TernaryForm& f);

// Bounded exhaustive search: |x| <= sqrt|bc|, |y| <= sqrt|ac| with z read
// off the equation. The bound is sharp enough that coming up empty decides
// unsolvability. Returns a primitive nonnegative witness or nothing.
std::optional<std::array<int64_t, 3>> ternary_solve(const TernaryForm& f);

// true iff a = b = c = 1 (mod 4); such an equation is never solvable, no
// matter the residue conditions (a mod-4 parity count on odd squares).
bool mod4_obstruction(const TernaryForm& f);

// Sweep of the eight reciprocity implications over every ordered pair of
// distinct odd primes below limit. Both symbols are evaluated by Euler's
// criterion; each pair, classified by residue classes mod 4 and the
// hypothesis symbol, lands in exactly one of the eight cases; the matching
// conclusion is asserted. Violations are collected, never swallowed --
// a nonempty list is a refutation at desk scale.
struct ReciprocityReport {
    uint64_t prime_count = 0;
    uint64_t pair_count = 0;
    std::array<uint64_t, 8> case_counts{}; // I..VIII at indices 0..7

    struct Violation {
        uint64_t p, q;  // hypothesis symbol (p/q), conclusion (q/p)
        int case_index; // 0-based
    };
    std::vector<Violation> violations;
};

ReciprocityReport verify_reciprocity_cases(uint64_t limit);

} // namespace qrkit::ternary
