#pragma once

#include <cstdint>

namespace qrkit::kernels {

// Data-parallel inner loops for the lattice series: sum q(x)^(-s) over one
// row of lattice points, with range and residue filters. There is a scalar
// reference kernel and an AVX2 variant selected at runtime; both produce
// BITWISE identical results by construction:
//
//   * the row polynomial is walked by an exact integer second-difference
//     recurrence in doubles (every intermediate is an integer below 2^50,
//     so no operation rounds, regardless of FMA contraction or vector
//     width);
//   * accumulation is striped into four lanes by x mod 4, each lane summed
//     in ascending x order and combined in a fixed tree at the end, so the
//     floating-point addition order is the same in both variants;
//   * q^(-s) is computed by the same per-element chain of IEEE
//     correctly-rounded operations (divide / multiply / sqrt, or a libm
//     pow call) in both variants.
//
// Equivalence is enforced by tests that compare the two backends bit for
// bit over randomized rows.

enum class Backend { scalar, avx2 };

bool avx2_supported();
Backend active_backend();
void set_backend(Backend b); // throws PreconditionError if unsupported here

// How to evaluate q^(-s). Integer exponents use sequential multiplies of
// 1/q; exponents of the shape m + 2^-k (every value in the default epsilon
// schedule) use the multiply chain times a k-fold sqrt chain; anything else
// falls back to a per-element libm pow, again identical across backends.
struct PowRecipe {
    enum class Kind { integer_exp, dyadic, general };
    Kind kind = Kind::general;
    int int_part = 0;   // integer_exp: s itself; dyadic: floor(s)
    int sqrt_steps = 0; // dyadic: s = int_part + 2^(-sqrt_steps)
    double s = 0.0;

    static PowRecipe from_exponent(double s); // requires s > 1
};

// reference single-value evaluation of the recipe (the scalar chain)
double recipe_pow(double q, const PowRecipe& r);

// Keep only points whose value q falls in a residue class: r = q mod
// modulus computed exactly in doubles (q is an exact integer < 2^50 and
// modulus <= 1024, so floor(q/L) cannot misround). modulus 0 disables.
struct ResidueMask {
    uint32_t modulus = 0;
    const uint8_t* allowed = nullptr; // size = modulus, nonzero = keep
};

struct RowSpec {
    int64_t qa = 0, qb = 0, qc = 0; // q(x) = qa x^2 + qb x + qc
    int64_t x_begin = 0, x_end = 0; // half-open x range
    int64_t q_max = 0;              // accept 1 <= q(x) <= q_max
    PowRecipe recipe;
    ResidueMask mask;
};

struct LaneAccumulator {
    double sum[4] = {0, 0, 0, 0};
    uint64_t count[4] = {0, 0, 0, 0};

    double total() const { return (sum[0] + sum[1]) + (sum[2] + sum[3]); }
    uint64_t total_count() const { return count[0] + count[1] + count[2] + count[3]; }
};

// Validated row walk state shared by the backends: per-lane value and
// first-difference vectors plus the common second difference, all exact
// integers in doubles (validated against 2^50 at the row's extremes).
struct RowState {
    double q[4];
    double d[4];
    double dd;
    int64_t blocks = 0; // full groups of four
    int64_t tail = 0;   // leftover lanes 0..tail-1 after the last block
    double q_max = 0;
};

RowState prepare_row(const RowSpec& row); // throws PreconditionError

void accumulate_row(const RowSpec& row, LaneAccumulator& acc); // dispatched
void accumulate_row_scalar(const RowSpec& row, LaneAccumulator& acc);
void accumulate_row_avx2(const RowSpec& row, LaneAccumulator& acc);

} // namespace qrkit::kernels
