#include "qrkit/kernels.hpp"

#include "qrkit/errors.hpp"

#include <cmath>
#include <string>

namespace qrkit::kernels {

namespace {

// Everything that feeds the double-precision recurrence has to stay an
// exact integer. 2^50 leaves headroom below the 2^53 mantissa limit even
// after adding a first difference.
constexpr int64_t kExactLimit = int64_t{1} << 50;
constexpr uint32_t kMaskModulusLimit = 1024;

using I128 = __int128;

I128 eval_q(const RowSpec& row, I128 x) {
    return (I128(row.qa) * x + row.qb) * x + row.qc;
}

void require_exact(I128 v, const char* what) {
    if (v >= kExactLimit || v <= -kExactLimit)
        throw PreconditionError(std::string(what) +
                                " exceeds the exact-integer range of a double");
}

} // namespace

PowRecipe PowRecipe::from_exponent(double s) {
    if (!(s > 1.0))
        throw PreconditionError("series exponent must satisfy s > 1");
    PowRecipe r;
    r.s = s;
    double ip = std::floor(s);
    double frac = s - ip;
    if (frac == 0.0 && ip <= 64.0) {
        r.kind = Kind::integer_exp;
        r.int_part = static_cast<int>(ip);
        return r;
    }
    // fractional part an exact 2^-k? (the epsilon schedule is dyadic)
    for (int k = 1; k <= 20; ++k) {
        if (frac == std::ldexp(1.0, -k) && ip <= 64.0) {
            r.kind = Kind::dyadic;
            r.int_part = static_cast<int>(ip);
            r.sqrt_steps = k;
            return r;
        }
    }
    r.kind = Kind::general;
    return r;
}

double recipe_pow(double q, const PowRecipe& r) {
    switch (r.kind) {
    case PowRecipe::Kind::integer_exp: {
        double recip = 1.0 / q;
        double t = recip;
        for (int j = 1; j < r.int_part; ++j)
            t = t * recip;
        return t;
    }
    case PowRecipe::Kind::dyadic: {
        double recip = 1.0 / q;
        double t = recip;
        for (int j = 1; j < r.int_part; ++j)
            t = t * recip;
        double f = recip;
        for (int j = 0; j < r.sqrt_steps; ++j)
            f = std::sqrt(f);
        return t * f;
    }
    case PowRecipe::Kind::general:
    default:
        return std::pow(q, -r.s);
    }
}

RowState prepare_row(const RowSpec& row) {
    RowState st;
    if (row.x_end <= row.x_begin)
        return st; // empty row: blocks = tail = 0

    if (row.q_max < 1 || row.q_max >= kExactLimit)
        throw PreconditionError("row q_max must lie in [1, 2^50)");
    if (row.mask.modulus > kMaskModulusLimit)
        throw PreconditionError("residue mask modulus must be <= 1024");
    if (row.mask.modulus > 0 && row.mask.allowed == nullptr)
        throw PreconditionError("residue mask has a modulus but no table");

    const int64_t n = row.x_end - row.x_begin;
    st.blocks = n / 4;
    st.tail = n % 4;
    st.q_max = static_cast<double>(row.q_max);

    // Exactness certificate: |q| is largest at the window ends or at the
    // vertex, |first difference| at the ends, so checking those points
    // bounds every intermediate the recurrence will visit.
    require_exact(eval_q(row, row.x_begin), "row value");
    require_exact(eval_q(row, row.x_end - 1), "row value");
    if (row.qa != 0) {
        I128 vx = I128(-row.qb) / (2 * I128(row.qa)); // near the vertex
        for (I128 x = vx - 1; x <= vx + 1; ++x)
            if (x > row.x_begin && x < row.x_end - 1)
                require_exact(eval_q(row, x), "row value");
    }

    for (int j = 0; j < 4; ++j) {
        I128 x = I128(row.x_begin) + j;
        I128 q0 = eval_q(row, x);
        // lane stride is 4: d = q(x+4) - q(x), constant second difference 32*qa
        I128 d0 = I128(row.qa) * (8 * x + 16) + 4 * I128(row.qb);
        I128 dlast = d0 + 32 * I128(row.qa) * (st.blocks > 0 ? st.blocks - 1 : 0);
        require_exact(q0, "row value");
        require_exact(d0, "row difference");
        require_exact(dlast, "row difference");
        require_exact(q0 + dlast, "row value");
        st.q[j] = static_cast<double>(static_cast<int64_t>(q0));
        st.d[j] = static_cast<double>(static_cast<int64_t>(d0));
    }
    st.dd = static_cast<double>(32 * row.qa);
    return st;
}

namespace {

inline bool point_passes(double q, double q_max, const ResidueMask& mask) {
    if (!(q >= 1.0) || !(q <= q_max))
        return false;
    if (mask.modulus != 0) {
        const double L = static_cast<double>(mask.modulus);
        double r = q - L * std::floor(q / L); // exact: q integer < 2^50, L <= 1024
        if (!mask.allowed[static_cast<uint32_t>(r)])
            return false;
    }
    return true;
}

} // namespace

void accumulate_row_scalar(const RowSpec& row, LaneAccumulator& acc) {
    RowState st = prepare_row(row);
    for (int64_t t = 0; t < st.blocks; ++t) {
        for (int j = 0; j < 4; ++j) {
            const double q = st.q[j];
            if (point_passes(q, st.q_max, row.mask)) {
                acc.sum[j] += recipe_pow(q, row.recipe);
                acc.count[j] += 1;
            }
            st.q[j] += st.d[j];
            st.d[j] += st.dd;
        }
    }
    for (int j = 0; j < st.tail; ++j) {
        const double q = st.q[j];
        if (point_passes(q, st.q_max, row.mask)) {
            acc.sum[j] += recipe_pow(q, row.recipe);
            acc.count[j] += 1;
        }
    }
}

#if !defined(__x86_64__)
void accumulate_row_avx2(const RowSpec&, LaneAccumulator&) {
    throw PreconditionError("AVX2 backend is not available on this target");
}

bool avx2_supported() { return false; }
#endif

namespace {

Backend g_backend = avx2_supported() ? Backend::avx2 : Backend::scalar;

} // namespace

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw PreconditionError("AVX2 backend requested but not supported by this CPU");
    g_backend = b;
}

void accumulate_row(const RowSpec& row, LaneAccumulator& acc) {
    if (g_backend == Backend::avx2)
        accumulate_row_avx2(row, acc);
    else
        accumulate_row_scalar(row, acc);
}

} // namespace qrkit::kernels
