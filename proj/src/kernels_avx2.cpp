// AVX2 variant of the row accumulator. Kept in its own translation unit so
// only these functions carry the target attribute; the dispatcher never
// calls them unless the CPU reports AVX2.
//
// The lane layout mirrors the scalar kernel exactly: vector lane j holds
// the x == x_begin + j (mod 4) subsequence, each lane is summed in
// ascending x order, and rejected lanes contribute +0.0 (which cannot
// change a sum that is never -0.0). Every arithmetic step is either exact
// (the integer recurrence, the residue reduction) or the same single
// correctly-rounded IEEE operation the scalar kernel performs, so the two
// backends agree bit for bit.

#include "qrkit/kernels.hpp"

#if defined(__x86_64__)

#include <cmath>
#include <immintrin.h>

namespace qrkit::kernels {

bool avx2_supported() { return __builtin_cpu_supports("avx2"); }

namespace {

__attribute__((target("avx2")))
__m256d pow_chain_avx2(__m256d q, const PowRecipe& r) {
    switch (r.kind) {
    case PowRecipe::Kind::integer_exp: {
        const __m256d recip = _mm256_div_pd(_mm256_set1_pd(1.0), q);
        __m256d t = recip;
        for (int j = 1; j < r.int_part; ++j)
            t = _mm256_mul_pd(t, recip);
        return t;
    }
    case PowRecipe::Kind::dyadic: {
        const __m256d recip = _mm256_div_pd(_mm256_set1_pd(1.0), q);
        __m256d t = recip;
        for (int j = 1; j < r.int_part; ++j)
            t = _mm256_mul_pd(t, recip);
        __m256d f = recip;
        for (int j = 0; j < r.sqrt_steps; ++j)
            f = _mm256_sqrt_pd(f);
        return _mm256_mul_pd(t, f);
    }
    case PowRecipe::Kind::general:
    default: {
        // same libm call the scalar chain makes, element by element
        alignas(32) double buf[4];
        _mm256_store_pd(buf, q);
        for (int j = 0; j < 4; ++j)
            buf[j] = std::pow(buf[j], -r.s);
        return _mm256_load_pd(buf);
    }
    }
}

} // namespace

__attribute__((target("avx2")))
void accumulate_row_avx2(const RowSpec& row, LaneAccumulator& acc) {
    RowState st = prepare_row(row);

    __m256d q = _mm256_loadu_pd(st.q);
    __m256d d = _mm256_loadu_pd(st.d);
    const __m256d dd = _mm256_set1_pd(st.dd);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d qmax = _mm256_set1_pd(st.q_max);
    __m256d sums = _mm256_loadu_pd(acc.sum);

    const bool masked = row.mask.modulus != 0;
    const __m256d modv = _mm256_set1_pd(static_cast<double>(row.mask.modulus));

    for (int64_t t = 0; t < st.blocks; ++t) {
        __m256d ok = _mm256_and_pd(_mm256_cmp_pd(q, one, _CMP_GE_OQ),
                                   _mm256_cmp_pd(q, qmax, _CMP_LE_OQ));
        int bits = _mm256_movemask_pd(ok);
        if (masked && bits != 0) {
            // exact residue: q - L*floor(q/L), then a per-lane table probe
            __m256d quot = _mm256_floor_pd(_mm256_div_pd(q, modv));
            __m256d rem = _mm256_sub_pd(q, _mm256_mul_pd(modv, quot));
            alignas(32) double rbuf[4];
            _mm256_store_pd(rbuf, rem);
            for (int j = 0; j < 4; ++j)
                if ((bits >> j) & 1)
                    if (!row.mask.allowed[static_cast<uint32_t>(rbuf[j])])
                        bits &= ~(1 << j);
            const __m256i sel = _mm256_set_epi64x(
                (bits & 8) ? -1 : 0, (bits & 4) ? -1 : 0,
                (bits & 2) ? -1 : 0, (bits & 1) ? -1 : 0);
            ok = _mm256_castsi256_pd(sel);
        }
        if (bits != 0) {
            // rejected lanes get q = 1 so the chain stays finite, then 0.0
            __m256d q_safe = _mm256_blendv_pd(one, q, ok);
            __m256d term = _mm256_and_pd(pow_chain_avx2(q_safe, row.recipe), ok);
            sums = _mm256_add_pd(sums, term);
            for (int j = 0; j < 4; ++j)
                acc.count[j] += (bits >> j) & 1;
        }
        q = _mm256_add_pd(q, d);
        d = _mm256_add_pd(d, dd);
    }

    _mm256_storeu_pd(acc.sum, sums);

    // tail: same per-point path the scalar kernel takes
    alignas(32) double qbuf[4];
    _mm256_store_pd(qbuf, q);
    for (int j = 0; j < st.tail; ++j) {
        const double qv = qbuf[j];
        bool pass = qv >= 1.0 && qv <= st.q_max;
        if (pass && masked) {
            const double L = static_cast<double>(row.mask.modulus);
            double r = qv - L * std::floor(qv / L);
            pass = row.mask.allowed[static_cast<uint32_t>(r)] != 0;
        }
        if (pass) {
            acc.sum[j] += recipe_pow(qv, row.recipe);
            acc.count[j] += 1;
        }
    }
}

} // namespace qrkit::kernels

#endif // __x86_64__
