// Compiled with -mavx2 only; selected at runtime after a CPU check.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace fingerlab::simd::detail {

void rigid_transform_avx2(const float* x, const float* y, std::size_t n, const RigidTransform& t, float* out_x,
                          float* out_y) {
    const __m256 c = _mm256_set1_ps(t.cos);
    const __m256 s = _mm256_set1_ps(t.sin);
    const __m256 ox = _mm256_set1_ps(t.origin_x);
    const __m256 oy = _mm256_set1_ps(t.origin_y);
    const __m256 tx = _mm256_set1_ps(t.target_x);
    const __m256 ty = _mm256_set1_ps(t.target_y);
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        const __m256 dx = _mm256_sub_ps(_mm256_loadu_ps(x + k), ox);
        const __m256 dy = _mm256_sub_ps(_mm256_loadu_ps(y + k), oy);
        const __m256 rx = _mm256_add_ps(_mm256_add_ps(_mm256_mul_ps(c, dx), _mm256_mul_ps(s, dy)), tx);
        const __m256 ry = _mm256_add_ps(_mm256_sub_ps(_mm256_mul_ps(c, dy), _mm256_mul_ps(s, dx)), ty);
        _mm256_storeu_ps(out_x + k, rx);
        _mm256_storeu_ps(out_y + k, ry);
    }
    if (k < n) rigid_transform_scalar(x + k, y + k, n - k, t, out_x + k, out_y + k);
}

std::size_t collect_candidates_avx2(const float* x, const float* y, const std::int32_t* angle, std::size_t n,
                                    const CandidateQuery& q, std::int32_t* out_index, float* out_dist_sq) {
    const __m256 qx = _mm256_set1_ps(q.x);
    const __m256 qy = _mm256_set1_ps(q.y);
    const __m256 max_d2 = _mm256_set1_ps(q.max_dist_sq);
    const __m256i qa = _mm256_set1_epi32(q.angle_units);
    const __m256i full_turn = _mm256_set1_epi32(256);
    const __m256i angle_limit = _mm256_set1_epi32(q.max_angle_units + 1);

    std::size_t count = 0;
    std::size_t k = 0;
    alignas(32) float d2_lanes[8];
    for (; k + 8 <= n; k += 8) {
        const __m256 dx = _mm256_sub_ps(_mm256_loadu_ps(x + k), qx);
        const __m256 dy = _mm256_sub_ps(_mm256_loadu_ps(y + k), qy);
        const __m256 d2 = _mm256_add_ps(_mm256_mul_ps(dx, dx), _mm256_mul_ps(dy, dy));
        const __m256 near = _mm256_cmp_ps(d2, max_d2, _CMP_LE_OQ);

        const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(angle + k));
        const __m256i diff = _mm256_abs_epi32(_mm256_sub_epi32(a, qa));
        const __m256i circ = _mm256_min_epi32(diff, _mm256_sub_epi32(full_turn, diff));
        const __m256i aligned = _mm256_cmpgt_epi32(angle_limit, circ);

        int bits = _mm256_movemask_ps(_mm256_and_ps(near, _mm256_castsi256_ps(aligned)));
        if (bits == 0) continue;
        _mm256_store_ps(d2_lanes, d2);
        while (bits) {
            const int lane = __builtin_ctz(static_cast<unsigned>(bits));
            out_index[count] = static_cast<std::int32_t>(k + static_cast<std::size_t>(lane));
            out_dist_sq[count] = d2_lanes[lane];
            ++count;
            bits &= bits - 1;
        }
    }
    return collect_candidates_tail(x, y, angle, k, n, q, out_index, out_dist_sq, count);
}

}  // namespace fingerlab::simd::detail
