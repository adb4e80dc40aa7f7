#pragma once

#include <cstdlib>

#include "fingerlab/simd/kernels.hpp"

namespace fingerlab::simd::detail {

// Shared scalar loop; SIMD variants use it for their remainder elements.
inline std::size_t collect_candidates_tail(const float* x, const float* y, const std::int32_t* angle,
                                           std::size_t begin, std::size_t end, const CandidateQuery& q,
                                           std::int32_t* out_index, float* out_dist_sq, std::size_t count) {
    for (std::size_t k = begin; k < end; ++k) {
        const float dx = x[k] - q.x;
        const float dy = y[k] - q.y;
        const float d2 = dx * dx + dy * dy;
        if (!(d2 <= q.max_dist_sq)) continue;
        const std::int32_t diff = std::abs(angle[k] - q.angle_units);
        const std::int32_t circ = diff < 256 - diff ? diff : 256 - diff;
        if (circ > q.max_angle_units) continue;
        out_index[count] = static_cast<std::int32_t>(k);
        out_dist_sq[count] = d2;
        ++count;
    }
    return count;
}

void rigid_transform_scalar(const float* x, const float* y, std::size_t n, const RigidTransform& t, float* out_x,
                            float* out_y);
std::size_t collect_candidates_scalar(const float* x, const float* y, const std::int32_t* angle, std::size_t n,
                                      const CandidateQuery& q, std::int32_t* out_index, float* out_dist_sq);

#if defined(FINGERLAB_HAVE_AVX2)
void rigid_transform_avx2(const float* x, const float* y, std::size_t n, const RigidTransform& t, float* out_x,
                          float* out_y);
std::size_t collect_candidates_avx2(const float* x, const float* y, const std::int32_t* angle, std::size_t n,
                                    const CandidateQuery& q, std::int32_t* out_index, float* out_dist_sq);
#endif

}  // namespace fingerlab::simd::detail
