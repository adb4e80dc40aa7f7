#include "kernels_impl.hpp"

namespace fingerlab::simd::detail {

void rigid_transform_scalar(const float* x, const float* y, std::size_t n, const RigidTransform& t, float* out_x,
                            float* out_y) {
    for (std::size_t k = 0; k < n; ++k) {
        const float dx = x[k] - t.origin_x;
        const float dy = y[k] - t.origin_y;
        out_x[k] = (t.cos * dx + t.sin * dy) + t.target_x;
        out_y[k] = (t.cos * dy - t.sin * dx) + t.target_y;
    }
}

std::size_t collect_candidates_scalar(const float* x, const float* y, const std::int32_t* angle, std::size_t n,
                                      const CandidateQuery& q, std::int32_t* out_index, float* out_dist_sq) {
    return collect_candidates_tail(x, y, angle, 0, n, q, out_index, out_dist_sq, 0);
}

}  // namespace fingerlab::simd::detail
