#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops of the reference matcher. Every variant must
// produce bit-identical output to the scalar reference: same IEEE float
// operations in the same order, no FMA contraction.

namespace fingerlab::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

// out = R * (p - origin) + target, with R = [[c, s], [-s, c]]: a
// counterclockwise rotation in image coordinates (y grows downwards).
struct RigidTransform {
    float cos = 1.0f;
    float sin = 0.0f;
    float origin_x = 0.0f;
    float origin_y = 0.0f;
    float target_x = 0.0f;
    float target_y = 0.0f;
};

struct CandidateQuery {
    float x = 0.0f;
    float y = 0.0f;
    std::int32_t angle_units = 0;
    float max_dist_sq = 0.0f;
    std::int32_t max_angle_units = 0;
};

struct KernelTable {
    Isa isa;

    void (*rigid_transform)(const float* x, const float* y, std::size_t n, const RigidTransform& t,
                            float* out_x, float* out_y);

    // Indices k (ascending) with (x[k]-q.x)^2 + (y[k]-q.y)^2 <= q.max_dist_sq and
    // circular |angle[k] - q.angle_units| <= q.max_angle_units. Writes the
    // index and squared distance of each hit; returns the hit count.
    std::size_t (*collect_candidates)(const float* x, const float* y, const std::int32_t* angle, std::size_t n,
                                      const CandidateQuery& q, std::int32_t* out_index, float* out_dist_sq);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled for this target.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);

// Throws InvalidArgument when `isa` is not available on this machine.
const KernelTable& kernels_for(Isa isa);

// Best variant the CPU supports. FINGERLAB_SIMD=scalar|avx2 forces a choice.
const KernelTable& best_kernels();

}  // namespace fingerlab::simd
