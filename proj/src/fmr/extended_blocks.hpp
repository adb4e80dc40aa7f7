#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fingerlab/fmr/record.hpp"

namespace fingerlab::fmr::detail {

struct ExtendedBlock {
    std::uint16_t type = 0;
    std::size_t offset = 0;  // of the block header within the scanned area
    std::span<const std::uint8_t> payload;
};

struct BlockScan {
    std::vector<ExtendedBlock> blocks;
    std::optional<std::size_t> error_offset;
    std::string error;
};

// Splits an extended data area into [type:2][length:2][payload] blocks.
BlockScan scan_blocks(std::span<const std::uint8_t> area);

// Payload of the core/delta block for the given points (cores precede deltas).
std::vector<std::uint8_t> encode_core_delta(const std::vector<SingularPoint>& points);

// Appends the decoded points; returns an error message on malformed payload.
std::optional<std::string> decode_core_delta(std::span<const std::uint8_t> payload,
                                             std::vector<SingularPoint>& out);

}  // namespace fingerlab::fmr::detail
