#include "extended_blocks.hpp"

namespace fingerlab::fmr::detail {

namespace {

constexpr std::uint8_t kAnglePresent = 0x40;

void put_u16(std::vector<std::uint8_t>& out, unsigned value) {
    out.push_back(static_cast<std::uint8_t>(value >> 8));
    out.push_back(static_cast<std::uint8_t>(value & 0xFF));
}

void encode_group(const std::vector<SingularPoint>& points, SingularKind kind,
                  std::vector<std::uint8_t>& out) {
    std::vector<const SingularPoint*> group;
    for (const auto& p : points) {
        if (p.kind == kind) group.push_back(&p);
    }
    const bool with_angle = !group.empty() && group.front()->angle_units.has_value();
    out.push_back(static_cast<std::uint8_t>((with_angle ? kAnglePresent : 0) | group.size()));
    for (const auto* p : group) {
        put_u16(out, static_cast<unsigned>(p->x) & 0x3FFF);
        put_u16(out, static_cast<unsigned>(p->y) & 0x3FFF);
        if (with_angle) out.push_back(static_cast<std::uint8_t>(*p->angle_units));
    }
}

}  // namespace

BlockScan scan_blocks(std::span<const std::uint8_t> area) {
    BlockScan scan;
    std::size_t pos = 0;
    while (pos < area.size()) {
        if (area.size() - pos < 4) {
            scan.error_offset = pos;
            scan.error = "extended block header truncated";
            return scan;
        }
        const auto type = static_cast<std::uint16_t>(area[pos] << 8 | area[pos + 1]);
        const std::size_t length = static_cast<std::size_t>(area[pos + 2] << 8 | area[pos + 3]);
        if (length < 4 || length > area.size() - pos) {
            scan.error_offset = pos;
            scan.error = "extended block length " + std::to_string(length) + " invalid";
            return scan;
        }
        scan.blocks.push_back({type, pos, area.subspan(pos + 4, length - 4)});
        pos += length;
    }
    return scan;
}

std::vector<std::uint8_t> encode_core_delta(const std::vector<SingularPoint>& points) {
    std::vector<std::uint8_t> out;
    encode_group(points, SingularKind::core, out);
    encode_group(points, SingularKind::delta, out);
    return out;
}

std::optional<std::string> decode_core_delta(std::span<const std::uint8_t> payload,
                                             std::vector<SingularPoint>& out) {
    std::size_t pos = 0;
    for (const auto kind : {SingularKind::core, SingularKind::delta}) {
        if (pos >= payload.size()) return "core/delta payload truncated";
        const std::uint8_t info = payload[pos++];
        const bool with_angle = (info & 0xC0) == kAnglePresent;
        const int count = info & 0x0F;
        const std::size_t point_size = with_angle ? 5 : 4;
        if (payload.size() - pos < point_size * static_cast<std::size_t>(count)) {
            return "core/delta payload truncated";
        }
        for (int i = 0; i < count; ++i) {
            SingularPoint p;
            p.kind = kind;
            p.x = (payload[pos] << 8 | payload[pos + 1]) & 0x3FFF;
            p.y = (payload[pos + 2] << 8 | payload[pos + 3]) & 0x3FFF;
            if (with_angle) p.angle_units = payload[pos + 4];
            pos += point_size;
            out.push_back(p);
        }
    }
    if (pos != payload.size()) return "trailing bytes in core/delta payload";
    return std::nullopt;
}

}  // namespace fingerlab::fmr::detail
