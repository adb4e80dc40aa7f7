#include "fingerlab/fmr/codec.hpp"

#include <cstdio>

#include "extended_blocks.hpp"

namespace fingerlab::fmr {

namespace {

class Writer {
public:
    explicit Writer(std::size_t reserve) { out.reserve(reserve); }
    void u8(unsigned v) { out.push_back(static_cast<std::uint8_t>(v)); }
    void u16(unsigned v) {
        u8(v >> 8 & 0xFF);
        u8(v & 0xFF);
    }
    void u32(std::uint32_t v) {
        u16(v >> 16);
        u16(v & 0xFFFF);
    }
    void bytes(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }
    std::vector<std::uint8_t> out;
};

// Never reads past `limit`; every short read is a truncation at the current offset.
class Reader {
public:
    Reader(std::span<const std::uint8_t> data, std::size_t limit) : data_(data), limit_(limit) {}

    std::size_t pos() const { return pos_; }

    void need(std::size_t n, const char* what) const {
        if (limit_ - pos_ < n) {
            throw DecodeError(DecodeErrorKind::truncated, pos_,
                              std::string("input ends inside ") + what);
        }
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return data_[pos_++];
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        const auto v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        const std::uint32_t v = static_cast<std::uint32_t>(data_[pos_]) << 24 |
                                static_cast<std::uint32_t>(data_[pos_ + 1]) << 16 |
                                static_cast<std::uint32_t>(data_[pos_ + 2]) << 8 | data_[pos_ + 3];
        pos_ += 4;
        return v;
    }
    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        need(n, what);
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

std::string hex32(std::uint32_t v) {
    char buf[11];
    std::snprintf(buf, sizeof buf, "0x%08X", v);
    return buf;
}

}  // namespace

std::string_view to_string(DecodeErrorKind kind) {
    switch (kind) {
        case DecodeErrorKind::truncated: return "truncated";
        case DecodeErrorKind::bad_magic: return "bad-magic";
        case DecodeErrorKind::bad_version: return "bad-version";
        case DecodeErrorKind::length_mismatch: return "length-mismatch";
        case DecodeErrorKind::bad_minutia_type: return "bad-minutia-type";
        case DecodeErrorKind::bad_extended_data: return "bad-extended-data";
    }
    return "unknown";
}

DecodeError::DecodeError(DecodeErrorKind kind, std::size_t offset, const std::string& detail)
    : Error(std::string(to_string(kind)) + " at byte " + std::to_string(offset) + ": " + detail),
      kind_(kind),
      offset_(offset) {}

EncodeError::EncodeError(std::vector<Violation> violations)
    : Error("record violates invariants: " + describe(violations)), violations_(std::move(violations)) {}

std::size_t encoded_size(const MinutiaeRecord& record) {
    std::size_t size = kHeaderSize;
    for (const auto& view : record.views) {
        size += kViewHeaderSize + kMinutiaSize * view.minutiae.size() + 2 + view.extended_bytes.size();
        if (!view.singular_points.empty()) size += 4 + detail::encode_core_delta(view.singular_points).size();
    }
    return size;
}

std::vector<std::uint8_t> encode_record(const MinutiaeRecord& record) {
    if (auto violations = validate_record(record); !violations.empty()) {
        throw EncodeError(std::move(violations));
    }
    const std::size_t total = encoded_size(record);
    Writer w(total);
    w.u32(kMagic);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(total));
    w.u16(record.capture_equipment);
    w.u16(static_cast<unsigned>(record.image_width));
    w.u16(static_cast<unsigned>(record.image_height));
    w.u16(static_cast<unsigned>(record.resolution_x));
    w.u16(static_cast<unsigned>(record.resolution_y));
    w.u8(static_cast<unsigned>(record.views.size()));
    w.u8(0);
    for (const auto& view : record.views) {
        w.u8(static_cast<unsigned>(view.finger_position));
        w.u8(static_cast<unsigned>(view.view_number << 4 | view.impression_type));
        w.u8(static_cast<unsigned>(view.finger_quality));
        w.u8(static_cast<unsigned>(view.minutiae.size()));
        for (const auto& m : view.minutiae) {
            w.u16(static_cast<unsigned>(m.kind) << 14 | static_cast<unsigned>(m.x));
            w.u16(static_cast<unsigned>(m.y));
            w.u8(static_cast<unsigned>(m.angle_units));
            w.u8(static_cast<unsigned>(m.quality));
        }
        std::vector<std::uint8_t> core_delta;
        if (!view.singular_points.empty()) core_delta = detail::encode_core_delta(view.singular_points);
        const std::size_t ext_len =
            (core_delta.empty() ? 0 : 4 + core_delta.size()) + view.extended_bytes.size();
        w.u16(static_cast<unsigned>(ext_len));
        if (!core_delta.empty()) {
            w.u16(kCoreDeltaBlockType);
            w.u16(static_cast<unsigned>(4 + core_delta.size()));
            w.bytes(core_delta);
        }
        w.bytes(view.extended_bytes);
    }
    return std::move(w.out);
}

MinutiaeRecord decode_record(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize) {
        throw DecodeError(DecodeErrorKind::truncated, bytes.size(),
                          "record header needs 24 bytes, got " + std::to_string(bytes.size()));
    }
    Reader r(bytes, kHeaderSize);
    if (const auto magic = r.u32("magic"); magic != kMagic) {
        throw DecodeError(DecodeErrorKind::bad_magic, 0, "expected 0x464D5200, found " + hex32(magic));
    }
    if (const auto version = r.u32("version"); version != kVersion) {
        throw DecodeError(DecodeErrorKind::bad_version, 4, "expected 0x20323000, found " + hex32(version));
    }
    const std::uint32_t declared = r.u32("record length");
    if (declared > bytes.size()) {
        throw DecodeError(DecodeErrorKind::truncated, bytes.size(),
                          "record length field says " + std::to_string(declared) + " bytes, input has " +
                              std::to_string(bytes.size()));
    }
    if (declared < kHeaderSize || declared < bytes.size()) {
        throw DecodeError(DecodeErrorKind::length_mismatch, 8,
                          "record length field says " + std::to_string(declared) + " bytes, input has " +
                              std::to_string(bytes.size()));
    }

    r = Reader(bytes, declared);
    r.take(12, "header");
    MinutiaeRecord record;
    record.capture_equipment = r.u16("capture equipment");
    record.image_width = r.u16("image width");
    record.image_height = r.u16("image height");
    record.resolution_x = r.u16("x resolution");
    record.resolution_y = r.u16("y resolution");
    const int view_count = r.u8("view count");
    r.u8("reserved byte");

    record.views.reserve(static_cast<std::size_t>(view_count));
    for (int v = 0; v < view_count; ++v) {
        FingerView view;
        view.finger_position = r.u8("finger position");
        const std::uint8_t packed = r.u8("view number");
        view.view_number = packed >> 4;
        view.impression_type = packed & 0x0F;
        view.finger_quality = r.u8("finger quality");
        const int count = r.u8("minutiae count");
        view.minutiae.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const std::size_t at = r.pos();
            const std::uint16_t xw = r.u16("minutia");
            const unsigned type = xw >> 14;
            if (type == 3) {
                throw DecodeError(DecodeErrorKind::bad_minutia_type, at, "reserved minutia type 11b");
            }
            Minutia m;
            m.kind = static_cast<MinutiaKind>(type);
            m.x = xw & 0x3FFF;
            m.y = r.u16("minutia") & 0x3FFF;
            m.angle_units = r.u8("minutia");
            m.quality = r.u8("minutia");
            view.minutiae.push_back(m);
        }
        const std::uint16_t ext_len = r.u16("extended data length");
        const std::size_t ext_at = r.pos();
        const auto area = r.take(ext_len, "extended data");
        const auto scan = detail::scan_blocks(area);
        if (scan.error_offset) {
            throw DecodeError(DecodeErrorKind::bad_extended_data, ext_at + *scan.error_offset, scan.error);
        }
        for (const auto& block : scan.blocks) {
            if (block.type == kCoreDeltaBlockType) {
                if (auto err = detail::decode_core_delta(block.payload, view.singular_points)) {
                    throw DecodeError(DecodeErrorKind::bad_extended_data, ext_at + block.offset, *err);
                }
            } else {
                const auto raw = area.subspan(block.offset, block.payload.size() + 4);
                view.extended_bytes.insert(view.extended_bytes.end(), raw.begin(), raw.end());
            }
        }
        record.views.push_back(std::move(view));
    }
    if (r.pos() != declared) {
        throw DecodeError(DecodeErrorKind::length_mismatch, r.pos(),
                          std::to_string(declared - r.pos()) + " bytes left after the last view");
    }
    return record;
}

}  // namespace fingerlab::fmr
