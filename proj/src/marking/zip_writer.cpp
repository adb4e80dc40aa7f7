#include "zip_writer.hpp"

#include <zlib.h>

#include "fingerlab/error.hpp"

namespace fingerlab::marking::detail {

namespace {

constexpr std::uint16_t kVersion = 20;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01

void put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

void ZipWriter::add(const std::string& name, std::span<const std::uint8_t> data) {
    if (data.size() > 0xFFFFFFFFu || out_.size() > 0xFFFFFFFFu || name.size() > 0xFFFF) {
        throw Error("archive too large for a ZIP without Zip64");
    }
    Entry e{name, static_cast<std::uint32_t>(crc32(0L, data.data(), static_cast<uInt>(data.size()))),
            static_cast<std::uint32_t>(data.size()), static_cast<std::uint32_t>(out_.size())};
    put32(out_, 0x04034b50);
    put16(out_, kVersion);
    put16(out_, 0);  // flags
    put16(out_, 0);  // stored
    put16(out_, 0);  // time
    put16(out_, kDosDate);
    put32(out_, e.crc);
    put32(out_, e.size);
    put32(out_, e.size);
    put16(out_, static_cast<std::uint16_t>(name.size()));
    put16(out_, 0);
    out_.insert(out_.end(), name.begin(), name.end());
    out_.insert(out_.end(), data.begin(), data.end());
    entries_.push_back(std::move(e));
}

void ZipWriter::add(const std::string& name, const std::string& text) {
    add(name, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> ZipWriter::finish() {
    if (entries_.size() > 0xFFFF) throw Error("too many entries for a ZIP without Zip64");
    const auto cd_offset = static_cast<std::uint32_t>(out_.size());
    for (const auto& e : entries_) {
        put32(out_, 0x02014b50);
        put16(out_, kVersion);  // made by
        put16(out_, kVersion);  // needed
        put16(out_, 0);
        put16(out_, 0);
        put16(out_, 0);
        put16(out_, kDosDate);
        put32(out_, e.crc);
        put32(out_, e.size);
        put32(out_, e.size);
        put16(out_, static_cast<std::uint16_t>(e.name.size()));
        put16(out_, 0);  // extra
        put16(out_, 0);  // comment
        put16(out_, 0);  // disk
        put16(out_, 0);  // internal attributes
        put32(out_, 0);  // external attributes
        put32(out_, e.offset);
        out_.insert(out_.end(), e.name.begin(), e.name.end());
    }
    const auto cd_size = static_cast<std::uint32_t>(out_.size()) - cd_offset;
    put32(out_, 0x06054b50);
    put16(out_, 0);
    put16(out_, 0);
    put16(out_, static_cast<std::uint16_t>(entries_.size()));
    put16(out_, static_cast<std::uint16_t>(entries_.size()));
    put32(out_, cd_size);
    put32(out_, cd_offset);
    put16(out_, 0);
    entries_.clear();
    return std::move(out_);
}

}  // namespace fingerlab::marking::detail
