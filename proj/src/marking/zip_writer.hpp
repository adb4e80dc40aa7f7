#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fingerlab::marking::detail {

// Minimal ZIP archive with uncompressed (stored) entries and a fixed
// 1980-01-01 timestamp, so identical inputs give identical bytes.
class ZipWriter {
public:
    void add(const std::string& name, std::span<const std::uint8_t> data);
    void add(const std::string& name, const std::string& text);
    std::vector<std::uint8_t> finish();

private:
    struct Entry {
        std::string name;
        std::uint32_t crc = 0;
        std::uint32_t size = 0;
        std::uint32_t offset = 0;
    };
    std::vector<std::uint8_t> out_;
    std::vector<Entry> entries_;
};

}  // namespace fingerlab::marking::detail
