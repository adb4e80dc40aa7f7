#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fingerlab/error.hpp"
#include "fingerlab/fmr/record.hpp"
#include "fingerlab/fmr/validate.hpp"

namespace fingerlab::fmr {

inline constexpr std::size_t kHeaderSize = 24;
inline constexpr std::size_t kViewHeaderSize = 4;
inline constexpr std::size_t kMinutiaSize = 6;
inline constexpr std::uint32_t kMagic = 0x464D5200;    // "FMR\0"
inline constexpr std::uint32_t kVersion = 0x20323000;  // " 20\0"

enum class DecodeErrorKind {
    truncated,
    bad_magic,
    bad_version,
    length_mismatch,
    bad_minutia_type,
    bad_extended_data,
};

std::string_view to_string(DecodeErrorKind kind);

class DecodeError : public Error {
public:
    DecodeError(DecodeErrorKind kind, std::size_t offset, const std::string& detail);

    DecodeErrorKind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    DecodeErrorKind kind_;
    std::size_t offset_;
};

class EncodeError : public Error {
public:
    explicit EncodeError(std::vector<Violation> violations);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

// Serializes a record. Throws EncodeError if validate_record() reports
// anything in non-strict mode.
std::vector<std::uint8_t> encode_record(const MinutiaeRecord& record);

// Parses a complete record. The buffer must hold exactly the declared
// record length. Throws DecodeError.
MinutiaeRecord decode_record(std::span<const std::uint8_t> bytes);

// Size that encode_record() would produce; no validation.
std::size_t encoded_size(const MinutiaeRecord& record);

}  // namespace fingerlab::fmr
