#pragma once

#include <string>
#include <string_view>

#include "fingerlab/error.hpp"
#include "fingerlab/fmr/record.hpp"

namespace fingerlab::fmr {

// Lossless line-oriented rendering of a record, for diffs and fixtures.
//
//   fmr-text 1
//   record equipment=0 width=388 height=374 res_x=197 res_y=197
//   view finger=0 number=0 impression=0 quality=80
//   ending,100,200,90,60          <- kind,x,y,angle_deg,quality
//   core,150,160,45               <- kind,x,y[,angle_deg]
//   ext 000100050a                <- opaque extended blocks, hex
//
// Minutia and singular-point lines belong to the preceding `view` line.
std::string to_text(const MinutiaeRecord& record);

class TextParseError : public Error {
public:
    TextParseError(std::size_t line, const std::string& detail);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

MinutiaeRecord from_text(std::string_view text);

// Shortest decimal that reads back to the exact dequantized angle.
std::string format_angle(int angle_units);

}  // namespace fingerlab::fmr
