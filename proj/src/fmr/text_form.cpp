#include "fingerlab/fmr/text_form.hpp"

#include <charconv>
#include <map>
#include <sstream>
#include <vector>

#include "fingerlab/fmr/angle.hpp"

namespace fingerlab::fmr {

namespace {

constexpr std::string_view kMagicLine = "fmr-text 1";

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto at = s.find(sep, start);
        parts.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    return parts;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

int parse_int(std::string_view s, std::size_t line) {
    s = trim(s);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw TextParseError(line, "expected an integer, found '" + std::string(s) + "'");
    }
    return value;
}

int parse_angle(std::string_view s, std::size_t line) {
    s = trim(s);
    double degrees = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), degrees);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw TextParseError(line, "expected an angle in degrees, found '" + std::string(s) + "'");
    }
    try {
        return quantize_angle(degrees);
    } catch (const InvalidArgument& e) {
        throw TextParseError(line, e.what());
    }
}

// key=value pairs after the leading keyword.
std::map<std::string, int, std::less<>> parse_fields(std::string_view rest, std::size_t line) {
    std::map<std::string, int, std::less<>> fields;
    for (auto token : split(rest, ' ')) {
        token = trim(token);
        if (token.empty()) continue;
        const auto eq = token.find('=');
        if (eq == std::string_view::npos) {
            throw TextParseError(line, "expected key=value, found '" + std::string(token) + "'");
        }
        fields[std::string(token.substr(0, eq))] = parse_int(token.substr(eq + 1), line);
    }
    return fields;
}

int field(const std::map<std::string, int, std::less<>>& fields, std::string_view key, std::size_t line) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw TextParseError(line, "missing field '" + std::string(key) + "'");
    return it->second;
}

std::vector<std::uint8_t> parse_hex(std::string_view s, std::size_t line) {
    s = trim(s);
    if (s.size() % 2 != 0) throw TextParseError(line, "odd-length hex string");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < s.size(); i += 2) {
        unsigned v = 0;
        const auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + i + 2, v, 16);
        if (ec != std::errc{} || ptr != s.data() + i + 2) throw TextParseError(line, "bad hex digit");
        out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

}  // namespace

TextParseError::TextParseError(std::size_t line, const std::string& detail)
    : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}

std::string format_angle(int angle_units) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, dequantize_angle(angle_units));
    return std::string(buf, res.ptr);
}

std::string to_text(const MinutiaeRecord& record) {
    std::ostringstream os;
    os << kMagicLine << '\n';
    os << "record equipment=" << record.capture_equipment << " width=" << record.image_width
       << " height=" << record.image_height << " res_x=" << record.resolution_x
       << " res_y=" << record.resolution_y << '\n';
    for (const auto& view : record.views) {
        os << "view finger=" << view.finger_position << " number=" << view.view_number
           << " impression=" << view.impression_type << " quality=" << view.finger_quality << '\n';
        for (const auto& m : view.minutiae) {
            os << to_string(m.kind) << ',' << m.x << ',' << m.y << ',' << format_angle(m.angle_units) << ','
               << m.quality << '\n';
        }
        for (const auto& p : view.singular_points) {
            os << to_string(p.kind) << ',' << p.x << ',' << p.y;
            if (p.angle_units) os << ',' << format_angle(*p.angle_units);
            os << '\n';
        }
        if (!view.extended_bytes.empty()) {
            os << "ext ";
            static constexpr char digits[] = "0123456789abcdef";
            for (const auto b : view.extended_bytes) os << digits[b >> 4] << digits[b & 0xF];
            os << '\n';
        }
    }
    return os.str();
}

MinutiaeRecord from_text(std::string_view text) {
    MinutiaeRecord record;
    bool have_magic = false;
    bool have_record = false;
    const auto lines = split(text, '\n');
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        if (!have_magic) {
            if (line != kMagicLine) throw TextParseError(line_no, "expected '" + std::string(kMagicLine) + "'");
            have_magic = true;
            continue;
        }
        const auto space = line.find(' ');
        const auto keyword = line.substr(0, space);
        const auto rest = space == std::string_view::npos ? std::string_view{} : line.substr(space + 1);
        if (keyword == "record") {
            const auto f = parse_fields(rest, line_no);
            record.capture_equipment = static_cast<std::uint16_t>(field(f, "equipment", line_no));
            record.image_width = field(f, "width", line_no);
            record.image_height = field(f, "height", line_no);
            record.resolution_x = field(f, "res_x", line_no);
            record.resolution_y = field(f, "res_y", line_no);
            have_record = true;
            continue;
        }
        if (!have_record) throw TextParseError(line_no, "'record' line must come first");
        if (keyword == "view") {
            const auto f = parse_fields(rest, line_no);
            FingerView view;
            view.finger_position = field(f, "finger", line_no);
            view.view_number = field(f, "number", line_no);
            view.impression_type = field(f, "impression", line_no);
            view.finger_quality = field(f, "quality", line_no);
            record.views.push_back(std::move(view));
            continue;
        }
        if (record.views.empty()) throw TextParseError(line_no, "data before the first 'view' line");
        auto& view = record.views.back();
        if (keyword == "ext") {
            const auto bytes = parse_hex(rest, line_no);
            view.extended_bytes.insert(view.extended_bytes.end(), bytes.begin(), bytes.end());
            continue;
        }
        const auto parts = split(line, ',');
        const auto head = trim(parts[0]);
        if (const auto kind = parse_minutia_kind(head)) {
            if (parts.size() != 5) throw TextParseError(line_no, "minutia needs kind,x,y,angle_deg,quality");
            view.minutiae.push_back({*kind, parse_int(parts[1], line_no), parse_int(parts[2], line_no),
                                     parse_angle(parts[3], line_no), parse_int(parts[4], line_no)});
        } else if (const auto skind = parse_singular_kind(head)) {
            if (parts.size() != 3 && parts.size() != 4) {
                throw TextParseError(line_no, "singular point needs kind,x,y[,angle_deg]");
            }
            SingularPoint p{*skind, parse_int(parts[1], line_no), parse_int(parts[2], line_no), std::nullopt};
            if (parts.size() == 4) p.angle_units = parse_angle(parts[3], line_no);
            view.singular_points.push_back(p);
        } else {
            throw TextParseError(line_no, "unknown line kind '" + std::string(head) + "'");
        }
    }
    if (!have_record) throw TextParseError(lines.size(), "no 'record' line");
    return record;
}

}  // namespace fingerlab::fmr
