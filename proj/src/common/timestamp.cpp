#include "cosmo/timestamp.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace cosmo {
namespace {

bool read_int(std::string_view& s, int digits, int& out) {
    if (s.size() < static_cast<std::size_t>(digits)) return false;
    auto res = std::from_chars(s.data(), s.data() + digits, out);
    if (res.ec != std::errc{} || res.ptr != s.data() + digits) return false;
    s.remove_prefix(digits);
    return true;
}

bool expect(std::string_view& s, char c) {
    if (s.empty() || s.front() != c) return false;
    s.remove_prefix(1);
    return true;
}

TimestampMs civil_to_ms(int y, int mo, int d, int h, int mi, int sec) {
    using namespace std::chrono;
    auto days = sys_days{year{y} / month{static_cast<unsigned>(mo)} / day{static_cast<unsigned>(d)}};
    auto tp = days + hours{h} + minutes{mi} + seconds{sec};
    return duration_cast<milliseconds>(tp.time_since_epoch()).count();
}

// Parses ".123456" into milliseconds (truncating beyond 3 digits).
bool read_fraction(std::string_view& s, int& ms) {
    ms = 0;
    if (s.empty() || (s.front() != '.' && s.front() != ',')) return true;
    s.remove_prefix(1);
    int count = 0;
    while (!s.empty() && std::isdigit(static_cast<unsigned char>(s.front()))) {
        if (count < 3) ms = ms * 10 + (s.front() - '0');
        ++count;
        s.remove_prefix(1);
    }
    if (count == 0) return false;
    for (int i = count; i < 3; ++i) ms *= 10;
    return true;
}

} // namespace

std::optional<TimestampMs> parse_iso8601(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
    if (!read_int(s, 4, y) || !expect(s, '-') || !read_int(s, 2, mo) || !expect(s, '-') || !read_int(s, 2, d))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
    if (!s.empty()) {
        if (s.front() != 'T' && s.front() != ' ') return std::nullopt;
        s.remove_prefix(1);
        if (!read_int(s, 2, h) || !expect(s, ':') || !read_int(s, 2, mi)) return std::nullopt;
        if (!s.empty() && s.front() == ':') {
            s.remove_prefix(1);
            if (!read_int(s, 2, sec)) return std::nullopt;
        }
        if (!read_fraction(s, ms)) return std::nullopt;
    }
    if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
    int offset_minutes = 0;
    if (!s.empty()) {
        if (s == "Z" || s == "z") {
            s.remove_prefix(1);
        } else if (s.front() == '+' || s.front() == '-') {
            int sign = s.front() == '-' ? -1 : 1;
            s.remove_prefix(1);
            int oh = 0, om = 0;
            if (!read_int(s, 2, oh)) return std::nullopt;
            if (!s.empty() && s.front() == ':') s.remove_prefix(1);
            if (!s.empty() && !read_int(s, 2, om)) return std::nullopt;
            offset_minutes = sign * (oh * 60 + om);
        } else {
            return std::nullopt;
        }
    }
    if (!s.empty()) return std::nullopt;
    return civil_to_ms(y, mo, d, h, mi, sec) + ms - static_cast<TimestampMs>(offset_minutes) * 60'000;
}

std::optional<TimestampMs> parse_timestamp(std::string_view text, const std::string& format) {
    if (format.empty() || format == "iso8601") return parse_iso8601(text);
    if (format == "unix_s" || format == "unix_ms") {
        std::string buf(text);
        char* end = nullptr;
        double v = std::strtod(buf.c_str(), &end);
        if (end == buf.c_str() || *end != '\0' || !std::isfinite(v)) return std::nullopt;
        return static_cast<TimestampMs>(std::llround(format == "unix_s" ? v * 1000.0 : v));
    }
    std::tm tm{};
    std::istringstream in{std::string(text)};
    in >> std::get_time(&tm, format.c_str());
    if (in.fail()) return std::nullopt;
    std::string rest;
    std::getline(in, rest);
    std::string_view tail = rest;
    int ms = 0;
    if (!read_fraction(tail, ms) || !tail.empty()) return std::nullopt;
    return civil_to_ms(tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec) + ms;
}

std::string format_iso8601(TimestampMs ms) {
    using namespace std::chrono;
    auto tp = sys_time<milliseconds>{milliseconds{ms}};
    auto days = floor<std::chrono::days>(tp);
    year_month_day ymd{days};
    hh_mm_ss<milliseconds> tod{tp - days};
    std::ostringstream out;
    out << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-' << std::setw(2)
        << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2) << static_cast<unsigned>(ymd.day()) << 'T'
        << std::setw(2) << tod.hours().count() << ':' << std::setw(2) << tod.minutes().count() << ':'
        << std::setw(2) << tod.seconds().count() << '.' << std::setw(3) << tod.subseconds().count() << 'Z';
    return out.str();
}

} // namespace cosmo
