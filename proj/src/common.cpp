#include "spillnet/common.hpp"

#include <charconv>
#include <cstdio>

namespace spillnet {

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config:
            return 2;
        case ErrorKind::Data:
            return 3;
        case ErrorKind::Numerical:
            return 4;
    }
    return 4;
}

Error::Error(ErrorKind kind, std::string stage, const std::string& message)
    : std::runtime_error("[" + stage + "] " + message), kind_(kind), stage_(std::move(stage)) {}

void throw_config(std::string stage, const std::string& message) {
    throw Error(ErrorKind::Config, std::move(stage), message);
}

void throw_data(std::string stage, const std::string& message) {
    throw Error(ErrorKind::Data, std::move(stage), message);
}

void throw_numerical(std::string stage, const std::string& message) {
    throw Error(ErrorKind::Numerical, std::move(stage), message);
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

namespace {

bool parse_uint(std::string_view text, int& out) {
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end && out >= 0;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::optional<std::chrono::minutes> parse_time_of_day(std::string_view text) {
    if (text.size() != 5 || text[2] != ':') return std::nullopt;
    int h = 0, m = 0;
    if (!parse_uint(text.substr(0, 2), h) || !parse_uint(text.substr(3, 2), m)) return std::nullopt;
    if (h > 23 || m > 59) return std::nullopt;
    return std::chrono::minutes{h * 60 + m};
}

std::string format_time_of_day(std::chrono::minutes tod) {
    char buf[8];
    const auto total = tod.count();
    std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(total / 60),
                  static_cast<int>(total % 60));
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace spillnet
