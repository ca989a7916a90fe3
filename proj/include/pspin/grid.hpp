#pragma once

// Parsing of grid arguments: comma-separated items, each either a value or an
// inclusive range "a:b" / "a:b:step".

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace pspin {

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view s, std::string_view whole) {
    s = trim(s);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("bad number '" + std::string(s) + "' in grid '" + std::string(whole) + "'");
    return value;
}

}  // namespace detail

inline std::vector<int> parse_int_grid(std::string_view text) {
    std::vector<int> out;
    if (detail::trim(text).empty()) throw std::invalid_argument("empty grid");
    for (auto item : detail::split(text, ',')) {
        const auto parts = detail::split(item, ':');
        if (parts.size() == 1) {
            out.push_back(detail::parse_number<int>(parts[0], text));
            continue;
        }
        if (parts.size() > 3) throw std::invalid_argument("bad range '" + std::string(item) + "'");
        const int a = detail::parse_number<int>(parts[0], text), b = detail::parse_number<int>(parts[1], text);
        const int step = parts.size() == 3 ? detail::parse_number<int>(parts[2], text) : 1;
        if (step <= 0) throw std::invalid_argument("range step must be positive in '" + std::string(item) + "'");
        if (b < a) throw std::invalid_argument("range end below start in '" + std::string(item) + "'");
        for (int v = a; v <= b; v += step) out.push_back(v);
    }
    return out;
}

/// Real ranges include the end point when it lies on the lattice up to a
/// relative tolerance of 1e-9 of the step.
inline std::vector<double> parse_real_grid(std::string_view text) {
    std::vector<double> out;
    if (detail::trim(text).empty()) throw std::invalid_argument("empty grid");
    for (auto item : detail::split(text, ',')) {
        const auto parts = detail::split(item, ':');
        if (parts.size() == 1) {
            out.push_back(detail::parse_number<double>(parts[0], text));
            continue;
        }
        if (parts.size() != 3) throw std::invalid_argument("real range needs a:b:step, got '" + std::string(item) + "'");
        const double a = detail::parse_number<double>(parts[0], text), b = detail::parse_number<double>(parts[1], text);
        const double step = detail::parse_number<double>(parts[2], text);
        if (!(step > 0.0)) throw std::invalid_argument("range step must be positive in '" + std::string(item) + "'");
        if (b < a) throw std::invalid_argument("range end below start in '" + std::string(item) + "'");
        const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
    }
    return out;
}

}  // namespace pspin
