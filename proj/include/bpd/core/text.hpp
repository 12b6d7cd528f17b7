#pragma once

// Round-trip number formatting and small tokenizing helpers shared by the
// text file formats and the CSV/JSON reports.

#include <bpd/core/errors.hpp>

#include <charconv>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace bpd::text {

/// Shortest decimal representation that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("format_double: conversion failed");
    return std::string(buf, ptr);
}

/// Fixed scientific notation, used where columns should line up.
inline std::string format_sci(double v, int digits = 6) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, digits);
    if (ec != std::errc{}) throw Error("format_sci: conversion failed");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError("not a number: '" + std::string(s) + "'");
    return v;
}

inline long long parse_int(std::string_view s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError("not an integer: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

/// Parses complex literals of the form `re`, `imi`, `re+imi`, `re-imi`
/// (also accepts `i`, `-i`, and exponents such as `1e-3+2e-4i`).
inline std::complex<double> parse_complex(std::string_view raw) {
    std::string_view s = trim(raw);
    if (s.empty()) throw FormatError("empty complex literal");
    if (s.back() != 'i' && s.back() != 'j') return {parse_double(s), 0.0};
    std::string_view body = s.substr(0, s.size() - 1);
    // Find the sign separating the real and imaginary parts, skipping exponent signs.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [](std::string_view t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        if (t.front() == '+') t.remove_prefix(1);
        return parse_double(t);
    };
    if (split == std::string_view::npos) return {0.0, imag_of(body)};
    return {parse_double(body.substr(0, split)), imag_of(body.substr(split))};
}

inline std::string format_complex(std::complex<double> z) {
    std::string re = format_double(z.real());
    std::string im = format_double(z.imag());
    if (im.front() != '-') im.insert(im.begin(), '+');
    return re + im + "i";
}

/// FNV-1a 64-bit hash rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

/// Reads the next non-empty, non-comment line; returns false at end of stream.
inline bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        line = std::string(t);
        return true;
    }
    return false;
}

}  // namespace bpd::text
