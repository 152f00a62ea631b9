#include "phishkit/utf8.hpp"

namespace phishkit::utf8 {

namespace {

// Decodes one scalar value starting at i. Returns false on any malformed
// sequence, in which case the caller consumes exactly one byte.
bool decode_one(std::string_view s, std::size_t i, char32_t& cp, std::size_t& len) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        cp = b0;
        len = 1;
        return true;
    }
    int n;
    char32_t min_cp;
    if ((b0 & 0xE0) == 0xC0) {
        n = 2; cp = b0 & 0x1F; min_cp = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        n = 3; cp = b0 & 0x0F; min_cp = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        n = 4; cp = b0 & 0x07; min_cp = 0x10000;
    } else {
        return false;
    }
    if (i + n > s.size()) return false;
    for (int k = 1; k < n; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return false;
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    len = static_cast<std::size_t>(n);
    return true;
}

} // namespace

std::vector<char32_t> decode(std::string_view s, bool* had_errors) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    bool errors = false;
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp;
        std::size_t len;
        if (decode_one(s, i, cp, len)) {
            out.push_back(cp);
            i += len;
        } else {
            out.push_back(kReplacementChar);
            errors = true;
            ++i;
        }
    }
    if (had_errors) *had_errors = errors;
    return out;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append(out, cp);
    return out;
}

std::size_t length(std::string_view s) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp;
        std::size_t len;
        i += decode_one(s, i, cp, len) ? len : 1;
        ++count;
    }
    return count;
}

std::string sanitize(std::string_view s, bool* had_errors) {
    return encode(decode(s, had_errors));
}

std::string lowercase_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

} // namespace phishkit::utf8
