#include "narrative/text.hpp"

namespace narrative {

std::string_view to_string(ScriptProfile profile) {
    return profile == ScriptProfile::spaced ? "spaced" : "unspaced";
}

std::optional<ScriptProfile> parse_profile(std::string_view name) {
    if (name == "spaced") return ScriptProfile::spaced;
    if (name == "unspaced") return ScriptProfile::unspaced;
    return std::nullopt;
}

namespace text {

CodePoint decode_at(std::string_view s, std::size_t pos) {
    const auto lead = static_cast<unsigned char>(s[pos]);
    std::size_t len = 1;
    char32_t cp = lead;
    if (lead >= 0xF0 && lead < 0xF8) {
        len = 4;
        cp = lead & 0x07;
    } else if (lead >= 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if (lead >= 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else {
        return {cp, pos, 1};
    }
    if (lead >= 0xF8 || pos + len > s.size()) return {lead, pos, 1};
    for (std::size_t i = 1; i < len; ++i) {
        const auto cont = static_cast<unsigned char>(s[pos + i]);
        if ((cont & 0xC0) != 0x80) return {lead, pos, 1};
        cp = (cp << 6) | (cont & 0x3F);
    }
    return {cp, pos, len};
}

bool is_space(char32_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
           c == 0x3000 || c == 0x00A0;
}

bool is_punct(char32_t c) {
    if (c < 0x80) {
        return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
               (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
    }
    // CJK symbols and punctuation, general punctuation, full-width ASCII punctuation.
    if (c >= 0x3001 && c <= 0x303F) return true;
    if (c >= 0x2010 && c <= 0x205E) return true;
    if (c >= 0xFF01 && c <= 0xFF0F) return true;
    if (c >= 0xFF1A && c <= 0xFF20) return true;
    if (c >= 0xFF3B && c <= 0xFF40) return true;
    if (c >= 0xFF5B && c <= 0xFF65) return true;
    return false;
}

bool is_word_char(char32_t c) { return !is_space(c) && !is_punct(c) && c >= 0x20; }

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return out;
}

std::string_view trim_space(std::string_view s) {
    std::size_t b = 0;
    while (b < s.size()) {
        const auto cp = decode_at(s, b);
        if (!is_space(cp.value)) break;
        b += cp.size;
    }
    std::size_t e = s.size();
    while (e > b) {
        // Step back to the lead byte of the last code point.
        std::size_t p = e - 1;
        while (p > b && (static_cast<unsigned char>(s[p]) & 0xC0) == 0x80) --p;
        if (!is_space(decode_at(s, p).value)) break;
        e = p;
    }
    return s.substr(b, e - b);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char ch : s) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace text
}  // namespace narrative
