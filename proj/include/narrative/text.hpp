#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace narrative {

// Spaced scripts separate words with whitespace (English); unspaced scripts
// (Japanese) do not, and are tokenized by character bigrams.
enum class ScriptProfile { spaced, unspaced };

std::string_view to_string(ScriptProfile profile);
std::optional<ScriptProfile> parse_profile(std::string_view name);

namespace text {

// One decoded code point and the byte range it occupies.
struct CodePoint {
    char32_t value = 0;
    std::size_t begin = 0;
    std::size_t size = 0;
};

// Decodes the code point starting at byte `pos`. Invalid sequences decode as
// a single byte so that iteration always makes progress.
CodePoint decode_at(std::string_view s, std::size_t pos);

bool is_space(char32_t c);
// ASCII and CJK punctuation, including the full-width forms.
bool is_punct(char32_t c);
bool is_word_char(char32_t c);

std::string ascii_lower(std::string_view s);
std::string_view trim_space(std::string_view s);

// FNV-1a, 64 bit. Stable across platforms and runs.
std::uint64_t fnv1a(std::string_view s);

}  // namespace text
}  // namespace narrative
