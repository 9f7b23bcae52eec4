#ifndef ENTREL_TEXT_HPP
#define ENTREL_TEXT_HPP

// UTF-8 helpers shared by tokenization, dictionary compilation and matching.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace entrel::text {

inline constexpr char32_t kReplacement = 0xFFFD;

// Validates `raw` as UTF-8. In lossy mode invalid sequences become U+FFFD;
// otherwise EncodingError is thrown at the first bad byte.
std::string decode_utf8(std::string_view raw, bool lossy);

// Decodes the code point starting at s[i] and advances i. `s` must be valid UTF-8.
char32_t next_codepoint(std::string_view s, std::size_t& i);

void append_utf8(std::string& out, char32_t cp);

std::size_t codepoint_count(std::string_view s);

// Lowercase + diacritic-stripped shadow used for all matching.
std::string fold(std::string_view s);

char32_t to_lower(char32_t cp);
bool is_upper(char32_t cp);
bool is_space(char32_t cp);
bool is_digit(char32_t cp);
// Characters that never join a word token (apostrophes and hyphens excluded,
// they are handled by the tokenizer's joiner rule).
bool is_punct(char32_t cp);
bool is_apostrophe(char32_t cp);
bool is_hyphen(char32_t cp);
bool is_letter(char32_t cp);

// First code point of `s` is an uppercase letter.
bool starts_upper(std::string_view s);

struct RawToken {
  std::string surface;
  std::size_t byte_offset = 0;
};

// Splits one line into tokens: whitespace separates, punctuation marks become
// single-character tokens, hyphens and apostrophes stay inside words, and a
// '.' or ',' between two digits stays inside a numeral ("0,27").
std::vector<RawToken> tokenize_line(std::string_view line);

// Folded token sequence of an arbitrary phrase (dictionary variants, markers,
// grammar literals).
std::vector<std::string> folded_tokens(std::string_view phrase);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace entrel::text

#endif  // ENTREL_TEXT_HPP
