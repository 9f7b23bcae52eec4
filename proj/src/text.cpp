#include "entrel/text.hpp"

#include <array>

#include "entrel/error.hpp"

namespace entrel::text {
namespace {

// Base letters for U+00C0..U+00FF; nullptr keeps the code point.
constexpr std::array<const char*, 64> kLatin1Fold = {
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", nullptr, "o", "u", "u", "u", "u", "y", "th", "ss",
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", nullptr, "o", "u", "u", "u", "u", "y", "th", "y"};

// Base letters for U+0100..U+017F (Latin Extended-A).
constexpr std::array<const char*, 128> kLatinExtAFold = {
    "a", "a", "a", "a", "a", "a", "c", "c", "c", "c", "c", "c", "c", "c", "d", "d",
    "d", "d", "e", "e", "e", "e", "e", "e", "e", "e", "e", "e", "g", "g", "g", "g",
    "g", "g", "g", "g", "h", "h", "h", "h", "i", "i", "i", "i", "i", "i", "i", "i",
    "i", "i", "ij", "ij", "j", "j", "k", "k", "k", "l", "l", "l", "l", "l", "l", "l",
    "l", "l", "l", "n", "n", "n", "n", "n", "n", "n", "n", "n", "o", "o", "o", "o",
    "o", "o", "oe", "oe", "r", "r", "r", "r", "r", "r", "s", "s", "s", "s", "s", "s",
    "s", "s", "t", "t", "t", "t", "t", "t", "u", "u", "u", "u", "u", "u", "u", "u",
    "u", "u", "u", "u", "w", "w", "y", "y", "y", "z", "z", "z", "z", "z", "z", "s"};

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Length of a well-formed sequence at s[i], or 0.
std::size_t valid_sequence_length(std::string_view s, std::size_t i) {
  const auto c0 = static_cast<unsigned char>(s[i]);
  if (c0 < 0x80) return 1;
  std::size_t len = 0;
  char32_t cp = 0;
  if (c0 >= 0xC2 && c0 <= 0xDF) {
    len = 2;
    cp = c0 & 0x1F;
  } else if (c0 >= 0xE0 && c0 <= 0xEF) {
    len = 3;
    cp = c0 & 0x0F;
  } else if (c0 >= 0xF0 && c0 <= 0xF4) {
    len = 4;
    cp = c0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto c = static_cast<unsigned char>(s[i + k]);
    if (!is_continuation(c)) return 0;
    cp = (cp << 6) | (c & 0x3F);
  }
  // Overlongs, surrogates and out-of-range values.
  if ((len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    return 0;
  }
  return len;
}

struct Cp {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

enum class Kind { kSpace, kPunct, kJoiner, kWord };

Kind kind_of(char32_t cp) {
  if (is_space(cp)) return Kind::kSpace;
  if (is_apostrophe(cp) || is_hyphen(cp)) return Kind::kJoiner;
  if (is_punct(cp)) return Kind::kPunct;
  return Kind::kWord;
}

}  // namespace

std::string decode_utf8(std::string_view raw, bool lossy) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    const std::size_t len = valid_sequence_length(raw, i);
    if (len == 0) {
      if (!lossy) throw EncodingError(i);
      append_utf8(out, kReplacement);
      ++i;
      while (i < raw.size() && is_continuation(static_cast<unsigned char>(raw[i]))) ++i;
      continue;
    }
    out.append(raw.substr(i, len));
    i += len;
  }
  return out;
}

char32_t next_codepoint(std::string_view s, std::size_t& i) {
  const auto c0 = static_cast<unsigned char>(s[i]);
  if (c0 < 0x80) {
    ++i;
    return c0;
  }
  std::size_t len = c0 >= 0xF0 ? 4 : c0 >= 0xE0 ? 3 : 2;
  char32_t cp = c0 & (len == 2 ? 0x1F : len == 3 ? 0x0F : 0x07);
  for (std::size_t k = 1; k < len && i + k < s.size(); ++k) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
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

std::size_t codepoint_count(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    if (!is_continuation(static_cast<unsigned char>(c))) ++n;
  }
  return n;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
    return (cp % 2 == 1) ? cp + 1 : cp;
  }
  if (cp == 0x178) return 0xFF;
  return cp;
}

bool is_upper(char32_t cp) {
  if (cp == 0x130) return true;
  return to_lower(cp) != cp;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case ' ':
    case '\t':
    case '\r':
    case '\n':
    case '\v':
    case '\f':
    case 0xA0:
    case 0x2007:
    case 0x2009:
    case 0x200A:
    case 0x202F:
    case 0x3000:
    case 0xFEFF:
      return true;
    default:
      return false;
  }
}

bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

bool is_hyphen(char32_t cp) { return cp == '-' || cp == 0x2010 || cp == 0x2011; }

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  switch (cp) {
    case 0xA1:    // ¡
    case 0xA7:    // §
    case 0xAB:    // «
    case 0xB0:    // °
    case 0xB1:    // ±
    case 0xB6:    // ¶
    case 0xB7:    // ·
    case 0xBB:    // »
    case 0xBF:    // ¿
    case 0xD7:    // ×
    case 0xF7:    // ÷
    case 0x2013:  // –
    case 0x2014:  // —
    case 0x2018:  // ‘
    case 0x201C:  // “
    case 0x201D:  // ”
    case 0x201E:  // „
    case 0x2022:  // •
    case 0x2026:  // …
    case 0x2039:  // ‹
    case 0x203A:  // ›
    case 0x20AC:  // €
    case kReplacement:
      return true;
    default:
      return false;
  }
}

bool is_letter(char32_t cp) {
  return kind_of(cp) == Kind::kWord && !is_digit(cp);
}

std::string fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char32_t cp = to_lower(next_codepoint(s, i));
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp >= 0xC0 && cp <= 0xFF && kLatin1Fold[cp - 0xC0] != nullptr) {
      out += kLatin1Fold[cp - 0xC0];
    } else if (cp >= 0x100 && cp <= 0x17F) {
      out += kLatinExtAFold[cp - 0x100];
    } else if (cp == 0x2019 || cp == 0x2018) {
      out.push_back('\'');
    } else if (cp == 0x2010 || cp == 0x2011) {
      out.push_back('-');
    } else {
      append_utf8(out, cp);
    }
  }
  return out;
}

bool starts_upper(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = 0;
  return is_upper(next_codepoint(s, i));
}

std::vector<RawToken> tokenize_line(std::string_view line) {
  std::vector<Cp> cps;
  for (std::size_t i = 0; i < line.size();) {
    const std::size_t at = i;
    const char32_t cp = next_codepoint(line, i);
    cps.push_back({cp, at, i - at});
  }

  std::vector<RawToken> out;
  std::size_t word_begin = 0;
  std::size_t word_len = 0;  // in code points
  auto flush = [&](std::size_t end_index) {
    if (word_len == 0) return;
    const std::size_t b = cps[word_begin].offset;
    const std::size_t e = cps[end_index - 1].offset + cps[end_index - 1].length;
    out.push_back({std::string(line.substr(b, e - b)), b});
    word_len = 0;
  };
  auto emit_single = [&](std::size_t k) {
    out.push_back({std::string(line.substr(cps[k].offset, cps[k].length)), cps[k].offset});
  };
  auto extend = [&](std::size_t k) {
    if (word_len == 0) word_begin = k;
    ++word_len;
  };

  for (std::size_t k = 0; k < cps.size(); ++k) {
    const char32_t cp = cps[k].value;
    const Kind kind = kind_of(cp);
    const bool has_prev = word_len > 0;
    const bool has_next = k + 1 < cps.size();
    const char32_t prev = has_prev ? cps[k - 1].value : 0;
    const char32_t next = has_next ? cps[k + 1].value : 0;

    if (kind == Kind::kSpace) {
      flush(k);
    } else if ((cp == '.' || cp == ',') && has_prev && is_digit(prev) && has_next &&
               is_digit(next)) {
      extend(k);
    } else if (kind == Kind::kPunct) {
      flush(k);
      emit_single(k);
    } else if (kind == Kind::kJoiner) {
      const bool joins = has_prev && has_next && kind_of(next) == Kind::kWord &&
                         !(is_hyphen(cp) && is_digit(prev) && is_digit(next));
      if (joins) {
        extend(k);
      } else {
        flush(k);
        emit_single(k);
      }
    } else {
      extend(k);
    }
  }
  flush(cps.size());
  return out;
}

std::vector<std::string> folded_tokens(std::string_view phrase) {
  std::vector<std::string> out;
  for (auto& t : tokenize_line(phrase)) out.push_back(fold(t.surface));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace entrel::text
