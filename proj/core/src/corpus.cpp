#include "promptshield/corpus.hpp"

#include <algorithm>
#include <stdexcept>

namespace promptshield::corpus {

namespace {

// Decodes the UTF-8 sequence starting at text[i], advancing i. Malformed
// bytes are returned as single code points so tokenization never fails.
char32_t decode_utf8(const std::string& text, std::size_t& i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(text[k]);
  };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  if (i + static_cast<std::size_t>(len) > text.size()) {
    ++i;
    return b0;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char bk = byte(i + static_cast<std::size_t>(k));
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
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

bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x0009:
    case 0x000A:
    case 0x000B:
    case 0x000C:
    case 0x000D:
    case 0x0020:
    case 0x0085:
    case 0x00A0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_punctuation(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
           (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
  }
  switch (cp) {
    case 0x00A1:  // inverted exclamation
    case 0x00AB:  // left guillemet
    case 0x00BB:  // right guillemet
    case 0x00BF:  // inverted question
    case 0x2010:  // hyphen
    case 0x2013:  // en dash
    case 0x2014:  // em dash
    case 0x2018:
    case 0x2019:  // curly single quotes
    case 0x201C:
    case 0x201D:  // curly double quotes
    case 0x2026:  // ellipsis
    case 0x3001:  // ideographic comma
    case 0x3002:  // ideographic full stop
    case 0xFF01:  // fullwidth !
    case 0xFF0C:  // fullwidth ,
    case 0xFF0E:  // fullwidth .
    case 0xFF1A:  // fullwidth :
    case 0xFF1B:  // fullwidth ;
    case 0xFF1F:  // fullwidth ?
      return true;
    default:
      return false;
  }
}

char32_t ascii_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  return cp;
}

// Trims punctuation code points from both ends and lowercases; returns an
// empty string for purely punctuational fragments.
std::string normalize_fragment(const std::vector<char32_t>& fragment) {
  std::size_t begin = 0;
  std::size_t end = fragment.size();
  while (begin < end && is_punctuation(fragment[begin])) ++begin;
  while (end > begin && is_punctuation(fragment[end - 1])) --end;
  std::string out;
  for (std::size_t k = begin; k < end; ++k) {
    encode_utf8(ascii_lower(fragment[k]), out);
  }
  return out;
}

}  // namespace

TokenSeq tokenize(const std::string& text) {
  TokenSeq tokens;
  std::vector<char32_t> fragment;
  std::size_t i = 0;
  auto flush = [&] {
    if (fragment.empty()) return;
    std::string token = normalize_fragment(fragment);
    if (!token.empty()) tokens.push_back(std::move(token));
    fragment.clear();
  };
  while (i < text.size()) {
    char32_t cp = decode_utf8(text, i);
    if (is_whitespace(cp)) {
      flush();
    } else {
      fragment.push_back(cp);
    }
  }
  flush();
  return tokens;
}

std::size_t token_count(const std::string& text) { return tokenize(text).size(); }

std::string join_tokens(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string normalize_phrase(const std::string& phrase) {
  return join_tokens(tokenize(phrase));
}

std::vector<std::string> split_whitespace_raw(const std::string& text) {
  std::vector<std::string> fragments;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    char32_t cp = decode_utf8(text, i);
    if (is_whitespace(cp)) {
      if (!current.empty()) {
        fragments.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.append(text, start, i - start);
    }
  }
  if (!current.empty()) fragments.push_back(std::move(current));
  return fragments;
}

bool find_phrase(const TokenSeq& haystack, const TokenSeq& phrase) {
  if (phrase.empty()) {
    throw std::invalid_argument("find_phrase: phrase must be non-empty");
  }
  if (phrase.size() > haystack.size()) return false;
  const std::size_t last = haystack.size() - phrase.size();
  for (std::size_t start = 0; start <= last; ++start) {
    bool match = true;
    for (std::size_t k = 0; k < phrase.size(); ++k) {
      if (haystack[start + k] != phrase[k]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

void FrequencyTable::add(const std::string& token, std::uint64_t n) {
  if (n == 0) return;
  counts_[token] += n;
  total_ += n;
}

void FrequencyTable::add_text(const std::string& text) {
  for (auto& token : tokenize(text)) add(token);
}

void FrequencyTable::merge(const FrequencyTable& other) {
  for (const auto& [token, n] : other.counts_) add(token, n);
}

std::uint64_t FrequencyTable::count(const std::string& token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

FrequencyTable build_frequency_table(const std::vector<std::string>& texts) {
  FrequencyTable table;
  for (const auto& text : texts) table.add_text(text);
  return table;
}

}  // namespace promptshield::corpus
