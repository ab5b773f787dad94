#pragma once

#include <cctype>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dgtrace::minifort {

enum class TokenKind { identifier, number, string, op, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;  // lower-cased unless a string literal

  bool is(std::string_view t) const { return kind != TokenKind::string && text == t; }
};

// One statement after joining `&` continuations, stripping `!` comments and
// splitting on `;`. `line` is the physical line the statement starts on.
struct LogicalLine {
  int line = 0;
  std::string text;
};

namespace detail {

// Strips a trailing comment, honoring quotes. Returns the code part.
inline std::string strip_comment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '!') {
      return std::string(s.substr(0, i));
    }
  }
  return std::string(s);
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_semicolons(std::string_view s) {
  std::vector<std::string> out;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == ';') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(s.substr(start)));
  return out;
}

}  // namespace detail

inline std::vector<LogicalLine> logical_lines(std::string_view text) {
  std::vector<LogicalLine> out;
  std::string pending;
  int pending_line = 0;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    std::string code = detail::trim(detail::strip_comment(raw));
    if (!pending.empty() && !code.empty() && code.front() == '&') code = detail::trim(code.substr(1));
    bool continues = !code.empty() && code.back() == '&';
    if (continues) code = detail::trim(std::string_view(code).substr(0, code.size() - 1));

    if (pending.empty() && !code.empty()) pending_line = lineno;
    if (!code.empty()) {
      if (!pending.empty()) pending += ' ';
      pending += code;
    }
    if (!continues && !pending.empty()) {
      for (auto& piece : detail::split_semicolons(pending))
        if (!piece.empty()) out.push_back({pending_line, std::move(piece)});
      pending.clear();
    }
    if (nl == text.size()) break;
  }
  if (!pending.empty())
    for (auto& piece : detail::split_semicolons(pending))
      if (!piece.empty()) out.push_back({pending_line, std::move(piece)});
  return out;
}

// Tokenizes one logical line. Returns std::nullopt on a character that cannot
// start any token (e.g. an unterminated string).
inline std::optional<std::vector<Token>> tokenize(std::string_view s) {
  std::vector<Token> toks;
  auto lower = [](std::string_view v) {
    std::string r(v);
    for (auto& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return r;
  };
  auto is_ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  // `.name.` operator or logical literal starting at i, returning its length
  auto dot_word = [&](std::size_t i) -> std::size_t {
    if (s[i] != '.') return 0;
    std::size_t j = i + 1;
    while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i + 1 && j < s.size() && s[j] == '.') return j - i + 1;
    return 0;
  };

  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      toks.push_back({TokenKind::identifier, lower(s.substr(i, j - i))});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.' && dot_word(j) == 0) {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && std::strchr("eEdD", s[j]) != nullptr) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      if (j < s.size() && s[j] == '_') {  // kind suffix, e.g. 1.0_r8
        ++j;
        while (j < s.size() && is_ident_char(s[j])) ++j;
      }
      toks.push_back({TokenKind::number, lower(s.substr(i, j - i))});
      i = j;
      continue;
    }
    if (c == '\'' || c == '"') {
      std::size_t j = i + 1;
      std::string body;
      bool closed = false;
      while (j < s.size()) {
        if (s[j] == c) {
          if (j + 1 < s.size() && s[j + 1] == c) {  // doubled quote
            body += c;
            j += 2;
            continue;
          }
          closed = true;
          ++j;
          break;
        }
        body += s[j++];
      }
      if (!closed) return std::nullopt;
      toks.push_back({TokenKind::string, body});
      i = j;
      continue;
    }
    if (std::size_t n = dot_word(i)) {
      std::string w = lower(s.substr(i, n));
      toks.push_back({w == ".true." || w == ".false." ? TokenKind::number : TokenKind::op, w});
      i += n;
      continue;
    }
    static constexpr std::string_view two[] = {"**", "::", "=>", "==", "/=", "<=", ">=", "//",
                                               "(/", "/)"};
    bool matched = false;
    for (auto t : two) {
      if (s.substr(i, 2) == t) {
        toks.push_back({TokenKind::op, std::string(t)});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::strchr("()%,=+-*/:<>[]", c) != nullptr) {
      toks.push_back({TokenKind::op, std::string(1, c)});
      ++i;
      continue;
    }
    return std::nullopt;
  }
  toks.push_back({TokenKind::end, ""});
  return toks;
}

}  // namespace dgtrace::minifort
