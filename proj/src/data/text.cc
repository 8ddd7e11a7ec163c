// Copyright 2026 The CMLA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmla/text.h"

namespace cmla {
namespace {

enum class CharClass { kSpace, kPunct, kWord };

CharClass Classify(char32_t c) {
  if (c < 0x80) {
    if (c <= 0x20 || c == 0x7F) return CharClass::kSpace;
    if ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      return CharClass::kWord;
    }
    return CharClass::kPunct;
  }
  if (c == 0x85 || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200B) ||
      c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000 ||
      c == 0xFEFF) {
    return CharClass::kSpace;
  }
  if ((c >= 0xA1 && c <= 0xBF) || c == 0xD7 || c == 0xF7 ||
      (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
      (c >= 0x3001 && c <= 0x3003) || (c >= 0xFF01 && c <= 0xFF0F)) {
    return CharClass::kPunct;
  }
  return CharClass::kWord;
}

void AppendUtf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

}  // namespace

std::vector<CodePoint> DecodeUtf8(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t value = lead;
    if (lead >= 0xC2 && lead <= 0xDF) {
      len = 2;
      value = lead & 0x1F;
    } else if (lead >= 0xE0 && lead <= 0xEF) {
      len = 3;
      value = lead & 0x0F;
    } else if (lead >= 0xF0 && lead <= 0xF4) {
      len = 4;
      value = lead & 0x07;
    }
    bool valid = len == 1 || i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        valid = false;
      } else {
        value = (value << 6) | (cont & 0x3F);
      }
    }
    if (!valid) {
      len = 1;
      value = lead;
    }
    out.push_back(CodePoint{value, i, i + len});
    i += len;
  }
  return out;
}

std::size_t CodePointLength(std::string_view text) {
  return DecodeUtf8(text).size();
}

std::string Utf8Substr(std::string_view text, std::size_t begin, std::size_t end) {
  const auto cps = DecodeUtf8(text);
  if (begin > end || end > cps.size()) {
    throw std::out_of_range("code point range [" + std::to_string(begin) + "," +
                            std::to_string(end) + ") outside text of length " +
                            std::to_string(cps.size()));
  }
  if (begin == end) return {};
  const std::size_t from = cps[begin].byte_start;
  const std::size_t to = cps[end - 1].byte_end;
  return std::string(text.substr(from, to - from));
}

std::string Lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const CodePoint& cp : DecodeUtf8(text)) {
    char32_t c = cp.value;
    if (cp.byte_end - cp.byte_start == 1 && c >= 0x80) {
      // Invalid byte passed through untouched.
      out.push_back(text[cp.byte_start]);
      continue;
    }
    if ((c >= 'A' && c <= 'Z') || (c >= 0xC0 && c <= 0xDE && c != 0xD7)) {
      c += 0x20;
    }
    AppendUtf8(out, c);
  }
  return out;
}

std::vector<Token> Tokenize(std::string_view text) {
  const auto cps = DecodeUtf8(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    const CharClass cls = Classify(cps[i].value);
    if (cls == CharClass::kSpace) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (cls == CharClass::kWord) {
      while (j < cps.size() && Classify(cps[j].value) == CharClass::kWord) ++j;
    }
    const std::size_t from = cps[i].byte_start;
    const std::size_t to = cps[j - 1].byte_end;
    tokens.push_back(Token{std::string(text.substr(from, to - from)), i, j});
    i = j;
  }
  return tokens;
}

}  // namespace cmla
