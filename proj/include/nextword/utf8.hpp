// Copyright 2026 The nextword Authors
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

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace nextword::utf8 {

// Decodes one code point starting at s[i]; advances i past it.
// Malformed bytes are consumed one at a time and returned verbatim.
inline uint32_t decode(std::string_view s, size_t& i) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    uint32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
    else { ++i; return b0; }
    if (i + len > s.size()) { ++i; return b0; }
    for (int k = 1; k < len; ++k) {
        unsigned char b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) { ++i; return b0; }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

inline std::vector<uint32_t> codepoints(std::string_view s) {
    std::vector<uint32_t> out;
    size_t i = 0;
    while (i < s.size()) out.push_back(decode(s, i));
    return out;
}

// Number of Unicode scalar values in the string.
inline size_t length(std::string_view s) {
    size_t n = 0, i = 0;
    while (i < s.size()) { decode(s, i); ++n; }
    return n;
}

inline bool is_digit_cp(uint32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 0xFF10 && cp <= 0xFF19);  // ASCII or full-width
}

inline bool is_ascii_letter_cp(uint32_t cp) {
    return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
}

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    size_t i = 0;
    while (i < s.size())
        if (!is_digit_cp(decode(s, i))) return false;
    return true;
}

inline bool all_ascii_letters(std::string_view s) {
    if (s.empty()) return false;
    size_t i = 0;
    while (i < s.size())
        if (!is_ascii_letter_cp(decode(s, i))) return false;
    return true;
}

}  // namespace nextword::utf8
