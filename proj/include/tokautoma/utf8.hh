#pragma once

#include <string>
#include <string_view>

namespace tokautoma::utf8 {

/// Decodes UTF-8 into Unicode scalar values. Throws ParseError (column = byte offset)
/// on malformed input, overlong forms and surrogates.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view text);
std::string encode(char32_t symbol);

} // namespace tokautoma::utf8
