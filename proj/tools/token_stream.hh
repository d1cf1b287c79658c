#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokautoma/core.hh"

namespace tokautoma::cli {

/// One record of the token stream format: tab-separated escaped tokens. An empty line
/// is the empty tokenization. Throws ParseError with the given line number.
Tokenization parse_token_record(std::string_view line, std::size_t line_no);
std::string format_token_record(std::span<const Token> tokens);

/// Space-separated integer ids.
std::vector<std::uint32_t> parse_id_record(std::string_view line, std::size_t line_no);
std::string format_id_record(std::span<const std::uint32_t> ids);

/// Bijection between tokens and dense ids, stored as a JSON array (index = id).
class Vocab {
public:
    Vocab() = default;
    /// Throws Error on duplicate tokens.
    explicit Vocab(std::vector<Token> tokens);

    static Vocab parse(std::string_view json_text);
    std::string serialize() const;

    std::optional<std::uint32_t> id(const Token& token) const;
    /// Throws AlphabetError for ids outside the vocabulary.
    const Token& token(std::uint32_t id) const;
    const std::vector<Token>& tokens() const { return tokens_; }
    std::size_t size() const { return tokens_.size(); }

private:
    std::vector<Token> tokens_;
    std::unordered_map<Text, std::uint32_t> index_;
};

} // namespace tokautoma::cli
