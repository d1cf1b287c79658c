#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tokautoma/error.hh"

namespace tokautoma {

/// One Unicode scalar value of the base alphabet.
using Symbol = char32_t;
using Text = std::u32string;
using Alphabet = std::set<Symbol>;

/// A nonempty string over the base alphabet.
class Token {
public:
    explicit Token(Text text);
    explicit Token(Symbol symbol) : text_(1, symbol) {}

    static Token from_utf8(std::string_view text);

    const Text& text() const { return text_; }
    std::size_t size() const { return text_.size(); }
    std::string utf8() const;

    friend bool operator==(const Token&, const Token&) = default;
    friend std::strong_ordering operator<=>(const Token&, const Token&) = default;

private:
    Text text_;
};

/// Concatenation of the two token texts.
Token operator+(const Token& left, const Token& right);

using Tokenization = std::vector<Token>;

/// Concatenation of the token texts of `tokens`.
Text project(std::span<const Token> tokens);

/// One single-symbol token per symbol of `w`.
Tokenization base_tokenization(std::u32string_view w);

/// As above, rejecting symbols outside `sigma` with an AlphabetError at their position.
Tokenization base_tokenization(std::u32string_view w, const Alphabet& sigma);

/// Throws AlphabetError for the first symbol of `w` not in `sigma`.
void require_in_alphabet(std::u32string_view w, const Alphabet& sigma);

/// Human-readable rendering, tokens joined by " | ". Used in diagnostics only.
std::string to_string(std::span<const Token> tokens);

/// Builds a tokenization from UTF-8 token texts; handy for fixtures.
Tokenization make_tokenization(std::initializer_list<std::string_view> tokens);

struct MergeRule {
    Token left;
    Token right;
    std::size_t priority = 0;

    Token merged() const { return left + right; }
};

enum class RuleSide { left, right };

/// First rule side that is neither a base symbol nor produced by an earlier rule.
struct ImproperRule {
    std::size_t rule = 0;
    RuleSide side = RuleSide::left;
    Token token;
};

/// Ordered list of merge rules. Position in the list is the priority (0 = highest).
class Dictionary {
public:
    Dictionary() = default;

    /// Throws Error on a repeated (left, right) pair.
    explicit Dictionary(std::vector<std::pair<Token, Token>> rules, const Alphabet& extra_symbols = {});

    /// Convenience constructor from UTF-8 pairs, e.g. {{"a", "a"}, {"b", "a"}}.
    static Dictionary from_utf8(std::initializer_list<std::pair<std::string_view, std::string_view>> rules,
                                std::string_view extra_symbols = {});

    const std::vector<MergeRule>& rules() const { return rules_; }
    std::size_t size() const { return rules_.size(); }
    bool empty() const { return rules_.empty(); }

    /// Base alphabet: every symbol of every rule token plus the declared extras.
    const Alphabet& sigma() const { return sigma_; }

    /// Token alphabet: sigma as single-symbol tokens (ascending), then each merged
    /// token in rule order, without repetitions.
    std::vector<Token> gamma() const;

    /// The dictionary of the first `count` rules over the same base alphabet.
    Dictionary prefix(std::size_t count) const;

    Dictionary with_extra_symbols(const Alphabet& extra) const;

    /// Longest merged token, max |uv| over the rules (0 when empty).
    std::size_t max_token_length() const;

private:
    std::vector<MergeRule> rules_;
    Alphabet sigma_;
    Alphabet extra_;
};

/// Properness: every multi-symbol rule side is the merged token of a strictly earlier rule.
std::optional<ImproperRule> find_improper_rule(const Dictionary& d);
inline bool is_proper(const Dictionary& d) { return !find_improper_rule(d).has_value(); }

class ImproperDictionary : public Error {
public:
    explicit ImproperDictionary(ImproperRule witness);
    const ImproperRule& witness() const { return witness_; }

private:
    ImproperRule witness_;
};

/// Throws ImproperDictionary with the witness from find_improper_rule.
void require_proper(const Dictionary& d);

/// Escapes a token for the line-oriented formats: `\s` space, `\\` backslash,
/// `\n` newline, `\t` tab.
std::string escape_token(const Token& token);

/// Inverse of escape_token. Throws ParseError on an empty field or unknown escape.
Token unescape_token(std::string_view field, std::size_t line = 0);

struct DictionaryParseOptions {
    /// Skip a first line that starts with '#' (GPT-2 "#version" header).
    bool skip_header = true;
    Alphabet extra_symbols;
};

/// Parses the merges-file format: one `<left> <right>` per nonempty line, file order is
/// priority order. Properness is not enforced here.
Dictionary parse_dictionary(std::string_view text, const DictionaryParseOptions& options = {});

std::string serialize_dictionary(const Dictionary& d);

} // namespace tokautoma
