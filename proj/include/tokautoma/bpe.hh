#pragma once

#include <functional>
#include <set>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokautoma/core.hh"

namespace tokautoma {

/// HuggingFace BPE tokenizer over a fixed proper dictionary.
///
/// Rules are applied in priority order; within a rule, adjacencies are merged left to
/// right. A merge u|v -> uv can never create a new u|v adjacency, so one left-to-right
/// pass per rule is equivalent to repeatedly merging the leftmost occurrence.
class BpeTokenizer {
public:
    /// Throws ImproperDictionary.
    explicit BpeTokenizer(Dictionary dictionary);

    /// Throws AlphabetError for symbols outside the dictionary's sigma.
    Tokenization tokenize(std::u32string_view w) const;

    /// Same result as token indices into gamma().
    std::vector<std::uint32_t> tokenize_ids(std::u32string_view w) const;

    const Dictionary& dictionary() const { return dictionary_; }
    const std::vector<Token>& gamma() const { return gamma_; }

private:
    struct CompiledRule {
        std::uint32_t left;
        std::uint32_t right;
        std::uint32_t merged;
    };

    Dictionary dictionary_;
    std::vector<Token> gamma_;
    std::unordered_map<Symbol, std::uint32_t> symbol_ids_;
    std::vector<CompiledRule> rules_;
};

/// HuggingFace semantics. Throws ImproperDictionary or AlphabetError.
Tokenization tokenize_hf(const Dictionary& d, std::u32string_view w);

/// SentencePiece semantics: after every merge, re-select the highest-priority applicable
/// rule and apply it at its leftmost occurrence.
Tokenization tokenize_sp(const Dictionary& d, std::u32string_view w);

namespace reference {

/// Line-by-line transliteration of the HuggingFace loop: for each rule in priority
/// order, while some decomposition phi|u|v|phi' exists, merge the one with the shortest
/// phi. Quadratic; the oracle of record for every other tokenizer in this library.
Tokenization tokenize_hf(const Dictionary& d, std::u32string_view w);

} // namespace reference

/// Calls `visit` once per sequence of tokens from `gamma` whose projection is `w`.
/// The span is only valid during the call.
void for_each_tokenization(std::span<const Token> gamma, std::u32string_view w,
                           const std::function<void(std::span<const Token>)>& visit);

/// Every tokenization of `w` over `gamma`. Exponential; meant for short strings.
std::set<Tokenization> all_tokenizations(std::span<const Token> gamma, std::u32string_view w);

} // namespace tokautoma
