#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokautoma/core.hh"
#include "tokautoma/token_dfa.hh"

namespace tokautoma {

/// Real-time string-to-tokens transducer: every transition reads exactly one base
/// symbol and writes one token or nothing. States with a final output are accepting.
class Transducer {
public:
    struct Arc {
        Symbol input;
        std::optional<TokenId> output;
        StateId to;
    };

    explicit Transducer(std::size_t states = 1, StateId initial = 0);

    StateId add_state();
    TokenId add_output_token(const Token& token);
    void add_transition(StateId from, Symbol input, std::optional<TokenId> output, StateId to);
    void set_final_output(StateId state, std::vector<TokenId> output);

    const std::vector<Arc>& arcs_from(StateId state) const { return arcs_.at(state); }
    const std::optional<std::vector<TokenId>>& final_output(StateId state) const { return final_.at(state); }

    StateId initial() const { return initial_; }
    std::size_t num_states() const { return arcs_.size(); }
    std::size_t num_transitions() const;
    const std::vector<Token>& output_alphabet() const { return outputs_; }
    const Token& token(TokenId id) const { return outputs_.at(id); }
    Alphabet input_alphabet() const;

private:
    void check_state(StateId state) const;

    std::vector<std::vector<Arc>> arcs_;
    std::vector<std::optional<std::vector<TokenId>>> final_;
    std::vector<Token> outputs_;
    std::unordered_map<Text, TokenId> output_index_;
    StateId initial_ = 0;
};

/// Spells every token transition p -u-> q as a chain of |u| symbol transitions that
/// writes nothing until the last symbol, which writes u. Final states get the empty
/// final output. Intermediate states are numbered after the automaton's states.
Transducer build_transducer(const TokenDfa& a);

enum class Functionality { functional, not_functional, inconclusive };

struct NonFunctionalWitness {
    Text input;
    Tokenization first;
    Tokenization second;
};

struct FunctionalityVerdict {
    Functionality verdict = Functionality::functional;
    std::optional<NonFunctionalWitness> witness;
};

/// Decides whether the relation of `t` is a partial function, by exploring the trim
/// square of `t` with output delays. A state pair reached with two different delays,
/// diverging outputs, or disagreeing final outputs proves non-functionality. Reports
/// `inconclusive` only if a delay grows beyond `max_delay` tokens.
FunctionalityVerdict check_functional(const Transducer& t, std::size_t max_delay = 4096);

/// Input-deterministic transducer; transitions and final outputs write token sequences.
class SubsequentialTransducer {
public:
    struct Step {
        StateId to;
        std::span<const TokenId> output;
    };

    SubsequentialTransducer(Alphabet input_alphabet, std::vector<Token> output_alphabet);

    StateId add_state();
    /// Throws Error if (from, input) already has a transition.
    void set_transition(StateId from, Symbol input, StateId to, std::span<const TokenId> output);
    void set_final_output(StateId state, std::vector<TokenId> output);
    void set_initial(StateId state);

    std::optional<Step> step(StateId from, Symbol input) const;
    const std::optional<std::vector<TokenId>>& final_output(StateId state) const { return final_.at(state); }

    StateId initial() const { return initial_; }
    std::size_t num_states() const { return final_.size(); }
    std::size_t num_transitions() const;
    const Alphabet& input_alphabet() const { return inputs_; }
    const std::vector<Token>& output_alphabet() const { return outputs_; }
    const Token& token(TokenId id) const { return outputs_.at(id); }

    /// One left-to-right pass, one table lookup per symbol. nullopt when the run dies or
    /// ends in a state without final output. Throws AlphabetError for symbols outside
    /// the input alphabet.
    std::optional<std::vector<TokenId>> transduce_ids(std::u32string_view w) const;

private:
    std::optional<std::uint32_t> symbol_index(Symbol s) const;

    Alphabet inputs_;
    std::vector<Token> outputs_;
    std::vector<Symbol> symbols_;
    std::array<std::int32_t, 128> ascii_index_{};
    std::unordered_map<Symbol, std::uint32_t> index_;
    // Row-major table states x symbols: target state or -1, output slice in pool_.
    std::vector<std::int32_t> next_;
    std::vector<std::uint32_t> out_begin_;
    std::vector<std::uint32_t> out_size_;
    std::vector<TokenId> pool_;
    std::vector<std::optional<std::vector<TokenId>>> final_;
    StateId initial_ = 0;
};

std::optional<Tokenization> transduce(const SubsequentialTransducer& t, std::u32string_view w);

class NotFunctional : public Error {
public:
    explicit NotFunctional(FunctionalityVerdict verdict);
    const FunctionalityVerdict& verdict() const { return verdict_; }

private:
    FunctionalityVerdict verdict_;
};

struct DeterminizeOptions {
    /// Longest pending output (in tokens) a subset state may carry. When unset, uses
    /// 2 * m * t + t + 8 with m the number of multi-symbol output tokens and t the
    /// longest output token.
    std::optional<std::size_t> max_pending;
    /// Run check_functional first and throw NotFunctional unless it is functional.
    bool check_functionality = true;
};

/// Subset construction over (state, pending output) pairs. On each symbol the longest
/// common token prefix of all candidate outputs is written and the rest stays pending;
/// a subset's final output is the pending output of its accepting members followed by
/// their final output. Useless states of `t` are dropped first. Throws NotFunctional,
/// or LimitExceeded when a pending output outgrows the cap.
SubsequentialTransducer determinize(const Transducer& t, const DeterminizeOptions& options = {});

/// Canonical JSON: `input_alphabet`, `output_alphabet`, `states`, `initial`,
/// `transitions` as [from, symbol, [token index...], to], `final_outputs` {state: [token index...]}.
std::string serialize_transducer(const Transducer& t, int indent = 1);
std::string serialize_transducer(const SubsequentialTransducer& t, int indent = 1);

/// Throws ParseError; also when two transitions share (state, symbol).
SubsequentialTransducer parse_subsequential_transducer(std::string_view json_text);

} // namespace tokautoma
