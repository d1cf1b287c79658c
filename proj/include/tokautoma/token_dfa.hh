#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tokautoma/core.hh"

namespace tokautoma {

using StateId = std::uint32_t;
using TokenId = std::uint32_t;

/// Sorted, duplicate-free set of states.
using StateSet = std::vector<StateId>;

/// Where a fresh state created by a merge came from.
struct FreshOrigin {
    StateId source = 0;
    std::size_t rule = 0;
};

/// Deterministic automaton whose transition labels are tokens.
///
/// States are dense ids. Tokens are interned: the alphabet grows monotonically and a
/// token keeps its id for the automaton's lifetime. Transitions out of a state are kept
/// ordered by token id so every traversal is reproducible.
class TokenDfa {
public:
    /// An automaton with `states` non-final states and no transitions.
    explicit TokenDfa(std::size_t states = 1, StateId initial = 0);

    StateId add_state(bool final = false);
    TokenId add_token(const Token& token);

    std::optional<TokenId> find_token(const Text& text) const;
    std::optional<TokenId> find_token(const Token& token) const { return find_token(token.text()); }

    void set_transition(StateId from, TokenId label, StateId to);
    void set_transition(StateId from, const Token& label, StateId to) { set_transition(from, add_token(label), to); }
    void remove_transition(StateId from, TokenId label);

    std::optional<StateId> target(StateId from, TokenId label) const;
    const std::map<TokenId, StateId>& transitions_from(StateId state) const { return delta_.at(state); }

    void set_final(StateId state, bool final = true);
    bool is_final(StateId state) const { return final_.at(state) != 0; }
    void set_initial(StateId state);

    StateId initial() const { return initial_; }
    std::size_t num_states() const { return delta_.size(); }
    std::size_t num_transitions() const;
    std::size_t num_finals() const;

    const std::vector<Token>& alphabet() const { return alphabet_; }
    const Token& token(TokenId id) const { return alphabet_.at(id); }
    std::size_t max_token_length() const;

    const std::optional<FreshOrigin>& origin(StateId state) const { return origin_.at(state); }
    void set_origin(StateId state, FreshOrigin origin) { origin_.at(state) = origin; }

    /// Throws Error when `state` is not a state of this automaton.
    void check_state(StateId state) const;

private:
    std::vector<Token> alphabet_;
    std::unordered_map<Text, TokenId> index_;
    std::vector<std::map<TokenId, StateId>> delta_;
    std::vector<char> final_;
    std::vector<std::optional<FreshOrigin>> origin_;
    StateId initial_ = 0;
};

/// State reached from `from` by reading `tokens`, or nullopt when a step is undefined
/// (including tokens outside the alphabet). Throws Error on an unknown start state.
std::optional<StateId> run(const TokenDfa& a, StateId from, std::span<const Token> tokens);
std::optional<StateId> run_ids(const TokenDfa& a, StateId from, std::span<const TokenId> tokens);

bool accepts(const TokenDfa& a, std::span<const Token> tokens);

/// Removes states that are unreachable from the initial state or cannot reach a final
/// state. Surviving states keep their relative order. An automaton with an empty
/// language becomes a single non-final initial state.
TokenDfa trim(const TokenDfa& a);

/// Two runs, anywhere in the automaton, reading the same string with different token
/// sequences.
struct ContextInvarianceWitness {
    StateId first_start = 0;
    StateId second_start = 0;
    Tokenization first;
    Tokenization second;
};

/// Exact decision: explores pairs of runs that read the same string, tracking the
/// unread suffix of the run that is ahead. Returns a witness iff the automaton is not
/// context-invariant.
std::optional<ContextInvarianceWitness> find_context_invariance_violation(const TokenDfa& a);
inline bool is_context_invariant(const TokenDfa& a) { return !find_context_invariance_violation(a).has_value(); }

struct DistinguishingTokenization {
    Tokenization tokens;
    bool accepted_by_first = false;
};

/// Shortest tokenization accepted by exactly one of the automata, compared over the
/// union of their token alphabets; nullopt iff the languages are equal.
std::optional<DistinguishingTokenization> find_distinguishing_tokenization(const TokenDfa& first,
                                                                           const TokenDfa& second);
inline bool equivalent(const TokenDfa& first, const TokenDfa& second)
{
    return !find_distinguishing_tokenization(first, second).has_value();
}

StateSet all_states(const TokenDfa& a);

/// { delta(q, u) : q in states } as a sorted set.
StateSet image(const TokenDfa& a, std::span<const StateId> states, TokenId u);
StateSet image(const TokenDfa& a, std::span<const StateId> states, const Token& u);

/// States with an incoming u-transition.
StateSet targets_of(const TokenDfa& a, const Token& u);
/// States with an incoming u-transition and an outgoing v-transition.
StateSet targets_with_successor(const TokenDfa& a, const Token& u, const Token& v);
/// States with an incoming u-transition and no outgoing v-transition.
StateSet targets_without_successor(const TokenDfa& a, const Token& u, const Token& v);

/// The maximum, over token sequences of length k, of the number of distinct states in
/// which a run reading the sequence can end, together with a sequence achieving it.
struct LocalityDegree {
    std::size_t value = 0;
    Tokenization witness;
};

/// Degree of k-locality, computed exactly by iterating image sets from the full state
/// set. dloc(a, 0) is the number of states. Throws LimitExceeded when more than
/// `max_sets` distinct image sets appear on one level.
LocalityDegree dloc(const TokenDfa& a, std::size_t k, std::size_t max_sets = 1u << 20);

struct LocalityProfile {
    std::map<std::size_t, LocalityDegree> by_k;
};

/// dloc(a, k) for k = 1..k_max, sharing the image-set levels between values of k.
LocalityProfile locality_profile(const TokenDfa& a, std::size_t k_max, std::size_t max_sets = 1u << 20);

/// Incremental acceptance over a token stream, constant work per token. The automaton
/// must outlive the matcher.
class StreamMatcher {
public:
    enum class Status { accepting, alive, dead };

    explicit StreamMatcher(const TokenDfa& a);
    StreamMatcher(TokenDfa&&) = delete;

    Status push(const Token& token);
    Status push(TokenId token);
    Status status() const;
    void reset();

    /// Number of tokens consumed so far.
    std::size_t consumed() const { return consumed_; }

private:
    const TokenDfa* dfa_;
    std::optional<StateId> state_;
    std::size_t consumed_ = 0;
};

class LocalityPreconditionError : public Error {
public:
    LocalityPreconditionError(std::size_t k, std::size_t degree);
    std::size_t degree() const { return degree_; }

private:
    std::size_t degree_;
};

/// Validates a token stream by looking only at windows of k+1 consecutive tokens: every
/// window must label some run of the automaton, and the first k tokens must be readable
/// from the initial state. Sound and complete for automata of k-locality degree 1,
/// which the constructor checks (LocalityPreconditionError otherwise).
class WindowValidator {
public:
    WindowValidator(const TokenDfa& a, std::size_t k);
    WindowValidator(TokenDfa&&, std::size_t) = delete;

    /// Returns false once the stream so far can no longer be a prefix of a run.
    bool push(const Token& token);
    bool push(TokenId token);

    bool valid_so_far() const { return !failed_at_.has_value(); }

    /// 0-based index of the first token that broke a window, if any.
    std::optional<std::size_t> failed_at() const { return failed_at_; }

    /// Whether the stream consumed so far is accepted.
    bool finish() const;
    /// Forgets the pushed tokens; the precomputed window tables are kept.
    void reset();

private:
    bool window_has_run() const;

    const TokenDfa* dfa_;
    std::size_t k_;
    std::deque<TokenId> window_;
    std::unordered_set<std::uint64_t> allowed_pairs_;
    std::optional<StateId> head_state_;
    std::size_t consumed_ = 0;
    std::optional<std::size_t> failed_at_;
};

bool window_validate(const TokenDfa& a, std::size_t k, std::span<const Token> tokens);

/// Structural equality up to renaming of states (tokens matched by text). Every state of
/// both automata must be reachable for a positive answer.
bool isomorphic(const TokenDfa& first, const TokenDfa& second);

/// Canonical JSON document: `alphabet` sorted, `transitions` as sorted [from, token, to].
std::string serialize_token_dfa(const TokenDfa& a, int indent = 1);

/// Throws ParseError on a malformed document or a nondeterministic transition list.
TokenDfa parse_token_dfa(std::string_view json_text);

} // namespace tokautoma
