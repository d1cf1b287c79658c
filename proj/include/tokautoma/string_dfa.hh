#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "tokautoma/core.hh"
#include "tokautoma/token_dfa.hh"

namespace tokautoma {

/// Deterministic automaton over base symbols.
class StringDfa {
public:
    explicit StringDfa(std::size_t states = 1, StateId initial = 0);

    StateId add_state(bool final = false);
    void set_transition(StateId from, Symbol symbol, StateId to);
    std::optional<StateId> target(StateId from, Symbol symbol) const;
    const std::map<Symbol, StateId>& transitions_from(StateId state) const { return delta_.at(state); }

    void set_final(StateId state, bool final = true);
    bool is_final(StateId state) const { return final_.at(state) != 0; }
    void set_initial(StateId state);

    StateId initial() const { return initial_; }
    std::size_t num_states() const { return delta_.size(); }

    /// Symbols that label at least one transition.
    Alphabet symbols() const;

    bool accepts(std::u32string_view w) const;

private:
    void check_state(StateId state) const;

    std::vector<std::map<Symbol, StateId>> delta_;
    std::vector<char> final_;
    StateId initial_ = 0;
};

/// Drops states that are unreachable or cannot reach a final state.
StringDfa trim(const StringDfa& a);

/// Trims, then merges indistinguishable states (missing transitions count as a shared
/// dead sink). States are numbered in breadth-first order from the initial state.
StringDfa minimize(const StringDfa& a);

} // namespace tokautoma
