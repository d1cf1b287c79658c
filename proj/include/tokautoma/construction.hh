#pragma once

#include <functional>

#include "tokautoma/core.hh"
#include "tokautoma/regex.hh"
#include "tokautoma/string_dfa.hh"
#include "tokautoma/token_dfa.hh"

namespace tokautoma {

/// One accepting state with a self-loop on every symbol of `sigma`.
/// Throws Error on an empty alphabet.
TokenDfa universal_token_dfa(const Alphabet& sigma);

/// Same graph, every symbol label read as a single-symbol token.
TokenDfa base_token_dfa(const StringDfa& a);

/// Merges the rule u|v into a context-invariant token DFA.
///
/// Every run q -u-> s2 -v-> s3 gains a shortcut q -uv-> s3. Each such s2 gets a fresh
/// copy that inherits the outgoing transitions of s2 except those on v (and on uv when
/// u = v) and the finality of s2; every u-transition into s2 is redirected to the copy.
/// States are visited in ascending order, fresh ids are allocated after the existing
/// ones, and nothing is trimmed. Returns the input unchanged when no u|v run exists.
TokenDfa apply_merge(const TokenDfa& a, const MergeRule& rule);

/// Checks the per-merge bookkeeping identities between `before` and `after`:
/// |Q'| = |Q| + |E_{u,v}|, |E_u| unchanged, |E_uv(A')| <= |E_v(A)| (when uv was not
/// already a label), |E_b| unchanged for every old token b, and no fresh state of this
/// merge has a v-transition. Throws InvariantViolation naming the first failure.
void check_merge_bookkeeping(const TokenDfa& before, const TokenDfa& after, const MergeRule& rule);

struct BuildOptions {
    /// Trim useless states once, after the last merge.
    bool trim_at_end = false;
    /// After every merge, decide context-invariance and check the bookkeeping
    /// identities; failures throw InvariantViolation.
    bool validate = false;
    /// Called after every merge with (rule, automaton before, automaton after).
    std::function<void(const MergeRule&, const TokenDfa&, const TokenDfa&)> on_merge;
};

struct Universal {};
inline constexpr Universal universal{};

/// Folds apply_merge over the rules of `d` in priority order starting from the
/// universal token DFA over d.sigma(). Throws ImproperDictionary.
TokenDfa build_token_dfa(Universal, const Dictionary& d, const BuildOptions& options = {});

/// Same, starting from the base token DFA of the (trimmed) string automaton.
TokenDfa build_token_dfa(const StringDfa& language, const Dictionary& d, const BuildOptions& options = {});

/// Token DFA accepting exactly the tokenizations, under `d`, of the strings over
/// sigma ∪ d.sigma() that contain a match of `r`.
TokenDfa contains_pattern_dfa(const Regex& r, const Dictionary& d, const Alphabet& sigma);

} // namespace tokautoma
