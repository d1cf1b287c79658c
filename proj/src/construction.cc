#include "tokautoma/construction.hh"

#include <algorithm>
#include <array>
#include <map>

namespace tokautoma {

TokenDfa universal_token_dfa(const Alphabet& sigma)
{
    if (sigma.empty()) {
        throw Error("the universal token DFA needs a nonempty base alphabet");
    }
    TokenDfa a(1, 0);
    a.set_final(0);
    for (Symbol s : sigma) {
        a.set_transition(0, Token(s), 0);
    }
    return a;
}

TokenDfa base_token_dfa(const StringDfa& s)
{
    TokenDfa a(s.num_states(), s.initial());
    for (Symbol sym : s.symbols()) {
        a.add_token(Token(sym));
    }
    for (StateId q = 0; q < s.num_states(); ++q) {
        a.set_final(q, s.is_final(q));
        for (auto [sym, to] : s.transitions_from(q)) {
            a.set_transition(q, *a.find_token(Text(1, sym)), to);
        }
    }
    return a;
}

TokenDfa apply_merge(const TokenDfa& a, const MergeRule& rule)
{
    const auto u = a.find_token(rule.left);
    const auto v = a.find_token(rule.right);
    if (!u || !v) {
        return a;
    }
    std::vector<std::array<StateId, 3>> runs;
    for (StateId s1 = 0; s1 < a.num_states(); ++s1) {
        if (auto s2 = a.target(s1, *u)) {
            if (auto s3 = a.target(*s2, *v)) {
                runs.push_back({s1, *s2, *s3});
            }
        }
    }
    if (runs.empty()) {
        return a;
    }

    TokenDfa out = a;
    const TokenId uv = out.add_token(rule.merged());
    for (auto [s1, s2, s3] : runs) {
        out.set_transition(s1, uv, s3);
    }

    StateSet middles;
    for (const auto& r : runs) {
        middles.push_back(r[1]);
    }
    std::sort(middles.begin(), middles.end());
    middles.erase(std::unique(middles.begin(), middles.end()), middles.end());

    std::map<StateId, StateId> fresh;
    for (StateId s2 : middles) {
        const StateId f = out.add_state(out.is_final(s2));
        out.set_origin(f, FreshOrigin{s2, rule.priority});
        fresh.emplace(s2, f);
    }
    const bool same = (*u == *v);
    for (StateId s2 : middles) {
        const std::map<TokenId, StateId> outgoing = out.transitions_from(s2);
        for (auto [label, to] : outgoing) {
            if (label == *v || (same && label == uv)) {
                continue;
            }
            out.set_transition(fresh.at(s2), label, to);
        }
    }
    for (StateId q = 0; q < out.num_states(); ++q) {
        if (auto t = out.target(q, *u)) {
            if (auto it = fresh.find(*t); it != fresh.end()) {
                out.set_transition(q, *u, it->second);
            }
        }
    }
    return out;
}

void check_merge_bookkeeping(const TokenDfa& before, const TokenDfa& after, const MergeRule& rule)
{
    auto fail = [&](const std::string& what) {
        throw InvariantViolation("merge of rule " + std::to_string(rule.priority) + " (" + rule.left.utf8() + " "
                                 + rule.right.utf8() + "): " + what);
    };
    const Token uv = rule.merged();
    const std::size_t added = targets_with_successor(before, rule.left, rule.right).size();
    if (after.num_states() != before.num_states() + added) {
        fail("state count is not |Q| + |E_{u,v}|");
    }
    if (targets_of(after, rule.left).size() != targets_of(before, rule.left).size()) {
        fail("|E_u| changed");
    }
    if (!before.find_token(uv) && targets_of(after, uv).size() > targets_of(before, rule.right).size()) {
        fail("|E_uv(A')| exceeds |E_v(A)|");
    }
    for (const Token& beta : before.alphabet()) {
        if (targets_of(after, beta).size() != targets_of(before, beta).size()) {
            fail("|E_" + beta.utf8() + "| changed");
        }
    }
    if (auto v = after.find_token(rule.right)) {
        for (StateId q = static_cast<StateId>(before.num_states()); q < after.num_states(); ++q) {
            if (after.target(q, *v)) {
                fail("fresh state " + std::to_string(q) + " has a transition on v");
            }
        }
    }
}

namespace {

TokenDfa fold_merges(TokenDfa a, const Dictionary& d, const BuildOptions& options)
{
    for (const MergeRule& rule : d.rules()) {
        TokenDfa next = apply_merge(a, rule);
        if (options.validate) {
            check_merge_bookkeeping(a, next, rule);
            if (auto w = find_context_invariance_violation(next)) {
                throw InvariantViolation("merge of rule " + std::to_string(rule.priority)
                                         + " produced an automaton that is not context-invariant: "
                                         + to_string(w->first) + " vs " + to_string(w->second));
            }
        }
        if (options.on_merge) {
            options.on_merge(rule, a, next);
        }
        a = std::move(next);
    }
    return options.trim_at_end ? trim(a) : a;
}

} // namespace

TokenDfa build_token_dfa(Universal, const Dictionary& d, const BuildOptions& options)
{
    require_proper(d);
    return fold_merges(universal_token_dfa(d.sigma()), d, options);
}

TokenDfa build_token_dfa(const StringDfa& language, const Dictionary& d, const BuildOptions& options)
{
    require_proper(d);
    return fold_merges(base_token_dfa(trim(language)), d, options);
}

TokenDfa contains_pattern_dfa(const Regex& r, const Dictionary& d, const Alphabet& sigma)
{
    Alphabet all = sigma;
    all.insert(d.sigma().begin(), d.sigma().end());
    return build_token_dfa(substring_dfa(r, all), d);
}

} // namespace tokautoma
