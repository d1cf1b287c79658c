#include "tokautoma/token_dfa.hh"

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>

namespace tokautoma {

TokenDfa::TokenDfa(std::size_t states, StateId initial)
    : delta_(states), final_(states, 0), origin_(states), initial_(initial)
{
    if (states == 0) {
        throw Error("a token DFA needs at least one state");
    }
    check_state(initial);
}

void TokenDfa::check_state(StateId state) const
{
    if (state >= delta_.size()) {
        throw Error("unknown state " + std::to_string(state));
    }
}

StateId TokenDfa::add_state(bool final)
{
    delta_.emplace_back();
    final_.push_back(final ? 1 : 0);
    origin_.emplace_back();
    return static_cast<StateId>(delta_.size() - 1);
}

TokenId TokenDfa::add_token(const Token& token)
{
    auto [it, inserted] = index_.emplace(token.text(), static_cast<TokenId>(alphabet_.size()));
    if (inserted) {
        alphabet_.push_back(token);
    }
    return it->second;
}

std::optional<TokenId> TokenDfa::find_token(const Text& text) const
{
    auto it = index_.find(text);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void TokenDfa::set_transition(StateId from, TokenId label, StateId to)
{
    check_state(from);
    check_state(to);
    if (label >= alphabet_.size()) {
        throw Error("unknown token id " + std::to_string(label));
    }
    delta_[from][label] = to;
}

void TokenDfa::remove_transition(StateId from, TokenId label)
{
    check_state(from);
    delta_[from].erase(label);
}

std::optional<StateId> TokenDfa::target(StateId from, TokenId label) const
{
    const auto& out = delta_[from];
    auto it = out.find(label);
    if (it == out.end()) {
        return std::nullopt;
    }
    return it->second;
}

void TokenDfa::set_final(StateId state, bool final)
{
    check_state(state);
    final_[state] = final ? 1 : 0;
}

void TokenDfa::set_initial(StateId state)
{
    check_state(state);
    initial_ = state;
}

std::size_t TokenDfa::num_transitions() const
{
    std::size_t n = 0;
    for (const auto& out : delta_) {
        n += out.size();
    }
    return n;
}

std::size_t TokenDfa::num_finals() const { return static_cast<std::size_t>(std::count(final_.begin(), final_.end(), 1)); }

std::size_t TokenDfa::max_token_length() const
{
    std::size_t t = 0;
    for (const Token& tok : alphabet_) {
        t = std::max(t, tok.size());
    }
    return t;
}

std::optional<StateId> run(const TokenDfa& a, StateId from, std::span<const Token> tokens)
{
    a.check_state(from);
    StateId q = from;
    for (const Token& t : tokens) {
        auto id = a.find_token(t);
        if (!id) {
            return std::nullopt;
        }
        auto next = a.target(q, *id);
        if (!next) {
            return std::nullopt;
        }
        q = *next;
    }
    return q;
}

std::optional<StateId> run_ids(const TokenDfa& a, StateId from, std::span<const TokenId> tokens)
{
    a.check_state(from);
    StateId q = from;
    for (TokenId t : tokens) {
        auto next = a.target(q, t);
        if (!next) {
            return std::nullopt;
        }
        q = *next;
    }
    return q;
}

bool accepts(const TokenDfa& a, std::span<const Token> tokens)
{
    auto q = run(a, a.initial(), tokens);
    return q && a.is_final(*q);
}

TokenDfa trim(const TokenDfa& a)
{
    const std::size_t n = a.num_states();
    std::vector<char> reach(n, 0);
    std::vector<StateId> stack{a.initial()};
    reach[a.initial()] = 1;
    std::vector<std::vector<StateId>> preds(n);
    while (!stack.empty()) {
        StateId q = stack.back();
        stack.pop_back();
        for (auto [tok, to] : a.transitions_from(q)) {
            if (!reach[to]) {
                reach[to] = 1;
                stack.push_back(to);
            }
        }
    }
    for (StateId q = 0; q < n; ++q) {
        for (auto [tok, to] : a.transitions_from(q)) {
            preds[to].push_back(q);
        }
    }
    std::vector<char> coreach(n, 0);
    for (StateId q = 0; q < n; ++q) {
        if (a.is_final(q)) {
            coreach[q] = 1;
            stack.push_back(q);
        }
    }
    while (!stack.empty()) {
        StateId q = stack.back();
        stack.pop_back();
        for (StateId p : preds[q]) {
            if (!coreach[p]) {
                coreach[p] = 1;
                stack.push_back(p);
            }
        }
    }

    TokenDfa out(1, 0);
    for (const Token& t : a.alphabet()) {
        out.add_token(t);
    }
    if (!(reach[a.initial()] && coreach[a.initial()])) {
        return out;
    }
    std::vector<StateId> remap(n, 0);
    std::vector<StateId> kept;
    for (StateId q = 0; q < n; ++q) {
        if (reach[q] && coreach[q]) {
            remap[q] = static_cast<StateId>(kept.size());
            kept.push_back(q);
        }
    }
    for (std::size_t i = 1; i < kept.size(); ++i) {
        out.add_state();
    }
    out.set_initial(remap[a.initial()]);
    for (StateId q : kept) {
        out.set_final(remap[q], a.is_final(q));
        if (const auto& o = a.origin(q)) {
            // Sources that were trimmed away keep their old id; the origin is debug metadata.
            FreshOrigin mapped = *o;
            if (reach[o->source] && coreach[o->source]) {
                mapped.source = remap[o->source];
            }
            out.set_origin(remap[q], mapped);
        }
        for (auto [tok, to] : a.transitions_from(q)) {
            if (reach[to] && coreach[to]) {
                out.set_transition(remap[q], tok, remap[to]);
            }
        }
    }
    return out;
}

namespace {

struct PairNode {
    StateId behind;
    StateId ahead;
    Text pending;
    std::ptrdiff_t parent;
    // Tokens appended on the step that created this node, tagged with the run they
    // extend (true = first run). Start nodes carry two tokens.
    std::vector<std::pair<bool, TokenId>> appended;
    bool first_is_behind;
    StateId first_start;
    StateId second_start;
};

bool is_proper_prefix(const Text& shorter, const Text& longer)
{
    return shorter.size() < longer.size() && longer.compare(0, shorter.size(), shorter) == 0;
}

} // namespace

std::optional<ContextInvarianceWitness> find_context_invariance_violation(const TokenDfa& a)
{
    std::vector<PairNode> nodes;
    std::set<std::tuple<StateId, StateId, Text>> seen;
    std::queue<std::size_t> work;

    auto push = [&](PairNode node) {
        if (seen.emplace(node.behind, node.ahead, node.pending).second) {
            nodes.push_back(std::move(node));
            work.push(nodes.size() - 1);
        }
    };

    auto witness_from = [&](std::size_t leaf, bool leaf_first_behind, TokenId last) {
        ContextInvarianceWitness w;
        w.first_start = nodes[leaf].first_start;
        w.second_start = nodes[leaf].second_start;
        std::vector<std::pair<bool, TokenId>> steps{{leaf_first_behind, last}};
        for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(leaf); i >= 0; i = nodes[i].parent) {
            const auto& app = nodes[i].appended;
            for (auto it = app.rbegin(); it != app.rend(); ++it) {
                steps.push_back(*it);
            }
        }
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
            (it->first ? w.first : w.second).push_back(a.token(it->second));
        }
        return w;
    };

    // First step: from any pair of states, the runs read different tokens, one a proper
    // prefix of the other. Runs that agree on a common prefix are covered by starting
    // from the states after that prefix.
    const auto n = static_cast<StateId>(a.num_states());
    for (StateId p = 0; p < n; ++p) {
        for (StateId q = 0; q < n; ++q) {
            for (auto [t1, p1] : a.transitions_from(p)) {
                const Text& s1 = a.token(t1).text();
                for (auto [t2, q1] : a.transitions_from(q)) {
                    const Text& s2 = a.token(t2).text();
                    if (!is_proper_prefix(s1, s2)) {
                        continue;
                    }
                    push(PairNode{p1, q1, s2.substr(s1.size()), -1, {{true, t1}, {false, t2}}, true, p, q});
                }
            }
        }
    }

    while (!work.empty()) {
        const std::size_t idx = work.front();
        work.pop();
        const StateId behind = nodes[idx].behind;
        const StateId ahead = nodes[idx].ahead;
        const Text pending = nodes[idx].pending;
        const bool first_behind = nodes[idx].first_is_behind;
        for (auto [t, next] : a.transitions_from(behind)) {
            const Text& s = a.token(t).text();
            if (s == pending) {
                return witness_from(idx, first_behind, t);
            }
            PairNode child{0, 0, {}, static_cast<std::ptrdiff_t>(idx), {{first_behind, t}}, first_behind,
                           nodes[idx].first_start, nodes[idx].second_start};
            if (is_proper_prefix(s, pending)) {
                child.behind = next;
                child.ahead = ahead;
                child.pending = pending.substr(s.size());
            } else if (is_proper_prefix(pending, s)) {
                child.behind = ahead;
                child.ahead = next;
                child.pending = s.substr(pending.size());
                child.first_is_behind = !first_behind;
            } else {
                continue;
            }
            push(std::move(child));
        }
    }
    return std::nullopt;
}

std::optional<DistinguishingTokenization> find_distinguishing_tokenization(const TokenDfa& first,
                                                                           const TokenDfa& second)
{
    // Union alphabet by token text, in a stable order.
    std::vector<Token> tokens;
    std::vector<std::optional<TokenId>> in_first;
    std::vector<std::optional<TokenId>> in_second;
    {
        std::map<Text, std::size_t> index;
        for (const TokenDfa* a : {&first, &second}) {
            for (const Token& t : a->alphabet()) {
                if (index.emplace(t.text(), tokens.size()).second) {
                    tokens.push_back(t);
                }
            }
        }
        for (const Token& t : tokens) {
            in_first.push_back(first.find_token(t));
            in_second.push_back(second.find_token(t));
        }
    }

    static constexpr StateId sink = static_cast<StateId>(-1);
    auto step = [](const TokenDfa& a, StateId q, std::optional<TokenId> t) -> StateId {
        if (q == sink || !t) {
            return sink;
        }
        return a.target(q, *t).value_or(sink);
    };
    auto fin = [](const TokenDfa& a, StateId q) { return q != sink && a.is_final(q); };

    struct Node {
        StateId p;
        StateId q;
        std::ptrdiff_t parent;
        std::size_t token;
    };
    std::vector<Node> nodes{{first.initial(), second.initial(), -1, 0}};
    std::set<std::pair<StateId, StateId>> seen{{first.initial(), second.initial()}};
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        const Node cur = nodes[head];
        if (fin(first, cur.p) != fin(second, cur.q)) {
            DistinguishingTokenization w;
            w.accepted_by_first = fin(first, cur.p);
            for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(head); nodes[i].parent >= 0; i = nodes[i].parent) {
                w.tokens.push_back(tokens[nodes[i].token]);
            }
            std::reverse(w.tokens.begin(), w.tokens.end());
            return w;
        }
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            const StateId p = step(first, cur.p, in_first[t]);
            const StateId q = step(second, cur.q, in_second[t]);
            if (p == sink && q == sink) {
                continue;
            }
            if (seen.emplace(p, q).second) {
                nodes.push_back({p, q, static_cast<std::ptrdiff_t>(head), t});
            }
        }
    }
    return std::nullopt;
}

StateSet all_states(const TokenDfa& a)
{
    StateSet out(a.num_states());
    for (StateId q = 0; q < out.size(); ++q) {
        out[q] = q;
    }
    return out;
}

StateSet image(const TokenDfa& a, std::span<const StateId> states, TokenId u)
{
    StateSet out;
    for (StateId q : states) {
        if (auto t = a.target(q, u)) {
            out.push_back(*t);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

StateSet image(const TokenDfa& a, std::span<const StateId> states, const Token& u)
{
    auto id = a.find_token(u);
    if (!id) {
        return {};
    }
    return image(a, states, *id);
}

StateSet targets_of(const TokenDfa& a, const Token& u) { return image(a, all_states(a), u); }

StateSet targets_with_successor(const TokenDfa& a, const Token& u, const Token& v)
{
    StateSet out;
    auto vid = a.find_token(v);
    for (StateId q : targets_of(a, u)) {
        if (vid && a.target(q, *vid)) {
            out.push_back(q);
        }
    }
    return out;
}

StateSet targets_without_successor(const TokenDfa& a, const Token& u, const Token& v)
{
    StateSet out;
    auto vid = a.find_token(v);
    for (StateId q : targets_of(a, u)) {
        if (!vid || !a.target(q, *vid)) {
            out.push_back(q);
        }
    }
    return out;
}

LocalityProfile locality_profile(const TokenDfa& a, std::size_t k_max, std::size_t max_sets)
{
    LocalityProfile profile;
    std::map<StateSet, std::vector<TokenId>> level{{all_states(a), {}}};
    for (std::size_t k = 1; k <= k_max; ++k) {
        std::map<StateSet, std::vector<TokenId>> next;
        for (const auto& [set, word] : level) {
            for (TokenId t = 0; t < a.alphabet().size(); ++t) {
                StateSet img = image(a, set, t);
                if (img.empty() || next.contains(img)) {
                    continue;
                }
                if (next.size() >= max_sets) {
                    throw LimitExceeded("dloc: more than " + std::to_string(max_sets) + " distinct image sets at k="
                                        + std::to_string(k));
                }
                std::vector<TokenId> w = word;
                w.push_back(t);
                next.emplace(std::move(img), std::move(w));
            }
        }
        LocalityDegree degree;
        for (const auto& [set, word] : next) {
            if (set.size() > degree.value) {
                degree.value = set.size();
                degree.witness.clear();
                for (TokenId t : word) {
                    degree.witness.push_back(a.token(t));
                }
            }
        }
        profile.by_k.emplace(k, std::move(degree));
        level = std::move(next);
    }
    return profile;
}

LocalityDegree dloc(const TokenDfa& a, std::size_t k, std::size_t max_sets)
{
    if (k == 0) {
        return LocalityDegree{a.num_states(), {}};
    }
    return locality_profile(a, k, max_sets).by_k.at(k);
}

StreamMatcher::StreamMatcher(const TokenDfa& a) : dfa_(&a), state_(a.initial()) {}

StreamMatcher::Status StreamMatcher::push(const Token& token)
{
    auto id = dfa_->find_token(token);
    if (!id) {
        ++consumed_;
        state_.reset();
        return Status::dead;
    }
    return push(*id);
}

StreamMatcher::Status StreamMatcher::push(TokenId token)
{
    ++consumed_;
    if (state_) {
        state_ = dfa_->target(*state_, token);
    }
    return status();
}

StreamMatcher::Status StreamMatcher::status() const
{
    if (!state_) {
        return Status::dead;
    }
    return dfa_->is_final(*state_) ? Status::accepting : Status::alive;
}

void StreamMatcher::reset()
{
    state_ = dfa_->initial();
    consumed_ = 0;
}

LocalityPreconditionError::LocalityPreconditionError(std::size_t k, std::size_t degree)
    : Error("window validation needs degree of " + std::to_string(k) + "-locality 1, automaton has "
            + std::to_string(degree)),
      degree_(degree)
{
}

WindowValidator::WindowValidator(const TokenDfa& a, std::size_t k) : dfa_(&a), k_(k), head_state_(a.initial())
{
    if (k == 0) {
        throw Error("window validation needs k >= 1");
    }
    const std::size_t degree = dloc(a, k).value;
    if (degree > 1) {
        throw LocalityPreconditionError(k, degree);
    }
    if (k == 1) {
        // Adjacent pairs (x, y) labelling some run p -x-> r -y-> s.
        std::vector<std::vector<TokenId>> incoming(a.num_states());
        for (StateId q = 0; q < a.num_states(); ++q) {
            for (auto [t, to] : a.transitions_from(q)) {
                incoming[to].push_back(t);
            }
        }
        for (StateId r = 0; r < a.num_states(); ++r) {
            for (TokenId x : incoming[r]) {
                for (auto [y, to] : a.transitions_from(r)) {
                    allowed_pairs_.insert((std::uint64_t{x} << 32) | y);
                }
            }
        }
    }
}

bool WindowValidator::window_has_run() const
{
    if (k_ == 1) {
        return allowed_pairs_.contains((std::uint64_t{window_[0]} << 32) | window_[1]);
    }
    StateSet states = all_states(*dfa_);
    for (TokenId t : window_) {
        states = image(*dfa_, states, t);
        if (states.empty()) {
            return false;
        }
    }
    return true;
}

bool WindowValidator::push(const Token& token)
{
    auto id = dfa_->find_token(token);
    if (!id) {
        if (!failed_at_) {
            failed_at_ = consumed_;
        }
        ++consumed_;
        return false;
    }
    return push(*id);
}

bool WindowValidator::push(TokenId token)
{
    const std::size_t index = consumed_++;
    if (failed_at_) {
        return false;
    }
    if (token >= dfa_->alphabet().size()) {
        failed_at_ = index;
        return false;
    }
    window_.push_back(token);
    if (window_.size() > k_ + 1) {
        window_.pop_front();
    }
    if (index < k_) {
        head_state_ = dfa_->target(*head_state_, token);
        if (!head_state_) {
            failed_at_ = index;
            return false;
        }
    } else if (!window_has_run()) {
        failed_at_ = index;
        return false;
    }
    return true;
}

bool WindowValidator::finish() const
{
    if (failed_at_) {
        return false;
    }
    if (consumed_ <= k_) {
        return dfa_->is_final(*head_state_);
    }
    // With degree 1 the last k tokens pin down the current state.
    StateSet states = all_states(*dfa_);
    for (std::size_t i = window_.size() - k_; i < window_.size(); ++i) {
        states = image(*dfa_, states, window_[i]);
    }
    return states.size() == 1 && dfa_->is_final(states.front());
}

void WindowValidator::reset()
{
    window_.clear();
    head_state_ = dfa_->initial();
    consumed_ = 0;
    failed_at_.reset();
}

bool window_validate(const TokenDfa& a, std::size_t k, std::span<const Token> tokens)
{
    WindowValidator v(a, k);
    for (const Token& t : tokens) {
        if (!v.push(t)) {
            return false;
        }
    }
    return v.finish();
}

bool isomorphic(const TokenDfa& first, const TokenDfa& second)
{
    if (first.num_states() != second.num_states() || first.num_transitions() != second.num_transitions()) {
        return false;
    }
    constexpr StateId unmapped = static_cast<StateId>(-1);
    std::vector<StateId> fwd(first.num_states(), unmapped);
    std::vector<StateId> bwd(second.num_states(), unmapped);
    std::vector<std::pair<StateId, StateId>> stack{{first.initial(), second.initial()}};
    fwd[first.initial()] = second.initial();
    bwd[second.initial()] = first.initial();
    std::size_t mapped = 1;
    while (!stack.empty()) {
        auto [p, q] = stack.back();
        stack.pop_back();
        if (first.is_final(p) != second.is_final(q)
            || first.transitions_from(p).size() != second.transitions_from(q).size()) {
            return false;
        }
        for (auto [t, p2] : first.transitions_from(p)) {
            auto t2 = second.find_token(first.token(t));
            if (!t2) {
                return false;
            }
            auto q2 = second.target(q, *t2);
            if (!q2) {
                return false;
            }
            if (fwd[p2] == unmapped && bwd[*q2] == unmapped) {
                fwd[p2] = *q2;
                bwd[*q2] = p2;
                ++mapped;
                stack.emplace_back(p2, *q2);
            } else if (fwd[p2] != *q2 || bwd[*q2] != p2) {
                return false;
            }
        }
    }
    return mapped == first.num_states();
}

} // namespace tokautoma
