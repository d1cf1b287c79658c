#include "tokautoma/string_dfa.hh"

#include <deque>

namespace tokautoma {

StringDfa::StringDfa(std::size_t states, StateId initial) : delta_(states), final_(states, 0), initial_(initial)
{
    if (states == 0) {
        throw Error("a string DFA needs at least one state");
    }
    check_state(initial);
}

void StringDfa::check_state(StateId state) const
{
    if (state >= delta_.size()) {
        throw Error("unknown state " + std::to_string(state));
    }
}

StateId StringDfa::add_state(bool final)
{
    delta_.emplace_back();
    final_.push_back(final ? 1 : 0);
    return static_cast<StateId>(delta_.size() - 1);
}

void StringDfa::set_transition(StateId from, Symbol symbol, StateId to)
{
    check_state(from);
    check_state(to);
    delta_[from][symbol] = to;
}

std::optional<StateId> StringDfa::target(StateId from, Symbol symbol) const
{
    auto it = delta_[from].find(symbol);
    if (it == delta_[from].end()) {
        return std::nullopt;
    }
    return it->second;
}

void StringDfa::set_final(StateId state, bool final)
{
    check_state(state);
    final_[state] = final ? 1 : 0;
}

void StringDfa::set_initial(StateId state)
{
    check_state(state);
    initial_ = state;
}

Alphabet StringDfa::symbols() const
{
    Alphabet out;
    for (const auto& row : delta_) {
        for (auto [s, to] : row) {
            out.insert(s);
        }
    }
    return out;
}

bool StringDfa::accepts(std::u32string_view w) const
{
    StateId q = initial_;
    for (Symbol s : w) {
        auto next = target(q, s);
        if (!next) {
            return false;
        }
        q = *next;
    }
    return is_final(q);
}

StringDfa trim(const StringDfa& a)
{
    const std::size_t n = a.num_states();
    std::vector<char> reach(n, 0);
    std::vector<char> coreach(n, 0);
    std::vector<std::vector<StateId>> preds(n);
    std::vector<StateId> stack{a.initial()};
    reach[a.initial()] = 1;
    while (!stack.empty()) {
        StateId q = stack.back();
        stack.pop_back();
        for (auto [s, to] : a.transitions_from(q)) {
            preds[to].push_back(q);
            if (!reach[to]) {
                reach[to] = 1;
                stack.push_back(to);
            }
        }
    }
    for (StateId q = 0; q < n; ++q) {
        if (reach[q] && a.is_final(q)) {
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
    StringDfa out(1, 0);
    if (!coreach[a.initial()]) {
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
        for (auto [s, to] : a.transitions_from(q)) {
            if (reach[to] && coreach[to]) {
                out.set_transition(remap[q], s, remap[to]);
            }
        }
    }
    return out;
}

StringDfa minimize(const StringDfa& a)
{
    const StringDfa t = trim(a);
    const std::size_t n = t.num_states();
    const Alphabet sigma = t.symbols();
    std::vector<std::size_t> block(n);
    for (StateId q = 0; q < n; ++q) {
        block[q] = t.is_final(q) ? 1 : 0;
    }
    std::size_t blocks = 0;
    while (true) {
        // signature: own block, then the block of each successor (n for none)
        std::map<std::vector<std::size_t>, std::size_t> ids;
        std::vector<std::size_t> next(n);
        for (StateId q = 0; q < n; ++q) {
            std::vector<std::size_t> sig{block[q]};
            for (Symbol s : sigma) {
                auto to = t.target(q, s);
                sig.push_back(to ? block[*to] : n);
            }
            next[q] = ids.emplace(std::move(sig), ids.size()).first->second;
        }
        block = std::move(next);
        if (ids.size() == blocks) {
            break;
        }
        blocks = ids.size();
    }
    std::vector<StateId> rep(blocks, 0);
    std::vector<StateId> number(blocks, static_cast<StateId>(-1));
    for (StateId q = n; q-- > 0;) {
        rep[block[q]] = q;
    }
    StringDfa out(1, 0);
    std::deque<std::size_t> queue{block[t.initial()]};
    number[block[t.initial()]] = 0;
    out.set_final(0, t.is_final(t.initial()));
    while (!queue.empty()) {
        const std::size_t b = queue.front();
        queue.pop_front();
        for (auto [s, to] : t.transitions_from(rep[b])) {
            const std::size_t c = block[to];
            if (number[c] == static_cast<StateId>(-1)) {
                number[c] = out.add_state(t.is_final(rep[c]));
                queue.push_back(c);
            }
            out.set_transition(number[b], s, number[c]);
        }
    }
    return out;
}

} // namespace tokautoma
