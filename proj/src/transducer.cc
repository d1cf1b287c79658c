#include "tokautoma/transducer.hh"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace tokautoma {

Transducer::Transducer(std::size_t states, StateId initial) : arcs_(states), final_(states), initial_(initial)
{
    if (states == 0) {
        throw Error("a transducer needs at least one state");
    }
    check_state(initial);
}

void Transducer::check_state(StateId state) const
{
    if (state >= arcs_.size()) {
        throw Error("unknown transducer state " + std::to_string(state));
    }
}

StateId Transducer::add_state()
{
    arcs_.emplace_back();
    final_.emplace_back();
    return static_cast<StateId>(arcs_.size() - 1);
}

TokenId Transducer::add_output_token(const Token& token)
{
    auto [it, inserted] = output_index_.emplace(token.text(), static_cast<TokenId>(outputs_.size()));
    if (inserted) {
        outputs_.push_back(token);
    }
    return it->second;
}

void Transducer::add_transition(StateId from, Symbol input, std::optional<TokenId> output, StateId to)
{
    check_state(from);
    check_state(to);
    if (output && *output >= outputs_.size()) {
        throw Error("unknown output token id " + std::to_string(*output));
    }
    arcs_[from].push_back(Arc{input, output, to});
}

void Transducer::set_final_output(StateId state, std::vector<TokenId> output)
{
    check_state(state);
    final_[state] = std::move(output);
}

std::size_t Transducer::num_transitions() const
{
    std::size_t n = 0;
    for (const auto& a : arcs_) {
        n += a.size();
    }
    return n;
}

Alphabet Transducer::input_alphabet() const
{
    Alphabet out;
    for (const auto& row : arcs_) {
        for (const Arc& a : row) {
            out.insert(a.input);
        }
    }
    return out;
}

Transducer build_transducer(const TokenDfa& a)
{
    Transducer t(a.num_states(), a.initial());
    for (const Token& tok : a.alphabet()) {
        t.add_output_token(tok);
    }
    for (StateId p = 0; p < a.num_states(); ++p) {
        if (a.is_final(p)) {
            t.set_final_output(p, {});
        }
    }
    for (StateId p = 0; p < a.num_states(); ++p) {
        for (auto [label, q] : a.transitions_from(p)) {
            const Text& text = a.token(label).text();
            StateId from = p;
            for (std::size_t i = 0; i + 1 < text.size(); ++i) {
                const StateId mid = t.add_state();
                t.add_transition(from, text[i], std::nullopt, mid);
                from = mid;
            }
            t.add_transition(from, text.back(), label, q);
        }
    }
    return t;
}

namespace {

using Output = std::vector<TokenId>;

/// States of `t` reachable from the initial state and able to reach a final output.
std::vector<char> useful_states(const Transducer& t)
{
    const std::size_t n = t.num_states();
    std::vector<char> reach(n, 0);
    std::vector<char> coreach(n, 0);
    std::vector<std::vector<StateId>> preds(n);
    std::vector<StateId> stack{t.initial()};
    reach[t.initial()] = 1;
    while (!stack.empty()) {
        StateId q = stack.back();
        stack.pop_back();
        for (const auto& arc : t.arcs_from(q)) {
            if (!reach[arc.to]) {
                reach[arc.to] = 1;
                stack.push_back(arc.to);
            }
        }
    }
    for (StateId q = 0; q < n; ++q) {
        for (const auto& arc : t.arcs_from(q)) {
            preds[arc.to].push_back(q);
        }
        if (t.final_output(q)) {
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
    std::vector<char> useful(n, 0);
    for (StateId q = 0; q < n; ++q) {
        useful[q] = reach[q] && coreach[q];
    }
    return useful;
}

/// Output of run 1 minus the common prefix with run 2, or the other way round.
struct Delay {
    bool first_ahead = false;
    Output rest;

    friend bool operator==(const Delay&, const Delay&) = default;
};

/// Appends the two outputs to the delay; nullopt when the outputs diverge.
std::optional<Delay> advance(const Delay& d, std::optional<TokenId> o1, std::optional<TokenId> o2)
{
    Output x = d.first_ahead ? d.rest : Output{};
    Output y = d.first_ahead ? Output{} : d.rest;
    if (o1) {
        x.push_back(*o1);
    }
    if (o2) {
        y.push_back(*o2);
    }
    const std::size_t common = std::min(x.size(), y.size());
    if (!std::equal(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(common), y.begin())) {
        return std::nullopt;
    }
    Delay out;
    out.first_ahead = x.size() > y.size();
    const Output& longer = out.first_ahead ? x : y;
    out.rest.assign(longer.begin() + static_cast<std::ptrdiff_t>(common), longer.end());
    return out;
}

using ArcPair = std::pair<std::uint32_t, std::uint32_t>;

struct SquareNode {
    StateId p;
    StateId q;
    Delay delay;
    std::ptrdiff_t parent;
    ArcPair arcs;
};

class Square {
public:
    explicit Square(const Transducer& t) : t_(t)
    {
        // Pairs reachable on a common input, then restricted to pairs that can reach a
        // pair of accepting states.
        std::map<std::pair<StateId, StateId>, std::vector<std::pair<StateId, StateId>>> preds;
        std::vector<std::pair<StateId, StateId>> stack{{t.initial(), t.initial()}};
        reachable_.insert(stack.front());
        while (!stack.empty()) {
            auto [p, q] = stack.back();
            stack.pop_back();
            for (const auto& a1 : t.arcs_from(p)) {
                for (const auto& a2 : t.arcs_from(q)) {
                    if (a1.input != a2.input) {
                        continue;
                    }
                    std::pair<StateId, StateId> next{a1.to, a2.to};
                    preds[next].push_back({p, q});
                    if (reachable_.insert(next).second) {
                        stack.push_back(next);
                    }
                }
            }
        }
        for (const auto& pq : reachable_) {
            if (t.final_output(pq.first) && t.final_output(pq.second)) {
                useful_.insert(pq);
                stack.push_back(pq);
            }
        }
        while (!stack.empty()) {
            auto pq = stack.back();
            stack.pop_back();
            for (const auto& prev : preds[pq]) {
                if (useful_.insert(prev).second) {
                    stack.push_back(prev);
                }
            }
        }
    }

    bool useful(StateId p, StateId q) const { return useful_.contains({p, q}); }

    /// Arc pairs leading from (p, q) to a pair of accepting states, inside the useful part.
    std::vector<ArcPair> completion(StateId p, StateId q) const
    {
        struct Back {
            std::pair<StateId, StateId> prev;
            ArcPair arcs;
        };
        std::map<std::pair<StateId, StateId>, Back> back;
        std::queue<std::pair<StateId, StateId>> work;
        work.push({p, q});
        back[{p, q}] = Back{{p, q}, {0, 0}};
        while (!work.empty()) {
            auto cur = work.front();
            work.pop();
            if (t_.final_output(cur.first) && t_.final_output(cur.second)) {
                std::vector<ArcPair> path;
                for (auto at = cur; at != std::make_pair(p, q); at = back[at].prev) {
                    path.push_back(back[at].arcs);
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            const auto& arcs1 = t_.arcs_from(cur.first);
            const auto& arcs2 = t_.arcs_from(cur.second);
            for (std::uint32_t i = 0; i < arcs1.size(); ++i) {
                for (std::uint32_t j = 0; j < arcs2.size(); ++j) {
                    if (arcs1[i].input != arcs2[j].input) {
                        continue;
                    }
                    std::pair<StateId, StateId> next{arcs1[i].to, arcs2[j].to};
                    if (useful(next.first, next.second) && !back.contains(next)) {
                        back[next] = Back{cur, {i, j}};
                        work.push(next);
                    }
                }
            }
        }
        throw InvariantViolation("functionality check: no completion from a useful state pair");
    }

    /// Replays the arc pairs from the initial pair and returns input and both outputs,
    /// including final outputs.
    NonFunctionalWitness replay(const std::vector<ArcPair>& path) const
    {
        NonFunctionalWitness w;
        StateId p = t_.initial();
        StateId q = t_.initial();
        for (auto [i, j] : path) {
            const auto& a1 = t_.arcs_from(p)[i];
            const auto& a2 = t_.arcs_from(q)[j];
            w.input.push_back(a1.input);
            if (a1.output) {
                w.first.push_back(t_.token(*a1.output));
            }
            if (a2.output) {
                w.second.push_back(t_.token(*a2.output));
            }
            p = a1.to;
            q = a2.to;
        }
        for (TokenId id : *t_.final_output(p)) {
            w.first.push_back(t_.token(id));
        }
        for (TokenId id : *t_.final_output(q)) {
            w.second.push_back(t_.token(id));
        }
        return w;
    }

private:
    const Transducer& t_;
    std::set<std::pair<StateId, StateId>> reachable_;
    std::set<std::pair<StateId, StateId>> useful_;
};

std::vector<ArcPair> path_to(const std::vector<SquareNode>& nodes, std::ptrdiff_t idx)
{
    std::vector<ArcPair> path;
    for (; idx >= 0 && nodes[idx].parent >= 0; idx = nodes[idx].parent) {
        path.push_back(nodes[idx].arcs);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

FunctionalityVerdict not_functional(NonFunctionalWitness w)
{
    return FunctionalityVerdict{Functionality::not_functional, std::move(w)};
}

} // namespace

FunctionalityVerdict check_functional(const Transducer& t, std::size_t max_delay)
{
    Square square(t);
    if (!square.useful(t.initial(), t.initial())) {
        return {};
    }
    std::vector<SquareNode> nodes{{t.initial(), t.initial(), {}, -1, {0, 0}}};
    std::map<std::pair<StateId, StateId>, std::size_t> seen{{{t.initial(), t.initial()}, 0}};
    bool capped = false;

    for (std::size_t head = 0; head < nodes.size(); ++head) {
        const SquareNode cur = nodes[head];
        const auto& f1 = t.final_output(cur.p);
        const auto& f2 = t.final_output(cur.q);
        if (f1 && f2) {
            Output x = cur.delay.first_ahead ? cur.delay.rest : Output{};
            Output y = cur.delay.first_ahead ? Output{} : cur.delay.rest;
            x.insert(x.end(), f1->begin(), f1->end());
            y.insert(y.end(), f2->begin(), f2->end());
            if (x != y) {
                return not_functional(square.replay(path_to(nodes, static_cast<std::ptrdiff_t>(head))));
            }
        }
        const auto& arcs1 = t.arcs_from(cur.p);
        const auto& arcs2 = t.arcs_from(cur.q);
        for (std::uint32_t i = 0; i < arcs1.size(); ++i) {
            for (std::uint32_t j = 0; j < arcs2.size(); ++j) {
                const auto& a1 = arcs1[i];
                const auto& a2 = arcs2[j];
                if (a1.input != a2.input || !square.useful(a1.to, a2.to)) {
                    continue;
                }
                auto path = path_to(nodes, static_cast<std::ptrdiff_t>(head));
                path.push_back({i, j});
                auto delay = advance(cur.delay, a1.output, a2.output);
                if (!delay) {
                    auto suffix = square.completion(a1.to, a2.to);
                    path.insert(path.end(), suffix.begin(), suffix.end());
                    return not_functional(square.replay(path));
                }
                auto it = seen.find({a1.to, a2.to});
                if (it == seen.end()) {
                    if (delay->rest.size() > max_delay) {
                        capped = true;
                        continue;
                    }
                    seen.emplace(std::make_pair(a1.to, a2.to), nodes.size());
                    nodes.push_back({a1.to, a2.to, std::move(*delay), static_cast<std::ptrdiff_t>(head), {i, j}});
                } else if (nodes[it->second].delay != *delay) {
                    // Two delays at one useful pair: one of the two inputs, completed the
                    // same way, has two different outputs.
                    auto suffix = square.completion(a1.to, a2.to);
                    auto other = path_to(nodes, static_cast<std::ptrdiff_t>(it->second));
                    for (auto* candidate : {&path, &other}) {
                        candidate->insert(candidate->end(), suffix.begin(), suffix.end());
                        NonFunctionalWitness w = square.replay(*candidate);
                        if (w.first != w.second) {
                            return not_functional(std::move(w));
                        }
                    }
                    return FunctionalityVerdict{Functionality::inconclusive, std::nullopt};
                }
            }
        }
    }
    return FunctionalityVerdict{capped ? Functionality::inconclusive : Functionality::functional, std::nullopt};
}

SubsequentialTransducer::SubsequentialTransducer(Alphabet input_alphabet, std::vector<Token> output_alphabet)
    : inputs_(std::move(input_alphabet)), outputs_(std::move(output_alphabet))
{
    ascii_index_.fill(-1);
    for (Symbol s : inputs_) {
        const auto idx = static_cast<std::uint32_t>(symbols_.size());
        symbols_.push_back(s);
        index_.emplace(s, idx);
        if (s < 128) {
            ascii_index_[s] = static_cast<std::int32_t>(idx);
        }
    }
}

StateId SubsequentialTransducer::add_state()
{
    next_.resize(next_.size() + symbols_.size(), -1);
    out_begin_.resize(next_.size(), 0);
    out_size_.resize(next_.size(), 0);
    final_.emplace_back();
    return static_cast<StateId>(final_.size() - 1);
}

std::optional<std::uint32_t> SubsequentialTransducer::symbol_index(Symbol s) const
{
    if (s < 128) {
        const std::int32_t idx = ascii_index_[s];
        return idx < 0 ? std::nullopt : std::optional<std::uint32_t>(static_cast<std::uint32_t>(idx));
    }
    auto it = index_.find(s);
    return it == index_.end() ? std::nullopt : std::optional<std::uint32_t>(it->second);
}

void SubsequentialTransducer::set_transition(StateId from, Symbol input, StateId to, std::span<const TokenId> output)
{
    if (from >= num_states() || to >= num_states()) {
        throw Error("unknown transducer state");
    }
    auto idx = symbol_index(input);
    if (!idx) {
        throw Error("symbol outside the transducer's input alphabet");
    }
    const std::size_t cell = from * symbols_.size() + *idx;
    if (next_[cell] >= 0) {
        throw Error("transition on (" + std::to_string(from) + ", symbol) already defined");
    }
    for (TokenId id : output) {
        if (id >= outputs_.size()) {
            throw Error("unknown output token id " + std::to_string(id));
        }
    }
    next_[cell] = static_cast<std::int32_t>(to);
    out_begin_[cell] = static_cast<std::uint32_t>(pool_.size());
    out_size_[cell] = static_cast<std::uint32_t>(output.size());
    pool_.insert(pool_.end(), output.begin(), output.end());
}

void SubsequentialTransducer::set_final_output(StateId state, std::vector<TokenId> output)
{
    final_.at(state) = std::move(output);
}

void SubsequentialTransducer::set_initial(StateId state)
{
    if (state >= num_states()) {
        throw Error("unknown transducer state");
    }
    initial_ = state;
}

std::optional<SubsequentialTransducer::Step> SubsequentialTransducer::step(StateId from, Symbol input) const
{
    auto idx = symbol_index(input);
    if (!idx || from >= num_states()) {
        return std::nullopt;
    }
    const std::size_t cell = from * symbols_.size() + *idx;
    if (next_[cell] < 0) {
        return std::nullopt;
    }
    return Step{static_cast<StateId>(next_[cell]),
                std::span<const TokenId>(pool_.data() + out_begin_[cell], out_size_[cell])};
}

std::size_t SubsequentialTransducer::num_transitions() const
{
    return static_cast<std::size_t>(std::count_if(next_.begin(), next_.end(), [](std::int32_t n) { return n >= 0; }));
}

std::optional<std::vector<TokenId>> SubsequentialTransducer::transduce_ids(std::u32string_view w) const
{
    std::vector<TokenId> out;
    out.reserve(w.size() / 2 + 1);
    if (num_states() == 0) {
        return std::nullopt;
    }
    const std::size_t width = symbols_.size();
    std::size_t q = initial_;
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto idx = symbol_index(w[i]);
        if (!idx) {
            require_in_alphabet(w, inputs_);
        }
        const std::size_t cell = q * width + *idx;
        const std::int32_t next = next_[cell];
        if (next < 0) {
            // Keep scanning so that alphabet errors win over a dead run.
            require_in_alphabet(w, inputs_);
            return std::nullopt;
        }
        const TokenId* begin = pool_.data() + out_begin_[cell];
        out.insert(out.end(), begin, begin + out_size_[cell]);
        q = static_cast<std::size_t>(next);
    }
    const auto& fin = final_[q];
    if (!fin) {
        return std::nullopt;
    }
    out.insert(out.end(), fin->begin(), fin->end());
    return out;
}

std::optional<Tokenization> transduce(const SubsequentialTransducer& t, std::u32string_view w)
{
    auto ids = t.transduce_ids(w);
    if (!ids) {
        return std::nullopt;
    }
    Tokenization out;
    out.reserve(ids->size());
    for (TokenId id : *ids) {
        out.push_back(t.token(id));
    }
    return out;
}

namespace {

std::string describe(const FunctionalityVerdict& v)
{
    if (v.witness) {
        return "transducer is not functional: input '" + Token(v.witness->input.empty() ? Text(U"?") : v.witness->input).utf8()
            + "' has outputs " + to_string(v.witness->first) + " and " + to_string(v.witness->second);
    }
    return "functionality of the transducer could not be established";
}

} // namespace

NotFunctional::NotFunctional(FunctionalityVerdict verdict) : Error(describe(verdict)), verdict_(std::move(verdict)) {}

SubsequentialTransducer determinize(const Transducer& t, const DeterminizeOptions& options)
{
    if (options.check_functionality) {
        FunctionalityVerdict v = check_functional(t);
        if (v.verdict != Functionality::functional) {
            throw NotFunctional(std::move(v));
        }
    }
    std::size_t cap = 0;
    if (options.max_pending) {
        cap = *options.max_pending;
    } else {
        std::size_t multi = 0;
        std::size_t longest = 0;
        for (const Token& tok : t.output_alphabet()) {
            multi += tok.size() > 1 ? 1 : 0;
            longest = std::max(longest, tok.size());
        }
        cap = 2 * multi * longest + longest + 8;
    }

    const std::vector<char> useful = useful_states(t);
    const Alphabet inputs = t.input_alphabet();
    SubsequentialTransducer out(inputs, t.output_alphabet());

    using Member = std::pair<StateId, Output>;
    using Subset = std::vector<Member>;
    std::map<Subset, StateId> ids;
    std::vector<Subset> subsets;

    auto intern = [&](Subset s) {
        auto [it, fresh] = ids.emplace(s, static_cast<StateId>(subsets.size()));
        if (fresh) {
            subsets.push_back(std::move(s));
            out.add_state();
        }
        return it->second;
    };

    if (!useful[t.initial()]) {
        // Empty relation: a single state without final output.
        out.add_state();
        return out;
    }
    intern(Subset{{t.initial(), {}}});

    for (std::size_t i = 0; i < subsets.size(); ++i) {
        const Subset current = subsets[i];
        const auto id = static_cast<StateId>(i);

        std::optional<Output> final_out;
        for (const auto& [q, pending] : current) {
            if (const auto& f = t.final_output(q)) {
                Output full = pending;
                full.insert(full.end(), f->begin(), f->end());
                if (final_out && *final_out != full) {
                    throw InvariantViolation("determinize: accepting members disagree on the final output");
                }
                final_out = std::move(full);
            }
        }
        if (final_out) {
            out.set_final_output(id, std::move(*final_out));
        }

        for (Symbol s : inputs) {
            std::map<StateId, Output> candidates;
            for (const auto& [q, pending] : current) {
                for (const auto& arc : t.arcs_from(q)) {
                    if (arc.input != s || !useful[arc.to]) {
                        continue;
                    }
                    Output o = pending;
                    if (arc.output) {
                        o.push_back(*arc.output);
                    }
                    auto [it, fresh] = candidates.emplace(arc.to, o);
                    if (!fresh && it->second != o) {
                        throw InvariantViolation("determinize: one state reached with two pending outputs");
                    }
                }
            }
            if (candidates.empty()) {
                continue;
            }
            // Longest common prefix at token granularity.
            const Output& first = candidates.begin()->second;
            std::size_t lcp = first.size();
            for (const auto& [q, o] : candidates) {
                std::size_t k = 0;
                while (k < lcp && k < o.size() && o[k] == first[k]) {
                    ++k;
                }
                lcp = k;
            }
            Output emitted(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(lcp));
            Subset next;
            for (auto& [q, o] : candidates) {
                Output rest(o.begin() + static_cast<std::ptrdiff_t>(lcp), o.end());
                if (rest.size() > cap) {
                    std::string members;
                    for (const auto& [state, unused] : candidates) {
                        members += " " + std::to_string(state);
                    }
                    throw LimitExceeded("determinize: pending output longer than " + std::to_string(cap)
                                        + " tokens in subset {" + members
                                        + " } (the function does not have bounded variation?)");
                }
                next.emplace_back(q, std::move(rest));
            }
            const StateId target = intern(std::move(next));
            out.set_transition(id, s, target, emitted);
        }
    }
    return out;
}

} // namespace tokautoma
