#include "tokautoma/regex.hh"

#include <map>
#include <queue>
#include <set>

#include "tokautoma/utf8.hh"

namespace tokautoma {

namespace {

using NodePtr = std::shared_ptr<const RegexNode>;

NodePtr make(RegexNode::Kind kind, std::vector<NodePtr> children = {}, Alphabet symbols = {})
{
    auto n = std::make_shared<RegexNode>();
    n->kind = kind;
    n->children = std::move(children);
    n->symbols = std::move(symbols);
    return n;
}

class Parser {
public:
    Parser(std::u32string text, const Alphabet& sigma) : text_(std::move(text)), sigma_(sigma) {}

    NodePtr parse()
    {
        NodePtr n = alternation();
        if (pos_ != text_.size()) {
            fail(text_[pos_] == U')' ? "unbalanced ')'" : "unexpected character");
        }
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError("regex: " + what + " at position " + std::to_string(pos_), 0, pos_);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    Symbol peek() const { return text_[pos_]; }

    NodePtr alternation()
    {
        std::vector<NodePtr> alts{concatenation()};
        while (!at_end() && peek() == U'|') {
            ++pos_;
            alts.push_back(concatenation());
        }
        return alts.size() == 1 ? alts.front() : make(RegexNode::Kind::alternation, std::move(alts));
    }

    NodePtr concatenation()
    {
        std::vector<NodePtr> parts;
        while (!at_end() && peek() != U'|' && peek() != U')') {
            parts.push_back(repetition());
        }
        if (parts.empty()) {
            return make(RegexNode::Kind::epsilon);
        }
        return parts.size() == 1 ? parts.front() : make(RegexNode::Kind::concat, std::move(parts));
    }

    NodePtr repetition()
    {
        NodePtr n = atom();
        while (!at_end()) {
            const Symbol c = peek();
            if (c == U'*') {
                n = make(RegexNode::Kind::star, {n});
            } else if (c == U'+') {
                n = make(RegexNode::Kind::plus, {n});
            } else if (c == U'?') {
                n = make(RegexNode::Kind::optional, {n});
            } else {
                break;
            }
            ++pos_;
        }
        return n;
    }

    Symbol escaped()
    {
        // pos_ points just past the backslash
        if (at_end()) {
            fail("dangling escape");
        }
        const Symbol c = text_[pos_++];
        switch (c) {
        case U's': return U' ';
        case U'n': return U'\n';
        case U't': return U'\t';
        default: return c;
        }
    }

    Symbol literal_in_sigma(Symbol s, std::size_t at)
    {
        if (!sigma_.contains(s)) {
            throw ParseError("regex: literal '" + utf8::encode(s) + "' at position " + std::to_string(at)
                                 + " is not in the base alphabet",
                             0, at);
        }
        return s;
    }

    NodePtr atom()
    {
        const std::size_t start = pos_;
        const Symbol c = text_[pos_++];
        switch (c) {
        case U'(': {
            NodePtr inner = alternation();
            if (at_end() || peek() != U')') {
                fail("missing ')'");
            }
            ++pos_;
            return inner;
        }
        case U'[': return char_class();
        case U'.': return make(RegexNode::Kind::symbols, {}, sigma_);
        case U'*':
        case U'+':
        case U'?': --pos_; fail("repetition operator without operand");
        case U']': --pos_; fail("unbalanced ']'");
        case U'\\': {
            const Symbol s = escaped();
            return make(RegexNode::Kind::symbols, {}, {literal_in_sigma(s, start)});
        }
        default: return make(RegexNode::Kind::symbols, {}, {literal_in_sigma(c, start)});
        }
    }

    NodePtr char_class()
    {
        bool negated = false;
        if (!at_end() && peek() == U'^') {
            negated = true;
            ++pos_;
        }
        Alphabet members;
        bool first = true;
        for (;;) {
            if (at_end()) {
                fail("missing ']'");
            }
            if (peek() == U']' && !first) {
                ++pos_;
                break;
            }
            first = false;
            const std::size_t at = pos_;
            Symbol lo = text_[pos_++];
            if (lo == U'\\') {
                lo = escaped();
            }
            Symbol hi = lo;
            if (pos_ + 1 < text_.size() && peek() == U'-' && text_[pos_ + 1] != U']') {
                ++pos_;
                hi = text_[pos_++];
                if (hi == U'\\') {
                    hi = escaped();
                }
                if (hi < lo) {
                    pos_ = at;
                    fail("reversed range in character class");
                }
            }
            for (Symbol s : sigma_) {
                if (s >= lo && s <= hi) {
                    members.insert(s);
                }
            }
            if (!negated && lo == hi) {
                literal_in_sigma(lo, at);
            }
        }
        if (negated) {
            Alphabet complement;
            for (Symbol s : sigma_) {
                if (!members.contains(s)) {
                    complement.insert(s);
                }
            }
            members = std::move(complement);
        }
        return make(RegexNode::Kind::symbols, {}, std::move(members));
    }

    std::u32string text_;
    const Alphabet& sigma_;
    std::size_t pos_ = 0;
};

/// Epsilon-NFA with a single start and a single accept state per fragment.
struct Nfa {
    std::vector<std::vector<StateId>> eps;
    std::vector<std::vector<std::pair<Symbol, StateId>>> edges;

    StateId add()
    {
        eps.emplace_back();
        edges.emplace_back();
        return static_cast<StateId>(eps.size() - 1);
    }
};

struct Fragment {
    StateId start;
    StateId accept;
};

Fragment build(Nfa& nfa, const RegexNode& n)
{
    using K = RegexNode::Kind;
    switch (n.kind) {
    case K::epsilon: {
        const StateId s = nfa.add();
        const StateId f = nfa.add();
        nfa.eps[s].push_back(f);
        return {s, f};
    }
    case K::symbols: {
        const StateId s = nfa.add();
        const StateId f = nfa.add();
        for (Symbol sym : n.symbols) {
            nfa.edges[s].emplace_back(sym, f);
        }
        return {s, f};
    }
    case K::concat: {
        Fragment acc = build(nfa, *n.children.front());
        for (std::size_t i = 1; i < n.children.size(); ++i) {
            Fragment next = build(nfa, *n.children[i]);
            nfa.eps[acc.accept].push_back(next.start);
            acc.accept = next.accept;
        }
        return acc;
    }
    case K::alternation: {
        const StateId s = nfa.add();
        const StateId f = nfa.add();
        for (const auto& c : n.children) {
            Fragment alt = build(nfa, *c);
            nfa.eps[s].push_back(alt.start);
            nfa.eps[alt.accept].push_back(f);
        }
        return {s, f};
    }
    case K::star:
    case K::plus:
    case K::optional: {
        Fragment inner = build(nfa, *n.children.front());
        const StateId s = nfa.add();
        const StateId f = nfa.add();
        nfa.eps[s].push_back(inner.start);
        nfa.eps[inner.accept].push_back(f);
        if (n.kind != K::plus) {
            nfa.eps[s].push_back(f);
        }
        if (n.kind != K::optional) {
            nfa.eps[inner.accept].push_back(inner.start);
        }
        return {s, f};
    }
    }
    throw InvariantViolation("regex: unknown node kind");
}

void close(const Nfa& nfa, std::set<StateId>& states)
{
    std::vector<StateId> stack(states.begin(), states.end());
    while (!stack.empty()) {
        StateId q = stack.back();
        stack.pop_back();
        for (StateId r : nfa.eps[q]) {
            if (states.insert(r).second) {
                stack.push_back(r);
            }
        }
    }
}

StringDfa determinize(const Nfa& nfa, StateId start, StateId accept, const Alphabet& sigma)
{
    std::set<StateId> init{start};
    close(nfa, init);
    std::map<std::set<StateId>, StateId> ids{{init, 0}};
    std::vector<std::set<StateId>> subsets{init};
    StringDfa dfa(1, 0);
    dfa.set_final(0, init.contains(accept));
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        for (Symbol s : sigma) {
            std::set<StateId> next;
            for (StateId q : subsets[i]) {
                for (auto [sym, to] : nfa.edges[q]) {
                    if (sym == s) {
                        next.insert(to);
                    }
                }
            }
            if (next.empty()) {
                continue;
            }
            close(nfa, next);
            auto [it, fresh] = ids.emplace(next, static_cast<StateId>(subsets.size()));
            if (fresh) {
                subsets.push_back(next);
                dfa.add_state(next.contains(accept));
            }
            dfa.set_transition(static_cast<StateId>(i), s, it->second);
        }
    }
    return minimize(dfa);
}

} // namespace

Regex Regex::parse(std::string_view pattern, const Alphabet& sigma)
{
    Parser p(utf8::decode(pattern), sigma);
    return Regex(p.parse(), sigma);
}

StringDfa regex_to_dfa(const Regex& r, const Alphabet& sigma)
{
    Nfa nfa;
    Fragment f = build(nfa, r.root());
    return determinize(nfa, f.start, f.accept, sigma);
}

StringDfa substring_dfa(const Regex& r, const Alphabet& sigma)
{
    Nfa nfa;
    const StateId head = nfa.add();
    for (Symbol s : sigma) {
        nfa.edges[head].emplace_back(s, head);
    }
    Fragment body = build(nfa, r.root());
    const StateId tail = nfa.add();
    for (Symbol s : sigma) {
        nfa.edges[tail].emplace_back(s, tail);
    }
    nfa.eps[head].push_back(body.start);
    nfa.eps[body.accept].push_back(tail);
    return determinize(nfa, head, tail, sigma);
}

} // namespace tokautoma
