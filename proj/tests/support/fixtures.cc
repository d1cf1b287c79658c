#include "fixtures.hh"

#include <string>

namespace fixtures {

namespace {

Token tok(std::string_view s) { return Token::from_utf8(s); }

} // namespace

TokenDfa fig1()
{
    TokenDfa a(5, 0);
    a.set_transition(0, tok("a"), 1);
    a.set_transition(1, tok("b"), 2);
    a.set_transition(2, tok("c"), 3);
    a.set_transition(1, tok("bc"), 4);
    a.set_final(3);
    a.set_final(4);
    return a;
}

TokenDfa fig2_a0()
{
    TokenDfa a(1, 0);
    a.set_transition(0, tok("a"), 0);
    a.set_transition(0, tok("b"), 0);
    a.set_final(0);
    return a;
}

TokenDfa fig2_a1()
{
    TokenDfa a(2, 0);
    a.set_transition(0, tok("aa"), 0);
    a.set_transition(0, tok("b"), 0);
    a.set_transition(0, tok("a"), 1);
    a.set_transition(1, tok("b"), 0);
    a.set_final(0);
    a.set_final(1);
    return a;
}

TokenDfa fig2_a2()
{
    TokenDfa a(3, 0);
    a.set_transition(0, tok("aa"), 0);
    a.set_transition(0, tok("a"), 1);
    a.set_transition(0, tok("ba"), 1);
    a.set_transition(0, tok("b"), 2);
    a.set_transition(1, tok("ba"), 1);
    a.set_transition(1, tok("b"), 2);
    a.set_transition(2, tok("b"), 2);
    a.set_transition(2, tok("ba"), 1);
    a.set_transition(2, tok("aa"), 0);
    for (StateId q = 0; q < 3; ++q) {
        a.set_final(q);
    }
    return a;
}

Dictionary fig2_dictionary() { return Dictionary::from_utf8({{"a", "a"}, {"b", "a"}}); }

TokenDfa fig3()
{
    TokenDfa a(2, 0);
    a.set_transition(0, tok("a"), 0);
    a.set_transition(0, tok("aa"), 1);
    a.set_final(1);
    return a;
}

Dictionary fig4_dictionary() { return Dictionary::from_utf8({{"ab", "a"}, {"a", "b"}}); }

Dictionary fig5_dictionary(std::size_t k)
{
    std::vector<std::pair<Token, Token>> rules;
    std::size_t len = 1;
    for (std::size_t i = 0; i < k; ++i) {
        const Token half(Text(len, U'a'));
        rules.emplace_back(half, half);
        len *= 2;
    }
    return Dictionary(std::move(rules));
}

SubsequentialTransducer fig6b()
{
    SubsequentialTransducer t({U'a', U'b'}, {tok("a"), tok("b"), tok("aa")});
    const TokenId a = 0;
    const TokenId b = 1;
    const TokenId aa = 2;
    t.add_state();
    t.add_state();
    t.set_transition(0, U'a', 1, {});
    t.set_transition(0, U'b', 0, std::vector<TokenId>{b});
    t.set_transition(1, U'a', 0, std::vector<TokenId>{aa});
    t.set_transition(1, U'b', 0, std::vector<TokenId>{a, b});
    t.set_final_output(0, {});
    t.set_final_output(1, {a});
    return t;
}

Dictionary example1_dictionary()
{
    return Dictionary::from_utf8({{"a", "a"}, {"a", "b"}, {"b", "c"}, {"ab", "c"}, {"bc", "ab"}});
}

} // namespace fixtures
