#include <catch_amalgamated.hpp>

#include <random>

#include "fixtures.hh"
#include "oracles.hh"
#include "tokautoma/bpe.hh"
#include "tokautoma/construction.hh"
#include "tokautoma/transducer.hh"
#include "tokautoma/utf8.hh"

using namespace tokautoma;

namespace {

Token tok(std::string_view s) { return Token::from_utf8(s); }
Tokenization toks(std::initializer_list<std::string_view> t) { return make_tokenization(t); }
Text txt(std::string_view s) { return utf8::decode(s); }

Tokenization texts(const std::vector<Token>& alphabet, std::span<const TokenId> ids)
{
    Tokenization out;
    for (TokenId id : ids) {
        out.push_back(alphabet.at(id));
    }
    return out;
}

// Reachable parts equal up to state renaming, outputs compared as token texts.
bool same_machine(const SubsequentialTransducer& x, const SubsequentialTransducer& y)
{
    if (x.input_alphabet() != y.input_alphabet()) {
        return false;
    }
    std::map<StateId, StateId> fwd;
    std::map<StateId, StateId> bwd;
    std::vector<std::pair<StateId, StateId>> stack{{x.initial(), y.initial()}};
    fwd[x.initial()] = y.initial();
    bwd[y.initial()] = x.initial();
    while (!stack.empty()) {
        auto [p, q] = stack.back();
        stack.pop_back();
        const auto& fp = x.final_output(p);
        const auto& fq = y.final_output(q);
        if (fp.has_value() != fq.has_value()
            || (fp && texts(x.output_alphabet(), *fp) != texts(y.output_alphabet(), *fq))) {
            return false;
        }
        for (Symbol s : x.input_alphabet()) {
            auto sp = x.step(p, s);
            auto sq = y.step(q, s);
            if (sp.has_value() != sq.has_value()) {
                return false;
            }
            if (!sp) {
                continue;
            }
            if (texts(x.output_alphabet(), sp->output) != texts(y.output_alphabet(), sq->output)) {
                return false;
            }
            auto f = fwd.find(sp->to);
            auto b = bwd.find(sq->to);
            if (f == fwd.end() && b == bwd.end()) {
                fwd[sp->to] = sq->to;
                bwd[sq->to] = sp->to;
                stack.emplace_back(sp->to, sq->to);
            } else if (f == fwd.end() || b == bwd.end() || f->second != sq->to || b->second != sp->to) {
                return false;
            }
        }
    }
    return true;
}

using ArcSet = std::set<std::tuple<StateId, Symbol, std::string, StateId>>;

ArcSet arcs_of(const Transducer& t)
{
    ArcSet out;
    for (StateId q = 0; q < t.num_states(); ++q) {
        for (const auto& arc : t.arcs_from(q)) {
            out.emplace(q, arc.input, arc.output ? t.token(*arc.output).utf8() : "", arc.to);
        }
    }
    return out;
}

SubsequentialTransducer tokenizer_for(const Dictionary& d)
{
    return determinize(build_transducer(build_token_dfa(universal, d)));
}

} // namespace

TEST_CASE("build_transducer spells tokens symbol by symbol")
{
    const Transducer t = build_transducer(fixtures::fig2_a1());
    REQUIRE(t.num_states() == 3);
    const ArcSet want{
        {0, U'a', "", 2},
        {2, U'a', "aa", 0},
        {0, U'b', "b", 0},
        {0, U'a', "a", 1},
        {1, U'b', "b", 0},
    };
    CHECK(arcs_of(t) == want);
    CHECK(t.final_output(0) == std::vector<TokenId>{});
    CHECK(t.final_output(1) == std::vector<TokenId>{});
    CHECK_FALSE(t.final_output(2));
    CHECK(t.input_alphabet() == Alphabet{U'a', U'b'});

    const Transducer flat = build_transducer(universal_token_dfa({U'x', U'y'}));
    CHECK(flat.num_states() == 1);
    CHECK(flat.num_transitions() == 2);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const Dictionary d = oracle::random_proper_dictionary(rng);
        const auto pairs = oracle::transducer_pairs(build_transducer(build_token_dfa(universal, d)), 6);
        std::set<std::pair<Text, Tokenization>> want_pairs;
        for (const Text& w : oracle::all_strings(d.sigma(), 6)) {
            want_pairs.emplace(w, oracle::hf(d, w));
        }
        REQUIRE(pairs == want_pairs);
    }
}

TEST_CASE("check_functional")
{
    CHECK(check_functional(build_transducer(fixtures::fig2_a2())).verdict == Functionality::functional);
    CHECK(check_functional(build_transducer(fixtures::fig2_a1())).verdict == Functionality::functional);

    const FunctionalityVerdict fig1 = check_functional(build_transducer(fixtures::fig1()));
    CHECK(fig1.verdict == Functionality::not_functional);
    REQUIRE(fig1.witness);
    CHECK(fig1.witness->input == txt("abc"));
    const std::set<Tokenization> outs{fig1.witness->first, fig1.witness->second};
    CHECK(outs == std::set<Tokenization>{toks({"a", "b", "c"}), toks({"a", "bc"})});

    TokenDfa dead(2, 0);
    dead.set_transition(0, tok("ab"), 1);
    CHECK(check_functional(build_transducer(dead)).verdict == Functionality::functional);

    SECTION("disagreeing final outputs")
    {
        Transducer t(2, 0);
        const TokenId a = t.add_output_token(tok("a"));
        const TokenId b = t.add_output_token(tok("b"));
        t.add_transition(0, U'a', a, 1);
        t.add_transition(0, U'a', b, 1);
        t.set_final_output(1, {});
        const auto v = check_functional(t);
        CHECK(v.verdict == Functionality::not_functional);
        REQUIRE(v.witness);
        CHECK(v.witness->input == txt("a"));
        CHECK(v.witness->first != v.witness->second);
    }
    SECTION("delayed outputs")
    {
        // a|x then b|y against a|eps then b|x: the outputs differ once b is read
        Transducer t(3, 0);
        const TokenId x = t.add_output_token(tok("x"));
        const TokenId y = t.add_output_token(tok("y"));
        t.add_transition(0, U'a', x, 1);
        t.add_transition(1, U'b', y, 1);
        t.add_transition(0, U'a', std::nullopt, 2);
        t.add_transition(2, U'b', x, 1);
        t.set_final_output(1, {});
        CHECK(check_functional(t).verdict == Functionality::not_functional);

        Transducer same(3, 0);
        const TokenId sx = same.add_output_token(tok("x"));
        same.add_transition(0, U'a', sx, 1);
        same.add_transition(0, U'a', std::nullopt, 2);
        same.add_transition(2, U'b', sx, 1);
        same.add_transition(1, U'b', std::nullopt, 1);
        same.set_final_output(1, {});
        CHECK(check_functional(same).verdict == Functionality::functional);
    }
}

TEST_CASE("determinize")
{
    const SubsequentialTransducer det = determinize(build_transducer(fixtures::fig2_a1()));
    CHECK(same_machine(det, fixtures::fig6b()));
    CHECK(det.num_states() == 2);
    REQUIRE(det.final_output(det.initial()));
    auto q1 = det.step(det.initial(), U'a');
    REQUIRE(q1);
    CHECK(q1->output.empty());
    REQUIRE(det.final_output(q1->to));
    CHECK(texts(det.output_alphabet(), *det.final_output(q1->to)) == toks({"a"}));

    SECTION("single-symbol tokens give an input-deterministic copy")
    {
        const SubsequentialTransducer flat = determinize(build_transducer(universal_token_dfa({U'a', U'b'})));
        CHECK(flat.num_states() == 1);
        CHECK(transduce(flat, U"abba") == toks({"a", "b", "b", "a"}));
    }
    SECTION("agrees with the oracle on the worked example")
    {
        const Dictionary d = fixtures::example1_dictionary();
        const SubsequentialTransducer t = tokenizer_for(d);
        for (const Text& w : oracle::all_strings(d.sigma(), 8)) {
            REQUIRE(transduce(t, w) == oracle::hf(d, w));
        }
    }
    SECTION("agrees with the oracle on random dictionaries")
    {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 30; ++i) {
            const Dictionary d = oracle::random_proper_dictionary(rng);
            const SubsequentialTransducer t = tokenizer_for(d);
            for (StateId q = 0; q < t.num_states(); ++q) {
                for (Symbol s : t.input_alphabet()) {
                    auto st = t.step(q, s);
                    CHECK((!st || st->to < t.num_states()));
                }
            }
            for (const Text& w : oracle::all_strings(d.sigma(), 7)) {
                const auto got = transduce(t, w);
                REQUIRE(got == oracle::hf(d, w));
                REQUIRE(oracle::run_subsequential(t, w) == got);
                REQUIRE(project(*got) == w);
            }
        }
    }
    SECTION("restricted languages keep partial outputs")
    {
        StringDfa ab(3, 0);
        ab.set_transition(0, U'a', 1);
        ab.set_transition(1, U'b', 2);
        ab.set_transition(2, U'a', 1);
        ab.set_final(2);
        const Dictionary d = Dictionary::from_utf8({{"a", "b"}, {"ab", "ab"}});
        const SubsequentialTransducer t = determinize(build_transducer(build_token_dfa(ab, d)));
        CHECK(transduce(t, U"ababab") == toks({"abab", "ab"}));
        CHECK_FALSE(transduce(t, U"aba"));
        CHECK_FALSE(transduce(t, U"bb"));
    }
    SECTION("errors")
    {
        CHECK_THROWS_AS(determinize(build_transducer(fixtures::fig1())), NotFunctional);
        DeterminizeOptions tiny;
        tiny.max_pending = 0;
        CHECK_THROWS_AS(determinize(build_transducer(fixtures::fig2_a1()), tiny), LimitExceeded);
        try {
            determinize(build_transducer(fixtures::fig1()));
        } catch (const NotFunctional& e) {
            CHECK(e.verdict().verdict == Functionality::not_functional);
            CHECK(e.verdict().witness.has_value());
        }
    }
}

TEST_CASE("transduce")
{
    const SubsequentialTransducer t = fixtures::fig6b();
    CHECK(transduce(t, U"aaa") == toks({"aa", "a"}));
    CHECK(transduce(t, U"ab") == toks({"a", "b"}));
    CHECK(transduce(t, U"") == Tokenization{});
    CHECK(transduce(t, U"baab") == toks({"b", "aa", "b"}));
    CHECK_THROWS_AS(transduce(t, U"abc"), AlphabetError);
    try {
        transduce(t, U"abca");
    } catch (const AlphabetError& e) {
        CHECK(e.position() == 2);
    }

    SubsequentialTransducer partial({U'a'}, {tok("a")});
    partial.add_state();
    partial.add_state();
    partial.set_transition(0, U'a', 1, std::vector<TokenId>{0});
    partial.set_final_output(1, {});
    CHECK(transduce(partial, U"a") == toks({"a"}));
    CHECK_FALSE(transduce(partial, U""));
    CHECK_FALSE(transduce(partial, U"aa"));
    CHECK_THROWS_AS(partial.set_transition(0, U'a', 0, {}), Error);
}

TEST_CASE("prefixes of tokenizations")
{
    const Dictionary d = Dictionary::from_utf8({{"a", "b"}, {"ab", "a"}});
    const SubsequentialTransducer t = tokenizer_for(d);
    const Text u = txt("ababa");
    const Text v = txt("ababb");
    const Tokenization tu = *transduce(t, u);
    const Tokenization tv = *transduce(t, v);
    CHECK(tu == toks({"ab", "aba"}));
    CHECK(tv == toks({"ab", "ab", "b"}));
    CHECK(*transduce(t, txt("abab")) == toks({"ab", "ab"}));
    CHECK(oracle::prefix_distance(tu, tv) == 3);
    CHECK(tu.front() == tv.front());
    CHECK(tu[1] != tv[1]);
}

TEST_CASE("transducer files")
{
    const SubsequentialTransducer det = tokenizer_for(fixtures::example1_dictionary());
    const std::string text = serialize_transducer(det);
    const SubsequentialTransducer back = parse_subsequential_transducer(text);
    CHECK(serialize_transducer(back) == text);
    CHECK(same_machine(det, back));

    const std::string fig6 = serialize_transducer(fixtures::fig6b());
    CHECK(fig6.find("\"final_outputs\": {\"0\":[],\"1\":[0]}") != std::string::npos);
    CHECK(fig6.find("[1,\"b\",[0,1],0]") != std::string::npos);
    CHECK(same_machine(parse_subsequential_transducer(fig6), fixtures::fig6b()));

    CHECK_FALSE(serialize_transducer(build_transducer(fixtures::fig2_a1())).empty());

    auto with = [&](std::string_view from, std::string_view to) {
        std::string s = fig6;
        const auto at = s.find(from);
        REQUIRE(at != std::string::npos);
        s.replace(at, from.size(), to);
        return s;
    };
    CHECK_THROWS_AS(parse_subsequential_transducer("{"), ParseError);
    CHECK_THROWS_AS(parse_subsequential_transducer("[]"), ParseError);
    CHECK_THROWS_AS(parse_subsequential_transducer(with("[1,\"a\",[2],0]", "[1,\"b\",[2],0]")), ParseError);
    CHECK_THROWS_AS(parse_subsequential_transducer(with("[1,\"a\",[2],0]", "[1,\"a\",[7],0]")), ParseError);
    CHECK_THROWS_AS(parse_subsequential_transducer(with("[1,\"a\",[2],0]", "[1,\"ab\",[2],0]")), ParseError);
    CHECK_THROWS_AS(parse_subsequential_transducer(with("[1,\"a\",[2],0]", "[1,\"a\",[2],5]")), ParseError);
    CHECK_THROWS_AS(parse_subsequential_transducer(with("\"1\":[0]", "\"x\":[0]")), ParseError);
    CHECK_THROWS_AS(parse_subsequential_transducer(with("\"states\": 2", "\"states\": 0")), ParseError);
    CHECK_THROWS_AS(parse_subsequential_transducer(with("[\"a\",\"b\",\"aa\"]", "[\"a\",\"a\",\"aa\"]")), ParseError);
}
