#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "json_rows.hh"
#include "tokautoma/token_dfa.hh"

namespace tokautoma {

using nlohmann::json;

std::string serialize_token_dfa(const TokenDfa& a, int indent)
{
    const auto& alphabet = a.alphabet();
    std::vector<TokenId> order(alphabet.size());
    std::iota(order.begin(), order.end(), TokenId{0});
    std::vector<std::string> texts;
    for (const Token& t : alphabet) {
        texts.push_back(t.utf8());
    }
    std::sort(order.begin(), order.end(), [&](TokenId x, TokenId y) { return texts[x] < texts[y]; });
    std::vector<std::size_t> rank(alphabet.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[order[i]] = i;
    }

    json doc;
    doc["alphabet"] = json::array();
    for (TokenId id : order) {
        doc["alphabet"].push_back(texts[id]);
    }
    doc["states"] = a.num_states();
    doc["initial"] = a.initial();
    doc["finals"] = json::array();
    std::vector<std::array<std::size_t, 3>> transitions;
    json fresh = json::array();
    for (StateId q = 0; q < a.num_states(); ++q) {
        if (a.is_final(q)) {
            doc["finals"].push_back(q);
        }
        for (auto [t, to] : a.transitions_from(q)) {
            transitions.push_back({q, rank[t], to});
        }
        if (const auto& o = a.origin(q)) {
            fresh.push_back({q, o->source, o->rule});
        }
    }
    std::sort(transitions.begin(), transitions.end());
    doc["transitions"] = transitions;
    doc["metadata"] = json::object();
    if (!fresh.empty()) {
        doc["metadata"]["fresh_states"] = fresh;
    }
    return detail::dump_rows(doc, indent) + "\n";
}

namespace {

[[noreturn]] void malformed(const std::string& what) { throw ParseError("automaton file: " + what, 0); }

std::size_t index_field(const json& v, std::size_t bound, const char* what)
{
    if (!v.is_number_unsigned() || v.get<std::size_t>() >= bound) {
        malformed(std::string("bad ") + what + " index");
    }
    return v.get<std::size_t>();
}

} // namespace

TokenDfa parse_token_dfa(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("automaton file: ") + e.what(), 0, e.byte);
    }
    for (const char* field : {"alphabet", "states", "initial", "finals", "transitions"}) {
        if (!doc.contains(field)) {
            malformed(std::string("missing field '") + field + "'");
        }
    }
    if (!doc["states"].is_number_unsigned() || doc["states"].get<std::size_t>() == 0) {
        malformed("'states' must be a positive integer");
    }
    const auto n = doc["states"].get<std::size_t>();
    TokenDfa a(n, static_cast<StateId>(index_field(doc["initial"], n, "initial state")));
    if (!doc["alphabet"].is_array()) {
        malformed("'alphabet' must be an array");
    }
    for (const json& t : doc["alphabet"]) {
        if (!t.is_string() || t.get<std::string>().empty()) {
            malformed("alphabet entries must be nonempty strings");
        }
        const Token token = Token::from_utf8(t.get<std::string>());
        if (a.find_token(token)) {
            malformed("duplicate alphabet entry '" + token.utf8() + "'");
        }
        a.add_token(token);
    }
    for (const json& f : doc["finals"]) {
        a.set_final(static_cast<StateId>(index_field(f, n, "final state")));
    }
    for (const json& tr : doc["transitions"]) {
        if (!tr.is_array() || tr.size() != 3) {
            malformed("transitions must be [from, token, to] triples");
        }
        const auto from = static_cast<StateId>(index_field(tr[0], n, "source state"));
        const auto tok = static_cast<TokenId>(index_field(tr[1], a.alphabet().size(), "token"));
        const auto to = static_cast<StateId>(index_field(tr[2], n, "target state"));
        if (auto existing = a.target(from, tok); existing && *existing != to) {
            malformed("nondeterministic transitions from state " + std::to_string(from));
        }
        a.set_transition(from, tok, to);
    }
    if (doc.contains("metadata") && doc["metadata"].contains("fresh_states")) {
        for (const json& f : doc["metadata"]["fresh_states"]) {
            if (f.is_array() && f.size() == 3) {
                a.set_origin(static_cast<StateId>(index_field(f[0], n, "fresh state")),
                             FreshOrigin{f[1].get<StateId>(), f[2].get<std::size_t>()});
            }
        }
    }
    return a;
}

} // namespace tokautoma
