#include <algorithm>
#include <set>

#include <json.hpp>

#include "json_rows.hh"
#include "tokautoma/transducer.hh"
#include "tokautoma/utf8.hh"

namespace tokautoma {

using nlohmann::json;

namespace {

json token_list(std::span<const TokenId> ids)
{
    json out = json::array();
    for (TokenId id : ids) {
        out.push_back(id);
    }
    return out;
}

json header(const Alphabet& inputs, const std::vector<Token>& outputs, std::size_t states, StateId initial)
{
    json doc;
    doc["input_alphabet"] = json::array();
    for (Symbol s : inputs) {
        doc["input_alphabet"].push_back(utf8::encode(s));
    }
    doc["output_alphabet"] = json::array();
    for (const Token& t : outputs) {
        doc["output_alphabet"].push_back(t.utf8());
    }
    doc["states"] = states;
    doc["initial"] = initial;
    return doc;
}

} // namespace

std::string serialize_transducer(const Transducer& t, int indent)
{
    json doc = header(t.input_alphabet(), t.output_alphabet(), t.num_states(), t.initial());
    doc["transitions"] = json::array();
    doc["final_outputs"] = json::object();
    for (StateId q = 0; q < t.num_states(); ++q) {
        for (const auto& arc : t.arcs_from(q)) {
            json out = json::array();
            if (arc.output) {
                out.push_back(*arc.output);
            }
            doc["transitions"].push_back({q, utf8::encode(arc.input), out, arc.to});
        }
        if (const auto& f = t.final_output(q)) {
            doc["final_outputs"][std::to_string(q)] = token_list(*f);
        }
    }
    return detail::dump_rows(doc, indent) + "\n";
}

std::string serialize_transducer(const SubsequentialTransducer& t, int indent)
{
    json doc = header(t.input_alphabet(), t.output_alphabet(), t.num_states(), t.initial());
    doc["transitions"] = json::array();
    doc["final_outputs"] = json::object();
    for (StateId q = 0; q < t.num_states(); ++q) {
        for (Symbol s : t.input_alphabet()) {
            if (auto step = t.step(q, s)) {
                doc["transitions"].push_back(
                    {q, utf8::encode(s), token_list(step->output), step->to});
            }
        }
        if (const auto& f = t.final_output(q)) {
            doc["final_outputs"][std::to_string(q)] = token_list(*f);
        }
    }
    return detail::dump_rows(doc, indent) + "\n";
}

namespace {

[[noreturn]] void malformed(const std::string& what) { throw ParseError("transducer file: " + what, 0); }

StateId state_field(const json& v, std::size_t bound)
{
    if (!v.is_number_unsigned() || v.get<std::size_t>() >= bound) {
        malformed("bad state index");
    }
    return v.get<StateId>();
}

Symbol symbol_field(const json& v)
{
    if (!v.is_string()) {
        malformed("symbols must be strings");
    }
    const Text text = utf8::decode(v.get<std::string>());
    if (text.size() != 1) {
        malformed("symbol '" + v.get<std::string>() + "' is not a single character");
    }
    return text.front();
}

std::vector<TokenId> output_field(const json& v, std::size_t alphabet_size)
{
    if (!v.is_array()) {
        malformed("outputs must be arrays of token indices");
    }
    std::vector<TokenId> out;
    for (const json& t : v) {
        if (!t.is_number_unsigned() || t.get<std::size_t>() >= alphabet_size) {
            malformed("output token index " + t.dump() + " is out of range");
        }
        out.push_back(t.get<TokenId>());
    }
    return out;
}

} // namespace

SubsequentialTransducer parse_subsequential_transducer(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("transducer file: ") + e.what(), 0, e.byte);
    }
    for (const char* field : {"input_alphabet", "output_alphabet", "states", "initial", "transitions", "final_outputs"}) {
        if (!doc.contains(field)) {
            malformed(std::string("missing field '") + field + "'");
        }
    }
    if (!doc["states"].is_number_unsigned() || doc["states"].get<std::size_t>() == 0) {
        malformed("'states' must be a positive integer");
    }
    const auto n = doc["states"].get<std::size_t>();
    Alphabet inputs;
    for (const json& s : doc["input_alphabet"]) {
        inputs.insert(symbol_field(s));
    }
    std::vector<Token> outputs;
    std::set<std::string> seen;
    for (const json& t : doc["output_alphabet"]) {
        if (!t.is_string() || t.get<std::string>().empty()) {
            malformed("output tokens must be nonempty strings");
        }
        if (!seen.insert(t.get<std::string>()).second) {
            malformed("duplicate output token '" + t.get<std::string>() + "'");
        }
        outputs.push_back(Token::from_utf8(t.get<std::string>()));
    }
    SubsequentialTransducer t(inputs, outputs);
    for (std::size_t i = 0; i < n; ++i) {
        t.add_state();
    }
    t.set_initial(state_field(doc["initial"], n));
    for (const json& tr : doc["transitions"]) {
        if (!tr.is_array() || tr.size() != 4) {
            malformed("transitions must be [from, symbol, outputs, to]");
        }
        const StateId from = state_field(tr[0], n);
        const Symbol s = symbol_field(tr[1]);
        if (!inputs.contains(s)) {
            malformed("transition symbol outside the input alphabet");
        }
        if (t.step(from, s)) {
            malformed("two transitions on one symbol from state " + std::to_string(from));
        }
        const auto out = output_field(tr[2], outputs.size());
        t.set_transition(from, s, state_field(tr[3], n), out);
    }
    if (!doc["final_outputs"].is_object()) {
        malformed("'final_outputs' must be an object");
    }
    for (const auto& [key, value] : doc["final_outputs"].items()) {
        StateId q = 0;
        try {
            std::size_t used = 0;
            q = static_cast<StateId>(std::stoul(key, &used));
            if (used != key.size() || q >= n) {
                malformed("bad final state '" + key + "'");
            }
        } catch (const std::logic_error&) {
            malformed("bad final state '" + key + "'");
        }
        t.set_final_output(q, output_field(value, outputs.size()));
    }
    return t;
}

} // namespace tokautoma
