#include "commands.hh"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <new>
#include <sstream>

#include <json.hpp>

#include "token_stream.hh"
#include "tokautoma/bpe.hh"
#include "tokautoma/construction.hh"
#include "tokautoma/regex.hh"
#include "tokautoma/transducer.hh"
#include "tokautoma/utf8.hh"

namespace tokautoma::cli {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content)) {
        throw Error("cannot write '" + path + "'");
    }
}

Alphabet parse_sigma(const std::string& chars)
{
    if (chars.empty()) {
        return {};
    }
    const Text text = unescape_token(chars).text();
    return Alphabet(text.begin(), text.end());
}

Dictionary load_dictionary(const std::string& path, const Alphabet& extras)
{
    DictionaryParseOptions options;
    options.extra_symbols = extras;
    try {
        return parse_dictionary(read_file(path), options);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.line(), e.column());
    }
}

/// The token DFA of all tokenizations under `d`; a lone accepting state when Σ is empty.
TokenDfa dictionary_automaton(const Dictionary& d, const BuildOptions& options = {})
{
    if (d.sigma().empty()) {
        require_proper(d);
        TokenDfa a(1);
        a.set_final(0);
        return a;
    }
    return build_token_dfa(universal, d, options);
}

SubsequentialTransducer dictionary_transducer(const Dictionary& d)
{
    return determinize(build_transducer(trim(dictionary_automaton(d))));
}

std::string describe_witness(const ImproperRule& w)
{
    return "rule " + std::to_string(w.rule + 1) + " (" + std::string(w.side == RuleSide::left ? "left" : "right")
        + " side '" + escape_token(w.token) + "') is not produced by an earlier rule";
}

std::string escaped(std::u32string_view w)
{
    if (w.empty()) {
        return "";
    }
    return escape_token(Token(Text(w)));
}

int guarded(std::ostream& err, const std::function<int()>& body)
{
    try {
        return body();
    } catch (const ImproperDictionary& e) {
        err << "error: improper dictionary: " << describe_witness(e.witness()) << "\n";
        return exit_improper;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const AlphabetError& e) {
        err << "error: " << e.what() << "\n";
        return exit_data;
    } catch (const LocalityPreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return exit_data;
    } catch (const InvariantViolation& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_internal;
    } catch (const LimitExceeded& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_internal;
    } catch (const NotFunctional& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_internal;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::bad_alloc&) {
        err << "internal error: out of memory\n";
        return exit_internal;
    }
}

/// Decodes one input line and reports decoding errors with its line number.
Text decode_line(const std::string& line, std::size_t line_no)
{
    try {
        return utf8::decode(line);
    } catch (const ParseError& e) {
        throw AlphabetError("line " + std::to_string(line_no) + ", byte " + std::to_string(e.column() + 1)
                                + ": invalid UTF-8",
                            e.column());
    }
}

[[noreturn]] void alphabet_failure(std::size_t line_no, const AlphabetError& e)
{
    throw AlphabetError("line " + std::to_string(line_no) + ", column " + std::to_string(e.position() + 1) + ": "
                            + e.what(),
                        e.position());
}

/// Reads one record of either stream format and resolves its tokens.
class RecordReader {
public:
    RecordReader(bool ids, const std::optional<std::string>& vocab_path)
    {
        if (ids) {
            if (!vocab_path) {
                throw Error("--ids needs --vocab");
            }
            vocab_ = Vocab::parse(read_file(*vocab_path));
        }
    }

    Tokenization read(const std::string& line, std::size_t line_no) const
    {
        if (!vocab_) {
            return parse_token_record(line, line_no);
        }
        Tokenization out;
        for (std::uint32_t id : parse_id_record(line, line_no)) {
            if (id >= vocab_->size()) {
                throw AlphabetError("line " + std::to_string(line_no) + ": token id " + std::to_string(id)
                                        + " is not in the vocabulary",
                                    out.size());
            }
            out.push_back(vocab_->token(id));
        }
        return out;
    }

private:
    std::optional<Vocab> vocab_;
};

std::vector<TokenId> resolve(const TokenDfa& a, const Tokenization& tokens, std::size_t line_no)
{
    std::vector<TokenId> ids;
    ids.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto id = a.find_token(tokens[i]);
        if (!id) {
            throw AlphabetError("line " + std::to_string(line_no) + ": token " + std::to_string(i + 1) + " '"
                                    + escape_token(tokens[i]) + "' is not in the automaton's alphabet",
                                i);
        }
        ids.push_back(*id);
    }
    return ids;
}

json tokens_json(std::span<const Token> tokens)
{
    json out = json::array();
    for (const Token& t : tokens) {
        out.push_back(t.utf8());
    }
    return out;
}

} // namespace

int cmd_build(const BuildArgs& args, Streams io)
{
    return guarded(io.err, [&] {
        if (args.universal == args.lang.has_value()) {
            throw Error("build needs exactly one of --universal and --lang");
        }
        if (args.mode != "automaton" && args.mode != "transducer") {
            throw Error("build --mode must be 'automaton' or 'transducer'");
        }
        const Dictionary d = load_dictionary(args.dict, parse_sigma(args.sigma));
        require_proper(d);
        BuildOptions options;
        options.validate = args.validate;
        options.trim_at_end = args.trim;
        TokenDfa a;
        if (args.universal) {
            if (d.sigma().empty()) {
                throw Error("empty base alphabet; declare symbols with --sigma");
            }
            a = build_token_dfa(universal, d, options);
        } else {
            const Regex r = Regex::parse(*args.lang, d.sigma());
            a = build_token_dfa(regex_to_dfa(r, d.sigma()), d, options);
        }

        std::ostream& report = args.out ? io.out : io.err;
        nlohmann::ordered_json summary;
        std::string document;
        if (args.mode == "transducer") {
            const SubsequentialTransducer t = determinize(build_transducer(trim(a)));
            document = serialize_transducer(t);
            summary = {{"states", t.num_states()}, {"transitions", t.num_transitions()}};
        } else {
            document = serialize_token_dfa(a);
            summary = {{"states", a.num_states()},
                       {"transitions", a.num_transitions()},
                       {"finals", a.num_finals()},
                       {"dloc1", dloc(a, 1).value}};
        }
        if (args.validate) {
            summary["validated_merges"] = d.size();
        }
        if (args.out) {
            write_file(*args.out, document);
        } else {
            io.out << document;
        }
        if (args.json) {
            report << summary.dump() << "\n";
        } else {
            for (const auto& [key, value] : summary.items()) {
                report << key << ": " << value.dump() << "\n";
            }
        }
        return static_cast<int>(exit_ok);
    });
}

TokenizeSession::TokenizeSession(const TokenizeArgs& args)
{
    if (args.mode != "oracle" && args.mode != "transducer") {
        throw Error("tokenize --mode must be 'oracle' or 'transducer'");
    }
    if (args.aut.has_value() == args.dict.has_value()) {
        throw Error("tokenize needs exactly one of --dict and --aut");
    }
    if (args.aut && args.mode != "transducer") {
        throw Error("--aut needs --mode transducer");
    }
    std::vector<Token> outputs;
    if (args.aut) {
        transducer_.emplace(parse_subsequential_transducer(read_file(*args.aut)));
        outputs = transducer_->output_alphabet();
    } else {
        const Dictionary d = load_dictionary(*args.dict, parse_sigma(args.sigma));
        require_proper(d);
        outputs = d.gamma();
        if (args.mode == "oracle") {
            oracle_.emplace(d);
        } else {
            transducer_.emplace(dictionary_transducer(d));
        }
    }

    // Rendering of each internal token id; empty when the vocab lacks the token.
    const std::vector<Token>& internal = transducer_ ? transducer_->output_alphabet() : oracle_->gamma();
    if (args.ids) {
        if (!args.vocab) {
            throw Error("--ids needs --vocab");
        }
        Vocab vocab;
        if (std::filesystem::exists(*args.vocab)) {
            vocab = Vocab::parse(read_file(*args.vocab));
        } else {
            vocab = Vocab(outputs);
            write_file(*args.vocab, vocab.serialize());
        }
        for (const Token& t : internal) {
            auto id = vocab.id(t);
            rendered_.push_back(id ? std::to_string(*id) : std::string());
        }
        separator_ = ' ';
    } else {
        for (const Token& t : internal) {
            rendered_.push_back(escape_token(t));
        }
    }
}

void TokenizeSession::run(std::istream& in, std::ostream& out) const
{
    std::string line;
    std::string record;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const Text w = decode_line(line, line_no);
        std::optional<std::vector<std::uint32_t>> ids;
        try {
            ids = transducer_ ? transducer_->transduce_ids(w) : oracle_->tokenize_ids(w);
        } catch (const AlphabetError& e) {
            alphabet_failure(line_no, e);
        }
        if (!ids) {
            throw AlphabetError("line " + std::to_string(line_no) + ": input has no tokenization", w.size());
        }
        record.clear();
        for (std::size_t i = 0; i < ids->size(); ++i) {
            const TokenId id = (*ids)[i];
            const std::string& r = rendered_[id];
            if (r.empty()) {
                throw AlphabetError("line " + std::to_string(line_no) + ": token '"
                                        + escape_token(transducer_ ? transducer_->token(id) : oracle_->gamma()[id])
                                        + "' is not in the vocabulary",
                                    i);
            }
            if (i > 0) {
                record.push_back(separator_);
            }
            record += r;
        }
        record.push_back('\n');
        out << record;
    }
    out.flush();
}

int cmd_tokenize(const TokenizeArgs& args, Streams io)
{
    return guarded(io.err, [&] {
        const TokenizeSession session(args);
        session.run(io.in, io.out);
        return static_cast<int>(exit_ok);
    });
}

int cmd_validate(const ValidateArgs& args, Streams io)
{
    return guarded(io.err, [&] {
        const TokenDfa a = parse_token_dfa(read_file(args.aut));
        const RecordReader reader(args.ids, args.vocab);
        std::optional<WindowValidator> window;
        if (args.window) {
            window.emplace(a, args.k);
        }
        bool all_accepted = true;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(io.in, line)) {
            ++line_no;
            const std::vector<TokenId> ids = resolve(a, reader.read(line, line_no), line_no);
            std::optional<std::size_t> dead_at;
            bool accepted = false;
            if (window) {
                window->reset();
                for (TokenId t : ids) {
                    if (!window->push(t)) {
                        break;
                    }
                }
                dead_at = window->failed_at();
                accepted = window->finish();
            } else {
                std::optional<StateId> q = a.initial();
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    q = a.target(*q, ids[i]);
                    if (!q) {
                        dead_at = i;
                        break;
                    }
                }
                accepted = q && a.is_final(*q);
            }
            if (accepted) {
                io.out << "accept\n";
            } else if (dead_at) {
                io.out << "reject " << (*dead_at + 1) << "\n";
            } else {
                io.out << "reject end\n";
            }
            all_accepted = all_accepted && accepted;
        }
        return static_cast<int>(all_accepted ? exit_ok : exit_data);
    });
}

int cmd_equiv(const EquivArgs& args, Streams io)
{
    return guarded(io.err, [&] {
        const Alphabet extras = parse_sigma(args.sigma);
        Dictionary d1 = load_dictionary(args.dict, extras);
        Dictionary d2 = load_dictionary(args.dict2, extras);
        require_proper(d1);
        require_proper(d2);
        Alphabet sigma = d1.sigma();
        sigma.insert(d2.sigma().begin(), d2.sigma().end());
        d1 = d1.with_extra_symbols(sigma);
        d2 = d2.with_extra_symbols(sigma);

        const auto diff = find_distinguishing_tokenization(trim(dictionary_automaton(d1)),
                                                           trim(dictionary_automaton(d2)));
        json doc;
        doc["equivalent"] = !diff.has_value();
        if (diff) {
            const Text w = project(diff->tokens);
            const Tokenization first = tokenize_hf(d1, w);
            const Tokenization second = tokenize_hf(d2, w);
            if (first == second) {
                throw InvariantViolation("distinguishing string '" + escaped(w)
                                         + "' has the same tokenization under both dictionaries");
            }
            doc["witness"] = utf8::encode(w);
            doc["first"] = tokens_json(first);
            doc["second"] = tokens_json(second);
            if (args.json) {
                io.out << doc.dump() << "\n";
            } else {
                io.out << "inequivalent\n"
                       << "witness: " << escaped(w) << "\n"
                       << "first: " << to_string(first) << "\n"
                       << "second: " << to_string(second) << "\n";
            }
            return static_cast<int>(exit_data);
        }
        io.out << (args.json ? doc.dump() : std::string("equivalent")) << "\n";
        return static_cast<int>(exit_ok);
    });
}

int cmd_match(const MatchArgs& args, Streams io)
{
    return guarded(io.err, [&] {
        const Dictionary d = load_dictionary(args.dict, parse_sigma(args.sigma));
        require_proper(d);
        const Regex r = Regex::parse(args.pattern, d.sigma());
        const TokenDfa pattern = contains_pattern_dfa(r, d, d.sigma());
        const TokenDfa valid = dictionary_automaton(d);
        const RecordReader reader(args.ids, args.vocab);

        bool all_valid = true;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(io.in, line)) {
            ++line_no;
            const Tokenization tokens = reader.read(line, line_no);
            const std::vector<TokenId> ids = resolve(valid, tokens, line_no);
            StreamMatcher in_language(valid);
            StreamMatcher matcher(pattern);
            std::optional<std::size_t> invalid_at;
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                if (in_language.push(ids[i]) == StreamMatcher::Status::dead) {
                    invalid_at = i;
                    break;
                }
                matcher.push(tokens[i]);
            }
            if (!invalid_at && in_language.status() != StreamMatcher::Status::accepting) {
                invalid_at = tokens.size();
            }
            if (invalid_at) {
                io.out << "invalid " << (*invalid_at + 1) << "\n";
                all_valid = false;
            } else {
                io.out << (matcher.status() == StreamMatcher::Status::accepting ? "match" : "no-match") << "\n";
            }
        }
        return static_cast<int>(all_valid ? exit_ok : exit_data);
    });
}

int cmd_stats(const StatsArgs& args, Streams io)
{
    return guarded(io.err, [&] {
        const TokenDfa a = parse_token_dfa(read_file(args.aut));
        const auto violation = find_context_invariance_violation(a);
        const LocalityProfile profile = locality_profile(a, args.k);
        if (args.json) {
            json doc;
            doc["states"] = a.num_states();
            doc["transitions"] = a.num_transitions();
            doc["finals"] = a.num_finals();
            doc["context_invariant"] = !violation.has_value();
            if (violation) {
                doc["invariance_witness"] = {{"first_start", violation->first_start},
                                             {"first", tokens_json(violation->first)},
                                             {"second_start", violation->second_start},
                                             {"second", tokens_json(violation->second)}};
            }
            doc["dloc"] = json::array();
            for (const auto& [k, degree] : profile.by_k) {
                doc["dloc"].push_back({{"k", k}, {"value", degree.value}, {"witness", tokens_json(degree.witness)}});
            }
            io.out << doc.dump() << "\n";
            return static_cast<int>(exit_ok);
        }
        io.out << "states: " << a.num_states() << "\n"
               << "transitions: " << a.num_transitions() << "\n"
               << "finals: " << a.num_finals() << "\n";
        if (violation) {
            io.out << "context-invariant: no\n"
                   << "  from state " << violation->first_start << ": " << to_string(violation->first) << "\n"
                   << "  from state " << violation->second_start << ": " << to_string(violation->second) << "\n";
        } else {
            io.out << "context-invariant: yes\n";
        }
        for (const auto& [k, degree] : profile.by_k) {
            io.out << "dloc(" << k << "): " << degree.value;
            if (!degree.witness.empty()) {
                io.out << "  witness " << to_string(degree.witness);
            }
            io.out << "\n";
        }
        return static_cast<int>(exit_ok);
    });
}

} // namespace tokautoma::cli
