#include "token_stream.hh"

#include <charconv>

#include <json.hpp>

namespace tokautoma::cli {

Tokenization parse_token_record(std::string_view line, std::size_t line_no)
{
    Tokenization out;
    if (line.empty()) {
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        const std::string_view field = line.substr(start, tab == std::string_view::npos ? line.npos : tab - start);
        try {
            out.push_back(unescape_token(field, line_no));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ", token " + std::to_string(out.size() + 1) + ": "
                                 + e.what(),
                             line_no, start + e.column() + 1);
        }
        if (tab == std::string_view::npos) {
            return out;
        }
        start = tab + 1;
    }
}

std::string format_token_record(std::span<const Token> tokens)
{
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) {
            out.push_back('\t');
        }
        out += escape_token(tokens[i]);
    }
    return out;
}

std::vector<std::uint32_t> parse_id_record(std::string_view line, std::size_t line_no)
{
    std::vector<std::uint32_t> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ') {
            ++i;
            continue;
        }
        std::uint32_t value = 0;
        auto [end, ec] = std::from_chars(line.data() + i, line.data() + line.size(), value);
        if (ec != std::errc() || (end != line.data() + line.size() && *end != ' ')) {
            throw ParseError("line " + std::to_string(line_no) + ": bad token id", line_no, i + 1);
        }
        out.push_back(value);
        i = static_cast<std::size_t>(end - line.data());
    }
    return out;
}

std::string format_id_record(std::span<const std::uint32_t> ids)
{
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) {
            out.push_back(' ');
        }
        out += std::to_string(ids[i]);
    }
    return out;
}

Vocab::Vocab(std::vector<Token> tokens) : tokens_(std::move(tokens))
{
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i].text(), static_cast<std::uint32_t>(i)).second) {
            throw Error("duplicate vocabulary entry '" + tokens_[i].utf8() + "'");
        }
    }
}

Vocab Vocab::parse(std::string_view json_text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("vocab file: ") + e.what(), 0, e.byte);
    }
    if (!doc.is_array()) {
        throw ParseError("vocab file: expected a JSON array of tokens", 0);
    }
    std::vector<Token> tokens;
    for (const auto& t : doc) {
        if (!t.is_string() || t.get<std::string>().empty()) {
            throw ParseError("vocab file: entries must be nonempty strings", 0);
        }
        tokens.push_back(Token::from_utf8(t.get<std::string>()));
    }
    try {
        return Vocab(std::move(tokens));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("vocab file: ") + e.what(), 0);
    }
}

std::string Vocab::serialize() const
{
    nlohmann::json doc = nlohmann::json::array();
    for (const Token& t : tokens_) {
        doc.push_back(t.utf8());
    }
    return doc.dump() + "\n";
}

std::optional<std::uint32_t> Vocab::id(const Token& token) const
{
    auto it = index_.find(token.text());
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const Token& Vocab::token(std::uint32_t id) const
{
    if (id >= tokens_.size()) {
        throw AlphabetError("token id " + std::to_string(id) + " is not in the vocabulary", id);
    }
    return tokens_[id];
}

} // namespace tokautoma::cli
