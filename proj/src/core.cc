#include "tokautoma/core.hh"

#include <map>
#include <sstream>

#include "tokautoma/utf8.hh"

namespace tokautoma {

Token::Token(Text text) : text_(std::move(text))
{
    if (text_.empty()) {
        throw Error("token text must be nonempty");
    }
}

Token Token::from_utf8(std::string_view text) { return Token(utf8::decode(text)); }

std::string Token::utf8() const { return utf8::encode(text_); }

Token operator+(const Token& left, const Token& right) { return Token(left.text() + right.text()); }

Text project(std::span<const Token> tokens)
{
    Text out;
    for (const Token& t : tokens) {
        out += t.text();
    }
    return out;
}

Tokenization base_tokenization(std::u32string_view w)
{
    Tokenization out;
    out.reserve(w.size());
    for (Symbol s : w) {
        out.emplace_back(s);
    }
    return out;
}

void require_in_alphabet(std::u32string_view w, const Alphabet& sigma)
{
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!sigma.contains(w[i])) {
            throw AlphabetError("symbol '" + utf8::encode(w[i]) + "' at position " + std::to_string(i)
                                    + " is not in the base alphabet",
                                i);
        }
    }
}

Tokenization base_tokenization(std::u32string_view w, const Alphabet& sigma)
{
    require_in_alphabet(w, sigma);
    return base_tokenization(w);
}

std::string to_string(std::span<const Token> tokens)
{
    if (tokens.empty()) {
        return "<empty>";
    }
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i != 0) {
            out += " | ";
        }
        out += tokens[i].utf8();
    }
    return out;
}

Tokenization make_tokenization(std::initializer_list<std::string_view> tokens)
{
    Tokenization out;
    for (auto t : tokens) {
        out.push_back(Token::from_utf8(t));
    }
    return out;
}

Dictionary::Dictionary(std::vector<std::pair<Token, Token>> rules, const Alphabet& extra_symbols)
    : sigma_(extra_symbols), extra_(extra_symbols)
{
    std::set<std::pair<Text, Text>> seen;
    rules_.reserve(rules.size());
    for (auto& [left, right] : rules) {
        if (!seen.emplace(left.text(), right.text()).second) {
            throw Error("duplicate rule '" + left.utf8() + " " + right.utf8() + "' at index "
                        + std::to_string(rules_.size()));
        }
        sigma_.insert(left.text().begin(), left.text().end());
        sigma_.insert(right.text().begin(), right.text().end());
        rules_.push_back(MergeRule{std::move(left), std::move(right), rules_.size()});
    }
}

Dictionary Dictionary::from_utf8(std::initializer_list<std::pair<std::string_view, std::string_view>> rules,
                                 std::string_view extra_symbols)
{
    std::vector<std::pair<Token, Token>> pairs;
    for (auto [l, r] : rules) {
        pairs.emplace_back(Token::from_utf8(l), Token::from_utf8(r));
    }
    const Text extra = utf8::decode(extra_symbols);
    return Dictionary(std::move(pairs), Alphabet(extra.begin(), extra.end()));
}

std::vector<Token> Dictionary::gamma() const
{
    std::vector<Token> out;
    std::set<Text> seen;
    for (Symbol s : sigma_) {
        out.emplace_back(s);
        seen.insert(Text(1, s));
    }
    for (const MergeRule& r : rules_) {
        Token m = r.merged();
        if (seen.insert(m.text()).second) {
            out.push_back(std::move(m));
        }
    }
    return out;
}

Dictionary Dictionary::prefix(std::size_t count) const
{
    std::vector<std::pair<Token, Token>> pairs;
    for (std::size_t i = 0; i < count && i < rules_.size(); ++i) {
        pairs.emplace_back(rules_[i].left, rules_[i].right);
    }
    return Dictionary(std::move(pairs), sigma_);
}

Dictionary Dictionary::with_extra_symbols(const Alphabet& extra) const
{
    Alphabet merged = extra_;
    merged.insert(extra.begin(), extra.end());
    Dictionary out = *this;
    out.extra_ = merged;
    out.sigma_.insert(extra.begin(), extra.end());
    return out;
}

std::size_t Dictionary::max_token_length() const
{
    std::size_t t = 0;
    for (const MergeRule& r : rules_) {
        t = std::max(t, r.left.size() + r.right.size());
    }
    return t;
}

std::optional<ImproperRule> find_improper_rule(const Dictionary& d)
{
    std::set<Text> produced;
    for (const MergeRule& r : d.rules()) {
        if (r.left.size() > 1 && !produced.contains(r.left.text())) {
            return ImproperRule{r.priority, RuleSide::left, r.left};
        }
        if (r.right.size() > 1 && !produced.contains(r.right.text())) {
            return ImproperRule{r.priority, RuleSide::right, r.right};
        }
        produced.insert(r.left.text() + r.right.text());
    }
    return std::nullopt;
}

namespace {

std::string describe(const ImproperRule& w)
{
    return "dictionary is not proper: rule " + std::to_string(w.rule) + " "
        + (w.side == RuleSide::left ? "left" : "right") + " side '" + w.token.utf8()
        + "' is not produced by an earlier rule";
}

} // namespace

ImproperDictionary::ImproperDictionary(ImproperRule witness)
    : Error(describe(witness)), witness_(std::move(witness))
{
}

void require_proper(const Dictionary& d)
{
    if (auto w = find_improper_rule(d)) {
        throw ImproperDictionary(*w);
    }
}

std::string escape_token(const Token& token)
{
    std::string out;
    for (Symbol s : token.text()) {
        switch (s) {
        case U' ': out += "\\s"; break;
        case U'\\': out += "\\\\"; break;
        case U'\n': out += "\\n"; break;
        case U'\t': out += "\\t"; break;
        default: out += utf8::encode(s);
        }
    }
    return out;
}

Token unescape_token(std::string_view field, std::size_t line)
{
    if (field.empty()) {
        throw ParseError("empty token", line);
    }
    std::string raw;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (field[i] != '\\') {
            raw.push_back(field[i]);
            continue;
        }
        if (i + 1 == field.size()) {
            throw ParseError("dangling escape in token", line, i + 1);
        }
        switch (field[++i]) {
        case 's': raw.push_back(' '); break;
        case '\\': raw.push_back('\\'); break;
        case 'n': raw.push_back('\n'); break;
        case 't': raw.push_back('\t'); break;
        default: throw ParseError(std::string("unknown escape '\\") + field[i] + "' in token", line, i);
        }
    }
    try {
        return Token(utf8::decode(raw));
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line, e.column());
    }
}

Dictionary parse_dictionary(std::string_view text, const DictionaryParseOptions& options)
{
    std::vector<std::pair<Token, Token>> pairs;
    std::map<std::pair<Text, Text>, std::size_t> first_line;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line_no == 1 && options.skip_header && !line.empty() && line.front() == '#') {
            continue;
        }
        if (line.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        const std::size_t space = line.find(' ');
        if (space == std::string_view::npos || line.find(' ', space + 1) != std::string_view::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected exactly two space-separated fields",
                             line_no);
        }
        Token left = unescape_token(line.substr(0, space), line_no);
        Token right = unescape_token(line.substr(space + 1), line_no);
        auto [it, fresh] = first_line.emplace(std::make_pair(left.text(), right.text()), line_no);
        if (!fresh) {
            throw ParseError("line " + std::to_string(line_no) + ": duplicate rule (first seen on line "
                                 + std::to_string(it->second) + ")",
                             line_no);
        }
        pairs.emplace_back(std::move(left), std::move(right));
        if (end == text.size()) {
            break;
        }
    }
    return Dictionary(std::move(pairs), options.extra_symbols);
}

std::string serialize_dictionary(const Dictionary& d)
{
    std::ostringstream out;
    for (const MergeRule& r : d.rules()) {
        out << escape_token(r.left) << ' ' << escape_token(r.right) << '\n';
    }
    return out.str();
}

} // namespace tokautoma
