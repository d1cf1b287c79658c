#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "tokautoma/core.hh"
#include "tokautoma/string_dfa.hh"

namespace tokautoma {

/// Regular expression syntax tree. Character classes and `.` are resolved against the
/// base alphabet at parse time, so every leaf is a set of base symbols.
struct RegexNode {
    enum class Kind { epsilon, symbols, concat, alternation, star, plus, optional };

    Kind kind = Kind::epsilon;
    Alphabet symbols;
    std::vector<std::shared_ptr<const RegexNode>> children;
};

class Regex {
public:
    /// Supported syntax: literals, `.`, `[...]` and `[^...]` classes with ranges, `(...)`,
    /// `|`, `*`, `+`, `?`, and `\` escapes (`\s` space, `\n`, `\t`, `\x` for literal x).
    /// Throws ParseError (column = symbol offset) on syntax errors and on literals
    /// outside `sigma`.
    static Regex parse(std::string_view pattern, const Alphabet& sigma);

    const RegexNode& root() const { return *root_; }
    const Alphabet& sigma() const { return sigma_; }

private:
    Regex(std::shared_ptr<const RegexNode> root, Alphabet sigma) : root_(std::move(root)), sigma_(std::move(sigma)) {}

    std::shared_ptr<const RegexNode> root_;
    Alphabet sigma_;
};

/// Thompson construction, subset construction over sigma, then minimize().
StringDfa regex_to_dfa(const Regex& r, const Alphabet& sigma);

/// Automaton for sigma* . L(r) . sigma*, built by concatenating automata (not by
/// rewriting the expression).
StringDfa substring_dfa(const Regex& r, const Alphabet& sigma);

} // namespace tokautoma
