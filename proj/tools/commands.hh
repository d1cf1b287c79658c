#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tokautoma/bpe.hh"
#include "tokautoma/transducer.hh"

namespace tokautoma::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_improper = 2,
    exit_data = 3,
    exit_internal = 4,
};

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

struct BuildArgs {
    std::string dict;
    bool universal = false;
    std::optional<std::string> lang;
    std::optional<std::string> out;
    /// "automaton" writes a token DFA, "transducer" a subsequential transducer.
    std::string mode = "automaton";
    bool trim = false;
    bool validate = false;
    std::string sigma;
    bool json = false;
};

struct TokenizeArgs {
    std::optional<std::string> dict;
    /// Prebuilt subsequential transducer file (transducer mode only).
    std::optional<std::string> aut;
    std::string mode = "transducer";
    bool ids = false;
    std::optional<std::string> vocab;
    std::string sigma;
};

struct ValidateArgs {
    std::string aut;
    bool window = false;
    std::size_t k = 1;
    bool ids = false;
    std::optional<std::string> vocab;
};

struct EquivArgs {
    std::string dict;
    std::string dict2;
    std::string sigma;
    bool json = false;
};

struct MatchArgs {
    std::string dict;
    std::string pattern;
    std::string sigma;
    bool ids = false;
    std::optional<std::string> vocab;
};

struct StatsArgs {
    std::string aut;
    std::size_t k = 3;
    bool json = false;
};

/// The loaded machine of a tokenize command. Construction reads the dictionary or
/// transducer file (and the vocab in id mode); run() then streams records.
class TokenizeSession {
public:
    /// Throws the library's errors; cmd_tokenize maps them to exit codes.
    explicit TokenizeSession(const TokenizeArgs& args);
    void run(std::istream& in, std::ostream& out) const;

private:
    std::optional<BpeTokenizer> oracle_;
    std::optional<SubsequentialTransducer> transducer_;
    std::vector<std::string> rendered_;
    char separator_ = '\t';
};

// Every command reports errors on `err` and returns an ExitCode; none of them throws.
int cmd_build(const BuildArgs& args, Streams io);
int cmd_tokenize(const TokenizeArgs& args, Streams io);
int cmd_validate(const ValidateArgs& args, Streams io);
int cmd_equiv(const EquivArgs& args, Streams io);
int cmd_match(const MatchArgs& args, Streams io);
int cmd_stats(const StatsArgs& args, Streams io);

} // namespace tokautoma::cli
