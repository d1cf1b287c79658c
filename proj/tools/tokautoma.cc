#include <iostream>

#include <CLI11.hpp>

#include "commands.hh"

using namespace tokautoma::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Token automata for BPE tokenizations"};
    app.require_subcommand(1);

    BuildArgs build;
    auto* b = app.add_subcommand("build", "Build the token automaton (or transducer) of a dictionary");
    b->add_option("--dict", build.dict, "Dictionary file")->required();
    b->add_flag("--universal", build.universal, "Start from the universal automaton over the base alphabet");
    b->add_option("--lang", build.lang, "Start from the language of this regex");
    b->add_option("--out", build.out, "Output file (default stdout)");
    b->add_option("--mode", build.mode, "automaton|transducer");
    b->add_flag("--trim", build.trim, "Drop useless states after the last merge");
    b->add_flag("--validate", build.validate, "Check invariants after every merge");
    b->add_option("--sigma", build.sigma, "Extra base symbols");
    b->add_flag("--json", build.json, "Machine-readable report");

    TokenizeArgs tokenize;
    auto* t = app.add_subcommand("tokenize", "Tokenize each input line");
    t->add_option("--dict", tokenize.dict, "Dictionary file");
    t->add_option("--aut", tokenize.aut, "Transducer file written by build --mode transducer");
    t->add_option("--mode", tokenize.mode, "oracle|transducer");
    t->add_flag("--ids", tokenize.ids, "Write token ids");
    t->add_option("--vocab", tokenize.vocab, "Vocab file (written if missing)");
    t->add_option("--sigma", tokenize.sigma, "Extra base symbols");

    ValidateArgs validate;
    auto* v = app.add_subcommand("validate", "Check token stream records against an automaton");
    v->add_option("--aut", validate.aut, "Automaton file")->required();
    v->add_flag("--window", validate.window, "Sliding-window check");
    v->add_option("--k", validate.k, "Window width minus one");
    v->add_flag("--ids", validate.ids, "Records are token ids");
    v->add_option("--vocab", validate.vocab, "Vocab file");

    EquivArgs equiv;
    auto* e = app.add_subcommand("equiv", "Decide whether two dictionaries tokenize identically");
    e->add_option("--dict", equiv.dict, "First dictionary")->required();
    e->add_option("--dict2", equiv.dict2, "Second dictionary")->required();
    e->add_option("--sigma", equiv.sigma, "Extra base symbols");
    e->add_flag("--json", equiv.json, "Machine-readable verdict");

    MatchArgs match;
    auto* m = app.add_subcommand("match", "Search a pattern in the strings under token stream records");
    m->add_option("--dict", match.dict, "Dictionary file")->required();
    m->add_option("--pattern", match.pattern, "Regex")->required();
    m->add_option("--sigma", match.sigma, "Extra base symbols");
    m->add_flag("--ids", match.ids, "Records are token ids");
    m->add_option("--vocab", match.vocab, "Vocab file");

    StatsArgs stats;
    auto* s = app.add_subcommand("stats", "Report size, context-invariance and locality");
    s->add_option("--aut", stats.aut, "Automaton file")->required();
    s->add_option("--k", stats.k, "Largest k for dloc");
    s->add_flag("--json", stats.json, "Machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? exit_ok : exit_usage;
    }

    std::ios::sync_with_stdio(false);
    Streams io{std::cin, std::cout, std::cerr};
    if (b->parsed()) {
        return cmd_build(build, io);
    }
    if (t->parsed()) {
        return cmd_tokenize(tokenize, io);
    }
    if (v->parsed()) {
        return cmd_validate(validate, io);
    }
    if (e->parsed()) {
        return cmd_equiv(equiv, io);
    }
    if (m->parsed()) {
        return cmd_match(match, io);
    }
    return cmd_stats(stats, io);
}
