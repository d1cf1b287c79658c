// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "commands.hh"
#include "fixtures.hh"
#include "oracles.hh"
#include "tokautoma/bpe.hh"
#include "tokautoma/construction.hh"
#include "tokautoma/transducer.hh"
#include "tokautoma/utf8.hh"

using namespace tokautoma;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::size_t corpus_size = 200;
constexpr std::size_t max_len = 8;
constexpr std::uint64_t corpus_seed = 20240601;

struct Verdict {
    bool pass = true;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string first_failure;
    double seconds = 0;

    void check(bool ok, const std::function<std::string()>& describe)
    {
        ++checks;
        if (!ok) {
            if (failures == 0) {
                first_failure = describe();
            }
            ++failures;
            pass = false;
        }
    }
};

void report(int id, const std::string& title, const Verdict& v, const std::string& detail)
{
    std::printf("%s criterion %2d: %s | %s | %zu checks, %zu failures, %.2fs\n", v.pass ? "PASS" : "FAIL", id,
                title.c_str(), detail.c_str(), v.checks, v.failures, v.seconds);
    if (!v.pass && !v.first_failure.empty()) {
        std::printf("     first failure: %s\n", v.first_failure.c_str());
    }
    std::fflush(stdout);
}

std::string show(std::u32string_view w) { return "'" + utf8::encode(w) + "'"; }
std::string show(std::span<const Token> t) { return "[" + to_string(t) + "]"; }

// Every string over sigma of length <= n, indexed by length then base-|sigma| value.
struct StringSpace {
    std::vector<Symbol> symbols;
    std::vector<std::size_t> offset;
    std::vector<Text> strings;

    StringSpace(const Alphabet& sigma, std::size_t n) : symbols(sigma.begin(), sigma.end())
    {
        std::vector<Text> level{Text()};
        for (std::size_t len = 0; len <= n; ++len) {
            offset.push_back(strings.size());
            strings.insert(strings.end(), level.begin(), level.end());
            std::vector<Text> next;
            for (const Text& w : level) {
                for (Symbol s : symbols) {
                    next.push_back(w + s);
                }
            }
            level = std::move(next);
        }
    }

    std::size_t index(std::u32string_view w) const
    {
        std::size_t v = 0;
        for (Symbol s : w) {
            v = v * symbols.size()
                + static_cast<std::size_t>(std::lower_bound(symbols.begin(), symbols.end(), s) - symbols.begin());
        }
        return offset[w.size()] + v;
    }
};

using Ids = std::vector<std::uint32_t>;

Ids ids_in(const TokenDfa& a, std::span<const Token> tokens)
{
    Ids out;
    for (const Token& t : tokens) {
        out.push_back(*a.find_token(t));
    }
    return out;
}

bool valid_witness(const TokenDfa& a, const ContextInvarianceWitness& w)
{
    return w.first != w.second && project(w.first) == project(w.second) && run(a, w.first_start, w.first)
        && run(a, w.second_start, w.second);
}

struct Counters {
    std::size_t dictionaries = 0;
    std::size_t strings = 0;
    std::size_t merges = 0;
    std::size_t tight = 0;
    std::size_t pairs = 0;
    std::size_t streams_valid = 0;
    std::size_t streams_mutated = 0;
    std::size_t mutated_accepted = 0;
};

struct CorpusVerdicts {
    Verdict c2, c3, c4, c5, c6, c7, c8, c9, c13;
};

// Random token stream edits that stay inside the token alphabet.
Tokenization mutate(const Tokenization& valid, const std::vector<Token>& gamma, std::mt19937_64& rng)
{
    Tokenization t = valid;
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    switch (pick(t.empty() ? 1 : 5)) {
    case 0:
        t.insert(t.begin() + static_cast<std::ptrdiff_t>(pick(t.size() + 1)), gamma[pick(gamma.size())]);
        break;
    case 1:
        t[pick(t.size())] = gamma[pick(gamma.size())];
        break;
    case 2:
        t.erase(t.begin() + static_cast<std::ptrdiff_t>(pick(t.size())));
        break;
    case 3: {
        // split a token into two alphabet tokens when possible, else swap neighbours
        const std::size_t i = pick(t.size());
        const Text& s = t[i].text();
        bool split = false;
        for (std::size_t cut = 1; cut < s.size() && !split; ++cut) {
            const Token left(s.substr(0, cut));
            const Token right(s.substr(cut));
            if (std::find(gamma.begin(), gamma.end(), left) != gamma.end()
                && std::find(gamma.begin(), gamma.end(), right) != gamma.end()) {
                t[i] = left;
                t.insert(t.begin() + static_cast<std::ptrdiff_t>(i + 1), right);
                split = true;
            }
        }
        if (!split && t.size() > 1) {
            const std::size_t j = pick(t.size() - 1);
            std::swap(t[j], t[j + 1]);
        }
        break;
    }
    default: {
        // join two neighbours when the result is a token
        for (std::size_t i = 0; i + 1 < t.size(); ++i) {
            const Token joined = t[i] + t[i + 1];
            if (std::find(gamma.begin(), gamma.end(), joined) != gamma.end()) {
                t[i] = joined;
                t.erase(t.begin() + static_cast<std::ptrdiff_t>(i + 1));
                return t;
            }
        }
        t.push_back(gamma[pick(gamma.size())]);
        break;
    }
    }
    return t;
}

void run_corpus(CorpusVerdicts& v, Counters& n)
{
    std::mt19937_64 rng(corpus_seed);
    std::mt19937_64 stream_rng(corpus_seed + 1);
    const std::size_t streams_per_dictionary = 10000 / corpus_size;

    for (std::size_t di = 0; di < corpus_size; ++di) {
        const Dictionary d = oracle::random_proper_dictionary(rng);
        const std::string label = "dictionary #" + std::to_string(di) + " [" + [&] {
            std::string s;
            for (const auto& r : d.rules()) {
                s += (s.empty() ? "" : ", ") + r.left.utf8() + " " + r.right.utf8();
            }
            return s;
        }() + "]";
        ++n.dictionaries;
        const StringSpace space(d.sigma(), max_len);
        n.strings += space.strings.size();
        const BpeTokenizer hf(d);

        // Reference tokenizations of every string.
        std::vector<Tokenization> expected(space.strings.size());
        for (std::size_t i = 0; i < space.strings.size(); ++i) {
            expected[i] = hf.tokenize(space.strings[i]);
        }

        // Construction, with per-merge checks.
        auto t0 = Clock::now();
        const TokenDfa base = universal_token_dfa(d.sigma());
        const std::size_t dloc0 = oracle::dloc(base, 1);
        BuildOptions options;
        options.on_merge = [&](const MergeRule& rule, const TokenDfa& before, const TokenDfa& after) {
            ++n.merges;
            const auto where = [&] { return label + ", rule " + std::to_string(rule.priority + 1); };

            auto t5 = Clock::now();
            const std::size_t b1 = oracle::dloc(before, 1);
            const std::size_t a1 = oracle::dloc(after, 1);
            v.c5.check(a1 == b1, [&] { return where() + ": dloc1 " + std::to_string(b1) + " -> " + std::to_string(a1); });
            for (std::size_t k = 2; k <= 3; ++k) {
                const std::size_t bk = oracle::dloc(before, k);
                const std::size_t ak = oracle::dloc(after, k);
                v.c5.check(ak <= bk, [&] {
                    return where() + ": dloc" + std::to_string(k) + " " + std::to_string(bk) + " -> " + std::to_string(ak);
                });
            }
            v.c5.seconds += seconds_since(t5);

            auto t6 = Clock::now();
            const Token uv = rule.merged();
            const std::size_t euv = oracle::reached_by_then(before, rule.left, rule.right).size();
            v.c6.check(after.num_states() == before.num_states() + euv, [&] {
                return where() + ": |Q'| = " + std::to_string(after.num_states()) + ", |Q| + |E_uv| = "
                    + std::to_string(before.num_states() + euv);
            });
            auto e = [](const TokenDfa& a, const Token& t) { return oracle::reached_by(a, std::span<const Token>(&t, 1)).size(); };
            v.c6.check(e(after, rule.left) == e(before, rule.left), [&] { return where() + ": |E_u| changed"; });
            if (!before.find_token(uv)) {
                v.c6.check(e(after, uv) <= e(before, rule.right), [&] { return where() + ": |E_uv(A')| > |E_v(A)|"; });
            }
            for (const Token& beta : before.alphabet()) {
                v.c6.check(e(after, beta) == e(before, beta), [&] { return where() + ": |E_" + beta.utf8() + "| changed"; });
            }
            v.c6.seconds += seconds_since(t6);

            auto t7 = Clock::now();
            const auto violation = find_context_invariance_violation(after);
            v.c7.check(!violation, [&] {
                return where() + ": not context-invariant, " + show(violation->first) + " vs " + show(violation->second);
            });
            v.c7.seconds += seconds_since(t7);
        };
        const TokenDfa a = build_token_dfa(universal, d, options);
        v.c2.seconds += seconds_since(t0);

        // 2: accepted tokenizations up to length 8 are exactly the reference ones.
        t0 = Clock::now();
        for (std::size_t i = 0; i < space.strings.size(); ++i) {
            v.c2.check(accepts(a, expected[i]), [&] {
                return label + ": rejects " + show(expected[i]) + " of " + show(space.strings[i]);
            });
        }
        std::size_t accepted_runs = 0;
        Tokenization path;
        std::function<void(StateId, std::size_t)> walk = [&](StateId q, std::size_t len) {
            if (a.is_final(q)) {
                ++accepted_runs;
                const Text w = project(path);
                const Tokenization& want = expected[space.index(w)];
                v.c2.check(path == want, [&] {
                    return label + ": accepts " + show(path) + " but " + show(w) + " tokenizes as " + show(want);
                });
            }
            for (auto [t, to] : a.transitions_from(q)) {
                const Token& tok = a.token(t);
                if (len + tok.size() <= max_len) {
                    path.push_back(tok);
                    walk(to, len + tok.size());
                    path.pop_back();
                }
            }
        };
        walk(a.initial(), 0);
        v.c2.check(accepted_runs == space.strings.size(), [&] {
            return label + ": " + std::to_string(accepted_runs) + " accepted tokenizations for "
                + std::to_string(space.strings.size()) + " strings";
        });
        v.c2.seconds += seconds_since(t0);

        // 3: the two semantics coincide.
        t0 = Clock::now();
        for (std::size_t i = 0; i < space.strings.size(); ++i) {
            const Tokenization sp = tokenize_sp(d, space.strings[i]);
            v.c3.check(sp == expected[i], [&] {
                return label + ": " + show(space.strings[i]) + " hf " + show(expected[i]) + " sp " + show(sp);
            });
        }
        v.c3.seconds += seconds_since(t0);

        // 4: state count bound.
        const std::size_t bound = base.num_states() + d.size() * dloc0;
        v.c4.check(a.num_states() <= bound, [&] {
            return label + ": " + std::to_string(a.num_states()) + " states, bound " + std::to_string(bound);
        });
        n.tight += a.num_states() == bound ? 1 : 0;

        // 7: checked per merge; the final automaton too.
        v.c7.check(is_context_invariant(a), [&] { return label + ": final automaton not context-invariant"; });

        // 8: subsequential tokenizer equals the reference.
        t0 = Clock::now();
        const SubsequentialTransducer t = determinize(build_transducer(a));
        for (std::size_t i = 0; i < space.strings.size(); ++i) {
            const auto got = transduce(t, space.strings[i]);
            v.c8.check(got == expected[i], [&] {
                return label + ": " + show(space.strings[i]) + " -> " + (got ? show(*got) : std::string("none"));
            });
        }
        v.c8.seconds += seconds_since(t0);

        // 9: bounded variation over all pairs of short strings and all close pairs.
        t0 = Clock::now();
        const std::size_t limit = 2 * d.size() * d.max_token_length();
        std::vector<Ids> ids(space.strings.size());
        for (std::size_t i = 0; i < space.strings.size(); ++i) {
            ids[i] = hf.tokenize_ids(space.strings[i]);
        }
        auto check_pair = [&](std::size_t x, std::size_t y) {
            ++n.pairs;
            const std::size_t dx = oracle::prefix_distance(space.strings[x], space.strings[y]);
            const std::size_t dt = oracle::prefix_distance(ids[x], ids[y]);
            v.c9.check(dt <= limit + dx, [&] {
                return label + ": " + show(space.strings[x]) + " vs " + show(space.strings[y]) + " distance "
                    + std::to_string(dt) + " > " + std::to_string(limit + dx);
            });
        };
        const std::size_t short_end = space.offset[5];
        for (std::size_t x = 0; x < short_end; ++x) {
            for (std::size_t y = x + 1; y < short_end; ++y) {
                check_pair(x, y);
            }
        }
        for (std::size_t x = 0; x < space.strings.size(); ++x) {
            const Text& w = space.strings[x];
            for (std::size_t cut = 0; cut <= std::min<std::size_t>(2, w.size()); ++cut) {
                const Text stem = w.substr(0, w.size() - cut);
                std::vector<Text> tails{Text()};
                for (std::size_t extra = 1; extra + cut <= 2; ++extra) {
                    std::vector<Text> longer;
                    for (const Text& tail : tails) {
                        if (tail.size() + 1 == extra) {
                            for (Symbol s : space.symbols) {
                                longer.push_back(tail + s);
                            }
                        }
                    }
                    tails.insert(tails.end(), longer.begin(), longer.end());
                }
                for (const Text& tail : tails) {
                    const Text y = stem + tail;
                    if (y.size() <= max_len && y != w && (w.size() > 4 || y.size() > 4)) {
                        check_pair(x, space.index(y));
                    }
                }
            }
        }
        v.c9.seconds += seconds_since(t0);

        // 13: window validation agrees with acceptance.
        t0 = Clock::now();
        const std::vector<Token> gamma = d.gamma();
        for (std::size_t s = 0; s < streams_per_dictionary; ++s) {
            Text w;
            const std::size_t len = stream_rng() % 41;
            for (std::size_t i = 0; i < len; ++i) {
                w.push_back(space.symbols[stream_rng() % space.symbols.size()]);
            }
            Tokenization stream = hf.tokenize(w);
            if (s % 2 == 1) {
                stream = mutate(stream, gamma, stream_rng);
                ++n.streams_mutated;
            } else {
                ++n.streams_valid;
            }
            const bool full = accepts(a, stream);
            const bool window = window_validate(a, 1, stream);
            n.mutated_accepted += (s % 2 == 1 && full) ? 1 : 0;
            v.c13.check(full == window, [&] {
                return label + ": stream " + show(stream) + " full " + std::to_string(full) + " window "
                    + std::to_string(window);
            });
            if (s % 2 == 0) {
                v.c13.check(full, [&] { return label + ": valid stream " + show(stream) + " rejected"; });
            }
        }
        v.c13.seconds += seconds_since(t0);
    }
}

Verdict criterion_1()
{
    Verdict v;
    const auto t0 = Clock::now();
    std::vector<TokenDfa> steps;
    BuildOptions options;
    options.on_merge = [&](const MergeRule&, const TokenDfa&, const TokenDfa& after) { steps.push_back(after); };
    TokenDfa u(1, 0);
    u.set_transition(0, Token(U'a'), 0);
    u.set_transition(0, Token(U'b'), 0);
    u.set_final(0);
    const TokenDfa a = build_token_dfa(universal, fixtures::fig2_dictionary(), options);
    v.seconds = seconds_since(t0);
    v.check(steps.size() == 2, [&] { return std::to_string(steps.size()) + " merge steps"; });
    if (steps.size() == 2) {
        v.check(isomorphic(steps[0], fixtures::fig2_a1()), [] { return "first step differs from A1"; });
        v.check(isomorphic(steps[1], fixtures::fig2_a2()), [] { return "second step differs from A2"; });
    }
    v.check(isomorphic(a, fixtures::fig2_a2()), [] { return "result differs from A2"; });
    v.check(isomorphic(universal_token_dfa({U'a', U'b'}), u), [] { return "start automaton differs"; });
    v.check(v.seconds < 1.0, [&] { return "took " + std::to_string(v.seconds) + "s"; });
    return v;
}

Verdict criterion_4_family(Verdict v)
{
    for (std::size_t k = 1; k <= 6; ++k) {
        const TokenDfa a = build_token_dfa(universal, fixtures::fig5_dictionary(k));
        v.check(a.num_states() == k + 1, [&] {
            return "doubling family k=" + std::to_string(k) + ": " + std::to_string(a.num_states()) + " states";
        });
    }
    return v;
}

Verdict criterion_7_fixtures(Verdict v)
{
    for (const auto& [name, a] : {std::pair<std::string, TokenDfa>{"{a|b|c, a|bc}", fixtures::fig1()},
                                  std::pair<std::string, TokenDfa>{"{a*, a|aa}", fixtures::fig3()}}) {
        const auto w = find_context_invariance_violation(a);
        v.check(w.has_value(), [&] { return name + " reported context-invariant"; });
        if (w) {
            v.check(valid_witness(a, *w), [&] { return name + " witness is not a pair of runs on one string"; });
        }
    }
    return v;
}

Verdict criterion_8_fixture(Verdict v)
{
    const SubsequentialTransducer t = determinize(build_transducer(fixtures::fig2_a1()));
    const SubsequentialTransducer& want = fixtures::fig6b();
    auto outputs = [](const SubsequentialTransducer& m, std::span<const TokenId> ids) {
        Tokenization out;
        for (TokenId id : ids) {
            out.push_back(m.token(id));
        }
        return out;
    };
    v.check(t.num_states() == 2, [&] { return std::to_string(t.num_states()) + " states after determinization"; });
    const StateId q0 = t.initial();
    const auto qa = t.step(q0, U'a');
    v.check(qa.has_value() && qa->to != q0 && qa->output.empty(), [] { return "a-step from q0 is not q0 -a|eps-> q1"; });
    if (!qa) {
        return v;
    }
    const StateId q1 = qa->to;
    const std::map<StateId, StateId> rename{{q0, want.initial()}, {q1, want.step(want.initial(), U'a')->to}};
    for (StateId q : {q0, q1}) {
        const auto& f = t.final_output(q);
        const auto& g = want.final_output(rename.at(q));
        v.check(f && g && outputs(t, *f) == outputs(want, *g), [&] { return "final output of q" + std::to_string(q) + " differs"; });
        for (Symbol s : {U'a', U'b'}) {
            const auto x = t.step(q, s);
            const auto y = want.step(rename.at(q), s);
            v.check(x && y && rename.at(x->to) == y->to && outputs(t, x->output) == outputs(want, y->output),
                    [&] { return "transition from q" + std::to_string(q) + " on " + utf8::encode(Text(1, s)) + " differs"; });
        }
    }
    const auto& f1 = t.final_output(q1);
    v.check(f1 && outputs(t, *f1) == make_tokenization({"a"}), [] { return "F(q1) is not a"; });
    return v;
}

// Least-squares fit y = a + b x; returns (b, r^2).
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double a = (sy - b * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fit = a + b * x[i];
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - sy / n) * (y[i] - sy / n);
    }
    return {b, ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot};
}

class Scratch {
public:
    Scratch()
    {
        path_ = fs::temp_directory_path() / ("tokautoma_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(path_);
    }
    ~Scratch() { fs::remove_all(path_); }

    std::string write(const std::string& name, const std::string& content) const
    {
        const std::string p = (path_ / name).string();
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    fs::path path_;
};

std::string sigma_chars(const Alphabet& sigma) { return utf8::encode(Text(sigma.begin(), sigma.end())); }

Verdict criterion_10(const Scratch& scratch, std::string& detail)
{
    Verdict v;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(corpus_seed + 10);
    oracle::RandomDictionaryParams params{4, 4, 50, 50, 8};
    const Dictionary d = oracle::random_proper_dictionary(rng, params);

    cli::TokenizeArgs args;
    args.dict = scratch.write("linear.txt", serialize_dictionary(d));
    args.sigma = sigma_chars(d.sigma());
    const cli::TokenizeSession session(args);

    const std::vector<Symbol> symbols(d.sigma().begin(), d.sigma().end());
    std::vector<double> sizes;
    std::vector<double> times;
    for (std::size_t n : {std::size_t{10000}, std::size_t{100000}, std::size_t{1000000}}) {
        std::string input;
        for (std::size_t i = 0; i < n; ++i) {
            input.push_back(static_cast<char>(symbols[rng() % symbols.size()]));
            if (i % 1000 == 999) {
                input.push_back('\n');
            }
        }
        const std::size_t reps = std::max<std::size_t>(5, 3000000 / n);
        double best = 1e30;
        for (std::size_t r = 0; r <= reps; ++r) {
            std::istringstream in(input);
            std::ostringstream out;
            const auto start = Clock::now();
            session.run(in, out);
            const double s = seconds_since(start);
            if (r > 0) {
                best = std::min(best, s);
            }
        }
        sizes.push_back(static_cast<double>(n));
        times.push_back(best);
    }
    const auto [slope, r2] = linear_fit(sizes, times);
    const double small = times.front() / sizes.front();
    const double large = times.back() / sizes.back();
    const double ratio = std::max(small, large) / std::min(small, large);
    v.check(r2 >= 0.98, [&] { return "R^2 = " + std::to_string(r2); });
    v.check(ratio <= 2.0, [&] { return "per-symbol cost ratio " + std::to_string(ratio); });
    char buf[256];
    std::snprintf(buf, sizeof buf, "|D|=%zu, times %.2e/%.2e/%.2e s, %.1f ns/symbol, R^2=%.4f, ratio %.2f", d.size(),
                  times[0], times[1], times[2], slope * 1e9, r2, ratio);
    detail = buf;
    v.seconds = seconds_since(t0);
    return v;
}

Verdict criterion_11(std::string& detail)
{
    Verdict v;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(corpus_seed + 11);
    std::vector<double> xs;
    std::vector<double> ys;
    std::string per_size;
    for (std::size_t size : {std::size_t{4}, std::size_t{8}, std::size_t{16}, std::size_t{32}}) {
        oracle::RandomDictionaryParams params{4, 4, size, size, 6};
        std::vector<Dictionary> dicts;
        for (int i = 0; i < 20; ++i) {
            dicts.push_back(oracle::random_proper_dictionary(rng, params));
            v.check(dicts.back().size() == size, [&] { return "generator produced " + std::to_string(dicts.back().size()) + " rules"; });
        }
        double best = 1e30;
        for (int rep = 0; rep < 5; ++rep) {
            std::size_t rounds = 0;
            const auto start = Clock::now();
            double elapsed = 0;
            do {
                for (const Dictionary& d : dicts) {
                    const TokenDfa a = build_token_dfa(universal, d);
                    if (a.num_states() == 0) {
                        std::abort();
                    }
                }
                ++rounds;
                elapsed = seconds_since(start);
            } while (elapsed < 0.05);
            best = std::min(best, elapsed / static_cast<double>(rounds * dicts.size()));
        }
        xs.push_back(std::log(static_cast<double>(size)));
        ys.push_back(std::log(best));
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s|D|=%zu %.1fus", per_size.empty() ? "" : ", ", size, best * 1e6);
        per_size += buf;
    }
    const double slope = linear_fit(xs, ys).first;
    v.check(slope <= 2.3, [&] { return "log-log slope " + std::to_string(slope); });
    char buf[64];
    std::snprintf(buf, sizeof buf, "; slope %.2f", slope);
    detail = per_size + buf;
    v.seconds = seconds_since(t0);
    return v;
}

Dictionary rename_symbols(const Dictionary& d, const std::map<Symbol, Symbol>& to)
{
    auto map_token = [&](const Token& t) {
        Text s = t.text();
        for (Symbol& c : s) {
            c = to.at(c);
        }
        return Token(s);
    };
    std::vector<std::pair<Token, Token>> rules;
    for (const auto& r : d.rules()) {
        rules.emplace_back(map_token(r.left), map_token(r.right));
    }
    Alphabet sigma;
    for (Symbol s : d.sigma()) {
        sigma.insert(to.at(s));
    }
    return Dictionary(std::move(rules), sigma);
}

std::vector<std::pair<Token, Token>> rules_of(const Dictionary& d)
{
    std::vector<std::pair<Token, Token>> out;
    for (const auto& r : d.rules()) {
        out.emplace_back(r.left, r.right);
    }
    return out;
}

Verdict criterion_12(const Scratch& scratch, std::string& detail)
{
    Verdict v;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(corpus_seed + 12);
    struct Pair {
        Dictionary first;
        Dictionary second;
        bool engineered;
    };
    std::vector<Pair> pairs;

    // Interleavings of two dictionaries over disjoint symbols, with one adjacent
    // cross pair swapped.
    while (pairs.size() < 30) {
        const Dictionary x = oracle::random_proper_dictionary(rng, {2, 2, 1, 4, 6});
        const Dictionary y = rename_symbols(oracle::random_proper_dictionary(rng, {2, 2, 1, 4, 6}), {{U'a', U'c'}, {U'b', U'd'}});
        std::vector<std::pair<Token, Token>> merged;
        std::vector<int> side;
        std::size_t i = 0;
        std::size_t j = 0;
        const auto xr = rules_of(x);
        const auto yr = rules_of(y);
        while (i < xr.size() || j < yr.size()) {
            if (j == yr.size() || (i < xr.size() && rng() % 2 == 0)) {
                merged.push_back(xr[i++]);
                side.push_back(0);
            } else {
                merged.push_back(yr[j++]);
                side.push_back(1);
            }
        }
        std::vector<std::size_t> cross;
        for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
            if (side[k] != side[k + 1]) {
                cross.push_back(k);
            }
        }
        const std::size_t k = cross[rng() % cross.size()];
        auto swapped = merged;
        std::swap(swapped[k], swapped[k + 1]);
        const Alphabet sigma{U'a', U'b', U'c', U'd'};
        pairs.push_back({Dictionary(merged, sigma), Dictionary(swapped, sigma), true});
    }

    // Random pairs: reordered, truncated, extended or unrelated dictionaries.
    while (pairs.size() < 130) {
        const Dictionary d = oracle::random_proper_dictionary(rng, {2, 3, 2, 6, 6});
        auto rules = rules_of(d);
        switch (rng() % 4) {
        case 0: {
            const std::size_t k = rng() % (rules.size() - 1);
            std::swap(rules[k], rules[k + 1]);
            const Dictionary e(rules, d.sigma());
            if (is_proper(e)) {
                pairs.push_back({d, e, false});
            }
            break;
        }
        case 1:
            rules.pop_back();
            pairs.push_back({d, Dictionary(rules, d.sigma()), false});
            break;
        case 2: {
            std::vector<Token> gamma = d.gamma();
            const Token u = gamma[rng() % gamma.size()];
            const Token w = gamma[rng() % gamma.size()];
            if ((u + w).size() <= 6 && std::find(gamma.begin(), gamma.end(), u + w) == gamma.end()) {
                rules.emplace_back(u, w);
                pairs.push_back({d, Dictionary(rules, d.sigma()), false});
            }
            break;
        }
        default: {
            std::mt19937_64 other(rng());
            Dictionary e = oracle::random_proper_dictionary(other, {2, 3, 2, 6, 6});
            pairs.push_back({d, e, false});
            break;
        }
        }
    }

    std::size_t equivalent_count = 0;
    std::size_t engineered_equivalent = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& [d1, d2, engineered] = pairs[p];
        Alphabet sigma = d1.sigma();
        sigma.insert(d2.sigma().begin(), d2.sigma().end());
        const Dictionary e1 = d1.with_extra_symbols(sigma);
        const Dictionary e2 = d2.with_extra_symbols(sigma);

        cli::EquivArgs args;
        args.dict = scratch.write("equiv_a.txt", serialize_dictionary(e1));
        args.dict2 = scratch.write("equiv_b.txt", serialize_dictionary(e2));
        args.sigma = sigma_chars(sigma);
        args.json = true;
        std::istringstream in;
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::cmd_equiv(args, cli::Streams{in, out, err});

        const BpeTokenizer t1(e1);
        const BpeTokenizer t2(e2);
        std::optional<Text> differs;
        for (const Text& w : StringSpace(sigma, max_len).strings) {
            if (t1.tokenize(w) != t2.tokenize(w)) {
                differs = w;
                break;
            }
        }
        const std::string which = "pair #" + std::to_string(p) + (engineered ? " (reordered independent rules)" : "");
        v.check(code == cli::exit_ok || code == cli::exit_data, [&] { return which + ": exit " + std::to_string(code) + " " + err.str(); });
        const bool says_equivalent = code == cli::exit_ok;
        v.check(says_equivalent == !differs.has_value(), [&] {
            return which + ": equiv says " + (says_equivalent ? "equivalent" : "inequivalent") + ", enumeration "
                + (differs ? "differs on " + show(*differs) : std::string("finds no difference"));
        });
        if (code == cli::exit_data) {
            const auto doc = nlohmann::json::parse(out.str());
            const Text w = utf8::decode(doc["witness"].get<std::string>());
            v.check(t1.tokenize(w) != t2.tokenize(w), [&] { return which + ": witness " + show(w) + " does not distinguish"; });
        }
        if (engineered) {
            v.check(says_equivalent, [&] { return which + ": reordering independent rules changed the function"; });
        }
        equivalent_count += says_equivalent ? 1 : 0;
        engineered_equivalent += (engineered && says_equivalent) ? 1 : 0;
    }
    detail = std::to_string(pairs.size()) + " pairs (30 reordered independent), " + std::to_string(equivalent_count)
        + " equivalent, " + std::to_string(engineered_equivalent) + "/30 reordered equivalent";
    v.seconds = seconds_since(t0);
    return v;
}

} // namespace

int main()
{
    std::printf("acceptance suite: corpus of %zu random proper dictionaries (seed %llu), strings up to length %zu\n",
                corpus_size, static_cast<unsigned long long>(corpus_seed), max_len);
    std::fflush(stdout);
    const Scratch scratch;
    bool all = true;
    auto record = [&](int id, const std::string& title, const Verdict& v, const std::string& detail) {
        report(id, title, v, detail);
        all = all && v.pass;
    };
    auto guarded = [&](int id, const std::string& title, const std::function<Verdict(std::string&)>& body) {
        std::string detail;
        Verdict v;
        try {
            v = body(detail);
        } catch (const std::exception& e) {
            v.pass = false;
            v.first_failure = std::string("exception: ") + e.what();
            ++v.failures;
        }
        record(id, title, v, detail);
    };

    guarded(1, "construction example yields A1 then A2", [](std::string& detail) {
        detail = "isomorphism after each merge";
        return criterion_1();
    });

    CorpusVerdicts c;
    Counters n;
    try {
        run_corpus(c, n);
    } catch (const std::exception& e) {
        for (Verdict* v : {&c.c2, &c.c3, &c.c4, &c.c5, &c.c6, &c.c7, &c.c8, &c.c9, &c.c13}) {
            v->pass = false;
            ++v->failures;
            v->first_failure = std::string("exception: ") + e.what();
        }
    }
    c.c2.check(c.c2.seconds < 60.0, [&] { return "took " + std::to_string(c.c2.seconds) + "s"; });
    const std::string corpus = std::to_string(n.dictionaries) + " dictionaries, " + std::to_string(n.strings) + " strings";
    record(2, "automaton language equals reference tokenizations", c.c2, corpus + ", " + std::to_string(n.merges) + " merges");
    record(3, "HuggingFace and SentencePiece semantics coincide", c.c3, corpus);
    record(4, "state count within |Q0| + |D| dloc(A0,1)", criterion_4_family(c.c4),
           "bound met with equality by " + std::to_string(n.tight) + "/" + std::to_string(n.dictionaries)
               + " dictionaries; doubling family k=1..6");
    record(5, "merges preserve locality degrees", c.c5, std::to_string(n.merges) + " merges, k = 1..3");
    record(6, "per-merge state and image-set identities", c.c6, std::to_string(n.merges) + " merges");
    record(7, "context-invariance after every merge", criterion_7_fixtures(c.c7),
           std::to_string(n.merges) + " merges; two non-invariant fixtures with witnesses");
    record(8, "subsequential tokenizer equals the reference", criterion_8_fixture(c.c8), corpus + "; two-state example machine");
    record(9, "bounded variation", c.c9, std::to_string(n.pairs) + " pairs");

    guarded(10, "linear-time tokenization", [&](std::string& detail) { return criterion_10(scratch, detail); });
    guarded(11, "build time scaling in |D|", [](std::string& detail) { return criterion_11(detail); });
    guarded(12, "dictionary equivalence matches enumeration", [&](std::string& detail) { return criterion_12(scratch, detail); });

    record(13, "window validation agrees with acceptance", c.c13,
           std::to_string(n.streams_valid) + " valid and " + std::to_string(n.streams_mutated) + " mutated streams ("
               + std::to_string(n.mutated_accepted) + " mutations still valid)");

    std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
    return all ? 0 : 1;
}
