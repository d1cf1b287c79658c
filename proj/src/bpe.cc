#include "tokautoma/bpe.hh"

#include <limits>
#include <map>

namespace tokautoma {

BpeTokenizer::BpeTokenizer(Dictionary dictionary) : dictionary_(std::move(dictionary))
{
    require_proper(dictionary_);
    gamma_ = dictionary_.gamma();
    std::map<Text, std::uint32_t> ids;
    for (std::uint32_t i = 0; i < gamma_.size(); ++i) {
        ids.emplace(gamma_[i].text(), i);
        if (gamma_[i].size() == 1) {
            symbol_ids_.emplace(gamma_[i].text()[0], i);
        }
    }
    for (const MergeRule& r : dictionary_.rules()) {
        rules_.push_back({ids.at(r.left.text()), ids.at(r.right.text()), ids.at(r.left.text() + r.right.text())});
    }
}

std::vector<std::uint32_t> BpeTokenizer::tokenize_ids(std::u32string_view w) const
{
    std::vector<std::uint32_t> seq;
    seq.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto it = symbol_ids_.find(w[i]);
        if (it == symbol_ids_.end()) {
            require_in_alphabet(w, dictionary_.sigma());
            throw AlphabetError("symbol outside the base alphabet", i);
        }
        seq.push_back(it->second);
    }
    for (const CompiledRule& rule : rules_) {
        if (seq.size() < 2) {
            break;
        }
        std::size_t out = 0;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (out > 0 && seq[out - 1] == rule.left && seq[i] == rule.right) {
                seq[out - 1] = rule.merged;
            } else {
                seq[out++] = seq[i];
            }
        }
        seq.resize(out);
    }
    return seq;
}

Tokenization BpeTokenizer::tokenize(std::u32string_view w) const
{
    Tokenization out;
    for (std::uint32_t id : tokenize_ids(w)) {
        out.push_back(gamma_[id]);
    }
    return out;
}

Tokenization tokenize_hf(const Dictionary& d, std::u32string_view w) { return BpeTokenizer(d).tokenize(w); }

Tokenization tokenize_sp(const Dictionary& d, std::u32string_view w)
{
    require_proper(d);
    Tokenization tau = base_tokenization(w, d.sigma());
    std::map<std::pair<Text, Text>, std::size_t> rank;
    for (const MergeRule& r : d.rules()) {
        rank.emplace(std::make_pair(r.left.text(), r.right.text()), r.priority);
    }
    for (;;) {
        std::size_t best_rank = std::numeric_limits<std::size_t>::max();
        std::size_t best_pos = 0;
        for (std::size_t i = 0; i + 1 < tau.size(); ++i) {
            auto it = rank.find({tau[i].text(), tau[i + 1].text()});
            if (it != rank.end() && it->second < best_rank) {
                best_rank = it->second;
                best_pos = i;
            }
        }
        if (best_rank == std::numeric_limits<std::size_t>::max()) {
            return tau;
        }
        tau[best_pos] = tau[best_pos] + tau[best_pos + 1];
        tau.erase(tau.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
    }
}

namespace reference {

Tokenization tokenize_hf(const Dictionary& d, std::u32string_view w)
{
    require_proper(d);
    Tokenization tau = base_tokenization(w, d.sigma());
    for (const MergeRule& rule : d.rules()) {
        for (;;) {
            std::size_t phi = tau.size();
            for (std::size_t i = 0; i + 1 < tau.size(); ++i) {
                if (tau[i] == rule.left && tau[i + 1] == rule.right) {
                    phi = i;
                    break;
                }
            }
            if (phi == tau.size()) {
                break;
            }
            Tokenization next(tau.begin(), tau.begin() + static_cast<std::ptrdiff_t>(phi));
            next.push_back(rule.merged());
            next.insert(next.end(), tau.begin() + static_cast<std::ptrdiff_t>(phi) + 2, tau.end());
            tau = std::move(next);
        }
    }
    return tau;
}

} // namespace reference

namespace {

void enumerate(std::span<const Token> gamma, std::u32string_view w, std::size_t pos, Tokenization& prefix,
               const std::function<void(std::span<const Token>)>& visit)
{
    if (pos == w.size()) {
        visit(prefix);
        return;
    }
    for (const Token& t : gamma) {
        if (t.size() <= w.size() - pos && w.compare(pos, t.size(), t.text()) == 0) {
            prefix.push_back(t);
            enumerate(gamma, w, pos + t.size(), prefix, visit);
            prefix.pop_back();
        }
    }
}

} // namespace

void for_each_tokenization(std::span<const Token> gamma, std::u32string_view w,
                           const std::function<void(std::span<const Token>)>& visit)
{
    // Deduplicate gamma so each tokenization is visited exactly once.
    std::set<Token> unique(gamma.begin(), gamma.end());
    std::vector<Token> tokens(unique.begin(), unique.end());
    Tokenization prefix;
    enumerate(tokens, w, 0, prefix, visit);
}

std::set<Tokenization> all_tokenizations(std::span<const Token> gamma, std::u32string_view w)
{
    std::set<Tokenization> out;
    for_each_tokenization(gamma, w, [&](std::span<const Token> t) { out.emplace(t.begin(), t.end()); });
    return out;
}

} // namespace tokautoma
