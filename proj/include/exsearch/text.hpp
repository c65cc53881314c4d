#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "porter.hpp"

namespace exsearch {

// Multiset of normalized terms. std::map keeps iteration deterministic,
// which the end-to-end determinism guarantee leans on.
class token_bag {
public:
    using map_type = std::map<std::string, std::uint32_t>;

    void add(std::string_view term, std::uint32_t n = 1) {
        if (term.empty() || n == 0) return;
        for (char c : term)
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return;
        counts_[std::string(term)] += n;
    }

    void merge(const token_bag& other) {
        for (const auto& [term, n] : other.counts_) counts_[term] += n;
    }

    bool empty() const { return counts_.empty(); }
    std::size_t distinct_terms() const { return counts_.size(); }

    std::uint32_t count(std::string_view term) const {
        auto it = counts_.find(std::string(term));
        return it == counts_.end() ? 0 : it->second;
    }

    bool contains(std::string_view term) const { return count(term) > 0; }

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& [term, n] : counts_) t += n;
        return t;
    }

    const map_type& terms() const { return counts_; }

    // Terms repeated by multiplicity, in lexicographic order.
    std::vector<std::string> expand() const {
        std::vector<std::string> out;
        out.reserve(total());
        for (const auto& [term, n] : counts_)
            for (std::uint32_t i = 0; i < n; ++i) out.push_back(term);
        return out;
    }

    bool operator==(const token_bag& other) const { return counts_ == other.counts_; }

private:
    map_type counts_;
};

enum class normalize_mode { prose, identifier };

namespace detail {

// ~130 English function words; fixed so results never drift.
inline constexpr std::string_view stopword_list[] = {
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
    "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
    "between", "both", "but", "by", "can", "cannot", "could", "did", "do", "does",
    "doing", "down", "during", "each", "few", "for", "from", "further", "had",
    "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
    "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself",
    "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of",
    "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out",
    "over", "own", "same", "she", "should", "so", "some", "such", "than", "that",
    "the", "their", "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "through", "to", "too", "under", "until", "up",
    "very", "was", "we", "were", "what", "when", "where", "which", "while", "who",
    "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
    "yourselves",
};

inline bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Non-ASCII bytes count as letters so UTF-8 text survives tokenization.
inline bool is_prose_char(unsigned char c) { return is_ascii_alnum(c) || c >= 0x80; }

inline bool is_identifier_char(unsigned char c) {
    return is_ascii_alnum(c) || c == '_' || c == '$' || c >= 0x80;
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline bool all_lower_alpha(std::string_view s) {
    for (char c : s)
        if (c < 'a' || c > 'z') return false;
    return !s.empty();
}

}  // namespace detail

inline const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = [] {
        std::set<std::string> s;
        for (std::string_view w : detail::stopword_list) s.emplace(w);
        return s;
    }();
    return words;
}

// One lowercase word per line; '#' starts a comment; blank lines ignored.
inline std::set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open stop-word list: " + path);
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string word;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) word.push_back(c);
        if (!word.empty()) words.insert(word);
    }
    return words;
}

// Prose mode: split on non-alphanumerics, lowercase, drop stop words, stem.
// Identifier mode: split on non-identifier characters, keep camel case and
// case intact, drop stop words, no stemming. Stemming runs to a fixed point
// and stems are re-checked against the stop list so that normalizing a
// bag's own terms reproduces the bag.
inline token_bag normalize(std::string_view text, normalize_mode mode,
                           const std::set<std::string>& stopwords = default_stopwords()) {
    token_bag bag;
    const bool prose = mode == normalize_mode::prose;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const auto is_token_char = [&](unsigned char c) {
            return prose ? detail::is_prose_char(c) : detail::is_identifier_char(c);
        };
        while (i < n && !is_token_char(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < n && is_token_char(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) continue;
        std::string_view raw = text.substr(start, i - start);
        if (prose) {
            std::string token = detail::to_lower_ascii(raw);
            if (stopwords.count(token)) continue;
            if (detail::all_lower_alpha(token)) token = porter_stem_fixpoint(std::move(token));
            if (token.empty() || stopwords.count(token)) continue;
            bag.add(token);
        } else {
            if (stopwords.count(std::string(raw))) continue;
            bag.add(raw);
        }
    }
    return bag;
}

// Frequency cosine over the union term set; 0 when either bag is empty.
inline double cosine(const token_bag& a, const token_bag& b) {
    if (a.empty() || b.empty()) return 0.0;
    double dot = 0.0;
    auto ia = a.terms().begin();
    auto ib = b.terms().begin();
    while (ia != a.terms().end() && ib != b.terms().end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += static_cast<double>(ia->second) * static_cast<double>(ib->second);
            ++ia;
            ++ib;
        }
    }
    double norm_a = 0.0;
    for (const auto& [term, n] : a.terms()) norm_a += static_cast<double>(n) * n;
    double norm_b = 0.0;
    for (const auto& [term, n] : b.terms()) norm_b += static_cast<double>(n) * n;
    const double denom = std::sqrt(norm_a) * std::sqrt(norm_b);
    if (denom == 0.0) return 0.0;
    const double score = dot / denom;
    return score < 0.0 ? 0.0 : (score > 1.0 ? 1.0 : score);
}

}  // namespace exsearch
