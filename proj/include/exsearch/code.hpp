#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "text.hpp"

namespace exsearch {

// Ordered lexical tokens from an island lex: identifiers, keywords and
// literal placeholders; punctuation, comments and literal contents dropped.
struct code_token_seq {
    std::vector<std::string> tokens;

    bool empty() const { return tokens.empty(); }
    std::size_t size() const { return tokens.size(); }
    bool operator==(const code_token_seq&) const = default;
};

namespace detail {

inline const std::set<std::string>& java_keywords() {
    static const std::set<std::string> kw = {
        "abstract", "assert",   "boolean",    "break",    "byte",   "case",       "catch",   "char",
        "class",    "const",    "continue",   "default",  "do",     "double",     "else",    "enum",
        "extends",  "final",    "finally",    "float",    "for",    "goto",       "if",      "implements",
        "import",   "instanceof", "int",      "interface", "long",  "native",     "new",     "package",
        "private",  "protected", "public",    "return",   "short",  "static",     "strictfp", "super",
        "switch",   "synchronized", "this",   "throw",    "throws", "transient",  "try",     "void",
        "volatile", "while",    "var",        "record",   "yield",  "sealed",     "permits",
    };
    return kw;
}

constexpr std::size_t max_lcs_tokens = 5000;

}  // namespace detail

// Island lexer for possibly uncompilable code. Numeric literals become
// `NUM`, string and character literals become `STR`; camel case is kept.
inline code_token_seq tokenize_code(std::string_view code) {
    code_token_seq seq;
    std::size_t i = 0;
    const std::size_t n = code.size();
    while (i < n) {
        const char c = code[i];
        if (c == '/' && i + 1 < n && code[i + 1] == '/') {
            while (i < n && code[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && code[i + 1] == '*') {
            i += 2;
            while (i + 1 < n && !(code[i] == '*' && code[i + 1] == '/')) ++i;
            i = i + 1 < n ? i + 2 : n;
            continue;
        }
        if (c == '"' || c == '\'') {
            const char quote = c;
            ++i;
            while (i < n && code[i] != quote) {
                if (code[i] == '\\' && i + 1 < n) ++i;
                ++i;
            }
            if (i < n) ++i;
            seq.tokens.emplace_back("STR");
            continue;
        }
        if (c >= '0' && c <= '9') {
            // hex/binary/underscored/suffixed numeric forms lex as one token
            while (i < n && (detail::is_ascii_alnum(static_cast<unsigned char>(code[i])) || code[i] == '_' ||
                             code[i] == '.' ||
                             ((code[i] == '+' || code[i] == '-') && i > 0 &&
                              (code[i - 1] == 'e' || code[i - 1] == 'E'))))
                ++i;
            seq.tokens.emplace_back("NUM");
            continue;
        }
        if (detail::is_identifier_char(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < n && detail::is_identifier_char(static_cast<unsigned char>(code[i]))) ++i;
            seq.tokens.emplace_back(code.substr(start, i - start));
            continue;
        }
        ++i;
    }
    return seq;
}

namespace detail {

inline std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::size_t na = std::min(a.size(), max_lcs_tokens);
    const std::size_t nb = std::min(b.size(), max_lcs_tokens);
    if (na == 0 || nb == 0) return 0;
    // two-row dynamic program
    std::vector<std::size_t> prev(nb + 1, 0), cur(nb + 1, 0);
    for (std::size_t i = 1; i <= na; ++i) {
        for (std::size_t j = 1; j <= nb; ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[nb];
}

}  // namespace detail

// |LCS(query, candidate)| / |query|. The denominator is the query context,
// so the score reads as coverage of the developer's own code.
inline double context_similarity(const code_token_seq& query, const code_token_seq& candidate) {
    const std::size_t denom = std::min(query.size(), detail::max_lcs_tokens);
    if (denom == 0) return 0.0;
    const double score = static_cast<double>(detail::lcs_length(query.tokens, candidate.tokens)) /
                         static_cast<double>(denom);
    return score > 1.0 ? 1.0 : score;
}

// Method-call names, imported class names and declared type names ranked by
// frequency; ties resolved by first occurrence. Java keywords excluded.
inline std::vector<std::string> frequent_identifiers(std::string_view code, std::size_t k) {
    struct entry {
        std::uint32_t count = 0;
        std::size_t first_seen = 0;
    };
    std::map<std::string, entry> counts;
    std::size_t order = 0;
    const auto& keywords = detail::java_keywords();

    const auto note = [&](std::string_view name) {
        if (name.empty() || keywords.count(std::string(name))) return;
        if (name[0] >= '0' && name[0] <= '9') return;
        auto [it, inserted] = counts.try_emplace(std::string(name));
        if (inserted) it->second.first_seen = order++;
        ++it->second.count;
    };

    std::size_t i = 0;
    const std::size_t n = code.size();
    const auto skip_spaces = [&](std::size_t p) {
        while (p < n && (code[p] == ' ' || code[p] == '\t')) ++p;
        return p;
    };
    while (i < n) {
        if (code[i] == '/' && i + 1 < n && (code[i + 1] == '/' || code[i + 1] == '*')) {
            if (code[i + 1] == '/') {
                while (i < n && code[i] != '\n') ++i;
            } else {
                i += 2;
                while (i + 1 < n && !(code[i] == '*' && code[i + 1] == '/')) ++i;
                i = i + 1 < n ? i + 2 : n;
            }
            continue;
        }
        if (code[i] == '"' || code[i] == '\'') {
            const char quote = code[i];
            ++i;
            while (i < n && code[i] != quote) {
                if (code[i] == '\\' && i + 1 < n) ++i;
                ++i;
            }
            if (i < n) ++i;
            continue;
        }
        if (!detail::is_identifier_char(static_cast<unsigned char>(code[i]))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < n && detail::is_identifier_char(static_cast<unsigned char>(code[i]))) ++i;
        std::string_view name = code.substr(start, i - start);

        if (name == "import") {
            // last segment of the dotted path; star imports contribute nothing
            std::size_t p = skip_spaces(i);
            if (code.compare(p, 7, "static ") == 0) p = skip_spaces(p + 7);
            std::string_view last;
            while (p < n) {
                if (code[p] == '*') {
                    last = {};
                    ++p;
                } else if (detail::is_identifier_char(static_cast<unsigned char>(code[p]))) {
                    std::size_t seg = p;
                    while (p < n && detail::is_identifier_char(static_cast<unsigned char>(code[p]))) ++p;
                    last = code.substr(seg, p - seg);
                } else {
                    break;
                }
                if (p < n && code[p] == '.')
                    ++p;
                else
                    break;
            }
            note(last);
            i = p;
            continue;
        }

        const std::size_t after = skip_spaces(i);
        if (after < n && code[after] == '(') {
            note(name);  // call site
        } else if (name[0] >= 'A' && name[0] <= 'Z' && after < n &&
                   detail::is_identifier_char(static_cast<unsigned char>(code[after])) &&
                   !(code[after] >= '0' && code[after] <= '9')) {
            note(name);  // declared type: `List l`
        }
    }

    std::vector<std::pair<std::string, entry>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.count != b.second.count) return a.second.count > b.second.count;
        return a.second.first_seen < b.second.first_seen;
    });
    std::vector<std::string> out;
    for (const auto& [name, e] : ranked) {
        if (out.size() >= k) break;
        out.push_back(name);
    }
    return out;
}

}  // namespace exsearch
