#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "code.hpp"
#include "errors.hpp"
#include "stacktrace.hpp"

namespace exsearch {

// Raw material extracted from one result page. Every captured block is
// classified as exactly one of trace or snippet; discussion is the visible
// text outside scripts, styles and blocks.
struct page_content {
    std::string title;
    std::vector<std::string> code_blocks;
    std::vector<stack_trace> traces;
    std::vector<code_token_seq> snippets;
    std::string discussion;
    std::vector<int> vote_counts;  // per post, document order; empty outside Q&A pages

    bool is_qa_page() const { return !vote_counts.empty(); }
};

enum class block_kind { trace, snippet };

inline block_kind classify_block(std::string_view block) {
    if (auto trace = try_parse_trace(block); trace && !trace->frames.empty()) return block_kind::trace;
    return block_kind::snippet;
}

namespace detail {

inline std::string to_lower_copy(std::string_view s) { return to_lower_ascii(s); }

inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x110000) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes the common named entities plus numeric references.
inline void append_decoded(std::string& out, std::string_view text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c != '&') {
            out.push_back(c);
            ++i;
            continue;
        }
        const auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(c);
            ++i;
            continue;
        }
        const std::string_view name = text.substr(i + 1, semi - i - 1);
        if (name == "amp") {
            out.push_back('&');
        } else if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos" || name == "#39") {
            out.push_back('\'');
        } else if (name == "nbsp") {
            out.push_back(' ');
        } else if (name.size() > 1 && name[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = false;
            if (name[1] == 'x' || name[1] == 'X') {
                auto [p, ec] = std::from_chars(name.data() + 2, name.data() + name.size(), cp, 16);
                ok = ec == std::errc{} && p == name.data() + name.size();
            } else {
                auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), cp, 10);
                ok = ec == std::errc{} && p == name.data() + name.size();
            }
            if (ok)
                append_utf8(out, cp);
            else
                out.append(text.substr(i, semi - i + 1));
        } else {
            out.append(text.substr(i, semi - i + 1));
        }
        i = semi + 1;
    }
}

inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool in_space = true;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(c);
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

inline bool is_all_whitespace(std::string_view s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

struct html_tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::vector<std::pair<std::string, std::string>> attrs;

    std::optional<std::string_view> attr(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return std::string_view(v);
        return std::nullopt;
    }
};

// Parses the tag starting at `pos` (which points at '<'); returns the tag
// and advances pos past '>'. Returns nullopt for text that only looks like
// markup, leaving pos untouched.
inline std::optional<html_tag> parse_tag(std::string_view html, std::size_t& pos) {
    std::size_t i = pos + 1;
    const std::size_t n = html.size();
    html_tag tag;
    if (i < n && html[i] == '/') {
        tag.closing = true;
        ++i;
    }
    std::size_t name_start = i;
    while (i < n && (is_ascii_alnum(static_cast<unsigned char>(html[i])) || html[i] == '-')) ++i;
    if (i == name_start) return std::nullopt;
    tag.name = to_lower_copy(html.substr(name_start, i - name_start));

    // attributes, respecting quoted values
    while (i < n && html[i] != '>') {
        while (i < n && (std::isspace(static_cast<unsigned char>(html[i])) || html[i] == '/')) {
            if (html[i] == '/' && i + 1 < n && html[i + 1] == '>') tag.self_closing = true;
            ++i;
        }
        if (i >= n || html[i] == '>') break;
        std::size_t key_start = i;
        while (i < n && html[i] != '=' && html[i] != '>' && html[i] != '/' &&
               !std::isspace(static_cast<unsigned char>(html[i])))
            ++i;
        std::string key = to_lower_copy(html.substr(key_start, i - key_start));
        std::string value;
        std::size_t j = i;
        while (j < n && std::isspace(static_cast<unsigned char>(html[j]))) ++j;
        if (j < n && html[j] == '=') {
            ++j;
            while (j < n && std::isspace(static_cast<unsigned char>(html[j]))) ++j;
            if (j < n && (html[j] == '"' || html[j] == '\'')) {
                const char quote = html[j];
                ++j;
                std::size_t val_start = j;
                while (j < n && html[j] != quote) ++j;
                value = std::string(html.substr(val_start, j - val_start));
                if (j < n) ++j;
            } else {
                std::size_t val_start = j;
                while (j < n && html[j] != '>' && !std::isspace(static_cast<unsigned char>(html[j]))) ++j;
                value = std::string(html.substr(val_start, j - val_start));
            }
            i = j;
        }
        if (!key.empty()) tag.attrs.emplace_back(std::move(key), std::move(value));
    }
    if (i < n && html[i] == '>') {
        if (i > pos && html[i - 1] == '/') tag.self_closing = true;
        pos = i + 1;
        return tag;
    }
    return std::nullopt;  // unterminated; caller treats '<' as text
}

inline bool is_block_tag(std::string_view name) {
    return name == "code" || name == "pre" || name == "blockquote";
}

inline bool is_break_tag(std::string_view name) {
    return name == "p" || name == "div" || name == "li" || name == "tr" || name == "td" ||
           name == "h1" || name == "h2" || name == "h3" || name == "h4" || name == "br" ||
           name == "ul" || name == "ol" || name == "table" || name == "section" || name == "article";
}

struct html_scan {
    std::string title;
    std::string first_h1;
    std::vector<std::string> blocks;
    std::string discussion;
    std::vector<int> votes;
};

inline std::optional<int> parse_int(std::string_view s) {
    std::size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    std::size_t e = s.size();
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    int value = 0;
    auto [p, ec] = std::from_chars(s.data() + b, s.data() + e, value);
    if (ec != std::errc{} || p != s.data() + e || e == b) return std::nullopt;
    return value;
}

inline html_scan scan_html(std::string_view html) {
    html_scan out;
    std::size_t pos = 0;
    const std::size_t n = html.size();

    int block_depth = 0;
    int title_depth = 0;
    int h1_depth = 0;
    std::string current_block;
    bool merge_armed = false;  // last block can absorb the next sibling block

    std::string vote_text;
    std::string vote_tag;
    int vote_depth = 0;

    const auto lower_find = [&](std::string_view needle, std::size_t from) {
        const std::string lowered_needle(needle);
        for (std::size_t i = from; i + lowered_needle.size() <= n; ++i) {
            bool match = true;
            for (std::size_t j = 0; j < lowered_needle.size(); ++j) {
                char c = html[i + j];
                if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
                if (c != lowered_needle[j]) {
                    match = false;
                    break;
                }
            }
            if (match) return i;
        }
        return std::string_view::npos;
    };

    const auto emit_text = [&](std::string_view raw) {
        if (raw.empty()) return;
        if (block_depth > 0) {
            append_decoded(current_block, raw);
        } else {
            if (title_depth > 0) {
                append_decoded(out.title, raw);
            } else if (h1_depth > 0 && out.first_h1.empty()) {
                append_decoded(out.first_h1, raw);
            }
            if (title_depth == 0) {
                if (merge_armed && !is_all_whitespace(raw)) merge_armed = false;
                append_decoded(out.discussion, raw);
            }
        }
        if (vote_depth > 0) append_decoded(vote_text, raw);
    };

    const auto finish_block = [&] {
        out.blocks.push_back(current_block);
        current_block.clear();
        merge_armed = true;
    };

    while (pos < n) {
        if (html[pos] != '<') {
            const auto next = html.find('<', pos);
            const std::size_t end = next == std::string_view::npos ? n : next;
            emit_text(html.substr(pos, end - pos));
            pos = end;
            continue;
        }
        if (html.compare(pos, 4, "<!--") == 0) {
            const auto end = html.find("-->", pos + 4);
            pos = end == std::string_view::npos ? n : end + 3;
            continue;
        }
        if (pos + 1 < n && (html[pos + 1] == '!' || html[pos + 1] == '?')) {
            const auto end = html.find('>', pos + 1);
            pos = end == std::string_view::npos ? n : end + 1;
            continue;
        }
        std::size_t tag_pos = pos;
        auto tag = parse_tag(html, tag_pos);
        if (!tag) {
            emit_text(html.substr(pos, 1));
            ++pos;
            continue;
        }
        pos = tag_pos;

        if (!tag->closing && (tag->name == "script" || tag->name == "style")) {
            // raw text elements: skip to the matching close tag
            const std::string close = "</" + tag->name;
            const auto end = lower_find(close, pos);
            if (end == std::string_view::npos) break;
            const auto gt = html.find('>', end);
            pos = gt == std::string_view::npos ? n : gt + 1;
            continue;
        }

        if (vote_depth > 0 && tag->name == vote_tag) {
            if (tag->closing) {
                if (--vote_depth == 0) {
                    if (auto v = parse_int(vote_text)) out.votes.push_back(*v);
                    vote_text.clear();
                }
            } else if (!tag->self_closing) {
                ++vote_depth;
            }
        }

        if (!tag->closing) {
            if (auto v = tag->attr("data-vote-count")) {
                if (auto parsed = parse_int(*v)) out.votes.push_back(*parsed);
            } else if (vote_depth == 0) {
                // best-effort live-page markup: a vote-count element whose text is the score
                auto cls = tag->attr("class");
                auto itemprop = tag->attr("itemprop");
                const bool looks_like_votes =
                    (cls && cls->find("vote-count") != std::string_view::npos) ||
                    (itemprop && *itemprop == "upvoteCount");
                if (looks_like_votes && !tag->self_closing) {
                    vote_tag = tag->name;
                    vote_depth = 1;
                    vote_text.clear();
                }
            }
        }

        if (is_block_tag(tag->name)) {
            if (!tag->closing && !tag->self_closing) {
                if (block_depth == 0 && merge_armed && !out.blocks.empty()) {
                    // consecutive sibling blocks separated only by whitespace merge
                    current_block = out.blocks.back();
                    current_block.push_back('\n');
                    out.blocks.pop_back();
                }
                ++block_depth;
            } else if (tag->closing && block_depth > 0) {
                if (--block_depth == 0) finish_block();
            }
            continue;
        }
        if (tag->name == "title") {
            title_depth += tag->closing ? (title_depth > 0 ? -1 : 0) : 1;
            continue;
        }
        if (tag->name == "h1") {
            h1_depth += tag->closing ? (h1_depth > 0 ? -1 : 0) : 1;
            continue;
        }
        if (is_break_tag(tag->name)) {
            if (block_depth > 0)
                current_block.push_back('\n');
            else
                out.discussion.push_back(' ');
        }
    }
    if (block_depth > 0) finish_block();  // unterminated block at EOF
    return out;
}

}  // namespace detail

// Per-post vote integers in document order; empty when no vote markup.
inline std::vector<int> extract_votes(std::string_view html) {
    return detail::scan_html(html).votes;
}

// Title from <title> (fallback: first <h1>); blocks from code/pre/blockquote
// with consecutive siblings merged; discussion is the remaining visible text.
inline page_content extract_content(std::string_view html, std::string_view url) {
    detail::html_scan scan = detail::scan_html(html);
    page_content content;
    content.title = detail::collapse_whitespace(scan.title);
    if (content.title.empty()) content.title = detail::collapse_whitespace(scan.first_h1);
    content.discussion = detail::collapse_whitespace(scan.discussion);
    content.vote_counts = std::move(scan.votes);
    for (auto& block : scan.blocks) {
        if (detail::is_all_whitespace(block)) continue;
        if (classify_block(block) == block_kind::trace)
            content.traces.push_back(*try_parse_trace(block));
        else
            content.snippets.push_back(tokenize_code(block));
        content.code_blocks.push_back(std::move(block));
    }
    if (content.title.empty() && content.code_blocks.empty() && content.discussion.empty())
        throw malformed_document("no textual content recovered from " +
                                 std::string(url.empty() ? "document" : url));
    return content;
}

}  // namespace exsearch
