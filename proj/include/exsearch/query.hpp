#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "code.hpp"
#include "errors.hpp"
#include "stacktrace.hpp"

namespace exsearch {

enum class search_mode { interactive, proactive };

inline const char* to_string(search_mode m) {
    return m == search_mode::interactive ? "interactive" : "proactive";
}

inline search_mode parse_search_mode(std::string_view s) {
    if (s == "interactive") return search_mode::interactive;
    if (s == "proactive") return search_mode::proactive;
    throw validation_error("unknown mode: " + std::string(s));
}

// The problem statement handed to the pipeline: filtered message, parsed
// trace, optional surrounding code. Interactive queries carry the
// human-written provider query; proactive ones must not.
struct exception_query {
    std::string raw_message;
    std::string filtered_message;
    stack_trace trace;
    std::optional<std::string> context_code;
    search_mode mode = search_mode::proactive;
    std::optional<std::string> user_query;
};

inline exception_query make_exception_query(std::string raw_message, stack_trace trace,
                                            std::optional<std::string> context_code, search_mode mode,
                                            std::optional<std::string> user_query = std::nullopt) {
    if (mode == search_mode::interactive && (!user_query || user_query->empty()))
        throw validation_error("interactive mode requires a user query");
    if (mode == search_mode::proactive && user_query)
        throw validation_error("proactive mode forbids a user query");
    exception_query q;
    q.filtered_message = filter_message(raw_message);
    q.raw_message = std::move(raw_message);
    q.trace = std::move(trace);
    q.context_code = std::move(context_code);
    q.mode = mode;
    q.user_query = std::move(user_query);
    return q;
}

namespace detail {

constexpr std::size_t query_context_term_cap = 16;
constexpr std::size_t query_frame_take = 5;
constexpr std::size_t query_code_take = 5;

}  // namespace detail

// Proactive provider query: the filtered message followed by class and
// method names of the five highest-interest frames and the five most
// frequent identifiers from the context code, deduplicated in first-seen
// order and capped at 16 context terms.
inline std::string formulate(const exception_query& q) {
    if (q.mode != search_mode::proactive)
        throw validation_error("formulate applies to proactive queries only");

    std::vector<std::string> terms;
    std::set<std::string> seen;
    const auto push = [&](const std::string& term) {
        if (term.empty() || terms.size() >= detail::query_context_term_cap) return;
        if (seen.insert(term).second) terms.push_back(term);
    };

    const std::size_t take = std::min(q.trace.frames.size(), detail::query_frame_take);
    for (std::size_t i = 0; i < take; ++i) {
        push(q.trace.frames[i].class_name);
        push(q.trace.frames[i].method_name);
    }
    if (q.context_code)
        for (const auto& ident : frequent_identifiers(*q.context_code, detail::query_code_take))
            push(ident);

    std::string out = q.filtered_message;
    for (const auto& term : terms) {
        if (!out.empty()) out.push_back(' ');
        out.append(term);
    }
    return out;
}

}  // namespace exsearch
