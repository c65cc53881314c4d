#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "code.hpp"
#include "corpus.hpp"
#include "errors.hpp"
#include "query.hpp"
#include "stacktrace.hpp"
#include "text.hpp"

namespace exsearch {

// All fusion weights. The four grouped pairs each sum to one; the final
// fusion weights are deliberately unnormalized (defaults sum to 1.5).
struct ranking_weights {
    double alpha = 0.5;  // title similarity
    double beta = 0.3;   // trace/snippet token similarity
    double gamma = 0.2;  // discussion similarity

    double delta = 0.5;  // structural trace similarity
    double sigma = 0.5;  // lexical trace similarity

    double w_st = 0.6;  // stack trace matching
    double w_cc = 0.4;  // code context matching

    double w_so = 0.7;  // vote score
    double w_sr = 0.3;  // traffic rank score

    double w_cnt = 0.35;
    double w_cxt = 0.85;
    double w_pop = 0.20;
    double w_sec = 0.10;

    double max_final() const { return w_cnt + w_cxt + w_pop + w_sec; }

    void validate() const {
        constexpr double tol = 1e-9;
        const auto check_pair = [](double sum, const char* what) {
            if (std::abs(sum - 1.0) > tol)
                throw validation_error(std::string(what) + " weights must sum to 1");
        };
        for (double w : {alpha, beta, gamma, delta, sigma, w_st, w_cc, w_so, w_sr, w_cnt, w_cxt, w_pop, w_sec})
            if (w < 0.0) throw validation_error("weights must be non-negative");
        check_pair(alpha + beta + gamma, "content");
        check_pair(delta + sigma, "trace match");
        check_pair(w_st + w_cc, "context relevance");
        check_pair(w_so + w_sr, "popularity");
    }
};

struct scored_result {
    std::size_t page_index = 0;
    std::string url;
    std::string title;
    double s_cms = 0.0;
    double s_stm = 0.0;
    double s_ccx = 0.0;
    double r_cxt = 0.0;
    double s_pop = 0.0;
    double s_sec = 0.0;
    double s_final = 0.0;
    int rank = 0;
};

namespace detail {

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// Partial-match tiers between two method call references.
inline double frame_confidence(const stack_frame& query, const stack_frame& candidate) {
    if (query.method_name != candidate.method_name) return 0.0;
    if (query.class_name != candidate.class_name) return 0.5;
    if (query.package_name != candidate.package_name) return 0.75;
    return 1.0;
}

inline token_bag page_context_tokens(const page_content& page) {
    token_bag bag;
    for (const auto& trace : page.traces) bag.merge(trace_tokens(trace));
    for (const auto& snippet : page.snippets)
        for (const auto& token : snippet.tokens) bag.add(token);
    return bag;
}

}  // namespace detail

// Weighted cosine relevance of the query message against title, extracted
// trace/snippet tokens, and discussion text.
inline double content_score(const token_bag& message, const page_content& page, const ranking_weights& w) {
    const double s_tts = cosine(message, normalize(page.title, normalize_mode::prose));
    const double s_tcx = cosine(message, detail::page_context_tokens(page));
    const double s_tds = cosine(message, normalize(page.discussion, normalize_mode::prose));
    return detail::clamp01(w.alpha * s_tts + w.beta * s_tcx + w.gamma * s_tds);
}

inline double content_score(std::string_view query_message, const page_content& page, const ranking_weights& w) {
    return content_score(normalize(query_message, normalize_mode::prose), page, w);
}

// Positional structural similarity: every query reference is matched
// against the best unused candidate reference, weighted by its degree of
// interest, and averaged over the query trace length.
inline double structural_trace_score(const stack_trace& query, const stack_trace& candidate) {
    const std::size_t n = query.frame_count();
    if (n == 0 || candidate.frames.empty()) return 0.0;
    std::vector<bool> used(candidate.frames.size(), false);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = 0.0;
        std::size_t best_index = candidate.frames.size();
        for (std::size_t j = 0; j < candidate.frames.size(); ++j) {
            if (used[j]) continue;
            const double c = detail::frame_confidence(query.frames[i], candidate.frames[j]);
            if (c > best) {
                best = c;
                best_index = j;
                if (best == 1.0) break;
            }
        }
        if (best_index < candidate.frames.size()) used[best_index] = true;
        sum += degree_of_interest(query, i + 1) * best;
    }
    return detail::clamp01(sum / static_cast<double>(n));
}

// Weighted structural + lexical trace relevance, maximized over every
// candidate trace on the page; zero when the page carries no trace.
inline double trace_match_score(const stack_trace& query, const page_content& page, const ranking_weights& w) {
    if (page.traces.empty()) return 0.0;
    const token_bag query_tokens = trace_tokens(query);
    double best = 0.0;
    for (const auto& candidate : page.traces) {
        const double s_stc = structural_trace_score(query, candidate);
        const double s_lex = cosine(query_tokens, trace_tokens(candidate));
        best = std::max(best, w.delta * s_stc + w.sigma * s_lex);
    }
    return detail::clamp01(best);
}

// Context relevance. Without context code the trace score carries the full
// weight so the result stays in [0,1].
inline double context_relevance(double s_stm, double s_ccx, bool has_context_code, const ranking_weights& w) {
    if (!has_context_code) return detail::clamp01(s_stm);
    return detail::clamp01(w.w_st * s_stm + w.w_cc * s_ccx);
}

inline double popularity(double s_so, double s_str, const ranking_weights& w) {
    return detail::clamp01(w.w_so * s_so + w.w_sr * s_str);
}

inline double final_score(double r_cnt, double r_cxt, double s_pop, double s_sec, const ranking_weights& w) {
    return w.w_cnt * r_cnt + w.w_cxt * r_cxt + w.w_pop * s_pop + w.w_sec * s_sec;
}

// Scores every page, fuses the four aspects and sorts descending. Ties
// break toward higher provider confidence, then ascending canonical URL,
// which keeps the ordering independent of corpus page order.
inline std::vector<scored_result> rank(const corpus& c, const exception_query& query,
                                       const ranking_weights& w, int top_k) {
    if (c.pages.empty()) throw empty_corpus("cannot rank an empty corpus");
    if (top_k < 1) throw validation_error("top_k must be at least 1");
    w.validate();

    const token_bag message = normalize(query.filtered_message, normalize_mode::prose);
    code_token_seq query_code;
    const bool has_code = query.context_code.has_value() && !query.context_code->empty();
    if (has_code) query_code = tokenize_code(*query.context_code);

    std::vector<scored_result> scored;
    scored.reserve(c.pages.size());
    for (std::size_t i = 0; i < c.pages.size(); ++i) {
        const result_page& page = c.pages[i];
        scored_result r;
        r.page_index = i;
        r.url = page.canonical_url;
        r.title = page.content.title;
        r.s_cms = content_score(message, page.content, w);
        r.s_stm = trace_match_score(query.trace, page.content, w);
        if (has_code)
            for (const auto& snippet : page.content.snippets)
                r.s_ccx = std::max(r.s_ccx, context_similarity(query_code, snippet));
        r.r_cxt = context_relevance(r.s_stm, r.s_ccx, has_code, w);
        r.s_pop = popularity(page.so_vote_score, page.traffic_score, w);
        r.s_sec = page.confidence;
        r.s_final = final_score(r.s_cms, r.r_cxt, r.s_pop, r.s_sec, w);
        scored.push_back(std::move(r));
    }

    std::sort(scored.begin(), scored.end(), [](const scored_result& a, const scored_result& b) {
        if (a.s_final != b.s_final) return a.s_final > b.s_final;
        if (a.s_sec != b.s_sec) return a.s_sec > b.s_sec;
        return a.url < b.url;
    });
    if (scored.size() > static_cast<std::size_t>(top_k)) scored.resize(static_cast<std::size_t>(top_k));
    for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i) + 1;
    return scored;
}

}  // namespace exsearch
