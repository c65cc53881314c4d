#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "corpus.hpp"
#include "errors.hpp"
#include "eval.hpp"
#include "query.hpp"
#include "scoring.hpp"

namespace exsearch {

struct search_request {
    search_mode mode = search_mode::proactive;
    std::optional<std::string> user_query;
    std::string raw_message;
    std::string stack_trace_text;
    std::optional<std::string> context_code;
    int top_k = 30;
    std::optional<nlohmann::json> weight_overrides;
    std::optional<std::vector<std::string>> providers;
};

struct ranked_entry {
    int rank = 0;
    std::string url;
    std::string title;
    double s_final = 0.0;
    double s_cms = 0.0;
    double s_stm = 0.0;
    double s_ccx = 0.0;
    double r_cxt = 0.0;
    double s_pop = 0.0;
    double s_sec = 0.0;
};

struct search_response {
    std::string mode;
    std::string raw_message;
    std::string filtered_message;
    std::string provider_query;
    std::vector<ranked_entry> results;
    double fetch_ms = 0.0;
    double score_ms = 0.0;
    std::vector<std::string> warnings;
};

inline search_request search_request_from_json(const nlohmann::json& j) {
    search_request req;
    if (!j.is_object()) throw validation_error("request body must be a JSON object");
    req.mode = parse_search_mode(j.value("mode", "proactive"));
    if (j.contains("user_query")) req.user_query = j.at("user_query").get<std::string>();
    req.raw_message = j.value("raw_message", "");
    req.stack_trace_text = j.value("stack_trace", "");
    if (j.contains("context_code")) req.context_code = j.at("context_code").get<std::string>();
    req.top_k = j.value("top_k", 30);
    if (j.contains("weights")) req.weight_overrides = j.at("weights");
    if (j.contains("providers")) req.providers = j.at("providers").get<std::vector<std::string>>();
    return req;
}

inline nlohmann::json search_response_to_json(const search_response& res) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : res.results) {
        results.push_back({
            {"rank", r.rank},
            {"url", r.url},
            {"title", r.title},
            {"s_final", r.s_final},
            {"components",
             {{"s_cms", r.s_cms},
              {"s_stm", r.s_stm},
              {"s_ccx", r.s_ccx},
              {"r_cxt", r.r_cxt},
              {"s_pop", r.s_pop},
              {"s_sec", r.s_sec}}},
        });
    }
    return nlohmann::json{
        {"query", {{"mode", res.mode}, {"raw_message", res.raw_message}, {"filtered_message", res.filtered_message}}},
        {"provider_query", res.provider_query},
        {"results", std::move(results)},
        {"timing", {{"fetch_ms", res.fetch_ms}, {"score_ms", res.score_ms}}},
        {"warnings", res.warnings},
    };
}

// The whole pipeline behind one call: parse the trace, resolve the provider
// query, build and score the corpus, return the top results.
class search_engine {
public:
    search_engine(engine_config config, std::shared_ptr<const search_backend> backend,
                  std::shared_ptr<const rank_source> ranks)
        : config_(std::move(config)), backend_(std::move(backend)), ranks_(std::move(ranks)) {
        config_.weights.validate();
    }

    const engine_config& config() const { return config_; }
    const search_backend& backend() const { return *backend_; }

    search_response run(const search_request& req) const {
        if (req.top_k < 1 || req.top_k > 50) throw validation_error("top_k must be in [1, 50]");
        stack_trace trace;
        try {
            trace = parse_trace(req.stack_trace_text);
        } catch (const no_trace_found& e) {
            throw validation_error(std::string("stack trace not recognized: ") + e.what());
        }
        exception_query query =
            make_exception_query(req.raw_message, std::move(trace), req.context_code, req.mode, req.user_query);

        ranking_weights weights = config_.weights;
        if (req.weight_overrides) detail::weights_from_json(weights, *req.weight_overrides);
        weights.validate();

        const std::vector<std::string>& providers = req.providers ? *req.providers : config_.provider_order;
        const std::string provider_query =
            query.mode == search_mode::interactive ? *query.user_query : formulate(query);

        search_response res;
        res.mode = to_string(query.mode);
        res.raw_message = query.raw_message;
        res.filtered_message = query.filtered_message;
        res.provider_query = provider_query;

        const auto fetch_start = std::chrono::steady_clock::now();
        corpus c;
        try {
            c = build_corpus(provider_query, providers, config_.per_provider_limit, config_.confidences,
                             *backend_);
        } catch (const empty_corpus&) {
            res.fetch_ms = elapsed_ms(fetch_start);
            res.warnings.push_back("no result pages survived for query: " + provider_query);
            return res;
        }
        apply_traffic_scores(c.pages, *ranks_);
        apply_vote_scores(c.pages);
        res.fetch_ms = elapsed_ms(fetch_start);
        res.warnings.insert(res.warnings.end(), c.warnings.begin(), c.warnings.end());

        const auto score_start = std::chrono::steady_clock::now();
        const std::vector<scored_result> ranked = rank(c, query, weights, req.top_k);
        res.score_ms = elapsed_ms(score_start);

        res.results.reserve(ranked.size());
        for (const auto& r : ranked) {
            ranked_entry entry;
            entry.rank = r.rank;
            entry.url = r.url;
            entry.title = r.title;
            entry.s_final = r.s_final;
            entry.s_cms = r.s_cms;
            entry.s_stm = r.s_stm;
            entry.s_ccx = r.s_ccx;
            entry.r_cxt = r.r_cxt;
            entry.s_pop = r.s_pop;
            entry.s_sec = r.s_sec;
            res.results.push_back(std::move(entry));
        }
        return res;
    }

private:
    static double elapsed_ms(std::chrono::steady_clock::time_point start) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }

    engine_config config_;
    std::shared_ptr<const search_backend> backend_;
    std::shared_ptr<const rank_source> ranks_;
};

// ---------------------------------------------------------------------------
// Offline evaluation harness

struct eval_case {
    std::string id;
    std::string message;
    std::string stack_trace_text;
    std::optional<std::string> context_code;
    std::optional<std::string> query;  // interactive provider query, when present
    std::set<std::string> relevant_urls;
};

inline std::vector<eval_case> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open dataset: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("invalid dataset " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw validation_error("dataset must be a JSON array of cases");
    std::vector<eval_case> cases;
    for (const auto& item : doc) {
        eval_case c;
        c.id = item.value("id", "");
        c.message = item.value("message", "");
        c.stack_trace_text = item.value("stack_trace", "");
        if (item.contains("context_code")) c.context_code = item.at("context_code").get<std::string>();
        if (item.contains("query")) c.query = item.at("query").get<std::string>();
        for (const auto& url : item.value("relevant_urls", nlohmann::json::array()))
            c.relevant_urls.insert(canonical_url(url.get<std::string>()));
        if (c.id.empty()) throw validation_error("dataset case without id");
        if (c.relevant_urls.empty()) throw validation_error("dataset case " + c.id + " has no relevant_urls");
        cases.push_back(std::move(c));
    }
    return cases;
}

// Cumulative score-component configurations used by the ablation runs.
enum class score_mask { content_only, content_context, content_context_popularity, full };

inline const char* to_string(score_mask m) {
    switch (m) {
    case score_mask::content_only: return "content";
    case score_mask::content_context: return "content+context";
    case score_mask::content_context_popularity: return "content+context+popularity";
    default: return "content+context+popularity+confidence";
    }
}

inline ranking_weights apply_mask(ranking_weights w, score_mask mask) {
    switch (mask) {
    case score_mask::content_only:
        w.w_cxt = 0.0;
        [[fallthrough]];
    case score_mask::content_context:
        w.w_pop = 0.0;
        [[fallthrough]];
    case score_mask::content_context_popularity:
        w.w_sec = 0.0;
        break;
    case score_mask::full:
        break;
    }
    return w;
}

struct eval_options {
    search_mode mode = search_mode::proactive;
    score_mask mask = score_mask::full;
    bool use_context_code = true;  // false forces w_cc to zero (code-weight ablation)
    int k = 10;
};

// Runs the full pipeline for every dataset case and scores the ranked URLs
// against the ground truth.
inline eval_report run_evaluation(const search_engine& engine, const std::vector<eval_case>& cases,
                                  const eval_options& options) {
    ground_truth truth;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::vector<std::string>>> ranked_cases;
    for (const auto& c : cases) {
        truth.relevant[c.id] = c.relevant_urls;

        search_request req;
        req.mode = options.mode;
        if (options.mode == search_mode::interactive) {
            if (!c.query) throw validation_error("case " + c.id + " has no interactive query");
            req.user_query = c.query;
        }
        req.raw_message = c.message;
        req.stack_trace_text = c.stack_trace_text;
        req.context_code = c.context_code;
        req.top_k = std::min(50, std::max(options.k, 30));
        ranking_weights weights = apply_mask(engine.config().weights, options.mask);
        if (!options.use_context_code) {
            weights.w_st = 1.0;  // the trace keeps the whole context weight
            weights.w_cc = 0.0;
        }
        req.weight_overrides = detail::weights_to_json(weights);

        search_response res = engine.run(req);
        if (res.results.empty()) {
            warnings.push_back("case " + c.id + " excluded: empty corpus");
            continue;
        }
        std::vector<std::string> urls;
        urls.reserve(res.results.size());
        for (const auto& r : res.results) urls.push_back(r.url);
        ranked_cases.emplace_back(c.id, std::move(urls));
    }
    eval_report report = evaluate(ranked_cases, truth, options.k);
    report.warnings = std::move(warnings);
    return report;
}

struct ablation_table {
    // mask -> k -> report
    std::map<score_mask, std::map<int, eval_report>> rows;
};

// One report per score combination per cutoff, mirroring the component
// ablation layout.
inline ablation_table run_ablation(const search_engine& engine, const std::vector<eval_case>& cases,
                                   search_mode mode = search_mode::proactive) {
    ablation_table table;
    for (score_mask mask : {score_mask::content_only, score_mask::content_context,
                            score_mask::content_context_popularity, score_mask::full}) {
        for (int k : {10, 20, 30}) {
            eval_options options;
            options.mode = mode;
            options.mask = mask;
            options.k = k;
            table.rows[mask][k] = run_evaluation(engine, cases, options);
        }
    }
    return table;
}

}  // namespace exsearch
