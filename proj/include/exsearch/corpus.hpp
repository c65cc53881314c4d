#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "html.hpp"

namespace exsearch {

// One provider hit before merging. rank is the 1-based position within
// that provider's result list.
struct search_hit {
    std::string url;
    std::string title;
    int rank = 0;
    std::string provider;
};

// A deduplicated candidate page with the three corpus-level scores. All
// stored scores are normalized into [0,1] by the build pipeline.
struct result_page {
    std::string canonical_url;
    std::string fetch_url;  // as listed by the first provider that returned it
    std::string title;
    page_content content;
    std::map<std::string, int> providers;  // provider -> rank
    double raw_confidence = 0.0;           // sum of provider confidences, pre-normalization
    double confidence = 0.0;               // S_sec
    double traffic_score = 0.0;            // S_str
    double so_vote_score = 0.0;            // S_so
};

struct corpus {
    std::string query;
    std::vector<result_page> pages;  // canonical_url ascending, unique
    std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// URL handling

namespace detail {

inline bool is_tracking_param(std::string_view name) {
    if (name.starts_with("utm_")) return true;
    return name == "gclid" || name == "fbclid" || name == "msclkid" || name == "ref";
}

}  // namespace detail

// Lowercase scheme and host, strip the fragment and known tracking query
// parameters, drop any trailing slash.
inline std::string canonical_url(std::string_view url) {
    if (auto hash = url.find('#'); hash != std::string_view::npos) url = url.substr(0, hash);

    std::string_view scheme, rest = url;
    if (auto scheme_end = url.find("://"); scheme_end != std::string_view::npos) {
        scheme = url.substr(0, scheme_end);
        rest = url.substr(scheme_end + 3);
    }
    const auto path_start = rest.find('/');
    std::string_view authority = path_start == std::string_view::npos ? rest : rest.substr(0, path_start);
    std::string_view path_and_query = path_start == std::string_view::npos ? std::string_view{} : rest.substr(path_start);

    std::string_view query;
    std::string_view path = path_and_query;
    if (auto qmark = path_and_query.find('?'); qmark != std::string_view::npos) {
        query = path_and_query.substr(qmark + 1);
        path = path_and_query.substr(0, qmark);
    }

    std::string out;
    if (!scheme.empty()) {
        out += detail::to_lower_ascii(scheme);
        out += "://";
    }
    out += detail::to_lower_ascii(authority);

    std::string clean_path(path);
    while (clean_path.size() > 1 && clean_path.back() == '/') clean_path.pop_back();
    if (clean_path == "/") clean_path.clear();
    out += clean_path;

    if (!query.empty()) {
        std::string kept;
        std::size_t pos = 0;
        while (pos <= query.size()) {
            const auto amp = query.find('&', pos);
            std::string_view param = query.substr(pos, amp == std::string_view::npos ? query.size() - pos : amp - pos);
            pos = amp == std::string_view::npos ? query.size() + 1 : amp + 1;
            if (param.empty()) continue;
            const auto eq = param.find('=');
            std::string_view name = eq == std::string_view::npos ? param : param.substr(0, eq);
            if (detail::is_tracking_param(name)) continue;
            if (!kept.empty()) kept.push_back('&');
            kept.append(param);
        }
        if (!kept.empty()) {
            out.push_back('?');
            out.append(kept);
        }
    }
    return out;
}

inline std::string url_host(std::string_view url) {
    std::string_view rest = url;
    if (auto scheme_end = url.find("://"); scheme_end != std::string_view::npos) rest = url.substr(scheme_end + 3);
    const auto end = rest.find_first_of("/?#");
    std::string_view authority = end == std::string_view::npos ? rest : rest.substr(0, end);
    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
    if (auto colon = authority.find(':'); colon != std::string_view::npos) authority = authority.substr(0, colon);
    return detail::to_lower_ascii(authority);
}

// ---------------------------------------------------------------------------
// Provider confidence (search engine trust weights)

// provider -> confidence in (0, 1]
using confidence_table = std::map<std::string, double>;

// Normalizes the average popularity ranks of the general-purpose engines,
// then inverts and renormalizes, so better-ranked engines weigh more and
// the outputs sum to one.
inline confidence_table provider_confidence(const std::map<std::string, double>& avg_ranks) {
    if (avg_ranks.empty()) return {};
    double rank_sum = 0.0;
    for (const auto& [name, rank] : avg_ranks) {
        if (!(rank > 0.0)) throw invalid_rank("average rank for " + name + " must be positive");
        rank_sum += rank;
    }
    double inverse_sum = 0.0;
    for (const auto& [name, rank] : avg_ranks) inverse_sum += rank_sum / rank;
    confidence_table table;
    for (const auto& [name, rank] : avg_ranks) table[name] = (rank_sum / rank) / inverse_sum;
    return table;
}

// ---------------------------------------------------------------------------
// Pluggable provider/page backend

// Search providers and the page fetch path sit behind this interface; the
// shipped implementation replays fixtures, live adapters can plug in the
// same way.
class search_backend {
public:
    virtual ~search_backend() = default;
    virtual std::vector<std::string> provider_names() const = 0;
    // Throws unknown_provider for unregistered names and provider_unavailable
    // for transient failures.
    virtual std::vector<search_hit> search(const std::string& provider, const std::string& query,
                                           int limit) const = 0;
    virtual std::optional<std::string> fetch_page(const std::string& url) const = 0;
};

// Host popularity lookup; unknown hosts return nullopt.
class rank_source {
public:
    virtual ~rank_source() = default;
    virtual std::optional<double> host_rank(const std::string& host) const = 0;
};

// Deterministic provider backed by a JSON manifest:
//   { "queries": { "<query>": [ {"url","title","rank","providers":[...] } ] },
//     "pages":   { "<url>": "<relative path to .html>" } }
// Provider name "fixture" matches every entry; any other registered name
// matches entries that list it.
class fixture_backend final : public search_backend {
public:
    struct manifest_entry {
        std::string url;
        std::string title;
        int rank = 0;
        std::vector<std::string> providers;
    };

    static fixture_backend load(const std::filesystem::path& manifest_path) {
        std::ifstream in(manifest_path);
        if (!in) throw error("cannot open fixture manifest: " + manifest_path.string());
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw error("invalid fixture manifest " + manifest_path.string() + ": " + e.what());
        }
        fixture_backend backend;
        backend.base_dir_ = manifest_path.parent_path();
        backend.registered_.insert("fixture");
        if (doc.contains("queries")) {
            for (const auto& [query, entries] : doc.at("queries").items()) {
                auto& list = backend.queries_[query];
                for (const auto& item : entries) {
                    manifest_entry entry;
                    entry.url = item.value("url", "");
                    entry.title = item.value("title", "");
                    entry.rank = item.value("rank", 0);
                    if (item.contains("providers")) {
                        for (const auto& p : item.at("providers")) {
                            entry.providers.push_back(p.get<std::string>());
                            backend.registered_.insert(entry.providers.back());
                        }
                    }
                    list.push_back(std::move(entry));
                }
            }
        }
        if (doc.contains("pages"))
            for (const auto& [url, path] : doc.at("pages").items()) backend.pages_[url] = path.get<std::string>();
        return backend;
    }

    std::vector<std::string> provider_names() const override {
        return {registered_.begin(), registered_.end()};
    }

    std::vector<search_hit> search(const std::string& provider, const std::string& query,
                                   int limit) const override {
        if (!registered_.count(provider)) throw unknown_provider("provider not registered: " + provider);
        if (limit < 1 || limit > 50) throw validation_error("per-provider limit must be in [1, 50]");
        std::vector<search_hit> hits;
        const auto it = queries_.find(query);
        if (it == queries_.end()) return hits;
        for (const auto& entry : it->second) {
            if (provider != "fixture" &&
                std::find(entry.providers.begin(), entry.providers.end(), provider) == entry.providers.end())
                continue;
            search_hit hit;
            hit.url = entry.url;
            hit.title = entry.title;
            hit.rank = static_cast<int>(hits.size()) + 1;
            hit.provider = provider;
            hits.push_back(std::move(hit));
            if (static_cast<int>(hits.size()) >= limit) break;
        }
        return hits;
    }

    std::optional<std::string> fetch_page(const std::string& url) const override {
        auto it = pages_.find(url);
        if (it == pages_.end()) return std::nullopt;
        std::ifstream in(base_dir_ / it->second, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

    const std::map<std::string, std::vector<manifest_entry>>& queries() const { return queries_; }

private:
    std::filesystem::path base_dir_;
    std::map<std::string, std::vector<manifest_entry>> queries_;
    std::map<std::string, std::string> pages_;
    std::set<std::string> registered_;
};

// Rank fixture: { "<host>": <rank integer> }
class fixture_rank_source final : public rank_source {
public:
    fixture_rank_source() = default;
    explicit fixture_rank_source(std::map<std::string, double> ranks) : ranks_(std::move(ranks)) {}

    static fixture_rank_source load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw error("cannot open rank fixture: " + path.string());
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw error("invalid rank fixture " + path.string() + ": " + e.what());
        }
        std::map<std::string, double> ranks;
        for (const auto& [host, rank] : doc.items()) ranks[detail::to_lower_ascii(host)] = rank.get<double>();
        return fixture_rank_source(std::move(ranks));
    }

    std::optional<double> host_rank(const std::string& host) const override {
        auto it = ranks_.find(detail::to_lower_ascii(host));
        if (it == ranks_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<std::string, double> ranks_;
};

// ---------------------------------------------------------------------------
// Corpus building

// Merges hits from every provider, deduplicates by canonical URL, fetches
// and extracts page content, and normalizes per-page provider confidence.
// Pages that fail to fetch or extract are dropped with a recorded reason.
inline corpus build_corpus(const std::string& query, const std::vector<std::string>& providers,
                           int per_provider_limit, const confidence_table& confidences,
                           const search_backend& backend) {
    if (providers.empty()) throw validation_error("at least one provider is required");

    corpus result;
    result.query = query;

    std::size_t failed_providers = 0;
    std::map<std::string, result_page> merged;  // canonical url -> page shell
    for (const auto& provider : providers) {
        std::vector<search_hit> hits;
        try {
            hits = backend.search(provider, query, per_provider_limit);
        } catch (const provider_unavailable& e) {
            ++failed_providers;
            result.warnings.push_back("provider " + provider + " unavailable: " + e.what());
            continue;
        }
        for (const auto& hit : hits) {
            const std::string canon = canonical_url(hit.url);
            auto [it, inserted] = merged.try_emplace(canon);
            result_page& page = it->second;
            if (inserted) {
                page.canonical_url = canon;
                page.fetch_url = hit.url;
                page.title = hit.title;
            }
            auto [rank_it, fresh] = page.providers.try_emplace(hit.provider, hit.rank);
            if (!fresh && hit.rank < rank_it->second) rank_it->second = hit.rank;
        }
    }
    if (failed_providers == providers.size())
        throw provider_unavailable("all providers failed for query: " + query);

    for (auto& [canon, page] : merged) {
        for (const auto& [provider, rank] : page.providers) {
            auto conf = confidences.find(provider);
            page.raw_confidence += conf == confidences.end() ? 0.0 : conf->second;
        }
        auto html = backend.fetch_page(page.fetch_url);
        if (!html && page.fetch_url != canon) html = backend.fetch_page(canon);
        if (!html) {
            result.warnings.push_back("dropped " + canon + ": page fetch failed");
            continue;
        }
        try {
            page.content = extract_content(*html, canon);
        } catch (const error& e) {
            result.warnings.push_back("dropped " + canon + ": " + e.what());
            continue;
        }
        if (page.content.title.empty()) page.content.title = page.title;
        result.pages.push_back(std::move(page));
    }
    if (result.pages.empty()) throw empty_corpus("no pages survived for query: " + query);

    // min-max normalize raw confidence into S_sec; a flat corpus carries no
    // signal and scores 1 everywhere
    double lo = result.pages.front().raw_confidence, hi = lo;
    for (const auto& page : result.pages) {
        lo = std::min(lo, page.raw_confidence);
        hi = std::max(hi, page.raw_confidence);
    }
    for (auto& page : result.pages)
        page.confidence = hi > lo ? (page.raw_confidence - lo) / (hi - lo) : 1.0;
    return result;
}

// Normalized, inverted host popularity: the most popular known host scores
// one, unknown hosts score zero.
inline void apply_traffic_scores(std::vector<result_page>& pages, const rank_source& ranks) {
    std::vector<std::optional<double>> looked_up(pages.size());
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        looked_up[i] = ranks.host_rank(url_host(pages[i].canonical_url));
        if (looked_up[i]) {
            if (!any) {
                lo = hi = *looked_up[i];
                any = true;
            } else {
                lo = std::min(lo, *looked_up[i]);
                hi = std::max(hi, *looked_up[i]);
            }
        }
    }
    for (std::size_t i = 0; i < pages.size(); ++i) {
        if (!looked_up[i])
            pages[i].traffic_score = 0.0;
        else if (hi == lo)
            pages[i].traffic_score = 1.0;
        else
            pages[i].traffic_score = (hi - *looked_up[i]) / (hi - lo);
    }
}

// Vote-count normalization for Q&A pages: each page's summed post votes,
// rescaled by the corpus minimum and maximum. Non-Q&A pages score zero; a
// flat vote profile is neutral at 0.5.
inline void apply_vote_scores(std::vector<result_page>& pages) {
    std::vector<std::optional<double>> sums(pages.size());
    bool any = false;
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        if (!pages[i].content.is_qa_page()) continue;
        double total = 0.0;
        for (int v : pages[i].content.vote_counts) total += v;
        sums[i] = total;
        if (!any) {
            lo = hi = total;
            any = true;
        } else {
            lo = std::min(lo, total);
            hi = std::max(hi, total);
        }
    }
    for (std::size_t i = 0; i < pages.size(); ++i) {
        if (!sums[i])
            pages[i].so_vote_score = 0.0;
        else if (hi == lo)
            pages[i].so_vote_score = 0.5;
        else
            pages[i].so_vote_score = (*sums[i] - lo) / (hi - lo);
    }
}

}  // namespace exsearch
