#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace exsearch {

// case id -> set of relevant canonical URLs
struct ground_truth {
    std::map<std::string, std::set<std::string>> relevant;
};

struct case_metrics {
    std::string id;
    double precision = 0.0;
    int first_false_positive = 0;
    double reciprocal_rank = 0.0;
    bool solved = false;       // >= 1 relevant result within the cutoff
    int first_hit_rank = 0;    // 0 when no relevant result retrieved at all
    std::size_t retrieved = 0;
};

struct eval_report {
    int k = 0;
    double mean_precision = 0.0;
    double mean_ffp = 0.0;
    double mrr = 0.0;
    int tef = 0;          // cases solved within the cutoff
    double recall = 0.0;  // percentage of cases solved
    std::vector<case_metrics> cases;
    std::vector<std::string> warnings;
};

// Fraction of the top-k results that are relevant; the denominator is
// min(k, retrieved) so corpora smaller than the cutoff are not penalized.
inline double precision_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant,
                             int k) {
    if (k < 1) throw validation_error("k must be at least 1");
    if (ranked.empty()) return 0.0;
    const std::size_t cutoff = std::min(ranked.size(), static_cast<std::size_t>(k));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < cutoff; ++i)
        if (relevant.count(ranked[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(cutoff);
}

// Rank of the first irrelevant result within the top k; k+1 when every
// inspected result is relevant.
inline int first_false_positive(const std::vector<std::string>& ranked, const std::set<std::string>& relevant,
                                int k) {
    if (k < 1) throw validation_error("k must be at least 1");
    const std::size_t cutoff = std::min(ranked.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < cutoff; ++i)
        if (!relevant.count(ranked[i])) return static_cast<int>(i) + 1;
    return k + 1;
}

// 1 / rank of the first relevant result; 0 when none is present.
inline double reciprocal_rank(const std::vector<std::string>& ranked, const std::set<std::string>& relevant) {
    for (std::size_t i = 0; i < ranked.size(); ++i)
        if (relevant.count(ranked[i])) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

// Aggregates the per-case metrics into the standard report row.
inline eval_report evaluate(const std::vector<std::pair<std::string, std::vector<std::string>>>& ranked_cases,
                            const ground_truth& truth, int k) {
    if (k < 1) throw validation_error("k must be at least 1");
    eval_report report;
    report.k = k;
    if (ranked_cases.empty()) return report;

    double precision_sum = 0.0, ffp_sum = 0.0, rr_sum = 0.0;
    for (const auto& [id, ranked] : ranked_cases) {
        const auto truth_it = truth.relevant.find(id);
        if (truth_it == truth.relevant.end())
            throw validation_error("no ground truth for case: " + id);
        const auto& relevant = truth_it->second;

        case_metrics m;
        m.id = id;
        m.retrieved = ranked.size();
        m.precision = precision_at_k(ranked, relevant, k);
        m.first_false_positive = first_false_positive(ranked, relevant, k);
        m.reciprocal_rank = reciprocal_rank(ranked, relevant);
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (relevant.count(ranked[i])) {
                m.first_hit_rank = static_cast<int>(i) + 1;
                break;
            }
        }
        m.solved = m.first_hit_rank >= 1 && m.first_hit_rank <= k;

        precision_sum += m.precision;
        ffp_sum += m.first_false_positive;
        rr_sum += m.reciprocal_rank;
        if (m.solved) ++report.tef;
        report.cases.push_back(std::move(m));
    }
    const double count = static_cast<double>(ranked_cases.size());
    report.mean_precision = precision_sum / count;
    report.mean_ffp = ffp_sum / count;
    report.mrr = rr_sum / count;
    report.recall = 100.0 * static_cast<double>(report.tef) / count;
    return report;
}

}  // namespace exsearch
