#pragma once

#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "engine.hpp"
#include "eval.hpp"

namespace exsearch {

namespace detail {

inline std::string fixed4(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << v;
    return out.str();
}

inline std::string fixed2(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << v;
    return out.str();
}

}  // namespace detail

inline nlohmann::json eval_report_to_json(const eval_report& report) {
    nlohmann::json cases = nlohmann::json::array();
    for (const auto& c : report.cases) {
        cases.push_back({
            {"id", c.id},
            {"precision", c.precision},
            {"ffp", c.first_false_positive},
            {"reciprocal_rank", c.reciprocal_rank},
            {"solved", c.solved},
            {"first_hit_rank", c.first_hit_rank},
            {"retrieved", c.retrieved},
        });
    }
    return nlohmann::json{
        {"k", report.k},
        {"mean_precision", report.mean_precision},
        {"mffp", report.mean_ffp},
        {"mrr", report.mrr},
        {"tef", report.tef},
        {"recall_percent", report.recall},
        {"cases", std::move(cases)},
        {"warnings", report.warnings},
    };
}

// Metric rows by cutoff column, one block per run label.
inline std::string eval_report_to_tsv(const std::string& label,
                                      const std::map<int, eval_report>& by_k) {
    std::ostringstream out;
    out << label;
    for (const auto& [k, report] : by_k) out << "\tTop " << k;
    out << '\n';

    const auto row = [&](const char* name, auto value_of) {
        out << name;
        for (const auto& [k, report] : by_k) out << '\t' << value_of(report);
        out << '\n';
    };
    row("Mean Precision (MP)", [](const eval_report& r) { return detail::fixed4(r.mean_precision); });
    row("MFFP", [](const eval_report& r) { return detail::fixed4(r.mean_ffp); });
    row("MRR", [](const eval_report& r) { return detail::fixed4(r.mrr); });
    row("TEF", [](const eval_report& r) {
        return std::to_string(r.tef) + "(" + std::to_string(r.cases.size()) + ")";
    });
    row("Recall (R)", [](const eval_report& r) { return detail::fixed2(r.recall) + "%"; });
    return out.str();
}

inline std::string ablation_to_tsv(const ablation_table& table) {
    std::ostringstream out;
    for (const auto& [mask, by_k] : table.rows) {
        out << eval_report_to_tsv(to_string(mask), by_k);
        out << '\n';
    }
    return out.str();
}

inline nlohmann::json ablation_to_json(const ablation_table& table) {
    nlohmann::json rows = nlohmann::json::object();
    for (const auto& [mask, by_k] : table.rows) {
        nlohmann::json by_k_json = nlohmann::json::object();
        for (const auto& [k, report] : by_k) by_k_json[std::to_string(k)] = eval_report_to_json(report);
        rows[to_string(mask)] = std::move(by_k_json);
    }
    return rows;
}

}  // namespace exsearch
