#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "errors.hpp"
#include "scoring.hpp"

namespace exsearch {

// Service/CLI configuration. Precedence is request override > config file
// > these built-in defaults.
struct engine_config {
    std::vector<std::string> provider_order = {"engine-A", "engine-B", "engine-C", "qa-site"};
    confidence_table confidences = {
        {"engine-A", 0.29}, {"engine-B", 0.35}, {"engine-C", 0.36}, {"qa-site", 1.00}};
    int per_provider_limit = 30;
    double timeout_seconds = 10.0;
    std::string user_agent = "exsearch/0.1";
    ranking_weights weights;
};

namespace detail {

inline void weights_from_json(ranking_weights& w, const nlohmann::json& j) {
    const auto get = [&](const char* key, double& field) {
        if (j.contains(key)) {
            if (!j.at(key).is_number()) throw validation_error(std::string("weight ") + key + " must be a number");
            field = j.at(key).get<double>();
        }
    };
    get("alpha", w.alpha);
    get("beta", w.beta);
    get("gamma", w.gamma);
    get("delta", w.delta);
    get("sigma", w.sigma);
    get("w_st", w.w_st);
    get("w_cc", w.w_cc);
    get("w_so", w.w_so);
    get("w_sr", w.w_sr);
    get("w_cnt", w.w_cnt);
    get("w_cxt", w.w_cxt);
    get("w_pop", w.w_pop);
    get("w_sec", w.w_sec);
}

inline nlohmann::json weights_to_json(const ranking_weights& w) {
    return nlohmann::json{
        {"alpha", w.alpha}, {"beta", w.beta},   {"gamma", w.gamma}, {"delta", w.delta},
        {"sigma", w.sigma}, {"w_st", w.w_st},   {"w_cc", w.w_cc},   {"w_so", w.w_so},
        {"w_sr", w.w_sr},   {"w_cnt", w.w_cnt}, {"w_cxt", w.w_cxt}, {"w_pop", w.w_pop},
        {"w_sec", w.w_sec},
    };
}

}  // namespace detail

inline engine_config config_from_json(const nlohmann::json& doc) {
    engine_config cfg;
    if (doc.contains("providers")) {
        cfg.provider_order.clear();
        cfg.confidences.clear();
        for (const auto& [name, body] : doc.at("providers").items()) {
            cfg.provider_order.push_back(name);
            cfg.confidences[name] = body.is_number() ? body.get<double>() : body.value("confidence", 0.0);
        }
    }
    if (doc.contains("provider_order"))
        cfg.provider_order = doc.at("provider_order").get<std::vector<std::string>>();
    cfg.per_provider_limit = doc.value("per_provider_limit", cfg.per_provider_limit);
    cfg.timeout_seconds = doc.value("timeout_seconds", cfg.timeout_seconds);
    cfg.user_agent = doc.value("user_agent", cfg.user_agent);
    if (doc.contains("weights")) detail::weights_from_json(cfg.weights, doc.at("weights"));
    cfg.weights.validate();
    if (cfg.per_provider_limit < 1 || cfg.per_provider_limit > 50)
        throw validation_error("per_provider_limit must be in [1, 50]");
    return cfg;
}

inline engine_config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open config file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("invalid config " + path.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

// EXSEARCH_CONFIG overrides the config path when set.
inline std::filesystem::path config_path_or(const std::filesystem::path& fallback) {
    if (const char* env = std::getenv("EXSEARCH_CONFIG"); env && *env) return env;
    return fallback;
}

inline ranking_weights load_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open weights file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("invalid weights " + path.string() + ": " + e.what());
    }
    ranking_weights w;
    detail::weights_from_json(w, doc);
    w.validate();
    return w;
}

}  // namespace exsearch
