#pragma once

#include <memory>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "engine.hpp"
#include "errors.hpp"
#include "report.hpp"

namespace exsearch {

// HTTP front of the pipeline:
//   POST /v1/search  SearchRequest JSON -> SearchResponse JSON
//   GET  /v1/health
//   POST /v1/eval    {"dataset": "<path>", "k": 10, "ablation": false}
// Validation failures answer 400, total upstream failure answers 502.
class search_service {
public:
    search_service(std::shared_ptr<const search_engine> engine, std::filesystem::path dataset_root = ".")
        : engine_(std::move(engine)), dataset_root_(std::move(dataset_root)) {
        register_routes();
    }

    httplib::Server& server() { return server_; }

    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    // Binds an ephemeral port and serves until stop(); used by tests.
    int bind_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }
    void stop() { server_.stop(); }

private:
    static void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
        res.status = status;
        res.set_content(body.dump(2), "application/json");
    }

    static void reply_error(httplib::Response& res, int status, const std::string& message) {
        reply_json(res, status, nlohmann::json{{"error", message}});
    }

    void register_routes() {
        server_.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
            reply_json(res, 200, nlohmann::json{{"status", "ok"}});
        });

        server_.Post("/v1/search", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (const nlohmann::json::exception& e) {
                reply_error(res, 400, std::string("invalid JSON: ") + e.what());
                return;
            }
            try {
                const search_request request = search_request_from_json(body);
                const search_response response = engine_->run(request);
                reply_json(res, 200, search_response_to_json(response));
            } catch (const validation_error& e) {
                reply_error(res, 400, e.what());
            } catch (const provider_unavailable& e) {
                reply_error(res, 502, e.what());
            } catch (const error& e) {
                reply_error(res, 500, e.what());
            }
        });

        server_.Post("/v1/eval", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body = nlohmann::json::object();
            if (!req.body.empty()) {
                try {
                    body = nlohmann::json::parse(req.body);
                } catch (const nlohmann::json::exception& e) {
                    reply_error(res, 400, std::string("invalid JSON: ") + e.what());
                    return;
                }
            }
            try {
                const std::string dataset = body.value("dataset", "");
                if (dataset.empty()) {
                    reply_error(res, 400, "dataset path is required");
                    return;
                }
                const auto cases = load_dataset(dataset_root_ / dataset);
                if (body.value("ablation", false)) {
                    const ablation_table table = run_ablation(*engine_, cases);
                    reply_json(res, 200, ablation_to_json(table));
                    return;
                }
                eval_options options;
                options.k = body.value("k", 10);
                if (body.contains("mode")) options.mode = parse_search_mode(body.at("mode").get<std::string>());
                reply_json(res, 200, eval_report_to_json(run_evaluation(*engine_, cases, options)));
            } catch (const validation_error& e) {
                reply_error(res, 400, e.what());
            } catch (const error& e) {
                reply_error(res, 500, e.what());
            }
        });
    }

    std::shared_ptr<const search_engine> engine_;
    std::filesystem::path dataset_root_;
    httplib::Server server_;
};

}  // namespace exsearch
