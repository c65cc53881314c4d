#include <catch2/catch_amalgamated.hpp>

#include <exsearch/engine.hpp>
#include <exsearch/report.hpp>

#include <memory>
#include <string>

using namespace exsearch;

namespace {

std::shared_ptr<const search_engine> fixture_engine() {
    static const std::shared_ptr<const search_engine> engine = [] {
        auto backend = std::make_shared<fixture_backend>(fixture_backend::load("fixtures/manifest.json"));
        auto ranks = std::make_shared<fixture_rank_source>(fixture_rank_source::load("fixtures/ranks.json"));
        return std::make_shared<search_engine>(load_config("fixtures/config.json"), backend, ranks);
    }();
    return engine;
}

search_request request_for(const eval_case& c, search_mode mode = search_mode::proactive) {
    search_request req;
    req.mode = mode;
    if (mode == search_mode::interactive) req.user_query = c.query;
    req.raw_message = c.message;
    req.stack_trace_text = c.stack_trace_text;
    req.context_code = c.context_code;
    return req;
}

}  // namespace

TEST_CASE("config file carries the provider confidence table") {
    const engine_config cfg = load_config("fixtures/config.json");
    CHECK(cfg.confidences.at("engine-A") == Catch::Approx(0.29).margin(1e-12));
    CHECK(cfg.confidences.at("engine-B") == Catch::Approx(0.35).margin(1e-12));
    CHECK(cfg.confidences.at("engine-C") == Catch::Approx(0.36).margin(1e-12));
    CHECK(cfg.confidences.at("qa-site") == Catch::Approx(1.00).margin(1e-12));
    CHECK(cfg.per_provider_limit == 30);
    CHECK_NOTHROW(cfg.weights.validate());
}

TEST_CASE("every dataset case resolves to manifest hits in both modes") {
    const auto engine = fixture_engine();
    const auto& backend = dynamic_cast<const fixture_backend&>(engine->backend());
    const auto cases = load_dataset("fixtures/dataset.json");
    REQUIRE(cases.size() == 10);
    for (const auto& c : cases) {
        CAPTURE(c.id);
        auto trace = parse_trace(c.stack_trace_text);
        const auto q = make_exception_query(c.message, std::move(trace), c.context_code,
                                            search_mode::proactive);
        CHECK(backend.queries().count(formulate(q)) == 1);
        REQUIRE(c.query.has_value());
        CHECK(backend.queries().count(*c.query) == 1);
    }
}

TEST_CASE("proactive search over fixtures ranks the planted page first") {
    const auto engine = fixture_engine();
    const auto cases = load_dataset("fixtures/dataset.json");
    const search_response res = engine->run(request_for(cases[0]));

    REQUIRE(res.results.size() == 13);
    CHECK(res.mode == "proactive");
    CHECK(res.provider_query.find("CatalogService") != std::string::npos);
    CHECK(res.results[0].url == "http://qa.devhelp.example/questions/1001");
    CHECK(res.results[0].rank == 1);
    for (std::size_t i = 1; i < res.results.size(); ++i) {
        CHECK(res.results[i].rank == static_cast<int>(i) + 1);
        CHECK(res.results[i - 1].s_final >= res.results[i].s_final);
    }
    CHECK(res.results[0].s_stm > 0.5);
    CHECK(res.results[0].s_ccx > 0.5);
    CHECK(res.fetch_ms >= 0.0);
    CHECK(res.score_ms >= 0.0);
}

TEST_CASE("interactive search uses the human query but keeps context ranking") {
    const auto engine = fixture_engine();
    const auto cases = load_dataset("fixtures/dataset.json");
    const search_response res = engine->run(request_for(cases[0], search_mode::interactive));
    REQUIRE_FALSE(res.results.empty());
    CHECK(res.provider_query == *cases[0].query);
    CHECK(res.results[0].url == "http://qa.devhelp.example/questions/1001");
}

TEST_CASE("identical requests produce identical responses across runs") {
    const auto engine = fixture_engine();
    const auto cases = load_dataset("fixtures/dataset.json");
    const search_request req = request_for(cases[3]);
    const nlohmann::json first = [&] {
        auto j = search_response_to_json(engine->run(req));
        j.erase("timing");
        return j;
    }();
    for (int run = 0; run < 10; ++run) {
        auto j = search_response_to_json(engine->run(req));
        j.erase("timing");
        REQUIRE(j.dump() == first.dump());
    }
}

TEST_CASE("request validation produces typed errors") {
    const auto engine = fixture_engine();
    const auto cases = load_dataset("fixtures/dataset.json");

    SECTION("interactive without a user query") {
        search_request req = request_for(cases[0], search_mode::proactive);
        req.mode = search_mode::interactive;
        CHECK_THROWS_AS(engine->run(req), validation_error);
    }
    SECTION("proactive with a user query") {
        search_request req = request_for(cases[0]);
        req.user_query = "spurious";
        CHECK_THROWS_AS(engine->run(req), validation_error);
    }
    SECTION("unparseable stack trace") {
        search_request req = request_for(cases[0]);
        req.stack_trace_text = "nothing trace-like here";
        CHECK_THROWS_AS(engine->run(req), validation_error);
    }
    SECTION("top_k bounds") {
        search_request req = request_for(cases[0]);
        req.top_k = 0;
        CHECK_THROWS_AS(engine->run(req), validation_error);
        req.top_k = 51;
        CHECK_THROWS_AS(engine->run(req), validation_error);
    }
    SECTION("invalid weight overrides") {
        search_request req = request_for(cases[0]);
        req.weight_overrides = nlohmann::json{{"alpha", 0.9}};
        CHECK_THROWS_AS(engine->run(req), validation_error);
    }
}

TEST_CASE("weight overrides change the ranking emphasis") {
    const auto engine = fixture_engine();
    const auto cases = load_dataset("fixtures/dataset.json");
    search_request req = request_for(cases[8]);  // soe-render: planted page carries no trace

    const search_response with_code = engine->run(req);
    req.weight_overrides = nlohmann::json{{"w_st", 1.0}, {"w_cc", 0.0}};
    const search_response without_code = engine->run(req);

    const auto rank_of = [](const search_response& res, const std::string& needle) {
        for (const auto& r : res.results)
            if (r.url.find(needle) != std::string::npos) return r.rank;
        return -1;
    };
    const int with_rank = rank_of(with_code, "renderer-bug-hunt");
    const int without_rank = rank_of(without_code, "renderer-bug-hunt");
    REQUIRE(with_rank >= 1);
    REQUIRE(without_rank >= 1);
    CHECK(with_rank <= 10);
    CHECK(without_rank > 10);
}

TEST_CASE("unknown provider queries produce empty results with a warning") {
    const auto engine = fixture_engine();
    const auto cases = load_dataset("fixtures/dataset.json");
    search_request req = request_for(cases[0]);
    req.stack_trace_text = "java.lang.RuntimeException: unknown\n\tat x.Y.z(Y.java:1)";
    req.raw_message = "java.lang.RuntimeException: unknown";
    req.context_code = std::nullopt;
    const search_response res = engine->run(req);
    CHECK(res.results.empty());
    REQUIRE_FALSE(res.warnings.empty());
}

TEST_CASE("evaluation harness reproduces the component trends") {
    const auto engine = fixture_engine();
    const auto cases = load_dataset("fixtures/dataset.json");

    eval_options full;
    full.k = 10;
    const eval_report full_report = run_evaluation(*engine, cases, full);
    CHECK(full_report.recall == 100.0);
    CHECK(full_report.tef == 10);

    eval_options content_only = full;
    content_only.mask = score_mask::content_only;
    const eval_report content_report = run_evaluation(*engine, cases, content_only);
    CHECK(full_report.recall >= content_report.recall);
    CHECK(content_report.recall < 100.0);

    eval_options no_code = full;
    no_code.use_context_code = false;
    const eval_report no_code_report = run_evaluation(*engine, cases, no_code);
    CHECK(full_report.recall >= no_code_report.recall);
}

TEST_CASE("ablation table covers four masks by three cutoffs and is reproducible") {
    const auto engine = fixture_engine();
    const auto cases = load_dataset("fixtures/dataset.json");
    const ablation_table a = run_ablation(*engine, cases);
    REQUIRE(a.rows.size() == 4);
    for (const auto& [mask, by_k] : a.rows) {
        REQUIRE(by_k.size() == 3);
        REQUIRE(by_k.count(10));
        REQUIRE(by_k.count(20));
        REQUIRE(by_k.count(30));
        // recall is non-decreasing in k
        CHECK(by_k.at(10).recall <= by_k.at(20).recall);
        CHECK(by_k.at(20).recall <= by_k.at(30).recall);
    }
    CHECK(a.rows.at(score_mask::full).at(10).recall >=
          a.rows.at(score_mask::content_only).at(10).recall);

    const ablation_table b = run_ablation(*engine, cases);
    CHECK(ablation_to_json(a).dump() == ablation_to_json(b).dump());

    const std::string tsv = ablation_to_tsv(a);
    CHECK(tsv.find("Mean Precision (MP)") != std::string::npos);
    CHECK(tsv.find("Recall (R)") != std::string::npos);
    CHECK(tsv.find("content+context+popularity+confidence") != std::string::npos);
}

TEST_CASE("interactive evaluation also solves the fixture suite") {
    const auto engine = fixture_engine();
    const auto cases = load_dataset("fixtures/dataset.json");
    eval_options options;
    options.mode = search_mode::interactive;
    options.k = 10;
    const eval_report report = run_evaluation(*engine, cases, options);
    CHECK(report.recall >= 90.0);
}

TEST_CASE("dataset loader validates its schema") {
    CHECK_THROWS_AS(load_dataset("fixtures/definitely-missing.json"), error);
    CHECK_THROWS_AS(load_dataset("fixtures/config.json"), validation_error);  // object, not array
}
