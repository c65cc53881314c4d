#include <catch2/catch_amalgamated.hpp>

#include <exsearch/corpus.hpp>

#include <random>

using namespace exsearch;

namespace {

const confidence_table kPaperTable = {
    {"engine-A", 0.29}, {"engine-B", 0.35}, {"engine-C", 0.36}, {"qa-site", 1.00}};

fixture_backend mini_backend() { return fixture_backend::load("tests/data/mini/manifest.json"); }

// Backend stub whose providers can be told to fail.
class flaky_backend final : public search_backend {
public:
    std::map<std::string, std::vector<search_hit>> hits_by_provider;
    std::set<std::string> down;
    std::map<std::string, std::string> pages;

    std::vector<std::string> provider_names() const override {
        std::vector<std::string> names;
        for (const auto& [name, hits] : hits_by_provider) names.push_back(name);
        return names;
    }
    std::vector<search_hit> search(const std::string& provider, const std::string&, int limit) const override {
        if (down.count(provider)) throw provider_unavailable(provider + " is down");
        auto it = hits_by_provider.find(provider);
        if (it == hits_by_provider.end()) throw unknown_provider(provider);
        std::vector<search_hit> out = it->second;
        if (static_cast<int>(out.size()) > limit) out.resize(static_cast<std::size_t>(limit));
        return out;
    }
    std::optional<std::string> fetch_page(const std::string& url) const override {
        auto it = pages.find(url);
        if (it == pages.end()) return std::nullopt;
        return it->second;
    }
};

}  // namespace

TEST_CASE("canonical_url applies the four normalization rules") {
    CHECK(canonical_url("HTTP://QA.Example/Q/1?utm_source=feed#answer-2") == "http://qa.example/Q/1");
    CHECK(canonical_url("http://a.example/path/") == "http://a.example/path");
    CHECK(canonical_url("http://a.example/") == "http://a.example");
    CHECK(canonical_url("http://a.example/p?id=3&utm_campaign=x&gclid=9") == "http://a.example/p?id=3");
    CHECK(canonical_url("http://a.example/p?utm_campaign=x") == "http://a.example/p");
    CHECK(canonical_url("https://b.example/q?keep=1&ref=tw&fbclid=2") == "https://b.example/q?keep=1");
    // path case is preserved, host case is not
    CHECK(canonical_url("http://Host.Example/CaseSensitive") == "http://host.example/CaseSensitive");
}

TEST_CASE("url_host extracts the lowercase host") {
    CHECK(url_host("http://QA.Example/q/1") == "qa.example");
    CHECK(url_host("https://user@Site.Example:8443/x") == "site.example");
    CHECK(url_host("site.example/x") == "site.example");
}

TEST_CASE("provider_confidence normalizes, inverts and renormalizes") {
    SECTION("equal ranks share confidence equally") {
        const auto table = provider_confidence({{"a", 7.0}, {"b", 7.0}, {"c", 7.0}});
        for (const auto& [name, value] : table) CHECK(value == Catch::Approx(1.0 / 3).margin(1e-12));
    }
    SECTION("hand-computed two-engine case") {
        const auto table = provider_confidence({{"a", 1.0}, {"b", 3.0}});
        CHECK(table.at("a") == Catch::Approx(0.75).margin(1e-12));
        CHECK(table.at("b") == Catch::Approx(0.25).margin(1e-12));
    }
    SECTION("outputs sum to one for arbitrary positive ranks") {
        std::mt19937 rng(31);
        std::uniform_real_distribution<double> rank(0.1, 5000.0);
        std::uniform_int_distribution<int> engines(1, 6);
        for (int trial = 0; trial < 500; ++trial) {
            std::map<std::string, double> ranks;
            const int n = engines(rng);
            for (int i = 0; i < n; ++i) ranks["e" + std::to_string(i)] = rank(rng);
            const auto table = provider_confidence(ranks);
            double sum = 0.0;
            for (const auto& [name, value] : table) {
                REQUIRE(value > 0.0);
                REQUIRE(value <= 1.0 + 1e-12);
                sum += value;
            }
            REQUIRE(std::abs(sum - 1.0) <= 1e-9);
        }
    }
    SECTION("non-positive ranks are rejected") {
        CHECK_THROWS_AS(provider_confidence({{"a", 0.0}}), invalid_rank);
        CHECK_THROWS_AS(provider_confidence({{"a", -2.0}}), invalid_rank);
    }
}

TEST_CASE("fixture backend replays the manifest deterministically") {
    const fixture_backend backend = mini_backend();

    SECTION("the fixture pseudo-provider returns every entry") {
        const auto hits = backend.search("fixture", "npe question", 30);
        REQUIRE(hits.size() == 7);
        CHECK(hits[0].rank == 1);
        CHECK(hits[6].rank == 7);
    }
    SECTION("limits cap the hit list with contiguous ranks") {
        const auto hits = backend.search("fixture", "npe question", 3);
        REQUIRE(hits.size() == 3);
        CHECK(hits[2].rank == 3);
    }
    SECTION("named providers see only their own entries") {
        const auto hits = backend.search("engine-A", "npe question", 30);
        REQUIRE(hits.size() == 3);
        for (const auto& h : hits) CHECK(h.provider == "engine-A");
    }
    SECTION("unknown queries return no hits") {
        CHECK(backend.search("engine-A", "unheard of", 30).empty());
    }
    SECTION("unregistered providers are rejected") {
        CHECK_THROWS_AS(backend.search("engine-Z", "npe question", 30), unknown_provider);
    }
    SECTION("out-of-range limits are rejected") {
        CHECK_THROWS_AS(backend.search("engine-A", "npe question", 0), validation_error);
        CHECK_THROWS_AS(backend.search("engine-A", "npe question", 51), validation_error);
    }
}

TEST_CASE("build_corpus merges, deduplicates and normalizes confidence") {
    const fixture_backend backend = mini_backend();
    const corpus c = build_corpus("npe question", {"engine-A", "engine-B", "engine-C", "qa-site"}, 30,
                                  kPaperTable, backend);

    // qa1 dedups across its tracking-parameter variant; dead page dropped;
    // blank page dropped as malformed
    REQUIRE(c.pages.size() == 4);
    for (std::size_t i = 1; i < c.pages.size(); ++i)
        REQUIRE(c.pages[i - 1].canonical_url < c.pages[i].canonical_url);

    const auto find_page = [&](std::string_view needle) -> const result_page& {
        for (const auto& p : c.pages)
            if (p.canonical_url.find(needle) != std::string::npos) return p;
        FAIL("page not found");
        return c.pages[0];
    };

    const result_page& qa1 = find_page("qa.example/q/1");
    CHECK(qa1.providers.size() == 4);
    CHECK(qa1.raw_confidence == Catch::Approx(2.00).margin(1e-9));
    CHECK(qa1.confidence == 1.0);  // corpus maximum

    const result_page& forum = find_page("forum.example");
    CHECK(forum.raw_confidence == Catch::Approx(0.29).margin(1e-12));

    const result_page& other = find_page("q/77");
    CHECK(other.raw_confidence == Catch::Approx(1.00).margin(1e-12));

    // min-max normalization pins the extremes
    const result_page& blog = find_page("blog.example");
    CHECK(blog.raw_confidence == Catch::Approx(0.71).margin(1e-12));
    CHECK(forum.confidence == 0.0);
    CHECK(blog.confidence == Catch::Approx((0.71 - 0.29) / (2.00 - 0.29)).margin(1e-9));

    CHECK(c.warnings.size() == 2);  // dead fetch + blank extract
}

TEST_CASE("build_corpus is idempotent and order independent") {
    const fixture_backend backend = mini_backend();
    const std::vector<std::string> forward = {"engine-A", "engine-B", "engine-C", "qa-site"};
    const std::vector<std::string> backward = {"qa-site", "engine-C", "engine-B", "engine-A"};
    const corpus a = build_corpus("npe question", forward, 30, kPaperTable, backend);
    const corpus b = build_corpus("npe question", backward, 30, kPaperTable, backend);
    REQUIRE(a.pages.size() == b.pages.size());
    for (std::size_t i = 0; i < a.pages.size(); ++i) {
        CHECK(a.pages[i].canonical_url == b.pages[i].canonical_url);
        CHECK(a.pages[i].raw_confidence == b.pages[i].raw_confidence);
        CHECK(a.pages[i].providers == b.pages[i].providers);
    }
}

TEST_CASE("build_corpus degrades gracefully on partial provider failure") {
    flaky_backend backend;
    backend.hits_by_provider["up"] = {{"http://ok.example/a", "works", 1, "up"}};
    backend.hits_by_provider["down"] = {};
    backend.down.insert("down");
    backend.pages["http://ok.example/a"] = "<title>works</title><p>content</p>";

    const corpus c = build_corpus("q", {"up", "down"}, 10, {{"up", 0.5}, {"down", 0.5}}, backend);
    REQUIRE(c.pages.size() == 1);
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("down") != std::string::npos);
    CHECK(c.pages[0].confidence == 1.0);  // all-equal degenerate rule
}

TEST_CASE("build_corpus fails typed when everything is down or empty") {
    flaky_backend backend;
    backend.hits_by_provider["a"] = {{"http://x.example/1", "t", 1, "a"}};
    backend.down.insert("a");
    CHECK_THROWS_AS(build_corpus("q", {"a"}, 10, {{"a", 1.0}}, backend), provider_unavailable);

    flaky_backend no_pages;
    no_pages.hits_by_provider["a"] = {{"http://x.example/1", "t", 1, "a"}};
    CHECK_THROWS_AS(build_corpus("q", {"a"}, 10, {{"a", 1.0}}, no_pages), empty_corpus);

    CHECK_THROWS_AS(build_corpus("q", {}, 10, {}, no_pages), validation_error);
}

TEST_CASE("traffic scores invert and normalize host ranks") {
    const fixture_rank_source ranks({{"popular.example", 1.0}, {"niche.example", 101.0}});

    std::vector<result_page> pages(3);
    pages[0].canonical_url = "http://popular.example/a";
    pages[1].canonical_url = "http://niche.example/b";
    pages[2].canonical_url = "http://unknown.example/c";
    apply_traffic_scores(pages, ranks);
    CHECK(pages[0].traffic_score == 1.0);
    CHECK(pages[1].traffic_score == 0.0);
    CHECK(pages[2].traffic_score == 0.0);

    std::vector<result_page> single(1);
    single[0].canonical_url = "http://popular.example/only";
    apply_traffic_scores(single, ranks);
    CHECK(single[0].traffic_score == 1.0);
}

TEST_CASE("vote scores rescale Q&A pages and zero the rest") {
    std::vector<result_page> pages(4);
    pages[0].content.vote_counts = {2, 3};   // sum 5  -> minimum
    pages[1].content.vote_counts = {10, 5};  // sum 15 -> maximum
    pages[2].content.vote_counts = {6, 4};   // sum 10 -> midway
    pages[3].content.vote_counts = {};       // not a Q&A page
    apply_vote_scores(pages);
    CHECK(pages[0].so_vote_score == 0.0);
    CHECK(pages[1].so_vote_score == 1.0);
    CHECK(pages[2].so_vote_score == Catch::Approx(0.5).margin(1e-12));
    CHECK(pages[3].so_vote_score == 0.0);

    std::vector<result_page> flat(2);
    flat[0].content.vote_counts = {4};
    flat[1].content.vote_counts = {2, 2};
    apply_vote_scores(flat);
    CHECK(flat[0].so_vote_score == 0.5);
    CHECK(flat[1].so_vote_score == 0.5);
}

TEST_CASE("rank fixture loads hosts case-insensitively") {
    const fixture_rank_source ranks = fixture_rank_source::load("tests/data/mini/ranks.json");
    CHECK(ranks.host_rank("qa.example").has_value());
    CHECK(ranks.host_rank("QA.example") == ranks.host_rank("qa.example"));
    CHECK_FALSE(ranks.host_rank("missing.example").has_value());
}
