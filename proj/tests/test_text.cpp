#include <catch2/catch_amalgamated.hpp>

#include <exsearch/text.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace exsearch;

namespace {

// Independent cosine oracle: materialize explicit vectors over the union
// term list and evaluate the quotient with plain loops.
double cosine_oracle(const token_bag& a, const token_bag& b) {
    std::vector<std::string> union_terms;
    for (const auto& [term, n] : a.terms()) union_terms.push_back(term);
    for (const auto& [term, n] : b.terms())
        if (!a.contains(term)) union_terms.push_back(term);
    if (a.empty() || b.empty()) return 0.0;

    long double dot = 0.0L, na = 0.0L, nb = 0.0L;
    for (const auto& term : union_terms) {
        const long double va = a.count(term);
        const long double vb = b.count(term);
        dot += va * vb;
        na += va * va;
        nb += vb * vb;
    }
    if (na == 0.0L || nb == 0.0L) return 0.0;
    return static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

token_bag bag_of(std::initializer_list<std::pair<const char*, std::uint32_t>> items) {
    token_bag bag;
    for (const auto& [term, n] : items) bag.add(term, n);
    return bag;
}

}  // namespace

TEST_CASE("porter stemmer matches the published vectors") {
    const std::pair<const char*, const char*> vectors[] = {
        {"caresses", "caress"}, {"ponies", "poni"},       {"ties", "ti"},
        {"caress", "caress"},   {"cats", "cat"},          {"feed", "feed"},
        {"agreed", "agre"},     {"plastered", "plaster"}, {"bled", "bled"},
        {"motoring", "motor"},  {"sing", "sing"},         {"conflated", "conflat"},
        {"troubled", "troubl"}, {"sized", "size"},        {"hopping", "hop"},
        {"tanned", "tan"},      {"falling", "fall"},      {"hissing", "hiss"},
        {"fizzed", "fizz"},     {"failing", "fail"},      {"filing", "file"},
        {"happy", "happi"},     {"sky", "sky"},           {"relational", "relat"},
        {"conditional", "condit"}, {"rational", "ration"},
        {"digitizer", "digit"}, {"operator", "oper"},     {"feudalism", "feudal"},
        {"decisiveness", "decis"}, {"hopefulness", "hope"}, {"callousness", "callous"},
        {"formaliti", "formal"}, {"sensitiviti", "sensit"}, {"sensibiliti", "sensibl"},
        {"triplicate", "triplic"}, {"formative", "form"}, {"formalize", "formal"},
        {"electriciti", "electr"}, {"electrical", "electr"}, {"hopeful", "hope"},
        {"goodness", "good"},   {"revival", "reviv"},     {"allowance", "allow"},
        {"inference", "infer"}, {"airliner", "airlin"},   {"gyroscopic", "gyroscop"},
        {"adjustable", "adjust"}, {"defensible", "defens"}, {"irritant", "irrit"},
        {"replacement", "replac"}, {"adjustment", "adjust"}, {"dependent", "depend"},
        {"adoption", "adopt"},  {"communism", "commun"},  {"activate", "activ"},
        {"angulariti", "angular"}, {"homologous", "homolog"}, {"effective", "effect"},
        {"bowdlerism", "bowdler"}, {"probate", "probat"}, {"rate", "rate"},
        {"cease", "ceas"},      {"controll", "control"},  {"roll", "roll"},
        {"oscillators", "oscil"}, {"generalizations", "gener"},
    };
    for (const auto& [word, expected] : vectors) {
        CAPTURE(word);
        CHECK(porter_stem(word) == expected);
    }
}

TEST_CASE("porter stemmer survives degenerate words") {
    CHECK(porter_stem("") == "");
    CHECK(porter_stem("a") == "a");
    CHECK(porter_stem("be") == "be");
    CHECK(porter_stem("ied") == "i");
    CHECK(porter_stem("ion") == "ion");
    CHECK(porter_stem("sss") == "sss");
}

TEST_CASE("normalize prose drops stop words and stems") {
    const token_bag bag = normalize("the file was not found", normalize_mode::prose);
    CHECK(bag == bag_of({{"file", 1}, {"found", 1}}));
}

TEST_CASE("normalize identifier keeps camel case whole") {
    const token_bag bag = normalize("NullPointerException", normalize_mode::identifier);
    CHECK(bag == bag_of({{"NullPointerException", 1}}));
}

TEST_CASE("normalize of empty text yields an empty bag") {
    CHECK(normalize("", normalize_mode::prose).empty());
    CHECK(normalize("", normalize_mode::identifier).empty());
}

TEST_CASE("prose mode splits on punctuation and lowercases") {
    const token_bag bag = normalize("Read-Error: failed, failure; FAILURES!", normalize_mode::prose);
    CHECK(bag.count("read") == 1);
    CHECK(bag.count("error") == 1);
    CHECK(bag.count("fail") == 1);
    CHECK(bag.count("failur") == 2);  // failure/failures share a stem
}

TEST_CASE("identifier mode keeps underscores and dollar signs, splits dots") {
    const token_bag bag = normalize("com.acme.Outer$Inner.do_work", normalize_mode::identifier);
    CHECK(bag.count("com") == 1);
    CHECK(bag.count("acme") == 1);
    CHECK(bag.count("Outer$Inner") == 1);
    CHECK(bag.count("do_work") == 1);
}

TEST_CASE("identifier mode drops exact stop words but keeps cased variants") {
    const token_bag bag = normalize("for For in In x", normalize_mode::identifier);
    CHECK_FALSE(bag.contains("for"));
    CHECK_FALSE(bag.contains("in"));
    CHECK(bag.contains("For"));
    CHECK(bag.contains("In"));
    CHECK(bag.contains("x"));
}

TEST_CASE("non-ascii letters survive prose tokenization") {
    const token_bag bag = normalize("fichier non trouv\xc3\xa9", normalize_mode::prose);
    CHECK(bag.contains("fichier"));
    CHECK(bag.contains("trouv\xc3\xa9"));
}

TEST_CASE("cosine handles the hand-computed examples") {
    const token_bag a = bag_of({{"null", 1}, {"pointer", 1}});
    const token_bag b = bag_of({{"null", 1}, {"deref", 1}});
    CHECK(cosine(a, b) == Catch::Approx(0.5).margin(1e-12));

    const token_bag self = bag_of({{"x", 2}, {"y", 3}});
    CHECK(cosine(self, self) >= 1.0 - 1e-12);

    const token_bag disjoint = bag_of({{"p", 1}});
    const token_bag other = bag_of({{"q", 1}});
    CHECK(cosine(disjoint, other) == 0.0);

    CHECK(cosine(token_bag{}, self) == 0.0);
    CHECK(cosine(self, token_bag{}) == 0.0);
}

TEST_CASE("cosine properties on random bags") {
    std::mt19937 rng(20240811);
    std::uniform_int_distribution<int> term_count(0, 5);
    std::uniform_int_distribution<int> term_pick(0, 5);
    std::uniform_int_distribution<std::uint32_t> multiplicity(1, 4);
    const char* alphabet[] = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta"};

    const auto random_bag = [&] {
        token_bag bag;
        const int n = term_count(rng);
        for (int i = 0; i < n; ++i) bag.add(alphabet[term_pick(rng)], multiplicity(rng));
        return bag;
    };

    for (int trial = 0; trial < 2000; ++trial) {
        const token_bag a = random_bag();
        const token_bag b = random_bag();
        const double ab = cosine(a, b);
        const double ba = cosine(b, a);
        REQUIRE(ab == ba);
        REQUIRE(ab >= 0.0);
        REQUIRE(ab <= 1.0);
        REQUIRE(std::abs(ab - cosine_oracle(a, b)) <= 1e-9);
        if (!a.empty()) REQUIRE(cosine(a, a) >= 1.0 - 1e-12);

        // scaling one side leaves the angle unchanged
        token_bag scaled;
        for (const auto& [term, n] : a.terms()) scaled.add(term, n * 3);
        REQUIRE(std::abs(cosine(scaled, b) - ab) <= 1e-12);
    }
}

TEST_CASE("normalize is idempotent at the bag level") {
    const char* samples[] = {
        "the file was not found",
        "University libraries ponies universities",
        "wills willing rationalization",
        "NullPointerException at line 12",
        "agreed hopping controlled oscillators generalizations",
        "dying lying tying flying skies",
    };
    for (normalize_mode mode : {normalize_mode::prose, normalize_mode::identifier}) {
        for (const char* text : samples) {
            CAPTURE(text, mode == normalize_mode::prose);
            const token_bag once = normalize(text, mode);
            std::string rejoined;
            for (const auto& term : once.expand()) {
                if (!rejoined.empty()) rejoined.push_back(' ');
                rejoined.append(term);
            }
            CHECK(normalize(rejoined, mode) == once);
        }
    }
}

TEST_CASE("normalize idempotence holds for random words") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_int_distribution<int> letter(0, 25);
    std::uniform_int_distribution<int> words(1, 8);
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        const int n = words(rng);
        for (int w = 0; w < n; ++w) {
            if (w > 0) text.push_back(' ');
            const int l = len(rng);
            for (int i = 0; i < l; ++i) text.push_back(static_cast<char>('a' + letter(rng)));
        }
        const token_bag once = normalize(text, normalize_mode::prose);
        std::string rejoined;
        for (const auto& term : once.expand()) {
            rejoined.push_back(' ');
            rejoined.append(term);
        }
        REQUIRE(normalize(rejoined, normalize_mode::prose) == once);
    }
}

TEST_CASE("token bag rejects empty and whitespace terms") {
    token_bag bag;
    bag.add("");
    bag.add("has space");
    bag.add("tab\tterm");
    CHECK(bag.empty());
}

TEST_CASE("shipped stop-word file matches the built-in list") {
    const auto from_file = load_stopwords("data/stopwords.txt");
    CHECK(from_file == default_stopwords());
    CHECK(from_file.size() >= 120);
    CHECK(from_file.size() <= 140);
}

TEST_CASE("stop-word loader honors comments and blank lines") {
    const auto words = load_stopwords("tests/data/stopwords_sample.txt");
    CHECK(words == std::set<std::string>{"alpha", "beta", "gamma"});
    CHECK_THROWS_AS(load_stopwords("tests/data/definitely-missing.txt"), error);
}
