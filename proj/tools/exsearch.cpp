#include <CLI11.hpp>

#include <exsearch/engine.hpp>
#include <exsearch/report.hpp>
#include <exsearch/service.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace exsearch;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// The console capture starts with the exception header; that line is the
// raw message the ranking pipeline works from.
std::string derive_message(const stack_trace& trace) {
    if (trace.exceptions.empty()) return "";
    const auto& head = trace.exceptions.front();
    return head.message.empty() ? head.type : head.type + ": " + head.message;
}

std::shared_ptr<const search_engine> make_engine(const fs::path& fixtures, const std::string& config_flag) {
    engine_config cfg;
    fs::path config_path = config_path_or(fixtures / "config.json");
    if (!config_flag.empty()) config_path = config_flag;
    if (fs::exists(config_path)) {
        cfg = load_config(config_path);
    } else if (!config_flag.empty()) {
        throw validation_error("config file not found: " + config_path.string());
    }
    auto backend = std::make_shared<fixture_backend>(fixture_backend::load(fixtures / "manifest.json"));
    auto ranks = std::make_shared<fixture_rank_source>(fixture_rank_source::load(fixtures / "ranks.json"));
    return std::make_shared<search_engine>(std::move(cfg), std::move(backend), std::move(ranks));
}

void print_table(const search_response& res, std::ostream& out) {
    out << "query: " << res.provider_query << "\n";
    for (const auto& warning : res.warnings) out << "warning: " << warning << "\n";
    if (res.results.empty()) {
        out << "no results\n";
        return;
    }
    out << std::left << std::setw(5) << "rank" << std::setw(9) << "score"
        << "title / url\n";
    for (const auto& r : res.results) {
        std::ostringstream score;
        score << std::fixed << std::setprecision(4) << r.s_final;
        out << std::left << std::setw(5) << r.rank << std::setw(9) << score.str() << r.title << "\n"
            << std::setw(14) << "" << r.url << "\n";
    }
    out << std::fixed << std::setprecision(1) << "fetched in " << res.fetch_ms << " ms, scored in "
        << res.score_ms << " ms\n";
}

int run_search(const std::shared_ptr<const search_engine>& engine, const std::string& mode,
               const std::string& user_query, const std::string& trace_path, const std::string& code_path,
               int top, const std::string& weights_path, bool as_json) {
    search_request req;
    req.mode = parse_search_mode(mode);
    if (!user_query.empty()) req.user_query = user_query;
    const std::string trace_text = read_input(trace_path);
    req.stack_trace_text = trace_text;
    req.raw_message = derive_message(parse_trace(trace_text));
    if (!code_path.empty()) req.context_code = read_input(code_path);
    req.top_k = top;
    if (!weights_path.empty()) {
        std::ifstream in(weights_path);
        if (!in) throw validation_error("cannot open weights file: " + weights_path);
        nlohmann::json overrides;
        in >> overrides;
        req.weight_overrides = overrides;
    }

    const search_response res = engine->run(req);
    if (as_json)
        std::cout << search_response_to_json(res).dump(2) << "\n";
    else
        print_table(res, std::cout);
    return res.results.empty() ? 1 : 0;
}

int run_eval(const std::shared_ptr<const search_engine>& engine, const std::string& dataset_path,
             bool ablation, int k, const std::string& mode, const std::string& out_dir, bool as_json) {
    const auto cases = load_dataset(dataset_path);
    const fs::path out(out_dir);
    fs::create_directories(out);

    if (ablation) {
        const ablation_table table = run_ablation(*engine, cases, parse_search_mode(mode));
        const std::string tsv = ablation_to_tsv(table);
        std::ofstream(out / "ablation_report.tsv") << tsv;
        std::ofstream(out / "ablation_report.json") << ablation_to_json(table).dump(2) << "\n";
        if (as_json)
            std::cout << ablation_to_json(table).dump(2) << "\n";
        else
            std::cout << tsv;
        return 0;
    }

    eval_options options;
    options.k = k;
    options.mode = parse_search_mode(mode);
    const eval_report report = run_evaluation(*engine, cases, options);
    std::map<int, eval_report> by_k{{k, report}};
    const std::string tsv = eval_report_to_tsv("evaluation", by_k);
    std::ofstream(out / "eval_report.tsv") << tsv;
    std::ofstream(out / "eval_report.json") << eval_report_to_json(report).dump(2) << "\n";
    if (as_json)
        std::cout << eval_report_to_json(report).dump(2) << "\n";
    else
        std::cout << tsv;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context-aware meta-search for programming errors and exceptions"};

    std::string fixtures = "fixtures";
    std::string config_flag;
    std::string mode = "proactive";
    std::string user_query;
    std::string trace_path;
    std::string code_path;
    std::string weights_path;
    std::string dataset_path;
    std::string out_dir = ".";
    int top = 30;
    int k = 10;
    int port = 8080;
    bool as_json = false;
    bool serve = false;
    bool eval = false;
    bool ablation = false;

    app.add_option("--fixtures", fixtures, "Fixture directory (manifest.json, ranks.json, pages/)");
    app.add_option("--config", config_flag, "Config file (default: EXSEARCH_CONFIG or <fixtures>/config.json)");
    app.add_option("--mode", mode, "interactive or proactive")->check(CLI::IsMember({"interactive", "proactive"}));
    app.add_option("--query", user_query, "User query (interactive mode)");
    app.add_option("--trace", trace_path, "Stack trace file, or - for stdin");
    app.add_option("--code", code_path, "Context code file");
    app.add_option("--top", top, "Number of results to return")->check(CLI::Range(1, 50));
    app.add_option("--weights", weights_path, "JSON file with weight overrides");
    app.add_flag("--json", as_json, "Emit JSON instead of a table");
    app.add_flag("--serve", serve, "Run the HTTP service");
    app.add_option("--port", port, "Service port (with --serve)");
    app.add_flag("--eval", eval, "Run the offline evaluation harness");
    app.add_option("--dataset", dataset_path, "Evaluation dataset (with --eval)");
    app.add_flag("--ablation", ablation, "Run the four score-component combinations (with --eval)");
    app.add_option("--k", k, "Evaluation cutoff (with --eval)")->check(CLI::Range(1, 50));
    app.add_option("--out", out_dir, "Directory for report files (with --eval)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        const auto engine = make_engine(fixtures, config_flag);
        if (serve) {
            search_service service(engine, ".");
            std::cout << "listening on 127.0.0.1:" << port << "\n";
            if (!service.listen("127.0.0.1", port)) {
                std::cerr << "error: cannot bind port " << port << "\n";
                return 2;
            }
            return 0;
        }
        if (eval) {
            if (dataset_path.empty()) {
                std::cerr << "error: --eval requires --dataset\n";
                return 2;
            }
            return run_eval(engine, dataset_path, ablation, k, mode, out_dir, as_json);
        }
        if (trace_path.empty()) {
            std::cerr << "error: --trace is required (or use --serve / --eval)\n";
            return 2;
        }
        return run_search(engine, mode, user_query, trace_path, code_path, top, weights_path, as_json);
    } catch (const provider_unavailable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
