#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cqcount/count.hpp"
#include "cqcount/json_io.hpp"
#include "cqcount/reductions.hpp"
#include "cqcount/structure.hpp"
#include "cqcount/verify.hpp"

namespace fs = std::filesystem;
using namespace cqcount;

namespace {

Engine parse_engine(const std::string& name) {
    if (name == "auto") return Engine::Auto;
    if (name == "bruteforce") return Engine::BruteForce;
    if (name == "freeconnex") return Engine::FreeConnex;
    throw InputError("unknown engine: " + name);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write: " + path.string());
    out << text;
}

int cmd_analyze(const std::string& query_path) {
    Query q = load_query_file(query_path);
    AnalysisReport report = analyze(q);
    std::cout << report_to_json(report).dump(2) << "\n";
    if (report.star_size) {
        std::cerr << "counting-exponent lower bound: " << *report.star_size << "\n";
    } else {
        std::cerr << "query is cyclic; no star-size bound reported\n";
    }
    return 0;
}

int cmd_count(const std::string& query_path, const std::string& db_path,
              const std::string& engine_name) {
    Query q = load_query_file(query_path);
    Database db = load_database(db_path);
    AnswerCount result = count(q, db, parse_engine(engine_name));
    std::cout << result.value.get_str() << "\n";
    std::cerr << "engine: " << engine_used_name(result.engine) << "\n"
              << "count: " << result.value.get_str() << "\n";
    return 0;
}

int cmd_reduce_ds(const std::string& graph_path, int k, int k_prime,
                  const std::string& out_dir) {
    Graph g = load_graph_file(graph_path);
    StarInstance inst = ds_to_star_instance(g, k, k_prime);
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "query.cq", render_query(inst.query) + "\n");
    write_database(inst.database, out_dir);
    json manifest = star_manifest(inst, g.vertex_count());
    write_text(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << manifest.dump(2) << "\n";
    std::cerr << "wrote star instance to " << out_dir << "\n";
    return 0;
}

int cmd_reduce_embed(const std::string& query_path, const std::string& stardb_path,
                     const std::string& out_dir) {
    Query target = load_query_file(query_path);
    Database source = load_database(stardb_path);
    EmbeddingInstance inst = embed_star2(target, source);
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "query.cq", render_query(inst.target) + "\n");
    write_database(inst.database, out_dir);
    json manifest = embedding_manifest(inst, source.norm_size());
    write_text(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << manifest.dump(2) << "\n";
    std::cerr << "wrote embedding instance to " << out_dir << "\n";
    return 0;
}

int run_suite(const std::string& name, std::uint64_t seed, int size) {
    verify::SuiteResult result;
    if (name == "engines") {
        result = verify::run_engines_suite(seed, size < 0 ? 200 : size);
    } else if (name == "structure") {
        result = verify::run_structure_suite(seed, size < 0 ? 4 : size);
    } else if (name == "reductions") {
        result = verify::run_reductions_suite(seed, size < 0 ? 100 : size);
    } else {
        throw InputError("unknown suite: " + name);
    }
    std::cout << verify::format_suite(result);
    return result.passed() ? 0 : 1;
}

int cmd_selfcheck(std::uint64_t seed) {
    int status = 0;
    status |= run_suite("structure", seed, 3);
    status |= run_suite("engines", seed, 60);
    status |= run_suite("reductions", seed, 20);
    std::cout << "selfcheck: " << (status == 0 ? "PASS" : "FAIL") << "\n";
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural analysis, exact answer counting, and hardness "
                 "reductions for conjunctive queries"};
    app.require_subcommand(1);

    std::string query_path, db_path, graph_path, out_dir, suite;
    std::string engine_name = "auto";
    std::uint64_t seed = 0;
    int size = -1;
    int k = 2, k_prime = 2;

    auto* analyze_cmd = app.add_subcommand("analyze", "Report structural parameters as JSON");
    analyze_cmd->add_option("query", query_path, "query file")->required();

    auto* count_cmd = app.add_subcommand("count", "Count query answers exactly");
    count_cmd->add_option("query", query_path, "query file")->required();
    count_cmd->add_option("database", db_path, "relation directory or .csv file")->required();
    count_cmd->add_option("--engine", engine_name, "auto|bruteforce|freeconnex")
        ->default_val("auto");

    auto* ds_cmd = app.add_subcommand(
        "reduce-ds", "Encode k'-Dominating-Set as a star-query counting instance");
    ds_cmd->add_option("graph", graph_path, "graph file (p ds format)")->required();
    ds_cmd->add_option("--k", k, "star query width (>= 2)")->required();
    ds_cmd->add_option("--kprime", k_prime, "dominating set budget (multiple of k)")
        ->required();
    ds_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* embed_cmd = app.add_subcommand(
        "reduce-embed", "Embed a q*2 database into an acyclic non-free-connex query");
    embed_cmd->add_option("query", query_path, "target query file")->required();
    embed_cmd->add_option("database", db_path, "q*2 source database (relation R)")
        ->required();
    embed_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
    verify_cmd->add_option("--suite", suite, "engines|reductions|structure")->required();
    verify_cmd->add_option("--seed", seed, "corpus seed")->default_val(0);
    verify_cmd->add_option("--size", size, "suite-specific scale (default per suite)");

    auto* selfcheck_cmd = app.add_subcommand("selfcheck", "Quick run of all suites");
    selfcheck_cmd->add_option("--seed", seed, "corpus seed")->default_val(0);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(query_path);
        if (count_cmd->parsed()) return cmd_count(query_path, db_path, engine_name);
        if (ds_cmd->parsed()) return cmd_reduce_ds(graph_path, k, k_prime, out_dir);
        if (embed_cmd->parsed()) return cmd_reduce_embed(query_path, db_path, out_dir);
        if (verify_cmd->parsed()) return run_suite(suite, seed, size);
        if (selfcheck_cmd->parsed()) return cmd_selfcheck(seed);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const StructureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
