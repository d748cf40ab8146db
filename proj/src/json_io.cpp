#include "cqcount/json_io.hpp"

namespace cqcount {

namespace {

json free_path_json(const FreePath& fp) {
    json internal = json::array();
    for (const auto& z : fp.internal) internal.push_back(z.name);
    return json{{"endpoints", json::array({fp.from.name, fp.to.name})},
                {"internal", internal}};
}

json join_tree_json(const JoinTree& t) {
    json parent = json::object();
    for (const auto& node : t.nodes) {
        const auto& par = t.parent.at(node);
        if (par) {
            parent[node] = *par;
        } else {
            parent[node] = nullptr;
        }
    }
    return parent;
}

} // namespace

json report_to_json(const AnalysisReport& report) {
    json out;
    out["acyclic"] = report.acyclic;
    out["free_connex"] = report.free_connex ? json(*report.free_connex) : json(nullptr);
    out["star_size"] = report.star_size ? json(*report.star_size) : json(nullptr);
    out["free_path"] = report.free_path ? free_path_json(*report.free_path) : json(nullptr);
    out["join_tree"] = report.join_tree ? join_tree_json(*report.join_tree) : json(nullptr);
    out["self_join_free"] = report.self_join_free;
    return out;
}

json star_manifest(const StarInstance& inst, std::size_t vertex_count) {
    json decoder = json::object();
    for (const auto& [packed, seq] : inst.decoder) decoder[packed] = seq;
    const Relation* rel = inst.database.find_relation("R");
    json out;
    out["kind"] = "ds_to_star";
    out["k"] = inst.k;
    out["k_prime"] = inst.k_prime;
    out["n"] = vertex_count;
    out["relation"] = "R";
    out["tuples"] = rel ? rel->row_count() : 0;
    out["decoder"] = decoder;
    return out;
}

json embedding_manifest(const EmbeddingInstance& inst, std::size_t source_norm) {
    json out;
    out["kind"] = "embed_star2";
    out["constant"] = inst.constant;
    out["free_path"] = free_path_json(inst.path);
    out["source_size"] = source_norm;
    out["output_size"] = inst.database.norm_size();
    return out;
}

} // namespace cqcount
