#pragma once

#include <json.hpp>

#include "cqcount/reductions.hpp"
#include "cqcount/structure.hpp"

namespace cqcount {

using json = nlohmann::ordered_json;

// AnalysisReport as a JSON document with fields exactly: acyclic,
// free_connex, star_size, free_path, join_tree, self_join_free.
json report_to_json(const AnalysisReport& report);

json star_manifest(const StarInstance& inst, std::size_t vertex_count);
json embedding_manifest(const EmbeddingInstance& inst, std::size_t source_norm);

} // namespace cqcount
