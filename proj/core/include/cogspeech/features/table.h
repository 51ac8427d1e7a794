#ifndef COGSPEECH_FEATURES_TABLE_H_
#define COGSPEECH_FEATURES_TABLE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cogspeech/features/feature_sets.h"

namespace cogspeech::features {

// Row per session; NaN marks a missing cell.
struct FeatureTable {
  std::vector<std::string> columns;
  std::vector<std::string> session_ids;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> RowOf(std::string_view session_id) const;
};

// Cells follow `columns`; names missing from a vector become NaN.
FeatureTable BuildFeatureTable(
    const std::vector<std::pair<std::string, FeatureVector>>& vectors,
    std::vector<std::string> columns);

// CSV with header session_id,<columns>; missing cells are empty.
std::string SerializeFeatureTable(const FeatureTable& table);
// Throws ParseError with the line number.
FeatureTable ParseFeatureTable(std::string_view text);
FeatureTable ReadFeatureTable(const std::filesystem::path& path);
void WriteFeatureTable(const std::filesystem::path& path, const FeatureTable& table);

// Embedding input, one record per frame or per session:
//   CSV:  session_id,dim,v1,...,v_dim   (optional header starting session_id)
//   JSONL: {"session_id": s, "dim": d, "values": [...] or [[...], ...]}
// Several records for one session are frames and are mean pooled. Values are
// named emb.0 .. emb.<dim-1>. Throws ValidationError on a dimension mismatch
// or a non-finite entry (naming session and dimension index), ParseError on
// malformed input. expected_dim 0 accepts the first dimension seen.
std::map<std::string, FeatureVector> ParseEmbeddingsCsv(std::string_view text,
                                                        std::size_t expected_dim);
std::map<std::string, FeatureVector> ParseEmbeddingsJsonl(std::string_view text,
                                                          std::size_t expected_dim);
// Picks the parser by extension (.jsonl/.json vs anything else).
std::map<std::string, FeatureVector> LoadEmbeddings(const std::filesystem::path& path,
                                                    std::size_t expected_dim);

}  // namespace cogspeech::features

#endif  // COGSPEECH_FEATURES_TABLE_H_
