#include "cogspeech/features/table.h"

#include <cmath>
#include <limits>
#include <set>

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"
#include "json.hpp"

namespace cogspeech::features {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Accumulates frames per session in first-seen order.
class Pooler {
 public:
  explicit Pooler(std::size_t expected_dim) : dim_(expected_dim) {}

  void Add(const std::string& session, std::size_t declared_dim,
           const std::vector<double>& frame, std::size_t line) {
    if (dim_ == 0) dim_ = declared_dim;
    if (declared_dim != dim_ || frame.size() != dim_) {
      throw ValidationError("line " + std::to_string(line) + ": session " + session +
                            ": dimension " + std::to_string(frame.size()) +
                            " (declared " + std::to_string(declared_dim) +
                            "), expected " + std::to_string(dim_));
    }
    for (std::size_t i = 0; i < frame.size(); ++i) {
      if (!std::isfinite(frame[i])) {
        throw ValidationError("session " + session + ": non-finite value at dimension " +
                              std::to_string(i));
      }
    }
    auto& acc = sums_[session];
    if (acc.first.empty()) acc.first.assign(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) acc.first[i] += frame[i];
    ++acc.second;
  }

  std::map<std::string, FeatureVector> Finish() const {
    std::map<std::string, FeatureVector> out;
    for (const auto& [session, acc] : sums_) {
      FeatureVector v;
      v.tag = SetTag::kEmbedding;
      for (std::size_t i = 0; i < acc.first.size(); ++i) {
        v.values.emplace_back("emb." + std::to_string(i),
                              acc.first[i] / static_cast<double>(acc.second));
      }
      out.emplace(session, std::move(v));
    }
    return out;
  }

 private:
  std::size_t dim_;
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> sums_;
};

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

double ParseCell(std::string_view cell, std::size_t line) {
  const std::string_view t = Trim(cell);
  if (t.empty()) return kNaN;
  auto d = ParseDouble(t);
  if (!d) throw ParseError("bad number '" + std::string(t) + "'", line);
  return *d;
}

}  // namespace

std::optional<std::size_t> FeatureTable::RowOf(std::string_view session_id) const {
  for (std::size_t i = 0; i < session_ids.size(); ++i) {
    if (session_ids[i] == session_id) return i;
  }
  return std::nullopt;
}

FeatureTable BuildFeatureTable(
    const std::vector<std::pair<std::string, FeatureVector>>& vectors,
    std::vector<std::string> columns) {
  FeatureTable t;
  t.columns = std::move(columns);
  for (const auto& [session, vec] : vectors) {
    std::vector<double> row(t.columns.size(), kNaN);
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      for (const auto& [name, value] : vec.values) {
        if (name == t.columns[c]) {
          row[c] = value;
          break;
        }
      }
    }
    t.session_ids.push_back(session);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string SerializeFeatureTable(const FeatureTable& table) {
  std::string out = "session_id";
  for (const auto& c : table.columns) out += "," + CsvField(c);
  out += "\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += CsvField(table.session_ids[r]);
    for (double v : table.rows[r]) {
      out += ",";
      if (!std::isnan(v)) out += FormatDouble(v);
    }
    out += "\n";
  }
  return out;
}

FeatureTable ParseFeatureTable(std::string_view text) {
  FeatureTable t;
  bool header = false;
  std::set<std::string> seen;
  const auto lines = Lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (Trim(lines[i]).empty()) continue;
    const auto cells = SplitCsvLine(lines[i]);
    if (!header) {
      if (cells.empty() || Trim(cells[0]) != "session_id") {
        throw ParseError("feature table header must start with session_id", line_no);
      }
      for (std::size_t c = 1; c < cells.size(); ++c) {
        std::string name(Trim(cells[c]));
        if (!seen.insert(name).second) throw ParseError("duplicate column " + name, line_no);
        t.columns.push_back(std::move(name));
      }
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size() + 1) {
      throw ParseError("expected " + std::to_string(t.columns.size() + 1) + " cells, got " +
                           std::to_string(cells.size()),
                       line_no);
    }
    std::string id(Trim(cells[0]));
    if (t.RowOf(id)) throw ParseError("duplicate session_id " + id, line_no);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const double v = ParseCell(cells[c], line_no);
      if (std::isinf(v)) throw ParseError("infinite value in column " + t.columns[c - 1], line_no);
      row.push_back(v);
    }
    t.session_ids.push_back(std::move(id));
    t.rows.push_back(std::move(row));
  }
  if (!header) throw ParseError("empty feature table", 1);
  return t;
}

FeatureTable ReadFeatureTable(const std::filesystem::path& path) {
  return ParseFeatureTable(ReadTextFile(path));
}

void WriteFeatureTable(const std::filesystem::path& path, const FeatureTable& table) {
  WriteTextFile(path, SerializeFeatureTable(table));
}

std::map<std::string, FeatureVector> ParseEmbeddingsCsv(std::string_view text,
                                                        std::size_t expected_dim) {
  Pooler pool(expected_dim);
  const auto lines = Lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (Trim(lines[i]).empty()) continue;
    const auto cells = SplitCsvLine(lines[i]);
    if (Trim(cells[0]) == "session_id") continue;
    if (cells.size() < 2) throw ParseError("expected session_id,dim,values...", line_no);
    auto dim = ParseInt(Trim(cells[1]));
    if (!dim || *dim < 1) throw ParseError("bad dimension '" + cells[1] + "'", line_no);
    std::vector<double> frame;
    for (std::size_t c = 2; c < cells.size(); ++c) {
      const std::string_view t = Trim(cells[c]);
      auto d = ParseDouble(t);
      if (!d) {
        throw ParseError("bad number '" + std::string(t) + "' at dimension " +
                             std::to_string(c - 2),
                         line_no);
      }
      frame.push_back(*d);
    }
    pool.Add(std::string(Trim(cells[0])), static_cast<std::size_t>(*dim), frame, line_no);
  }
  return pool.Finish();
}

std::map<std::string, FeatureVector> ParseEmbeddingsJsonl(std::string_view text,
                                                          std::size_t expected_dim) {
  Pooler pool(expected_dim);
  const auto lines = Lines(text);
  auto number = [](const nlohmann::json& v, std::size_t line) {
    if (v.is_null()) return kNaN;  // JSON has no NaN literal
    if (!v.is_number()) throw ParseError("non-numeric embedding entry", line);
    return v.get<double>();
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (Trim(lines[i]).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), line_no);
    }
    if (!rec.is_object() || !rec.contains("session_id") || !rec.contains("values") ||
        !rec["session_id"].is_string() || !rec["values"].is_array()) {
      throw ParseError("record needs string session_id and array values", line_no);
    }
    const std::string session = rec["session_id"].get<std::string>();
    const auto& values = rec["values"];
    std::vector<std::vector<double>> frames;
    if (!values.empty() && values[0].is_array()) {
      for (const auto& f : values) {
        if (!f.is_array()) throw ParseError("mixed frame layout", line_no);
        std::vector<double> frame;
        for (const auto& v : f) frame.push_back(number(v, line_no));
        frames.push_back(std::move(frame));
      }
    } else {
      std::vector<double> frame;
      for (const auto& v : values) frame.push_back(number(v, line_no));
      frames.push_back(std::move(frame));
    }
    std::size_t dim = frames.front().size();
    if (rec.contains("dim")) {
      if (!rec["dim"].is_number_unsigned()) throw ParseError("dim must be a positive integer", line_no);
      dim = rec["dim"].get<std::size_t>();
    }
    for (const auto& f : frames) pool.Add(session, dim, f, line_no);
  }
  return pool.Finish();
}

std::map<std::string, FeatureVector> LoadEmbeddings(const std::filesystem::path& path,
                                                    std::size_t expected_dim) {
  const std::string text = ReadTextFile(path);
  const std::string ext = ToLower(path.extension().string());
  if (ext == ".jsonl" || ext == ".json") return ParseEmbeddingsJsonl(text, expected_dim);
  return ParseEmbeddingsCsv(text, expected_dim);
}

}  // namespace cogspeech::features
