#ifndef COGSPEECH_COMMON_TEXT_H_
#define COGSPEECH_COMMON_TEXT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cogspeech {

// Splits one CSV record. Supports double-quoted fields with "" escapes;
// embedded newlines are not supported.
std::vector<std::string> SplitCsvLine(std::string_view line);
// Quotes a field when it contains a comma, quote or leading/trailing space.
std::string CsvField(std::string_view field);

std::vector<std::string_view> SplitWhitespace(std::string_view line);
std::string_view Trim(std::string_view s);
std::string ToLower(std::string_view s);

// Strict full-string parse; nullopt on trailing garbage or empty input.
std::optional<double> ParseDouble(std::string_view s);
std::optional<long long> ParseInt(std::string_view s);

// Shortest round-trippable decimal representation.
std::string FormatDouble(double v);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace cogspeech

#endif  // COGSPEECH_COMMON_TEXT_H_
