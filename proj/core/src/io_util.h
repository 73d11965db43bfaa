#ifndef HYPERAUDIT_SRC_IO_UTIL_H_
#define HYPERAUDIT_SRC_IO_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hyperaudit {

// Whole-file helpers. Failures throw ValidationError naming the path.
std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double v);
// Strict parse of a full field; throws ValidationError on trailing garbage.
double ParseDouble(std::string_view field);
long long ParseInt(std::string_view field);

// Minimal CSV table: header plus rows of raw fields. Fields never contain
// commas or quotes in any format this library writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable ReadCsv(const std::filesystem::path& path);
std::string JoinCsvLine(const std::vector<std::string>& fields);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_SRC_IO_UTIL_H_
