#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace lab {

/// A flat table emitted as RFC-4180 CSV.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

/// Shortest decimal form that reads back to the same double.
std::string fmt(double v);
std::string fmt(long long v);
std::string fmt(bool v);

/// Quotes fields containing commas, quotes or line breaks; CRLF record ends.
std::string to_csv(const Table& t);

std::string sha256_hex(const std::string& bytes);

/// Writes `content` to dir/name and returns its manifest entry.
nlohmann::json write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

/// Library and dependency versions recorded in every manifest.
nlohmann::json versions();

}  // namespace lab
