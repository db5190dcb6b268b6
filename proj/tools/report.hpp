#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace steinbound::cli {

using Cell = std::variant<std::string, double, std::int64_t>;

struct Table {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  std::string title;
  std::vector<std::pair<std::string, Cell>> fields;
  std::vector<Table> tables;
};

/// Everything one invocation prints.
struct Document {
  std::string command;
  std::vector<Report> reports;
};

enum class Format { Markdown, Csv, Json };

Format parse_format(const std::string& s);

std::string render(const Document& doc, Format f);

/// RFC 4180 field quoting.
std::string csv_escape(const std::string& s);

}  // namespace steinbound::cli
