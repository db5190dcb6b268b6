#include "report.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"

namespace steinbound::cli {

namespace {

std::string text(const Cell& c, bool exact) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return fmt::format("{}", *i);
  const double x = std::get<double>(c);
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return exact ? fmt::format("{}", x) : fmt::format("{:.6g}", x);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  const double x = std::get<double>(c);
  if (!std::isfinite(x)) return nullptr;
  return x;
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '|') out += '\\';
    out += ch;
  }
  return out;
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + md_escape(c) + " |";
  return out + "\n";
}

std::string render_markdown(const Document& doc) {
  std::string out;
  for (std::size_t r = 0; r < doc.reports.size(); ++r) {
    const auto& rep = doc.reports[r];
    if (r > 0) out += "\n";
    out += "## " + rep.title + "\n";
    if (!rep.fields.empty()) {
      out += "\n" + md_row({"field", "value"}) + "|---|---|\n";
      for (const auto& [k, v] : rep.fields) out += md_row({k, text(v, false)});
    }
    for (const auto& t : rep.tables) {
      out += "\n### " + t.title + "\n\n" + md_row(t.columns) + "|";
      for (std::size_t i = 0; i < t.columns.size(); ++i) out += "---|";
      out += "\n";
      for (const auto& row : t.rows) {
        std::vector<std::string> cells;
        for (const auto& c : row) cells.push_back(text(c, false));
        out += md_row(cells);
      }
    }
  }
  return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += ",";
    out += csv_escape(cells[i]);
  }
  return out + "\r\n";
}

// A lone table is written wide; anything else goes long so one header fits all.
std::string render_csv(const Document& doc) {
  std::size_t tables = 0;
  bool fields = false;
  for (const auto& rep : doc.reports) {
    tables += rep.tables.size();
    fields = fields || !rep.fields.empty();
  }
  if (tables == 1 && !fields) {
    for (const auto& rep : doc.reports) {
      for (const auto& t : rep.tables) {
        std::string out = csv_line(t.columns);
        for (const auto& row : t.rows) {
          std::vector<std::string> cells;
          for (const auto& c : row) cells.push_back(text(c, true));
          out += csv_line(cells);
        }
        return out;
      }
    }
  }
  std::string out = csv_line({"report", "table", "row", "column", "value"});
  for (const auto& rep : doc.reports) {
    for (const auto& [k, v] : rep.fields) out += csv_line({rep.title, "fields", "0", k, text(v, true)});
    for (const auto& t : rep.tables) {
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < t.rows[r].size() && c < t.columns.size(); ++c) {
          out += csv_line({rep.title, t.title, std::to_string(r), t.columns[c], text(t.rows[r][c], true)});
        }
      }
    }
  }
  return out;
}

std::string render_json(const Document& doc) {
  nlohmann::ordered_json j;
  j["command"] = doc.command;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& rep : doc.reports) {
    nlohmann::ordered_json r;
    r["title"] = rep.title;
    r["fields"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.fields) r["fields"][k] = json_cell(v);
    r["tables"] = nlohmann::ordered_json::array();
    for (const auto& t : rep.tables) {
      nlohmann::ordered_json tj;
      tj["title"] = t.title;
      tj["columns"] = t.columns;
      tj["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : t.rows) {
        auto rj = nlohmann::ordered_json::array();
        for (const auto& c : row) rj.push_back(json_cell(c));
        tj["rows"].push_back(std::move(rj));
      }
      r["tables"].push_back(std::move(tj));
    }
    j["reports"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "md" || s == "markdown") return Format::Markdown;
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw std::invalid_argument("unknown format '" + s + "' (expected md, csv or json)");
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string render(const Document& doc, Format f) {
  switch (f) {
    case Format::Markdown: return render_markdown(doc);
    case Format::Csv: return render_csv(doc);
    case Format::Json: return render_json(doc);
  }
  return {};
}

}  // namespace steinbound::cli
