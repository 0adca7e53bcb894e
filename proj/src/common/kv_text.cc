#include "twinlight/common/kv_text.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "twinlight/common/image.h"

namespace twinlight {
namespace {

bool IsKeyChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '-';
}

size_t SkipSpace(const std::string& s, size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return i;
}

std::string TrimRight(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

}  // namespace

ParseError::ParseError(const std::string& file, int line, int column,
                       const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

const KvEntry* KvSection::Find(const std::string& key) const {
  const KvEntry* found = nullptr;
  for (const auto& e : entries) {
    if (e.key == key) found = &e;  // last assignment wins
  }
  return found;
}

std::vector<const KvSection*> KvDocument::All(const std::string& name) const {
  std::vector<const KvSection*> out;
  for (const auto& s : sections) {
    if (s.name == name) out.push_back(&s);
  }
  return out;
}

const KvSection* KvDocument::First(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

KvDocument ParseKvText(const std::string& text, const std::string& source) {
  KvDocument doc;
  doc.source = source;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = TrimRight(raw);
    size_t i = SkipSpace(line, 0);
    if (i == line.size() || line[i] == '#' || line[i] == ';') continue;

    if (line[i] == '[') {
      KvSection section;
      section.line = line_no;
      size_t j = SkipSpace(line, i + 1);
      const size_t name_start = j;
      while (j < line.size() && IsKeyChar(line[j])) ++j;
      if (j == name_start) {
        throw ParseError(source, line_no, static_cast<int>(j) + 1,
                         "expected section name");
      }
      section.name = line.substr(name_start, j - name_start);
      j = SkipSpace(line, j);
      if (j < line.size() && line[j] == '"') {
        const size_t close = line.find('"', j + 1);
        if (close == std::string::npos) {
          throw ParseError(source, line_no, static_cast<int>(j) + 1,
                           "unterminated section label");
        }
        section.label = line.substr(j + 1, close - j - 1);
        j = SkipSpace(line, close + 1);
      }
      if (j >= line.size() || line[j] != ']') {
        throw ParseError(source, line_no, static_cast<int>(j) + 1,
                         "expected ']'");
      }
      j = SkipSpace(line, j + 1);
      if (j != line.size() && line[j] != '#') {
        throw ParseError(source, line_no, static_cast<int>(j) + 1,
                         "unexpected text after section header");
      }
      doc.sections.push_back(std::move(section));
      continue;
    }

    const size_t key_start = i;
    while (i < line.size() && IsKeyChar(line[i])) ++i;
    if (i == key_start) {
      throw ParseError(source, line_no, static_cast<int>(i) + 1,
                       "expected key or section header");
    }
    KvEntry entry;
    entry.key = line.substr(key_start, i - key_start);
    entry.line = line_no;
    i = SkipSpace(line, i);
    if (i >= line.size() || line[i] != '=') {
      throw ParseError(source, line_no, static_cast<int>(i) + 1,
                       "expected '=' after key '" + entry.key + "'");
    }
    i = SkipSpace(line, i + 1);
    entry.value = line.substr(i);
    entry.value_column = static_cast<int>(i) + 1;
    if (doc.sections.empty()) doc.sections.push_back(KvSection{});
    doc.sections.back().entries.push_back(std::move(entry));
  }
  return doc;
}

KvDocument ParseKvFile(const std::string& path) {
  return ParseKvText(ReadTextFile(path), path);
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return buf.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error writing '" + path + "'");
}

std::vector<TableRow> TokenizeTable(const std::string& text) {
  std::vector<TableRow> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    TableRow row;
    row.line = line_no;
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == line.size()) break;
      const size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      row.tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    if (row.tokens.empty() || row.tokens[0].text[0] == '#') continue;
    rows.push_back(std::move(row));
  }
  return rows;
}

void ExpectTokenCount(const std::string& source, const TableRow& row, size_t count) {
  if (row.tokens.size() != count) {
    const int col = row.tokens.size() > count ? row.tokens[count].column : 1;
    throw ParseError(source, row.line, col,
                     "expected " + std::to_string(count) + " fields, got " +
                         std::to_string(row.tokens.size()));
  }
}

double TokenDouble(const std::string& source, const TableRow& row, size_t index) {
  const TableToken& t = row.tokens.at(index);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), out);
  if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(out)) {
    throw ParseError(source, row.line, t.column, "expected a finite number, got '" + t.text + "'");
  }
  return out;
}

long TokenInt(const std::string& source, const TableRow& row, size_t index) {
  const TableToken& t = row.tokens.at(index);
  long out = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), out);
  if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
    throw ParseError(source, row.line, t.column, "expected an integer, got '" + t.text + "'");
  }
  return out;
}

double ParseDouble(const std::string& source, const KvEntry& entry) {
  const std::string& v = entry.value;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParseError(source, entry.line, entry.value_column,
                     "expected a number for '" + entry.key + "'");
  }
  return out;
}

long ParseInt(const std::string& source, const KvEntry& entry) {
  const std::string& v = entry.value;
  long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParseError(source, entry.line, entry.value_column,
                     "expected an integer for '" + entry.key + "'");
  }
  return out;
}

std::vector<double> ParseDoubleList(const std::string& source,
                                    const KvEntry& entry) {
  std::vector<double> out;
  const std::string& v = entry.value;
  size_t i = 0;
  while (i < v.size()) {
    while (i < v.size() && (v[i] == ' ' || v[i] == '\t' || v[i] == ',')) ++i;
    if (i == v.size()) break;
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(v.data() + i, v.data() + v.size(), d);
    if (ec != std::errc()) {
      throw ParseError(source, entry.line,
                       entry.value_column + static_cast<int>(i),
                       "expected a number in list for '" + entry.key + "'");
    }
    out.push_back(d);
    i = static_cast<size_t>(ptr - v.data());
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string FormatDoubles(const std::vector<double>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(' ');
    out += FormatDouble(values[i]);
  }
  return out;
}

}  // namespace twinlight
