#ifndef TWINLIGHT_COMMON_KV_TEXT_H_
#define TWINLIGHT_COMMON_KV_TEXT_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twinlight {

// Syntax error in a structured text file; what() reads "file:line:col: msg".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, int column,
             const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
  int value_column = 0;
};

struct KvSection {
  std::string name;   // e.g. "actor"
  std::string label;  // quoted label, e.g. "car_1"; empty if absent
  int line = 0;
  std::vector<KvEntry> entries;

  const KvEntry* Find(const std::string& key) const;
};

// Sectioned key-value text:
//   # comment
//   [name]  or  [name "label"]
//   key = value
// Keys are [A-Za-z0-9_.-]+; values run to end of line, trimmed. Keys before
// the first section header belong to a section with an empty name.
struct KvDocument {
  std::string source;
  std::vector<KvSection> sections;

  std::vector<const KvSection*> All(const std::string& name) const;
  const KvSection* First(const std::string& name) const;
};

KvDocument ParseKvText(const std::string& text, const std::string& source);
KvDocument ParseKvFile(const std::string& path);

// Typed value accessors; failures raise ParseError pointing at the value.
double ParseDouble(const std::string& source, const KvEntry& entry);
long ParseInt(const std::string& source, const KvEntry& entry);
std::vector<double> ParseDoubleList(const std::string& source,
                                    const KvEntry& entry);

// Whitespace-separated table rows. Blank lines and '#' comment lines are
// skipped; columns are 1-based.
struct TableToken {
  std::string text;
  int column = 0;
};
struct TableRow {
  int line = 0;
  std::vector<TableToken> tokens;
};
std::vector<TableRow> TokenizeTable(const std::string& text);

// Requires exactly `count` tokens on the row.
void ExpectTokenCount(const std::string& source, const TableRow& row, size_t count);
double TokenDouble(const std::string& source, const TableRow& row, size_t index);
long TokenInt(const std::string& source, const TableRow& row, size_t index);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);
// Space-separated FormatDouble values.
std::string FormatDoubles(const std::vector<double>& values);

// Whole-file text; IoError names the path.
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace twinlight

#endif  // TWINLIGHT_COMMON_KV_TEXT_H_
