#ifndef PANELSELECT_CORE_TABLES_HPP
#define PANELSELECT_CORE_TABLES_HPP

#include <string>
#include <vector>

namespace panelselect {

std::string fmt_num(double v);

// Small aligned-table builder; the pretty text and the delimited twin carry
// the same cell strings so every displayed number is machine readable.
class Table {
 public:
  explicit Table(std::vector<std::string> headers)
      : headers_(std::move(headers)) {}

  void add_row(std::vector<std::string> cells);
  // Full-width section label rendered only in the pretty output; the twin
  // gets a row with the label in the first cell.
  void add_section(const std::string& label);

  std::string pretty(const std::string& title = "") const;
  std::string delimited(char sep) const;

 private:
  struct Row {
    bool section = false;
    std::vector<std::string> cells;
  };
  std::vector<std::string> headers_;
  std::vector<Row> rows_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace panelselect

#endif
