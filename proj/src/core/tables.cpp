#include "core/tables.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace panelselect {

std::string fmt_num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void Table::add_row(std::vector<std::string> cells) {
  cells.resize(headers_.size());
  rows_.push_back({false, std::move(cells)});
}

void Table::add_section(const std::string& label) {
  rows_.push_back({true, {label}});
}

std::string Table::pretty(const std::string& title) const {
  std::vector<std::size_t> width(headers_.size());
  for (std::size_t c = 0; c < headers_.size(); ++c) {
    width[c] = headers_[c].size();
  }
  for (const Row& row : rows_) {
    if (row.section) continue;
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      width[c] = std::max(width[c], row.cells[c].size());
    }
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < headers_.size(); ++c) {
      const std::string& cell = c < cells.size() ? cells[c] : std::string();
      if (c == 0) {
        os << cell << std::string(width[c] - cell.size(), ' ');
      } else {
        os << "  " << std::string(width[c] - cell.size(), ' ') << cell;
      }
    }
    os << "\n";
  };
  std::size_t total = 0;
  for (std::size_t c = 0; c < headers_.size(); ++c) {
    total += width[c] + (c > 0 ? 2 : 0);
  }
  if (!title.empty()) {
    os << title << "\n";
  }
  emit(headers_);
  os << std::string(total, '-') << "\n";
  for (const Row& row : rows_) {
    if (row.section) {
      os << "[" << row.cells[0] << "]\n";
    } else {
      emit(row.cells);
    }
  }
  return os.str();
}

std::string Table::delimited(char sep) const {
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& cells, std::size_t n) {
    for (std::size_t c = 0; c < n; ++c) {
      if (c > 0) os << sep;
      if (c < cells.size()) os << cells[c];
    }
    os << "\n";
  };
  emit(headers_, headers_.size());
  for (const Row& row : rows_) {
    emit(row.cells, headers_.size());
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io, "cannot write '" + path + "'");
  }
  out << content;
}

}  // namespace panelselect
