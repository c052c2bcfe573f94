#include "core/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "core/errors.hpp"

namespace panelselect {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no,
                    const std::string& col) {
  double v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::parse, "row " + std::to_string(line_no) +
                                      ": non-numeric value '" + s +
                                      "' in column " + col);
  }
  return v;
}

long parse_int(const std::string& s, std::size_t line_no,
               const std::string& col) {
  long v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::parse, "row " + std::to_string(line_no) +
                                      ": non-integer value '" + s +
                                      "' in column " + col);
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

int PanelDataset::covariate_index(const std::string& name) const {
  for (std::size_t i = 0; i < covariate_names.size(); ++i) {
    if (covariate_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void PanelDataset::reindex() {
  persons.clear();
  t_max = 0;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].person_id == rows[i].person_id) {
      t_max = std::max(t_max, rows[j].wave);
      ++j;
    }
    persons.push_back({rows[i].person_id, i, j - i});
    i = j;
  }
}

void ModelSpec::validate() const {
  auto excluded = [](const std::vector<std::string>& from,
                     const std::vector<std::string>& wage) {
    for (const auto& v : from) {
      if (std::find(wage.begin(), wage.end(), v) == wage.end()) return true;
    }
    return false;
  };
  if (allow_no_exclusions) return;
  if (!excluded(z_vars, w_vars) || !excluded(x_vars, w_vars)) {
    throw Error(ErrorCode::config,
                "model spec has no exclusion restriction: need at least one "
                "variable in z_vars and one in x_vars that is absent from "
                "w_vars, or set allow_no_exclusions to accept identification "
                "off the nonlinearity alone");
  }
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << "person " << v.person_id << " wave " << v.wave << ": " << v.message
       << "\n";
  }
  return os.str();
}

PanelDataset parse_panel_csv(std::istream& in, const std::string& source_name,
                             const ModelSpec* spec) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::schema, source_name + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);

  auto col_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const char* required[] = {"person_id", "wave",     "responded",
                            "employed",  "log_wage", "weight"};
  for (const char* name : required) {
    if (col_of(name) < 0) {
      throw Error(ErrorCode::schema,
                  source_name + ": missing column '" + std::string(name) + "'");
    }
  }
  int c_id = col_of("person_id"), c_wave = col_of("wave");
  int c_resp = col_of("responded"), c_emp = col_of("employed");
  int c_wage = col_of("log_wage"), c_wt = col_of("weight");

  PanelDataset ds;
  std::vector<int> cov_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    int c = static_cast<int>(i);
    if (c == c_id || c == c_wave || c == c_resp || c == c_emp || c == c_wage ||
        c == c_wt) {
      continue;
    }
    ds.covariate_names.push_back(header[i]);
    cov_cols.push_back(c);
  }
  if (spec) {
    for (const auto& vars :
         {&spec->z_vars, &spec->x_vars, &spec->w_vars}) {
      for (const auto& v : *vars) {
        if (ds.covariate_index(v) < 0) {
          throw Error(ErrorCode::schema,
                      source_name + ": missing column '" + v +
                          "' required by the model spec");
        }
      }
    }
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw Error(ErrorCode::parse,
                  "row " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(f.size()));
    }
    ObservationRow row;
    row.person_id = f[c_id];
    row.wave = static_cast<int>(parse_int(f[c_wave], line_no, "wave"));
    long resp = parse_int(f[c_resp], line_no, "responded");
    if (resp != 0 && resp != 1) {
      throw Error(ErrorCode::parse, "row " + std::to_string(line_no) +
                                        ": responded must be 0 or 1");
    }
    row.responded = resp == 1;
    if (!f[c_emp].empty()) {
      long e = parse_int(f[c_emp], line_no, "employed");
      if (e != 0 && e != 1) {
        throw Error(ErrorCode::parse, "row " + std::to_string(line_no) +
                                          ": employed must be 0, 1 or empty");
      }
      row.employed = e == 1;
    }
    if (!f[c_wage].empty()) {
      row.log_wage = parse_double(f[c_wage], line_no, "log_wage");
    }
    row.weight = parse_double(f[c_wt], line_no, "weight");
    row.covariates.reserve(cov_cols.size());
    for (std::size_t k = 0; k < cov_cols.size(); ++k) {
      const std::string& cell = f[cov_cols[k]];
      row.covariates.push_back(
          cell.empty() ? kNaN
                       : parse_double(cell, line_no, ds.covariate_names[k]));
    }
    ds.rows.push_back(std::move(row));
  }

  std::stable_sort(ds.rows.begin(), ds.rows.end(),
                   [](const ObservationRow& a, const ObservationRow& b) {
                     if (a.person_id != b.person_id)
                       return a.person_id < b.person_id;
                     return a.wave < b.wave;
                   });
  for (std::size_t i = 1; i < ds.rows.size(); ++i) {
    if (ds.rows[i].person_id == ds.rows[i - 1].person_id &&
        ds.rows[i].wave == ds.rows[i - 1].wave) {
      throw Error(ErrorCode::integrity,
                  "duplicate (person_id, wave): person " +
                      ds.rows[i].person_id + " wave " +
                      std::to_string(ds.rows[i].wave));
    }
  }

  // Absorbing-state convention: keep the first non-response wave, drop any
  // later responded=0 rows. Later responded=1 rows are kept so that
  // validate_panel can flag them.
  std::vector<ObservationRow> kept;
  kept.reserve(ds.rows.size());
  std::size_t dropped = 0;
  std::string cur_person;
  bool absorbed = false;
  for (auto& row : ds.rows) {
    if (row.person_id != cur_person) {
      cur_person = row.person_id;
      absorbed = false;
    }
    if (!row.responded) {
      if (absorbed) {
        ++dropped;
        continue;
      }
      absorbed = true;
    }
    kept.push_back(std::move(row));
  }
  ds.rows = std::move(kept);
  if (dropped > 0) {
    ds.load_warnings.push_back("dropped " + std::to_string(dropped) +
                               " post-attrition row(s) (absorbing state)");
  }
  ds.reindex();
  return ds;
}

PanelDataset load_panel_csv(const std::string& path, const ModelSpec* spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open '" + path + "'");
  }
  return parse_panel_csv(in, path, spec);
}

void write_panel_csv(const PanelDataset& ds, std::ostream& out) {
  out << "person_id,wave,responded,employed,log_wage,weight";
  for (const auto& name : ds.covariate_names) out << "," << name;
  out << "\n";
  for (const auto& row : ds.rows) {
    out << row.person_id << "," << row.wave << "," << (row.responded ? 1 : 0)
        << ",";
    if (row.employed) out << (*row.employed ? 1 : 0);
    out << ",";
    if (row.log_wage) out << format_double(*row.log_wage);
    out << "," << format_double(row.weight);
    for (double v : row.covariates) {
      out << ",";
      if (!std::isnan(v)) out << format_double(v);
    }
    out << "\n";
  }
}

void write_panel_csv(const PanelDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io, "cannot write '" + path + "'");
  }
  write_panel_csv(ds, out);
}

ValidationReport validate_panel(const PanelDataset& ds) {
  ValidationReport report;
  auto add = [&](const ObservationRow& r, const std::string& msg) {
    report.violations.push_back({r.person_id, r.wave, msg});
  };
  for (const auto& person : ds.persons) {
    bool seen_nonresponse = false;
    for (std::size_t k = 0; k < person.n_rows; ++k) {
      const ObservationRow& row = ds.rows[person.first_row + k];
      if (k == 0) {
        if (row.wave != 1) add(row, "waves do not start at 1");
        if (!row.responded) add(row, "non-response at wave 1");
      } else {
        const ObservationRow& prev = ds.rows[person.first_row + k - 1];
        if (row.wave != prev.wave + 1) {
          add(row, "gap in waves: wave " + std::to_string(row.wave) +
                       " follows wave " + std::to_string(prev.wave));
        }
      }
      if (row.responded && seen_nonresponse) {
        add(row,
            "non-absorbing response at wave " + std::to_string(row.wave));
      }
      if (!row.responded) seen_nonresponse = true;

      if (!row.responded && row.employed) {
        add(row, "employment status under censoring at wave " +
                     std::to_string(row.wave));
      }
      // Partial response (respondent without an employment status) is
      // treated as a violation; the sample keeps full labor responses only.
      if (row.responded && !row.employed) {
        add(row, "employment status missing for respondent at wave " +
                     std::to_string(row.wave));
      }
      bool wage_allowed =
          row.responded && row.employed.has_value() && *row.employed;
      if (row.log_wage && !wage_allowed) {
        add(row, "wage under censoring at wave " + std::to_string(row.wave));
      }
      if (!(row.weight >= 0.0) || !std::isfinite(row.weight)) {
        add(row, "invalid weight at wave " + std::to_string(row.wave));
      }
      if (row.responded) {
        for (std::size_t c = 0; c < row.covariates.size(); ++c) {
          if (std::isnan(row.covariates[c])) {
            add(row, "missing covariate '" + ds.covariate_names[c] +
                         "' at wave " + std::to_string(row.wave));
          }
        }
      }
    }
  }
  return report;
}

}  // namespace panelselect
