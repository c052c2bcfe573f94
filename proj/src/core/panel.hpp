#ifndef PANELSELECT_CORE_PANEL_HPP
#define PANELSELECT_CORE_PANEL_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace panelselect {

// One person-wave record. Covariates are stored aligned with
// PanelDataset::covariate_names; NaN marks an absent cell.
struct ObservationRow {
  std::string person_id;
  int wave = 0;
  bool responded = false;
  std::optional<bool> employed;    // present iff observed
  std::optional<double> log_wage;  // present iff observed (paid workers)
  double weight = 1.0;
  std::vector<double> covariates;
};

struct PersonSpan {
  std::string id;
  std::size_t first_row = 0;
  std::size_t n_rows = 0;
};

struct PanelDataset {
  std::vector<std::string> covariate_names;
  std::vector<ObservationRow> rows;  // sorted by (person_id, wave)
  std::vector<PersonSpan> persons;
  int t_max = 0;
  std::vector<std::string> load_warnings;

  int covariate_index(const std::string& name) const;
  // Rebuilds persons/t_max from rows; rows must already be sorted.
  void reindex();
};

// Covariate roles for the three equations. z/x enter the selection
// equations, w the wage equation.
struct ModelSpec {
  std::vector<std::string> z_vars;
  std::vector<std::string> x_vars;
  std::vector<std::string> w_vars;
  bool wave_dummies_attrition = false;
  bool wave_dummies_employment = false;
  bool wave_dummies_wage = false;
  enum class WeightMode { unweighted, per_person };
  WeightMode weight_mode = WeightMode::unweighted;
  // Acknowledges identification off the nonlinearity alone.
  bool allow_no_exclusions = false;

  // Throws a config error when neither selection equation has an excluded
  // instrument and the override is off.
  void validate() const;
};

struct ValidationIssue {
  std::string person_id;
  int wave = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// CSV format: UTF-8, comma separated, header row
//   person_id,wave,responded,employed,log_wage,weight,<covariates...>
// Empty string encodes an absent optional. Rows with responded=0 that follow
// an earlier responded=0 wave are dropped with a warning (absorbing state).
PanelDataset load_panel_csv(const std::string& path,
                            const ModelSpec* spec = nullptr);
PanelDataset parse_panel_csv(std::istream& in, const std::string& source_name,
                             const ModelSpec* spec = nullptr);

void write_panel_csv(const PanelDataset& ds, std::ostream& out);
void write_panel_csv(const PanelDataset& ds, const std::string& path);

// Lists every invariant violation (non-absorbing response, censoring breaks,
// wave-1 non-response, gaps, missing respondent covariates). Pure.
ValidationReport validate_panel(const PanelDataset& ds);

}  // namespace panelselect

#endif
