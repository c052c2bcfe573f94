#ifndef PANELSELECT_CORE_DESIGN_HPP
#define PANELSELECT_CORE_DESIGN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/panel.hpp"

namespace panelselect {

struct EquationDesign {
  Eigen::MatrixXd x;               // intercept | covariates | wave dummies
  std::vector<std::int8_t> outcome;  // attrition/employment blocks
  Eigen::VectorXd y;               // wage block only
  std::vector<std::int32_t> person;
  std::vector<std::int32_t> wave;
  std::vector<std::string> colnames;

  Eigen::Index n_rows() const { return x.rows(); }
};

// Row layout per equation, person-major and wave-ordered:
//  - attrition: waves 2..first non-response, regressors lagged one wave
//  - employment: every responding wave
//  - wage: responding, employed waves with an observed wage
struct DesignSet {
  EquationDesign attrition;
  EquationDesign employment;
  EquationDesign wage;

  // [begin, end) row spans per person into each block
  std::vector<std::pair<std::int32_t, std::int32_t>> a_span;
  std::vector<std::pair<std::int32_t, std::int32_t>> e_span;
  std::vector<std::pair<std::int32_t, std::int32_t>> w_span;

  // per wage row: matching attrition/employment rows (-1 when wave 1)
  std::vector<std::int32_t> wage_attrition_row;
  std::vector<std::int32_t> wage_employment_row;

  std::vector<std::string> person_ids;
  std::vector<double> person_weight;  // wave-1 weight
  int n_persons = 0;
  int t_max = 0;

  // Lagged attrition regressors for (person, wave); wave 1 has no lag and is
  // a contract error.
  Eigen::RowVectorXd z_lagged(int person, int wave) const;
};

DesignSet build_design_matrices(const PanelDataset& ds, const ModelSpec& spec);

// Design restricted to the given persons, in order (duplicates allowed).
// Used by the cluster bootstrap and by duplication-identity tests.
DesignSet subsample_persons(const DesignSet& ds,
                            const std::vector<int>& persons);

}  // namespace panelselect

#endif
