#include "core/design.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace panelselect {

namespace {

struct ColumnPlan {
  std::vector<int> cov_idx;             // dataset covariate indices
  std::vector<std::string> colnames;    // const, vars, dummies
  int first_dummy_wave = 0;             // 0 = no dummies
  int t_max = 0;

  int width() const { return static_cast<int>(colnames.size()); }
};

ColumnPlan make_plan(const PanelDataset& ds,
                     const std::vector<std::string>& vars, bool dummies,
                     int first_dummy_wave, const char* equation) {
  ColumnPlan plan;
  plan.t_max = ds.t_max;
  plan.colnames.push_back("const");
  for (const auto& v : vars) {
    int idx = ds.covariate_index(v);
    if (idx < 0) {
      throw Error(ErrorCode::schema, std::string("covariate '") + v +
                                         "' required by the " + equation +
                                         " equation is not in the dataset");
    }
    plan.cov_idx.push_back(idx);
    plan.colnames.push_back(v);
  }
  if (dummies && first_dummy_wave <= ds.t_max) {
    plan.first_dummy_wave = first_dummy_wave;
    for (int t = first_dummy_wave; t <= ds.t_max; ++t) {
      plan.colnames.push_back("wave" + std::to_string(t));
    }
  }
  return plan;
}

void fill_row(Eigen::MatrixXd& m, Eigen::Index row, const ColumnPlan& plan,
              const ObservationRow& src, int wave) {
  m(row, 0) = 1.0;
  for (std::size_t k = 0; k < plan.cov_idx.size(); ++k) {
    m(row, 1 + static_cast<Eigen::Index>(k)) = src.covariates[plan.cov_idx[k]];
  }
  if (plan.first_dummy_wave > 0) {
    Eigen::Index base = 1 + static_cast<Eigen::Index>(plan.cov_idx.size());
    for (int t = plan.first_dummy_wave; t <= plan.t_max; ++t) {
      m(row, base + (t - plan.first_dummy_wave)) = (wave == t) ? 1.0 : 0.0;
    }
  }
}

}  // namespace

Eigen::RowVectorXd DesignSet::z_lagged(int person, int wave) const {
  if (wave < 2) {
    throw Error(ErrorCode::contract,
                "z_lagged is undefined at wave 1 (no lagged covariates)");
  }
  auto [begin, end] = a_span.at(person);
  for (std::int32_t r = begin; r < end; ++r) {
    if (attrition.wave[r] == wave) return attrition.x.row(r);
  }
  throw Error(ErrorCode::contract,
              "no attrition design row for person " + std::to_string(person) +
                  " at wave " + std::to_string(wave));
}

DesignSet build_design_matrices(const PanelDataset& ds, const ModelSpec& spec) {
  spec.validate();

  // Reference categories: wave 1 for employment and wages, wave 2 for
  // attrition (the attrition equation starts at wave 2, so a full dummy set
  // would absorb the intercept).
  ColumnPlan zp = make_plan(ds, spec.z_vars, spec.wave_dummies_attrition, 3,
                            "attrition");
  ColumnPlan xp = make_plan(ds, spec.x_vars, spec.wave_dummies_employment, 2,
                            "employment");
  ColumnPlan wp = make_plan(ds, spec.w_vars, spec.wave_dummies_wage, 2,
                            "wage");

  std::size_t n_att = 0, n_emp = 0, n_wage = 0;
  for (const auto& person : ds.persons) {
    for (std::size_t k = 0; k < person.n_rows; ++k) {
      const ObservationRow& row = ds.rows[person.first_row + k];
      if (row.wave >= 2) ++n_att;
      if (row.responded) {
        ++n_emp;
        if (row.employed && *row.employed && row.log_wage) ++n_wage;
      }
    }
  }

  DesignSet out;
  out.n_persons = static_cast<int>(ds.persons.size());
  out.t_max = ds.t_max;
  out.attrition.x.setZero(n_att, zp.width());
  out.employment.x.setZero(n_emp, xp.width());
  out.wage.x.setZero(n_wage, wp.width());
  out.wage.y.resize(n_wage);
  out.attrition.colnames = zp.colnames;
  out.employment.colnames = xp.colnames;
  out.wage.colnames = wp.colnames;

  Eigen::Index ia = 0, ie = 0, iw = 0;
  for (std::size_t p = 0; p < ds.persons.size(); ++p) {
    const PersonSpan& person = ds.persons[p];
    out.person_ids.push_back(person.id);
    out.person_weight.push_back(ds.rows[person.first_row].weight);
    std::int32_t a0 = static_cast<std::int32_t>(ia);
    std::int32_t e0 = static_cast<std::int32_t>(ie);
    std::int32_t w0 = static_cast<std::int32_t>(iw);
    for (std::size_t k = 0; k < person.n_rows; ++k) {
      const ObservationRow& row = ds.rows[person.first_row + k];
      std::int32_t emp_row = -1;
      std::int32_t att_row = -1;
      if (row.wave >= 2) {
        const ObservationRow& prev = ds.rows[person.first_row + k - 1];
        fill_row(out.attrition.x, ia, zp, prev, row.wave);
        out.attrition.outcome.push_back(row.responded ? 1 : 0);
        out.attrition.person.push_back(static_cast<std::int32_t>(p));
        out.attrition.wave.push_back(row.wave);
        att_row = static_cast<std::int32_t>(ia);
        ++ia;
      }
      if (row.responded) {
        fill_row(out.employment.x, ie, xp, row, row.wave);
        out.employment.outcome.push_back(*row.employed ? 1 : 0);
        out.employment.person.push_back(static_cast<std::int32_t>(p));
        out.employment.wave.push_back(row.wave);
        emp_row = static_cast<std::int32_t>(ie);
        ++ie;
        if (row.employed && *row.employed && row.log_wage) {
          fill_row(out.wage.x, iw, wp, row, row.wave);
          out.wage.y(iw) = *row.log_wage;
          out.wage.person.push_back(static_cast<std::int32_t>(p));
          out.wage.wave.push_back(row.wave);
          out.wage_attrition_row.push_back(att_row);
          out.wage_employment_row.push_back(emp_row);
          ++iw;
        }
      }
    }
    out.a_span.emplace_back(a0, static_cast<std::int32_t>(ia));
    out.e_span.emplace_back(e0, static_cast<std::int32_t>(ie));
    out.w_span.emplace_back(w0, static_cast<std::int32_t>(iw));
  }
  return out;
}

namespace {

void append_block(const EquationDesign& src, std::int32_t begin,
                  std::int32_t end, std::int32_t new_person, bool has_y,
                  EquationDesign& dst) {
  for (std::int32_t r = begin; r < end; ++r) {
    dst.x.row(dst.person.size()) = src.x.row(r);
    if (has_y) dst.y(static_cast<Eigen::Index>(dst.person.size())) = src.y(r);
    if (!src.outcome.empty()) dst.outcome.push_back(src.outcome[r]);
    dst.person.push_back(new_person);
    dst.wave.push_back(src.wave[r]);
  }
}

}  // namespace

DesignSet subsample_persons(const DesignSet& ds,
                            const std::vector<int>& persons) {
  DesignSet out;
  out.n_persons = static_cast<int>(persons.size());
  out.t_max = ds.t_max;
  out.attrition.colnames = ds.attrition.colnames;
  out.employment.colnames = ds.employment.colnames;
  out.wage.colnames = ds.wage.colnames;

  Eigen::Index n_att = 0, n_emp = 0, n_wage = 0;
  for (int p : persons) {
    n_att += ds.a_span[p].second - ds.a_span[p].first;
    n_emp += ds.e_span[p].second - ds.e_span[p].first;
    n_wage += ds.w_span[p].second - ds.w_span[p].first;
  }
  out.attrition.x.resize(n_att, ds.attrition.x.cols());
  out.employment.x.resize(n_emp, ds.employment.x.cols());
  out.wage.x.resize(n_wage, ds.wage.x.cols());
  out.wage.y.resize(n_wage);

  for (std::size_t j = 0; j < persons.size(); ++j) {
    int p = persons[j];
    std::int32_t np = static_cast<std::int32_t>(j);
    std::int32_t a0 = static_cast<std::int32_t>(out.attrition.person.size());
    std::int32_t e0 = static_cast<std::int32_t>(out.employment.person.size());
    std::int32_t w0 = static_cast<std::int32_t>(out.wage.person.size());
    append_block(ds.attrition, ds.a_span[p].first, ds.a_span[p].second, np,
                 false, out.attrition);
    append_block(ds.employment, ds.e_span[p].first, ds.e_span[p].second, np,
                 false, out.employment);
    std::int32_t att_base = a0 - ds.a_span[p].first;
    std::int32_t emp_base = e0 - ds.e_span[p].first;
    for (std::int32_t r = ds.w_span[p].first; r < ds.w_span[p].second; ++r) {
      std::int32_t att = ds.wage_attrition_row[r];
      out.wage_attrition_row.push_back(att < 0 ? -1 : att + att_base);
      out.wage_employment_row.push_back(ds.wage_employment_row[r] + emp_base);
    }
    append_block(ds.wage, ds.w_span[p].first, ds.w_span[p].second, np, true,
                 out.wage);
    out.a_span.emplace_back(
        a0, static_cast<std::int32_t>(out.attrition.person.size()));
    out.e_span.emplace_back(
        e0, static_cast<std::int32_t>(out.employment.person.size()));
    out.w_span.emplace_back(w0,
                            static_cast<std::int32_t>(out.wage.person.size()));
    out.person_ids.push_back(ds.person_ids[p]);
    out.person_weight.push_back(ds.person_weight[p]);
  }
  return out;
}

}  // namespace panelselect
