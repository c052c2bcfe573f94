#include "core/describe.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/summation.hpp"

namespace panelselect {

double weighted_mean(std::span<const double> values,
                     std::span<const double> weights) {
  if (values.size() != weights.size()) {
    throw Error(ErrorCode::contract, "weighted_mean: size mismatch");
  }
  KahanSum num, den;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num.add(weights[i] * values[i]);
    den.add(weights[i]);
  }
  if (den.value() <= 0.0) {
    throw Error(ErrorCode::contract, "weighted_mean: nonpositive weight total");
  }
  return num.value() / den.value();
}

double replicate_se(double full_estimate,
                    std::span<const double> replicate_estimates, double scale) {
  if (replicate_estimates.empty()) return 0.0;
  KahanSum ss;
  for (double est : replicate_estimates) {
    double d = est - full_estimate;
    ss.add(d * d);
  }
  return std::sqrt(scale * ss.value() /
                   static_cast<double>(replicate_estimates.size()));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double variable_value(const PanelDataset& ds, const ObservationRow& row,
                      int cov_idx, int builtin) {
  switch (builtin) {
    case 1:
      return row.employed ? (*row.employed ? 1.0 : 0.0) : kNaN;
    case 2:
      return row.log_wage ? *row.log_wage : kNaN;
    case 3:
      return row.weight;
    default:
      return row.covariates[cov_idx];
  }
  (void)ds;
}

struct GroupData {
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<std::size_t> row_index;  // into ds.rows, for replicate weights
};

}  // namespace

DescribeTable describe_panel(const PanelDataset& ds,
                             const DescribeOptions& options) {
  DescribeTable table;

  std::vector<int> replicate_cols;
  if (!options.replicate_weight_prefix.empty()) {
    for (std::size_t c = 0; c < ds.covariate_names.size(); ++c) {
      const std::string& name = ds.covariate_names[c];
      if (name.size() > options.replicate_weight_prefix.size() &&
          name.compare(0, options.replicate_weight_prefix.size(),
                       options.replicate_weight_prefix) == 0) {
        replicate_cols.push_back(static_cast<int>(c));
      }
    }
    if (replicate_cols.empty()) {
      throw Error(ErrorCode::config,
                  "no replicate weight columns with prefix '" +
                      options.replicate_weight_prefix + "'");
    }
  }
  table.se_method = replicate_cols.empty() ? "bootstrap" : "brr";

  for (const std::string& var : options.variables) {
    int builtin = 0;
    int cov_idx = -1;
    if (var == "employed") {
      builtin = 1;
    } else if (var == "log_wage") {
      builtin = 2;
    } else if (var == "weight") {
      builtin = 3;
    } else {
      cov_idx = ds.covariate_index(var);
      if (cov_idx < 0) {
        throw Error(ErrorCode::config, "unknown variable '" + var + "'");
      }
    }

    for (int t = 1; t < ds.t_max; ++t) {
      GroupData groups[2];  // 0 = respondent at t+1, 1 = attritor at t+1
      for (const auto& person : ds.persons) {
        const ObservationRow* current = nullptr;
        bool next_responds = false;
        for (std::size_t k = 0; k < person.n_rows; ++k) {
          const ObservationRow& row = ds.rows[person.first_row + k];
          if (row.wave == t && row.responded) {
            current = &row;
          } else if (row.wave == t + 1) {
            next_responds = row.responded;
          }
        }
        if (!current) continue;
        double v = variable_value(ds, *current, cov_idx, builtin);
        if (std::isnan(v)) continue;
        GroupData& g = groups[next_responds ? 0 : 1];
        g.values.push_back(v);
        g.weights.push_back(current->weight);
        g.row_index.push_back(
            static_cast<std::size_t>(current - ds.rows.data()));
      }
      if (groups[0].values.empty() || groups[1].values.empty()) continue;

      DescribeRow out_row;
      out_row.variable = var;
      out_row.wave = t;
      GroupCell* cells[2] = {&out_row.respondents, &out_row.attritors};
      for (int g = 0; g < 2; ++g) {
        const GroupData& gd = groups[g];
        GroupCell& cell = *cells[g];
        cell.n = static_cast<std::int64_t>(gd.values.size());
        cell.mean = weighted_mean(gd.values, gd.weights);
        std::vector<double> replicate_means;
        if (!replicate_cols.empty()) {
          std::vector<double> rep_w(gd.values.size());
          for (int col : replicate_cols) {
            for (std::size_t i = 0; i < gd.values.size(); ++i) {
              rep_w[i] = ds.rows[gd.row_index[i]].covariates[col];
            }
            replicate_means.push_back(weighted_mean(gd.values, rep_w));
          }
          cell.se =
              replicate_se(cell.mean, replicate_means, options.brr_scale);
        } else {
          // One row per person in each cell, so a row bootstrap is the
          // person-cluster bootstrap here.
          std::mt19937_64 engine(
              mix_seed(options.seed, (static_cast<std::uint64_t>(t) << 20) ^
                                         (static_cast<std::uint64_t>(g) << 16) ^
                                         builtin ^ (cov_idx + 7)));
          std::vector<double> bv(gd.values.size()), bw(gd.values.size());
          for (int rep = 0; rep < options.bootstrap_b; ++rep) {
            for (std::size_t i = 0; i < gd.values.size(); ++i) {
              std::size_t pick = engine() % gd.values.size();
              bv[i] = gd.values[pick];
              bw[i] = gd.weights[pick];
            }
            replicate_means.push_back(weighted_mean(bv, bw));
          }
          cell.se = replicate_se(cell.mean, replicate_means, 1.0);
        }
      }
      double diff = out_row.respondents.mean - out_row.attritors.mean;
      double denom = std::sqrt(out_row.respondents.se * out_row.respondents.se +
                               out_row.attritors.se * out_row.attritors.se);
      out_row.significant_5pct =
          denom > 0.0 ? std::abs(diff) / denom > 1.959964 : diff != 0.0;
      table.rows.push_back(std::move(out_row));
    }
  }
  return table;
}

}  // namespace panelselect
