#include "aitc/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "aitc/errors.hpp"

namespace aitc {

std::string to_string(CovariateKind k) {
  return k == CovariateKind::binary ? "binary" : "continuous";
}

CovariateKind covariate_kind_from_string(const std::string& s) {
  if (s == "binary") return CovariateKind::binary;
  if (s == "continuous") return CovariateKind::continuous;
  throw SchemaError("unknown covariate kind: " + s);
}

linalg::Matrix IpdTrial::covariate_matrix() const {
  linalg::Matrix x(records.size(), covariates.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = 0; j < covariates.size(); ++j)
      x(i, j) = records[i].covariates[j];
  return x;
}

std::vector<double> IpdTrial::covariate_column(std::size_t j) const {
  std::vector<double> col(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    col[i] = records[i].covariates[j];
  return col;
}

std::vector<double> IpdTrial::active_indicator() const {
  std::vector<double> z(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    z[i] = records[i].arm == arms.active ? 1.0 : 0.0;
  return z;
}

std::vector<double> IpdTrial::outcomes() const {
  std::vector<double> y(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) y[i] = records[i].outcome;
  return y;
}

std::vector<std::string> IpdTrial::subject_ids() const {
  std::vector<std::string> ids(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) ids[i] = records[i].id;
  return ids;
}

std::vector<Violation> validate_trial(const IpdTrial& trial) {
  std::vector<Violation> out;
  const std::size_t p = trial.covariates.size();

  std::set<std::string> names;
  for (const auto& spec : trial.covariates) {
    if (!names.insert(spec.name).second) {
      out.push_back({"", "duplicate covariate name: " + spec.name});
    }
  }
  if (trial.arms.active == trial.arms.anchor) {
    out.push_back({"", "active and anchor arm labels coincide"});
  }

  std::size_t n_active = 0, n_anchor = 0;
  std::set<std::string> ids;
  for (const auto& rec : trial.records) {
    if (!ids.insert(rec.id).second) {
      out.push_back({rec.id, "duplicate subject id"});
    }
    if (rec.arm == trial.arms.active) {
      ++n_active;
    } else if (rec.arm == trial.arms.anchor) {
      ++n_anchor;
    } else {
      out.push_back({rec.id, "arm '" + rec.arm + "' not in declared labels {" +
                                 trial.arms.active + ", " + trial.arms.anchor +
                                 "}"});
    }
    if (rec.covariates.size() != p) {
      out.push_back({rec.id, "covariate vector length mismatch"});
      continue;
    }
    for (std::size_t j = 0; j < p; ++j) {
      const double v = rec.covariates[j];
      if (!std::isfinite(v)) {
        out.push_back({rec.id, "non-finite covariate " + trial.covariates[j].name});
      } else if (trial.covariates[j].kind == CovariateKind::binary &&
                 v != 0.0 && v != 1.0) {
        out.push_back({rec.id, "binary covariate " + trial.covariates[j].name +
                                   " not coded 0/1"});
      }
    }
    if (!std::isfinite(rec.outcome)) {
      out.push_back({rec.id, "non-finite outcome"});
    } else if (trial.outcome_type == OutcomeType::binary &&
               rec.outcome != 0.0 && rec.outcome != 1.0) {
      out.push_back({rec.id, "binary outcome not coded 0/1"});
    }
  }
  if (n_active == 0) out.push_back({"", "no records in active arm"});
  if (n_anchor == 0) out.push_back({"", "no records in anchor arm"});
  return out;
}

AgdSummary summarize_ipd(const IpdTrial& trial) {
  AgdSummary agd;
  agd.trial_id = trial.trial_id;
  agd.arms = trial.arms;
  agd.covariates = trial.covariates;
  agd.outcome_type = trial.outcome_type;

  const std::size_t n = trial.n(), p = trial.p();
  agd.covariate_means.assign(p, 0.0);
  for (const auto& rec : trial.records)
    for (std::size_t j = 0; j < p; ++j) agd.covariate_means[j] += rec.covariates[j];
  if (n > 0)
    for (double& m : agd.covariate_means) m /= static_cast<double>(n);

  if (n >= 2) {
    agd.covariance = linalg::sample_covariance(trial.covariate_matrix());
  } else {
    agd.warnings.push_back("covariance omitted: fewer than 2 records");
  }

  // per-arm tabulations
  for (int side = 0; side < 2; ++side) {
    const std::string& label = side == 0 ? trial.arms.active : trial.arms.anchor;
    OutcomeSummary& res = side == 0 ? agd.active_outcome : agd.anchor_outcome;
    std::size_t& count = side == 0 ? agd.n_active : agd.n_anchor;
    double s = 0.0, ss = 0.0;
    for (const auto& rec : trial.records) {
      if (rec.arm != label) continue;
      ++count;
      if (trial.outcome_type == OutcomeType::binary) {
        if (rec.outcome == 0.0) ++res.count_y0;
        else ++res.count_y1;
      } else {
        s += rec.outcome;
        ss += rec.outcome * rec.outcome;
      }
    }
    if (trial.outcome_type == OutcomeType::continuous && count > 0) {
      res.mean = s / static_cast<double>(count);
      res.sd = count > 1 ? std::sqrt(std::max(
                               0.0, (ss - s * res.mean) /
                                        static_cast<double>(count - 1)))
                         : 0.0;
    }
  }
  return agd;
}

// ---------------------------------------------------------------------------
// CSV / JSON
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw SchemaError("");
    return v;
  } catch (...) {
    throw SchemaError("cannot parse " + what + " from '" + s + "'");
  }
}

}  // namespace

IpdTrial load_ipd_csv(const std::string& path, const std::string& trial_id,
                      const std::vector<CovariateSpec>& specs,
                      const ArmLabels& arms, OutcomeType outcome_type) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open IPD file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty IPD file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.size() < 3 + specs.size() || header[0] != "subject_id" ||
      header[1] != "arm" || header[2] != "outcome") {
    throw SchemaError(path + ": header must be subject_id,arm,outcome,<covariates>");
  }
  // map declared covariates onto header columns by name
  std::vector<std::size_t> col_of(specs.size());
  for (std::size_t j = 0; j < specs.size(); ++j) {
    auto it = std::find(header.begin() + 3, header.end(), specs[j].name);
    if (it == header.end())
      throw SchemaError(path + ": missing covariate column " + specs[j].name);
    col_of[j] = static_cast<std::size_t>(it - header.begin());
  }

  IpdTrial trial;
  trial.trial_id = trial_id;
  trial.arms = arms;
  trial.outcome_type = outcome_type;
  trial.covariates = specs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw SchemaError(path + ":" + std::to_string(lineno) +
                        ": wrong field count");
    }
    SubjectRecord rec;
    rec.id = fields[0];
    rec.arm = fields[1];
    rec.outcome = parse_double(fields[2], "outcome");
    rec.covariates.resize(specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j)
      rec.covariates[j] = parse_double(fields[col_of[j]], specs[j].name);
    trial.records.push_back(std::move(rec));
  }
  return trial;
}

void save_ipd_csv(const IpdTrial& trial, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out << "subject_id,arm,outcome";
  for (const auto& spec : trial.covariates) out << ',' << spec.name;
  out << '\n';
  for (const auto& rec : trial.records) {
    out << rec.id << ',' << rec.arm << ',' << rec.outcome;
    for (double v : rec.covariates) out << ',' << v;
    out << '\n';
  }
}

namespace {

nlohmann::json outcome_to_json(const OutcomeSummary& o, OutcomeType type) {
  if (type == OutcomeType::binary) {
    return {{"y0", o.count_y0}, {"y1", o.count_y1}};
  }
  return {{"mean", o.mean}, {"sd", o.sd}};
}

OutcomeSummary outcome_from_json(const nlohmann::json& j, OutcomeType type) {
  OutcomeSummary o;
  if (type == OutcomeType::binary) {
    o.count_y0 = j.at("y0").get<std::size_t>();
    o.count_y1 = j.at("y1").get<std::size_t>();
  } else {
    o.mean = j.at("mean").get<double>();
    o.sd = j.at("sd").get<double>();
  }
  return o;
}

}  // namespace

nlohmann::json agd_to_json(const AgdSummary& agd) {
  nlohmann::json j;
  j["schema"] = std::string(kSchemaVersion);
  j["trial"] = agd.trial_id;
  j["arms"] = {{"active", {{"label", agd.arms.active}, {"size", agd.n_active}}},
               {"anchor", {{"label", agd.arms.anchor}, {"size", agd.n_anchor}}}};
  nlohmann::json covs = nlohmann::json::array();
  for (std::size_t k = 0; k < agd.covariates.size(); ++k) {
    covs.push_back({{"name", agd.covariates[k].name},
                    {"kind", to_string(agd.covariates[k].kind)},
                    {"mean", agd.covariate_means[k]}});
  }
  j["covariates"] = covs;
  if (agd.covariance) {
    nlohmann::json m = nlohmann::json::array();
    for (std::size_t r = 0; r < agd.covariance->rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < agd.covariance->cols(); ++c)
        row.push_back((*agd.covariance)(r, c));
      m.push_back(row);
    }
    j["covariance"] = m;
  }
  j["outcomes"] = {
      {"type", agd.outcome_type == OutcomeType::binary ? "binary" : "continuous"},
      {"active", outcome_to_json(agd.active_outcome, agd.outcome_type)},
      {"anchor", outcome_to_json(agd.anchor_outcome, agd.outcome_type)}};
  if (agd.published_effect) {
    nlohmann::json pe = {{"scale", agd.published_effect->scale},
                         {"point", agd.published_effect->point}};
    if (agd.published_effect->se) pe["se"] = *agd.published_effect->se;
    j["published_effect"] = pe;
  }
  if (!agd.warnings.empty()) j["warnings"] = agd.warnings;
  return j;
}

AgdSummary agd_from_json(const nlohmann::json& j) {
  try {
    AgdSummary agd;
    if (j.at("schema").get<std::string>() != kSchemaVersion)
      throw SchemaError("unsupported schema version");
    agd.trial_id = j.at("trial").get<std::string>();
    agd.arms.active = j.at("arms").at("active").at("label").get<std::string>();
    agd.arms.anchor = j.at("arms").at("anchor").at("label").get<std::string>();
    agd.n_active = j.at("arms").at("active").at("size").get<std::size_t>();
    agd.n_anchor = j.at("arms").at("anchor").at("size").get<std::size_t>();
    for (const auto& c : j.at("covariates")) {
      CovariateSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.kind = covariate_kind_from_string(c.at("kind").get<std::string>());
      const double mean = c.at("mean").get<double>();
      if (spec.kind == CovariateKind::binary && (mean < 0.0 || mean > 1.0))
        throw SchemaError("binary covariate mean outside [0,1]: " + spec.name);
      agd.covariates.push_back(spec);
      agd.covariate_means.push_back(mean);
    }
    if (j.contains("covariance")) {
      const auto& m = j.at("covariance");
      const std::size_t p = agd.covariates.size();
      if (m.size() != p) throw SchemaError("covariance dimension mismatch");
      linalg::Matrix cov(p, p);
      for (std::size_t r = 0; r < p; ++r) {
        if (m[r].size() != p) throw SchemaError("covariance not square");
        for (std::size_t c = 0; c < p; ++c) cov(r, c) = m[r][c].get<double>();
      }
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c)
          if (std::abs(cov(r, c) - cov(c, r)) > 1e-12)
            throw SchemaError("covariance not symmetric");
      agd.covariance = cov;
    }
    const auto& out = j.at("outcomes");
    agd.outcome_type = out.at("type").get<std::string>() == "binary"
                           ? OutcomeType::binary
                           : OutcomeType::continuous;
    agd.active_outcome = outcome_from_json(out.at("active"), agd.outcome_type);
    agd.anchor_outcome = outcome_from_json(out.at("anchor"), agd.outcome_type);
    if (agd.outcome_type == OutcomeType::binary) {
      if (agd.active_outcome.count_y0 + agd.active_outcome.count_y1 !=
              agd.n_active ||
          agd.anchor_outcome.count_y0 + agd.anchor_outcome.count_y1 !=
              agd.n_anchor)
        throw SchemaError("outcome counts do not sum to arm sizes");
    }
    if (j.contains("published_effect")) {
      PublishedEffect pe;
      pe.scale = j.at("published_effect").at("scale").get<std::string>();
      pe.point = j.at("published_effect").at("point").get<double>();
      if (j.at("published_effect").contains("se"))
        pe.se = j.at("published_effect").at("se").get<double>();
      agd.published_effect = pe;
    }
    if (j.contains("warnings"))
      agd.warnings = j.at("warnings").get<std::vector<std::string>>();
    return agd;
  } catch (const SchemaError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed AgD JSON: ") + e.what());
  }
}

AgdSummary load_agd_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open AgD file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return agd_from_json(j);
}

void save_agd_json(const AgdSummary& agd, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out << agd_to_json(agd).dump(2) << '\n';
}

}  // namespace aitc
