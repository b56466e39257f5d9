#include <charconv>
#include <map>
#include <set>

#include "causalcal/error.hpp"
#include "causalcal/serialize.hpp"
#include "cli/cli.hpp"

namespace causalcal::cli {

namespace {

std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      fields.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        fields.push_back(std::move(cell));
        records.push_back(std::move(fields));
      }
      fields.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorCategory::data_error, "unterminated quoted field");
  if (any || !cell.empty()) {
    fields.push_back(std::move(cell));
    records.push_back(std::move(fields));
  }
  return records;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& column) {
  std::string s = trim(raw);
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCategory::data_error,
                "row " + std::to_string(row) + ", column '" + column + "': '" + raw + "' is not a number");
  }
  return v;
}

std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw Error(ErrorCategory::config_error, std::string("'") + key + "' must be a string");
  return j[key].get<std::string>();
}

}  // namespace

DataConfig parse_data_config(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCategory::config_error, "data config must be an object");
  DataConfig c;
  if (!j.contains("covariates") || !j["covariates"].is_array() || j["covariates"].empty()) {
    throw Error(ErrorCategory::config_error, "data config needs a nonempty 'covariates' list");
  }
  for (const auto& v : j["covariates"]) {
    if (!v.is_string()) throw Error(ErrorCategory::config_error, "covariate names must be strings");
    c.covariates.push_back(v.get<std::string>());
  }
  if (auto t = opt_string(j, "treatment")) c.treatment = *t;
  if (auto o = opt_string(j, "outcome")) c.outcome = *o;
  c.instrument = opt_string(j, "instrument");
  c.base_prediction = opt_string(j, "base_prediction");
  c.pseudo_outcome = opt_string(j, "pseudo_outcome");
  if (auto k = opt_string(j, "treatment_kind")) {
    if (*k == "binary") c.treatment_kind = TreatmentKind::binary;
    else if (*k == "continuous") c.treatment_kind = TreatmentKind::continuous;
    else throw Error(ErrorCategory::config_error, "treatment_kind must be 'binary' or 'continuous'");
  }
  std::set<std::string> seen;
  auto claim = [&](const std::string& name) {
    if (!seen.insert(name).second) {
      throw Error(ErrorCategory::config_error, "column '" + name + "' is assigned more than one role");
    }
  };
  for (const auto& name : c.covariates) claim(name);
  claim(c.treatment);
  claim(c.outcome);
  if (c.instrument) claim(*c.instrument);
  if (c.base_prediction) claim(*c.base_prediction);
  if (c.pseudo_outcome) claim(*c.pseudo_outcome);
  return c;
}

nlohmann::ordered_json data_config_to_json(const DataConfig& c) {
  nlohmann::ordered_json j;
  j["covariates"] = c.covariates;
  j["treatment"] = c.treatment;
  j["outcome"] = c.outcome;
  j["instrument"] = c.instrument ? nlohmann::ordered_json(*c.instrument) : nlohmann::ordered_json();
  j["base_prediction"] = c.base_prediction ? nlohmann::ordered_json(*c.base_prediction) : nlohmann::ordered_json();
  j["pseudo_outcome"] = c.pseudo_outcome ? nlohmann::ordered_json(*c.pseudo_outcome) : nlohmann::ordered_json();
  j["treatment_kind"] = c.treatment_kind == TreatmentKind::binary ? "binary" : "continuous";
  return j;
}

IngestResult ingest_csv_text(const std::string& text, const DataConfig& cfg) {
  const auto records = split_records(text);
  if (records.empty()) throw Error(ErrorCategory::data_error, "CSV has no header row");
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < records[0].size(); ++k) col.emplace(trim(records[0][k]), k);
  auto find = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) throw Error(ErrorCategory::config_error, "column '" + name + "' is not in the CSV header");
    return it->second;
  };
  std::vector<std::size_t> xcols;
  for (const auto& name : cfg.covariates) xcols.push_back(find(name));
  const std::size_t acol = find(cfg.treatment), ycol = find(cfg.outcome);
  const std::optional<std::size_t> dcol = cfg.instrument ? std::optional(find(*cfg.instrument)) : std::nullopt;
  const std::optional<std::size_t> bcol =
      cfg.base_prediction ? std::optional(find(*cfg.base_prediction)) : std::nullopt;
  const std::optional<std::size_t> pcol = cfg.pseudo_outcome ? std::optional(find(*cfg.pseudo_outcome)) : std::nullopt;

  const std::size_t width = records[0].size();
  std::vector<Observation> rows;
  std::vector<double> base, pseudo;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::size_t row = r;  // 1-based data row
    if (rec.size() != width) {
      throw Error(ErrorCategory::data_error, "row " + std::to_string(row) + " has " + std::to_string(rec.size()) +
                                                 " fields, expected " + std::to_string(width));
    }
    Observation z;
    for (std::size_t k = 0; k < xcols.size(); ++k) z.x.push_back(parse_cell(rec[xcols[k]], row, cfg.covariates[k]));
    z.a = parse_cell(rec[acol], row, cfg.treatment);
    z.y = parse_cell(rec[ycol], row, cfg.outcome);
    if (cfg.treatment_kind == TreatmentKind::binary && z.a != 0.0 && z.a != 1.0) {
      throw Error(ErrorCategory::data_error, "row " + std::to_string(row) + ", column '" + cfg.treatment +
                                                 "': binary treatment must be 0 or 1");
    }
    if (dcol) {
      z.d = parse_cell(rec[*dcol], row, *cfg.instrument);
      if (*z.d != 0.0 && *z.d != 1.0) {
        throw Error(ErrorCategory::data_error, "row " + std::to_string(row) + ", column '" + *cfg.instrument +
                                                   "': instrument must be 0 or 1");
      }
    }
    if (bcol) base.push_back(parse_cell(rec[*bcol], row, *cfg.base_prediction));
    if (pcol) pseudo.push_back(parse_cell(rec[*pcol], row, *cfg.pseudo_outcome));
    rows.push_back(std::move(z));
  }
  if (rows.empty()) throw Error(ErrorCategory::data_error, "CSV has no data rows");
  IngestResult out;
  out.data = Dataset(Schema{cfg.covariates.size(), cfg.treatment_kind, dcol.has_value()}, std::move(rows),
                     std::move(base));
  if (pcol) out.pseudo_outcomes = std::move(pseudo);
  return out;
}

IngestResult ingest_csv(const std::filesystem::path& path, const DataConfig& cfg) {
  return ingest_csv_text(read_file(path), cfg);
}

}  // namespace causalcal::cli
