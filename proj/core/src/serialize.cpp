#include "causalcal/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "causalcal/error.hpp"

namespace causalcal {

namespace {

template <class T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorCategory::config_error, std::string("model is missing '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCategory::config_error, std::string("model field '") + name + "' has the wrong type");
  }
}

}  // namespace

nlohmann::ordered_json model_to_json(const CalibratorModel& model) {
  nlohmann::ordered_json j;
  j["class"] = calibrator_class_name(model.cls());
  nlohmann::ordered_json p;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IsotonicParams>) {
          p["breakpoints"] = v.breakpoints;
          p["levels"] = v.levels;
          p["strict_slope"] = v.strict_slope;
        } else if constexpr (std::is_same_v<T, BinningParams>) {
          p["edges"] = v.edges;
          p["levels"] = v.levels;
        } else if constexpr (std::is_same_v<T, LinearParams>) {
          p["slope"] = v.slope;
          p["intercept"] = v.intercept;
        } else {
          p["a"] = v.a;
          p["b"] = v.b;
        }
      },
      model.params());
  j["params"] = p;
  nlohmann::ordered_json meta;
  meta["merged_buckets"] = model.meta().merged_buckets;
  meta["flags"] = model.meta().flags;
  for (const auto& [k, v] : model.meta().extra.items()) meta[k] = v;
  j["meta"] = meta;
  return j;
}

CalibratorModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCategory::config_error, "model JSON must be an object");
  const CalibratorClass cls = parse_calibrator_class(field<std::string>(j, "class"));
  if (!j.contains("params") || !j["params"].is_object()) {
    throw Error(ErrorCategory::config_error, "model is missing 'params'");
  }
  const auto& p = j["params"];
  CalibratorModel::Params params;
  switch (cls) {
    case CalibratorClass::isotonic: {
      IsotonicParams v{field<std::vector<double>>(p, "breakpoints"), field<std::vector<double>>(p, "levels"),
                       p.contains("strict_slope") ? field<double>(p, "strict_slope") : 0.0};
      if (v.levels.empty() || v.levels.size() != v.breakpoints.size()) {
        throw Error(ErrorCategory::config_error, "isotonic breakpoints and levels differ in length");
      }
      params = v;
      break;
    }
    case CalibratorClass::binning: {
      BinningParams v{field<std::vector<double>>(p, "edges"), field<std::vector<double>>(p, "levels")};
      if (v.levels.size() != v.edges.size() + 1) {
        throw Error(ErrorCategory::config_error, "binning needs one more level than edges");
      }
      params = v;
      break;
    }
    case CalibratorClass::linear:
      params = LinearParams{field<double>(p, "slope"), field<double>(p, "intercept")};
      break;
    case CalibratorClass::platt:
      params = PlattParams{field<double>(p, "a"), field<double>(p, "b")};
      break;
  }
  ModelMeta meta;
  if (j.contains("meta") && j["meta"].is_object()) {
    for (const auto& [k, v] : j["meta"].items()) {
      if (k == "merged_buckets") {
        meta.merged_buckets = v.get<std::size_t>();
      } else if (k == "flags") {
        meta.flags = v.get<std::vector<std::string>>();
      } else {
        meta.extra[k] = v;
      }
    }
  }
  return CalibratorModel(std::move(params), std::move(meta));
}

nlohmann::ordered_json report_to_json(const BinnedCalReport& report) {
  nlohmann::ordered_json j;
  j["estimate"] = report.estimate;
  j["edges"] = report.edges;
  j["empty_buckets"] = report.empty_buckets;
  auto buckets = nlohmann::ordered_json::array();
  for (const auto& b : report.buckets) {
    nlohmann::ordered_json e;
    e["count"] = b.count;
    e["mean_pred"] = b.mean_pred;
    e["mean_target"] = b.mean_target;
    e["gap"] = b.gap;
    buckets.push_back(e);
  }
  j["buckets"] = buckets;
  j["flags"] = report.flags;
  return j;
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t file_digest(const std::filesystem::path& path) { return fnv1a64(read_file(path)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::io_error, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::io_error, "cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCategory::io_error, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCategory::io_error, "cannot move output into '" + path.string() + "'");
  }
}

}  // namespace causalcal
