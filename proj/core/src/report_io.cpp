#include "calocal/report_io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "calocal/errors.hpp"
#include "config_json.hpp"

namespace calocal {

using json = nlohmann::ordered_json;

std::string train_report_to_jsonl(const TrainReport& r, const RunConfig& resolved) {
  std::string out;
  json head;
  head["record"] = "run";
  head["config"] = detail::config_json(resolved);
  head["geometry"] = {{"n_rows", resolved.detector.n_rows}, {"n_cols", resolved.detector.n_cols}};
  head["scale"] = r.scale;
  out += head.dump() + "\n";

  for (const auto& e : r.epochs) {
    json j;
    j["record"] = "epoch";
    j["epoch"] = e.epoch;
    j["critic_loss"] = e.critic_loss;
    j["generator_loss"] = e.generator_loss;
    j["wasserstein_estimate"] = e.wasserstein_estimate;
    j["mae"] = e.mae ? json(*e.mae) : json(nullptr);
    j["r2"] = e.r2 ? json(*e.r2) : json(nullptr);
    out += j.dump() + "\n";
  }

  json tail;
  tail["record"] = "final";
  tail["mask"] = r.mask;
  tail["coefficients"] = r.final_coefficients;
  tail["border_cells"] = r.border_cells;
  tail["border_coefficients"] = r.border_coefficients;
  out += tail.dump() + "\n";
  return out;
}

LoadedReport train_report_from_jsonl(const std::string& text) {
  LoadedReport out;
  std::istringstream in(text);
  std::string line;
  bool have_run = false;
  bool have_final = false;
  std::size_t lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto j = json::parse(line);
      const auto kind = j.at("record").get<std::string>();
      if (kind == "run") {
        out.config_json = j.at("config").dump();
        out.geometry.n_rows = j.at("geometry").at("n_rows").get<int>();
        out.geometry.n_cols = j.at("geometry").at("n_cols").get<int>();
        out.report.scale = j.at("scale").get<double>();
        have_run = true;
      } else if (kind == "epoch") {
        EpochRecord e;
        e.epoch = j.at("epoch").get<int>();
        e.critic_loss = j.at("critic_loss").get<double>();
        e.generator_loss = j.at("generator_loss").get<double>();
        e.wasserstein_estimate = j.at("wasserstein_estimate").get<double>();
        if (!j.at("mae").is_null()) e.mae = j.at("mae").get<double>();
        if (!j.at("r2").is_null()) e.r2 = j.at("r2").get<double>();
        out.report.epochs.push_back(e);
      } else if (kind == "final") {
        out.report.mask = j.at("mask").get<std::vector<std::size_t>>();
        out.report.final_coefficients = j.at("coefficients").get<std::vector<double>>();
        out.report.border_cells = j.at("border_cells").get<std::vector<std::size_t>>();
        out.report.border_coefficients = j.at("border_coefficients").get<std::vector<double>>();
        have_final = true;
      } else {
        throw FormatError("unknown record kind '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError("report line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!have_run || !have_final) throw FormatError("report lacks its run or final record");
  if (out.report.mask.size() != out.report.final_coefficients.size() ||
      out.report.border_cells.size() != out.report.border_coefficients.size())
    throw FormatError("report coefficient lists are inconsistent");
  return out;
}

std::string histogram_to_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  char line[128];
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    std::snprintf(line, sizeof line, "%.9g,%.9g,%llu\n", h.edges[k], h.edges[k + 1],
                  static_cast<unsigned long long>(h.counts[k]));
    out += line;
  }
  std::snprintf(line, sizeof line, "# underflow=%llu,overflow=%llu\n",
                static_cast<unsigned long long>(h.underflow),
                static_cast<unsigned long long>(h.overflow));
  out += line;
  return out;
}

std::string flat_json(const std::vector<std::pair<std::string, double>>& values) {
  json j = json::object();
  for (const auto& [k, v] : values) j[k] = v;
  return j.dump(2) + "\n";
}

}  // namespace calocal
