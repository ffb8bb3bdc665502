#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "calocal/config.hpp"
#include "calocal/metrics.hpp"
#include "calocal/wgan.hpp"

namespace calocal {

/// JSON-lines training report:
///   {"record":"run", "config":{...}, "scale":..., "geometry":{...}}
///   {"record":"epoch", "epoch":1, ...}            one per epoch
///   {"record":"final", "mask":[...], "coefficients":[...], ...}
/// Wall-clock time is not serialized so reruns are byte-identical.
std::string train_report_to_jsonl(const TrainReport& r, const RunConfig& resolved);

struct LoadedReport {
  TrainReport report;
  DetectorGeometry geometry;
  std::string config_json;
};

LoadedReport train_report_from_jsonl(const std::string& text);

/// `bin_lo,bin_hi,count` lines followed by `# underflow=U,overflow=O`.
std::string histogram_to_csv(const Histogram& h);

/// Flat JSON object with keys in insertion order.
std::string flat_json(const std::vector<std::pair<std::string, double>>& values);

}  // namespace calocal
