#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "usim/dataset.hpp"
#include "usim/mcstats.hpp"

namespace usim::cli {

// Builds the effective run configuration from a preset name plus optional
// JSON overrides. Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& preset, const std::string& config_path);

// Serialized echo of the effective configuration; embedded in the manifest
// and the stats artifact so runs are self-describing.
nlohmann::ordered_json config_echo(const RunConfig& cfg);

void write_ensemble(const CoefficientEnsemble& ens, const RunConfig& cfg,
                    const std::string& path);
CoefficientEnsemble read_ensemble(const std::string& path);

void write_traces(const std::vector<ContinuationTrace>& traces,
                  const std::string& path);

void write_stats(const ReconstructionStats& st, const RunConfig& cfg,
                 const std::string& json_path, const std::string& nodes_csv_path,
                 const std::string& profile_csv_path);

void write_record_csv(const DatasetRecord& rec, const std::string& path);
void write_realization_csv(const Realization& real, const std::string& path);

}  // namespace usim::cli
