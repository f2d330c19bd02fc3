#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinlab/config.hpp"
#include "spinlab/exact.hpp"
#include "spinlab/partition.hpp"
#include "spinlab/spin_system.hpp"

namespace spinlab {

/// Model files are JSON objects:
///   {"model":"hardcore","lambda":...}
///   {"model":"two_spin","beta":...,"gamma":...,"lambda":...}
///   {"model":"list_coloring","lists":[[...],...]}
SpinSystem load_model(const Graph& g, const nlohmann::json& j);
SpinSystem load_model_file(const Graph& g, const std::string& path);

/// Pinnings serialize as a JSON map vertex -> spin.
PartialConfig pinning_from_json(const nlohmann::json& j);
nlohmann::json pinning_to_json(const PartialConfig& p);

/// Partitions serialize as {"k":k, "blocks":[[...],...]}.
nlohmann::json partition_to_json(const Partition& p);
Partition partition_from_json(const nlohmann::json& j);
Partition load_partition_file(const std::string& path);

/// CSV export of a distribution: header `state,prob`, states as spin
/// strings, floats at 17 significant digits.
void write_distribution_csv(const ExactDistribution& d, int q, std::ostream& out);
nlohmann::json distribution_to_json(const ExactDistribution& d, int q);

std::string format_double(double x);  // 17 significant digits

/// FNV-1a hash of a canonical parameter dump, for run manifests.
std::uint64_t config_hash(const std::string& canonical);

struct RunManifest {
    std::string command;
    nlohmann::json params;
    std::uint64_t seed = 0;
    std::string version;
    double wall_seconds = 0.0;
    nlohmann::json outcome;

    nlohmann::json to_json() const;
};

extern const char* kVersion;

}  // namespace spinlab
