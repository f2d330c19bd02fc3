#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spinlab {

/// Spin values are 0-based indices into [q]. Pretty-printing (-/+ for 2-spin)
/// lives in I/O only.
using Spin = std::int8_t;

/// Full assignment, one spin per vertex.
using Config = std::vector<Spin>;

/// Assignment on a vertex subset; doubles as a pinning tau.
struct PartialConfig {
    std::map<int, Spin> assign;

    PartialConfig() = default;
    PartialConfig(std::initializer_list<std::pair<const int, Spin>> init) : assign(init) {}

    bool empty() const { return assign.empty(); }
    std::size_t size() const { return assign.size(); }
    bool contains(int v) const { return assign.count(v) != 0; }
    Spin at(int v) const { return assign.at(v); }
    void set(int v, Spin s) { assign[v] = s; }

    bool operator==(const PartialConfig&) const = default;

    /// Union of the two assignments; throws ConsistencyError on a
    /// conflicting reassignment.
    PartialConfig merged(const PartialConfig& other) const;
};

/// Per-vertex positive integer weights rho(v) for the weighted Hamming
/// distance.
struct HammingWeight {
    std::vector<int> weight;

    static HammingWeight unit(int n) { return HammingWeight{std::vector<int>(n, 1)}; }
    void validate() const;
};

/// Sum of rho(v) over vertices where a and b disagree. Both arguments must
/// be defined on the same vertex set.
long long hamming_distance(const HammingWeight& rho, const PartialConfig& a,
                           const PartialConfig& b);
long long hamming_distance(const HammingWeight& rho, const Config& a, const Config& b);

std::string config_to_string(const Config& c, int q);
Config config_from_string(const std::string& s, int q);

}  // namespace spinlab
