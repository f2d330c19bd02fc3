#include "spinlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "spinlab/errors.hpp"

namespace spinlab {

const char* kVersion = "0.1.0";

SpinSystem load_model(const Graph& g, const nlohmann::json& j) {
    std::string model = j.at("model").get<std::string>();
    if (model == "hardcore") return make_hardcore(g, j.at("lambda").get<double>());
    if (model == "two_spin")
        return make_two_spin(g, j.at("beta").get<double>(), j.at("gamma").get<double>(),
                             j.at("lambda").get<double>());
    if (model == "list_coloring") {
        std::vector<std::vector<Spin>> lists;
        for (const auto& row : j.at("lists")) {
            std::vector<Spin> L;
            for (const auto& c : row) L.push_back(static_cast<Spin>(c.get<int>()));
            lists.push_back(std::move(L));
        }
        return make_list_coloring(g, lists);
    }
    throw DomainError("model file: unknown model '" + model + "'");
}

SpinSystem load_model_file(const Graph& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open model file: " + path);
    nlohmann::json j;
    in >> j;
    return load_model(g, j);
}

PartialConfig pinning_from_json(const nlohmann::json& j) {
    PartialConfig out;
    for (auto it = j.begin(); it != j.end(); ++it)
        out.set(std::stoi(it.key()), static_cast<Spin>(it.value().get<int>()));
    return out;
}

nlohmann::json pinning_to_json(const PartialConfig& p) {
    nlohmann::json j = nlohmann::json::object();
    for (auto [v, s] : p.assign) j[std::to_string(v)] = static_cast<int>(s);
    return j;
}

nlohmann::json partition_to_json(const Partition& p) {
    nlohmann::json j;
    j["k"] = p.k;
    j["blocks"] = p.blocks;
    return j;
}

Partition partition_from_json(const nlohmann::json& j) {
    Partition p;
    p.k = j.at("k").get<int>();
    for (const auto& row : j.at("blocks")) p.blocks.push_back(row.get<std::vector<int>>());
    if (static_cast<int>(p.blocks.size()) != p.k)
        throw DomainError("partition file: k does not match the block list");
    for (const auto& b : p.blocks) p.cover.insert(p.cover.end(), b.begin(), b.end());
    std::sort(p.cover.begin(), p.cover.end());
    p.validate();
    return p;
}

Partition load_partition_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open partition file: " + path);
    nlohmann::json j;
    in >> j;
    return partition_from_json(j);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_distribution_csv(const ExactDistribution& d, int q, std::ostream& out) {
    out << "state,prob\n";
    for (int i = 0; i < d.size(); ++i)
        out << config_to_string(d.support[i], q) << ',' << format_double(d.prob[i]) << '\n';
}

nlohmann::json distribution_to_json(const ExactDistribution& d, int q) {
    nlohmann::json j;
    j["vertices"] = d.vertices;
    nlohmann::json states = nlohmann::json::array();
    nlohmann::json probs = nlohmann::json::array();
    for (int i = 0; i < d.size(); ++i) {
        states.push_back(config_to_string(d.support[i], q));
        probs.push_back(d.prob[i]);
    }
    j["states"] = std::move(states);
    j["probs"] = std::move(probs);
    j["total_weight"] = d.total_weight;
    return j;
}

std::uint64_t config_hash(const std::string& canonical) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = "spinlab";
    j["version"] = version.empty() ? kVersion : version;
    j["command"] = command;
    j["params"] = params;
    j["seed"] = seed;
    j["config_hash"] = config_hash(params.dump());
    j["wall_seconds"] = wall_seconds;
    j["outcome"] = outcome;
    return j;
}

}  // namespace spinlab
