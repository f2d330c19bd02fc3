#include "spinlab/config.hpp"

#include "spinlab/errors.hpp"

namespace spinlab {

PartialConfig PartialConfig::merged(const PartialConfig& other) const {
    PartialConfig out = *this;
    for (auto [v, s] : other.assign) {
        auto it = out.assign.find(v);
        if (it != out.assign.end() && it->second != s)
            throw ConsistencyError("conflicting pinning at vertex " + std::to_string(v));
        out.assign[v] = s;
    }
    return out;
}

void HammingWeight::validate() const {
    for (int w : weight)
        if (w < 1) throw DomainError("hamming weight: all weights must be >= 1");
}

long long hamming_distance(const HammingWeight& rho, const PartialConfig& a,
                           const PartialConfig& b) {
    if (a.assign.size() != b.assign.size())
        throw DomainError("hamming distance: mismatched vertex sets");
    long long d = 0;
    auto ib = b.assign.begin();
    for (auto [v, s] : a.assign) {
        if (ib == b.assign.end() || ib->first != v)
            throw DomainError("hamming distance: mismatched vertex sets");
        if (v < 0 || v >= static_cast<int>(rho.weight.size()))
            throw DomainError("hamming distance: vertex outside weight function");
        if (s != ib->second) d += rho.weight[v];
        ++ib;
    }
    return d;
}

long long hamming_distance(const HammingWeight& rho, const Config& a, const Config& b) {
    if (a.size() != b.size() || a.size() != rho.weight.size())
        throw DomainError("hamming distance: mismatched vertex sets");
    long long d = 0;
    for (std::size_t v = 0; v < a.size(); ++v)
        if (a[v] != b[v]) d += rho.weight[v];
    return d;
}

std::string config_to_string(const Config& c, int q) {
    std::string out;
    out.reserve(c.size());
    for (Spin s : c) {
        if (q == 2)
            out.push_back(s == 0 ? '-' : '+');
        else if (q <= 10)
            out.push_back(static_cast<char>('0' + s));
        else {
            if (!out.empty()) out.push_back(',');
            out += std::to_string(static_cast<int>(s));
        }
    }
    return out;
}

Config config_from_string(const std::string& s, int q) {
    Config out;
    if (q == 2) {
        for (char ch : s) {
            if (ch == '-')
                out.push_back(0);
            else if (ch == '+')
                out.push_back(1);
            else
                throw DomainError("config string: expected -/+");
        }
    } else if (q <= 10) {
        for (char ch : s) {
            if (ch < '0' || ch >= '0' + q) throw DomainError("config string: digit out of range");
            out.push_back(static_cast<Spin>(ch - '0'));
        }
    } else {
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t next = s.find(',', pos);
            if (next == std::string::npos) next = s.size();
            out.push_back(static_cast<Spin>(std::stoi(s.substr(pos, next - pos))));
            pos = next + 1;
        }
    }
    return out;
}

}  // namespace spinlab
