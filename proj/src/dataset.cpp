#include "ergosense/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace ergosense {

namespace {

using CellKey = std::array<std::int64_t, kMaxDim>;

CellKey cell_of(const Vec& x, double cell) {
    CellKey key{};
    for (Eigen::Index i = 0; i < x.size(); ++i) key[i] = static_cast<std::int64_t>(std::floor(x(i) / cell));
    return key;
}

// Indices (into data) of the most recent point per cell among `candidates`.
std::vector<std::size_t> thin(const Dataset& data, const std::vector<std::size_t>& candidates, double cell) {
    std::map<CellKey, std::size_t> latest;
    for (std::size_t idx : candidates) {
        auto [it, inserted] = latest.emplace(cell_of(data[idx].location, cell), idx);
        if (!inserted && data[idx].time >= data[it->second].time) it->second = idx;
    }
    std::vector<std::size_t> out;
    out.reserve(latest.size());
    for (const auto& kv : latest) out.push_back(kv.second);
    std::sort(out.begin(), out.end());
    return out;
}

void keep_most_recent(const Dataset& data, std::vector<std::size_t>& idx, std::size_t cap) {
    if (idx.size() <= cap) return;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return data[a].time < data[b].time; });
    idx.erase(idx.begin(), idx.end() - static_cast<std::ptrdiff_t>(cap));
    std::sort(idx.begin(), idx.end());
}

}  // namespace

std::size_t count_label(const Dataset& data, int label) {
    return static_cast<std::size_t>(
        std::count_if(data.begin(), data.end(), [label](const Measurement& m) { return m.label == label; }));
}

Dataset decimate(const Dataset& data, const DecimationCaps& caps) {
    if (!(caps.cell > 0.0)) throw std::invalid_argument("decimate: cell must be positive");
    std::vector<std::size_t> contacts, free;
    for (std::size_t i = 0; i < data.size(); ++i) (data[i].label == 1 ? contacts : free).push_back(i);

    if (contacts.size() > caps.contact_cap) {
        contacts = thin(data, contacts, 0.5 * caps.cell);
        keep_most_recent(data, contacts, caps.contact_cap);
    }
    if (free.size() > caps.free_cap) {
        free = thin(data, free, caps.cell);
        keep_most_recent(data, free, caps.free_cap);
    }

    std::vector<std::size_t> keep;
    keep.reserve(contacts.size() + free.size());
    std::merge(contacts.begin(), contacts.end(), free.begin(), free.end(), std::back_inserter(keep));
    Dataset out;
    out.reserve(keep.size());
    for (std::size_t i : keep) out.push_back(data[i]);
    return out;
}

}  // namespace ergosense
