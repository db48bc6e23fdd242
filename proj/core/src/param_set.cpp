#include "relret/param_set.hpp"

#include "relret/error.hpp"

namespace relret {

Tensor2D& ParamSet::add(const std::string& name, Tensor2D value) {
    if (index_.count(name)) throw UsageError("ParamSet: duplicate name '" + name + "'");
    index_[name] = entries_.size();
    entries_.emplace_back(name, std::move(value));
    return entries_.back().second;
}

Tensor2D& ParamSet::get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw UsageError("ParamSet: unknown name '" + name + "'");
    return entries_[it->second].second;
}

const Tensor2D& ParamSet::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UsageError("ParamSet: unknown name '" + name + "'");
    return entries_[it->second].second;
}

std::size_t ParamSet::scalar_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : entries_) n += t.size();
    return n;
}

std::vector<double> ParamSet::flatten() const {
    std::vector<double> flat;
    flat.reserve(scalar_count());
    for (const auto& [name, t] : entries_)
        flat.insert(flat.end(), t.data.begin(), t.data.end());
    return flat;
}

void ParamSet::unflatten(const std::vector<double>& flat) {
    if (flat.size() != scalar_count())
        throw UsageError("ParamSet::unflatten: length mismatch");
    std::size_t pos = 0;
    for (auto& [name, t] : entries_) {
        std::copy(flat.begin() + pos, flat.begin() + pos + t.size(), t.data.begin());
        pos += t.size();
    }
}

ParamSet ParamSet::zeros_like() const {
    ParamSet z;
    for (const auto& [name, t] : entries_) z.add(name, Tensor2D(t.rows, t.cols));
    return z;
}

bool ParamSet::all_finite() const {
    for (const auto& [name, t] : entries_)
        if (!t.all_finite()) return false;
    return true;
}

} // namespace relret
