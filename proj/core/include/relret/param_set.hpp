#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relret/tensor.hpp"

namespace relret {

/// Named collection of trainable tensors. Entry order is insertion order and
/// is the canonical flat ordering: it is a function of the architecture
/// config alone, so two models built from the same config always agree.
class ParamSet {
  public:
    Tensor2D& add(const std::string& name, Tensor2D value);

    bool has(const std::string& name) const { return index_.count(name) != 0; }
    Tensor2D& get(const std::string& name);
    const Tensor2D& get(const std::string& name) const;

    std::size_t count() const { return entries_.size(); }
    const std::string& name_at(std::size_t i) const { return entries_[i].first; }
    Tensor2D& tensor_at(std::size_t i) { return entries_[i].second; }
    const Tensor2D& tensor_at(std::size_t i) const { return entries_[i].second; }

    /// Total number of scalars across all entries.
    std::size_t scalar_count() const;

    /// Flat view in entry order. unflatten requires an exactly matching length.
    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& flat);

    /// Same names and shapes, all values zero.
    ParamSet zeros_like() const;

    /// Monotonic counter bumped by every optimizer step; catalogs cache
    /// against it to detect staleness.
    std::uint64_t version() const { return version_; }
    void bump_version() { ++version_; }

    bool all_finite() const;

  private:
    std::vector<std::pair<std::string, Tensor2D>> entries_;
    std::map<std::string, std::size_t> index_;
    std::uint64_t version_ = 0;
};

/// Loss value plus the gradient of every parameter in the set it was
/// computed against. Parameters off the compute path hold exact zeros.
struct GradResult {
    double loss = 0.0;
    ParamSet grads;
};

} // namespace relret
