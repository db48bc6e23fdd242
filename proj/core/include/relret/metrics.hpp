#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace relret {

inline constexpr const char* kMetricConvention = "mnre-micro-nonnone-v1";

/// Accuracy over every instance; precision/recall/F1 micro over the
/// non-None positives. Zero-denominator convention: a ratio with empty
/// denominator is 0, except the vacuous case TP=FP=FN=0 where P=R=F1=1.
struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t n = 0;
    std::string convention = kMetricConvention;

    std::string to_json() const;
    bool operator==(const Metrics& o) const {
        return accuracy == o.accuracy && precision == o.precision && recall == o.recall &&
               f1 == o.f1 && tp == o.tp && fp == o.fp && fn == o.fn && n == o.n;
    }
};

Metrics compute_metrics(const std::vector<std::string>& gold,
                        const std::vector<std::string>& pred,
                        const std::string& none_label = "None");

} // namespace relret
