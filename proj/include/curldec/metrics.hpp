#pragma once

#include <string>
#include <vector>

#include "curldec/types.hpp"

namespace curldec {

// Pearson correlation with sample (N-1) normalization throughout.
double pcc(const Vector& actual, const Vector& predicted);
double mse(const Vector& actual, const Vector& predicted);

struct SweepResult {
    std::string feature_tag;
    int window_ms = 0;
    int lag_ms = 0;
    double pcc_mean = 0.0;
    double pcc_std = 0.0;
    int n_folds = 0;
};

struct SweepReport {
    std::string table;  // human-readable grid, rows = features, columns = window x lag
    std::string csv;    // feature,window_ms,lag_ms,pcc_mean,pcc_std,n
    std::string json;   // same fields as the CSV
    SweepResult best;
};

SweepReport sweep_report(const std::vector<SweepResult>& results);

}  // namespace curldec
