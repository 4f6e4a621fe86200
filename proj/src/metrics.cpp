#include "curldec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace curldec {

double pcc(const Vector& actual, const Vector& predicted) {
    const Eigen::Index n = actual.size();
    if (n != predicted.size()) throw Error(ErrorCode::ShapeMismatch, "length mismatch");
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples");
    const double ma = actual.mean();
    const double mp = predicted.mean();
    const Vector da = actual.array() - ma;
    const Vector dp = predicted.array() - mp;
    const double sa = std::sqrt(da.squaredNorm() / static_cast<double>(n - 1));
    const double sp = std::sqrt(dp.squaredNorm() / static_cast<double>(n - 1));
    if (sa == 0.0 || sp == 0.0)
        throw Error(ErrorCode::DegenerateSeries, "zero-variance input");
    return da.dot(dp) / (static_cast<double>(n - 1) * sa * sp);
}

double mse(const Vector& actual, const Vector& predicted) {
    if (actual.size() != predicted.size())
        throw Error(ErrorCode::ShapeMismatch, "length mismatch");
    if (actual.size() == 0) throw Error(ErrorCode::EmptyRecord, "empty input");
    return (actual - predicted).squaredNorm() / static_cast<double>(actual.size());
}

SweepReport sweep_report(const std::vector<SweepResult>& results) {
    if (results.empty()) throw Error(ErrorCode::EmptyRecord, "no sweep results");

    std::set<std::string> seen;
    for (const auto& r : results) {
        std::ostringstream key;
        key << r.feature_tag << '|' << r.window_ms << '|' << r.lag_ms;
        if (!seen.insert(key.str()).second)
            throw Error(ErrorCode::DuplicateKey, "duplicate sweep cell " + key.str());
    }

    const SweepResult* best = &results.front();
    for (const auto& r : results)
        if (r.pcc_mean > best->pcc_mean) best = &r;

    std::vector<std::string> features;
    std::vector<int> windows, lags;
    for (const auto& r : results) {
        if (std::find(features.begin(), features.end(), r.feature_tag) == features.end())
            features.push_back(r.feature_tag);
        if (std::find(windows.begin(), windows.end(), r.window_ms) == windows.end())
            windows.push_back(r.window_ms);
        if (std::find(lags.begin(), lags.end(), r.lag_ms) == lags.end())
            lags.push_back(r.lag_ms);
    }
    std::sort(windows.begin(), windows.end());
    std::sort(lags.begin(), lags.end());

    std::map<std::string, const SweepResult*> cell;
    for (const auto& r : results) {
        std::ostringstream key;
        key << r.feature_tag << '|' << r.window_ms << '|' << r.lag_ms;
        cell[key.str()] = &r;
    }

    std::ostringstream tab;
    std::size_t fw = 8;
    for (const auto& f : features) fw = std::max(fw, f.size());
    tab << std::string(fw, ' ');
    for (int w : windows)
        for (int l : lags) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), " | %4dms@%-3d", w, l);
            tab << buf;
        }
    tab << '\n';
    for (const auto& f : features) {
        tab << f << std::string(fw - f.size(), ' ');
        for (int w : windows)
            for (int l : lags) {
                std::ostringstream key;
                key << f << '|' << w << '|' << l;
                auto it = cell.find(key.str());
                if (it == cell.end()) {
                    tab << " |     --    ";
                    continue;
                }
                char buf[32];
                const bool is_best = it->second == best;
                std::snprintf(buf, sizeof(buf), " | %s%7.4f%s ", is_best ? "*" : " ",
                              it->second->pcc_mean, is_best ? "*" : " ");
                tab << buf;
            }
        tab << '\n';
    }

    std::ostringstream csv;
    csv << "feature,window_ms,lag_ms,pcc_mean,pcc_std,n\n";
    for (const auto& r : results) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.17g,%.17g,%d\n", r.feature_tag.c_str(),
                      r.window_ms, r.lag_ms, r.pcc_mean, r.pcc_std, r.n_folds);
        csv << buf;
    }

    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results) {
        j.push_back({{"feature", r.feature_tag},
                     {"window_ms", r.window_ms},
                     {"lag_ms", r.lag_ms},
                     {"pcc_mean", r.pcc_mean},
                     {"pcc_std", r.pcc_std},
                     {"n", r.n_folds}});
    }

    SweepReport rep;
    rep.table = tab.str();
    rep.csv = csv.str();
    rep.json = j.dump(2) + "\n";
    rep.best = *best;
    return rep;
}

}  // namespace curldec
