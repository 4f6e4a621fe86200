#include "curldec/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace curldec {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& tok, const std::filesystem::path& path) {
    const char* b = tok.data();
    const char* e = b + tok.size();
    while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
    double v = 0.0;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
        throw Error(ErrorCode::MalformedNumber,
                    "cannot parse '" + tok + "' in " + path.string());
    if (!std::isfinite(v))
        throw Error(ErrorCode::NonFiniteValue, "non-finite value in " + path.string());
    return v;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::MalformedHeader, "missing header in " + path.string());
    t.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto toks = split_line(line);
        if (toks.size() != t.header.size())
            throw Error(ErrorCode::InconsistentRowWidth,
                        "row width " + std::to_string(toks.size()) + " != header width " +
                            std::to_string(t.header.size()) + " in " + path.string());
        std::vector<double> row;
        row.reserve(toks.size());
        for (const auto& tok : toks) row.push_back(parse_number(tok, path));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Sampling rate from the median step; reject more than 1% jitter.
double infer_fs(const std::vector<double>& time, const std::filesystem::path& path) {
    if (time.size() < 2)
        throw Error(ErrorCode::TooFewRows, "need at least 2 samples to infer fs in " + path.string());
    std::vector<double> steps(time.size() - 1);
    for (std::size_t i = 0; i + 1 < time.size(); ++i) {
        steps[i] = time[i + 1] - time[i];
        if (!(steps[i] > 0.0))
            throw Error(ErrorCode::NonMonotoneTime,
                        "time column not strictly increasing in " + path.string());
    }
    std::vector<double> sorted = steps;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    for (double s : steps) {
        if (std::abs(s - med) > 0.01 * med)
            throw Error(ErrorCode::NonUniformSampling,
                        "time step jitter above 1% in " + path.string());
    }
    return 1.0 / med;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

EegRecord load_eeg_csv(const std::filesystem::path& path) {
    Table t = read_table(path);
    if (t.header.size() < 2 || t.header[0] != "time")
        throw Error(ErrorCode::MalformedHeader,
                    "expected header `time,<labels...>` in " + path.string());
    if (t.rows.empty()) throw Error(ErrorCode::EmptyRecord, "no samples in " + path.string());
    std::vector<double> time(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) time[i] = t.rows[i][0];
    const double fs = infer_fs(time, path);
    const std::size_t nch = t.header.size() - 1;
    Matrix samples(nch, t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t c = 0; c < nch; ++c) samples(c, i) = t.rows[i][c + 1];
    std::vector<std::string> labels(t.header.begin() + 1, t.header.end());
    return EegRecord::make(std::move(samples), fs, std::move(labels), time.front());
}

void save_eeg_csv(const std::filesystem::path& path, const EegRecord& record) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "time";
    for (const auto& l : record.labels()) out << ',' << l;
    out << '\n';
    for (Eigen::Index i = 0; i < record.length(); ++i) {
        out << format_value(record.t0() + static_cast<double>(i) / record.fs());
        for (Eigen::Index c = 0; c < record.channels(); ++c)
            out << ',' << format_value(record.samples()(c, i));
        out << '\n';
    }
}

JointAngleRecord load_trajectory_csv(const std::filesystem::path& path) {
    Table t = read_table(path);
    if (t.header.size() != 2 || t.header[0] != "time" || t.header[1] != "angle_deg")
        throw Error(ErrorCode::MalformedHeader,
                    "expected header `time,angle_deg` in " + path.string());
    if (t.rows.empty()) throw Error(ErrorCode::EmptyRecord, "no samples in " + path.string());
    std::vector<double> time(t.rows.size());
    Vector angle(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        time[i] = t.rows[i][0];
        angle[static_cast<Eigen::Index>(i)] = t.rows[i][1];
    }
    const double fs = infer_fs(time, path);
    return JointAngleRecord::make(std::move(angle), fs, time.front());
}

void save_trajectory_csv(const std::filesystem::path& path, const JointAngleRecord& record) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "time,angle_deg\n";
    for (Eigen::Index i = 0; i < record.length(); ++i) {
        out << format_value(record.t0() + static_cast<double>(i) / record.fs()) << ','
            << format_value(record.angle()[i]) << '\n';
    }
}

TrialMarkerSet load_markers_csv(const std::filesystem::path& path) {
    Table t = read_table(path);
    if (t.header != std::vector<std::string>{"trial_id", "cue_time", "movement_onset"})
        throw Error(ErrorCode::MalformedHeader,
                    "expected header `trial_id,cue_time,movement_onset` in " + path.string());
    std::vector<TrialMarkerSet::Trial> trials;
    trials.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        TrialMarkerSet::Trial tr;
        tr.trial_id = static_cast<int>(std::llround(row[0]));
        tr.cue_time = row[1];
        tr.movement_onset = row[2];
        trials.push_back(tr);
    }
    return TrialMarkerSet::make(std::move(trials));
}

void save_markers_csv(const std::filesystem::path& path, const TrialMarkerSet& markers) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "trial_id,cue_time,movement_onset\n";
    for (const auto& t : markers.trials())
        out << t.trial_id << ',' << format_value(t.cue_time) << ','
            << format_value(t.movement_onset) << '\n';
}

void save_named_matrix_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& names, const Matrix& rows_by_series,
                           const std::vector<double>& time) {
    if (static_cast<std::size_t>(rows_by_series.rows()) != names.size())
        throw Error(ErrorCode::ShapeMismatch, "series count != name count");
    if (static_cast<std::size_t>(rows_by_series.cols()) != time.size())
        throw Error(ErrorCode::ShapeMismatch, "sample count != time length");
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "time";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (Eigen::Index i = 0; i < rows_by_series.cols(); ++i) {
        out << format_value(time[static_cast<std::size_t>(i)]);
        for (Eigen::Index r = 0; r < rows_by_series.rows(); ++r)
            out << ',' << format_value(rows_by_series(r, i));
        out << '\n';
    }
}

Matrix load_named_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* names,
                             std::vector<double>* time) {
    Table t = read_table(path);
    if (t.header.size() < 2 || t.header[0] != "time")
        throw Error(ErrorCode::MalformedHeader, "expected `time,...` header in " + path.string());
    if (t.rows.empty()) throw Error(ErrorCode::EmptyRecord, "no samples in " + path.string());
    const std::size_t ns = t.header.size() - 1;
    Matrix m(ns, t.rows.size());
    if (time) time->resize(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (time) (*time)[i] = t.rows[i][0];
        for (std::size_t s = 0; s < ns; ++s) m(s, i) = t.rows[i][s + 1];
    }
    if (names) names->assign(t.header.begin() + 1, t.header.end());
    return m;
}

}  // namespace curldec
