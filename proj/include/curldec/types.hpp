#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "curldec/error.hpp"

namespace curldec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kCapElevation = 2.0943951023931953;  // 2*pi/3, head-cap limit
inline constexpr double kHeadRadiusCm = 10.0;

// Multichannel EEG in microvolts, rows = channels. Construction validates
// the invariants, so any instance in flight is well formed.
class EegRecord {
public:
    static EegRecord make(Matrix samples, double fs, std::vector<std::string> labels,
                          double t0 = 0.0);

    const Matrix& samples() const { return samples_; }
    double fs() const { return fs_; }
    const std::vector<std::string>& labels() const { return labels_; }
    double t0() const { return t0_; }

    Eigen::Index channels() const { return samples_.rows(); }
    Eigen::Index length() const { return samples_.cols(); }

    // Same metadata, new sample matrix (must keep the channel count).
    EegRecord with_samples(Matrix samples) const;
    EegRecord with_fs(Matrix samples, double fs) const;

private:
    EegRecord() = default;
    Matrix samples_;
    double fs_ = 0.0;
    std::vector<std::string> labels_;
    double t0_ = 0.0;
};

// Elbow joint angle in degrees.
class JointAngleRecord {
public:
    static JointAngleRecord make(Vector angle, double fs = 125.0, double t0 = 0.0);

    const Vector& angle() const { return angle_; }
    double fs() const { return fs_; }
    double t0() const { return t0_; }
    Eigen::Index length() const { return angle_.size(); }

private:
    JointAngleRecord() = default;
    Vector angle_;
    double fs_ = 125.0;
    double t0_ = 0.0;
};

// Per-channel spherical coordinates on the head surface. theta is elevation
// in radians measured down from the vertex, phi is azimuth from +X (right
// preauricular) counterclockwise, +Y toward the nasion.
class Montage {
public:
    struct Channel {
        std::string label;
        double theta = 0.0;
        double phi = 0.0;
    };

    static Montage make(std::vector<Channel> channels);

    const std::vector<Channel>& channels() const { return channels_; }
    std::size_t size() const { return channels_.size(); }
    std::vector<std::string> labels() const;

    // Throws if the record's channel labels do not match this montage's
    // labels in order.
    void check_matches(const EegRecord& record) const;

private:
    Montage() = default;
    std::vector<Channel> channels_;
};

// Trial timing markers used for leakage-free window grouping.
class TrialMarkerSet {
public:
    struct Trial {
        int trial_id = 0;
        double cue_time = 0.0;
        double movement_onset = 0.0;
    };

    static TrialMarkerSet make(std::vector<Trial> trials);

    const std::vector<Trial>& trials() const { return trials_; }
    std::size_t size() const { return trials_.size(); }

private:
    TrialMarkerSet() = default;
    std::vector<Trial> trials_;
};

}  // namespace curldec
