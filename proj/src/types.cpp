#include "curldec/types.hpp"

#include <cmath>
#include <set>

namespace curldec {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::BadConfig: return "BadConfig";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::MalformedNumber: return "MalformedNumber";
        case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
        case ErrorCode::NonUniformSampling: return "NonUniformSampling";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::InconsistentRowWidth: return "InconsistentRowWidth";
        case ErrorCode::EmptyRecord: return "EmptyRecord";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::OutOfRangeAngle: return "OutOfRangeAngle";
        case ErrorCode::UnsupportedRatio: return "UnsupportedRatio";
        case ErrorCode::InvalidCutoff: return "InvalidCutoff";
        case ErrorCode::InsufficientLength: return "InsufficientLength";
        case ErrorCode::InconsistentPyramid: return "InconsistentPyramid";
        case ErrorCode::InvalidDegree: return "InvalidDegree";
        case ErrorCode::OutsideCap: return "OutsideCap";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NoWindows: return "NoWindows";
        case ErrorCode::TooFewGroups: return "TooFewGroups";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::DuplicateKey: return "DuplicateKey";
        case ErrorCode::DegenerateChannel: return "DegenerateChannel";
        case ErrorCode::DegenerateSeries: return "DegenerateSeries";
        case ErrorCode::IllConditionedMontage: return "IllConditionedMontage";
        case ErrorCode::NoGraph: return "NoGraph";
        case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    }
    return "UnknownError";
}

EegRecord EegRecord::make(Matrix samples, double fs, std::vector<std::string> labels, double t0) {
    if (!(fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling rate must be positive");
    if (static_cast<std::size_t>(samples.rows()) != labels.size())
        throw Error(ErrorCode::InvalidArgument, "label count must equal channel rows");
    std::set<std::string> uniq(labels.begin(), labels.end());
    if (uniq.size() != labels.size())
        throw Error(ErrorCode::InvalidArgument, "channel labels must be unique");
    if (!samples.allFinite())
        throw Error(ErrorCode::NonFiniteValue, "EEG samples must be finite");
    EegRecord r;
    r.samples_ = std::move(samples);
    r.fs_ = fs;
    r.labels_ = std::move(labels);
    r.t0_ = t0;
    return r;
}

EegRecord EegRecord::with_samples(Matrix samples) const {
    if (samples.rows() != samples_.rows())
        throw Error(ErrorCode::ShapeMismatch, "channel count changed");
    return make(std::move(samples), fs_, labels_, t0_);
}

EegRecord EegRecord::with_fs(Matrix samples, double fs) const {
    if (samples.rows() != samples_.rows())
        throw Error(ErrorCode::ShapeMismatch, "channel count changed");
    return make(std::move(samples), fs, labels_, t0_);
}

JointAngleRecord JointAngleRecord::make(Vector angle, double fs, double t0) {
    if (!(fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling rate must be positive");
    if (!angle.allFinite()) throw Error(ErrorCode::NonFiniteValue, "angles must be finite");
    for (Eigen::Index i = 0; i < angle.size(); ++i) {
        if (angle[i] < 0.0 || angle[i] > 180.0)
            throw Error(ErrorCode::OutOfRangeAngle,
                        "elbow angle outside [0, 180] at sample " + std::to_string(i));
    }
    JointAngleRecord r;
    r.angle_ = std::move(angle);
    r.fs_ = fs;
    r.t0_ = t0;
    return r;
}

Montage Montage::make(std::vector<Channel> channels) {
    std::set<std::string> uniq;
    for (const auto& c : channels) {
        if (!uniq.insert(c.label).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate montage label " + c.label);
        if (!(c.theta >= 0.0 && c.theta <= kCapElevation + 1e-12))
            throw Error(ErrorCode::InvalidArgument,
                        "elevation outside head-cap range for " + c.label);
        if (!(c.phi >= 0.0 && c.phi < 2.0 * M_PI + 1e-12))
            throw Error(ErrorCode::InvalidArgument, "azimuth outside [0, 2pi) for " + c.label);
        if (!std::isfinite(c.theta) || !std::isfinite(c.phi))
            throw Error(ErrorCode::NonFiniteValue, "non-finite montage angles for " + c.label);
    }
    Montage m;
    m.channels_ = std::move(channels);
    return m;
}

std::vector<std::string> Montage::labels() const {
    std::vector<std::string> out;
    out.reserve(channels_.size());
    for (const auto& c : channels_) out.push_back(c.label);
    return out;
}

void Montage::check_matches(const EegRecord& record) const {
    if (static_cast<std::size_t>(record.channels()) != channels_.size())
        throw Error(ErrorCode::ShapeMismatch, "record channel count differs from montage");
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        if (record.labels()[i] != channels_[i].label)
            throw Error(ErrorCode::ShapeMismatch,
                        "channel order mismatch at index " + std::to_string(i));
    }
}

TrialMarkerSet TrialMarkerSet::make(std::vector<Trial> trials) {
    std::set<int> ids;
    double prev_cue = -std::numeric_limits<double>::infinity();
    for (const auto& t : trials) {
        if (!(t.cue_time < t.movement_onset))
            throw Error(ErrorCode::InvalidArgument,
                        "cue must precede movement onset in trial " + std::to_string(t.trial_id));
        if (!ids.insert(t.trial_id).second)
            throw Error(ErrorCode::InvalidArgument,
                        "duplicate trial id " + std::to_string(t.trial_id));
        if (t.cue_time < prev_cue)
            throw Error(ErrorCode::InvalidArgument, "trials must be sorted by time");
        prev_cue = t.cue_time;
    }
    TrialMarkerSet s;
    s.trials_ = std::move(trials);
    return s;
}

}  // namespace curldec
