#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "curldec/features.hpp"
#include "testutil.hpp"

using namespace curldec;
using testutil::TempDir;

namespace {

TrialMarkerSet markers_every(double period, int n, double onset_offset = 0.45) {
    std::vector<TrialMarkerSet::Trial> trials;
    for (int i = 0; i < n; ++i)
        trials.push_back({i, i * period, i * period + onset_offset});
    return TrialMarkerSet::make(trials);
}

}  // namespace

TEST_CASE("window spec sample conversions") {
    WindowSpec spec;
    spec.window_ms = 1600;
    spec.lag_ms = 240;
    spec.overlap = 0.95;
    CHECK(spec.window_samples() == 200);
    CHECK(spec.lag_samples() == 30);
    CHECK(spec.stride_samples() == 10);

    spec.window_ms = 320;
    spec.lag_ms = 8;
    CHECK(spec.window_samples() == 40);
    CHECK(spec.lag_samples() == 1);
    CHECK(spec.stride_samples() == 2);

    spec.window_ms = 333;  // 41.625 samples
    CHECK_THROWS_AS(spec.window_samples(), Error);
}

TEST_CASE("windows respect geometry and trial boundaries") {
    const int T = 1000;
    Matrix feats = testutil::random_matrix(3, T, 1);
    Vector traj = testutil::random_vector(T, 2);
    WindowSpec spec;
    spec.window_ms = 800;   // 100 samples
    spec.lag_ms = 80;       // 10 samples
    spec.overlap = 0.9;     // stride 10
    const auto markers = markers_every(2.0, 4);  // 250 samples per trial
    const auto examples = make_windows(feats, traj, spec, markers);

    // per trial: floor((250 - 110)/10) + 1 = 15 windows
    CHECK(examples.size() == 60);
    std::set<int> trials;
    for (const auto& e : examples) {
        trials.insert(e.trial_id);
        const auto start = static_cast<Eigen::Index>(std::llround(e.t_start * spec.fs));
        CHECK(e.x.cols() == 100);
        CHECK(e.y.size() == 100);
        // windows never cross their trial boundary
        const Eigen::Index trial_begin = e.trial_id * 250;
        CHECK(start >= trial_begin);
        CHECK(start + 110 <= trial_begin + 250);
        // x/y come from the right places
        CHECK(e.x(1, 3) == feats(1, start + 3));
        CHECK(e.y[5] == traj[start + 10 + 5]);
    }
    CHECK(trials.size() == 4);
}

TEST_CASE("alignment: a trajectory equal to the delayed first row reproduces it exactly") {
    const int T = 2000;
    Matrix feats = testutil::random_matrix(2, T, 3);
    WindowSpec spec;
    spec.window_ms = 320;  // 40 samples
    spec.lag_ms = 160;     // 20 samples
    spec.overlap = 0.5;
    Vector traj(T);
    for (int i = 0; i < T; ++i) traj[i] = i >= 20 ? feats(0, i - 20) : 0.0;
    const auto examples = make_windows(feats, traj, spec, markers_every(4.0, 4));
    REQUIRE(!examples.empty());
    for (const auto& e : examples) {
        // y(t) = x0(t - lag) means the target window equals feature row 0
        CHECK((e.y.transpose() - e.x.row(0)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("short trajectory skips windows; none at all is an error") {
    Matrix feats = testutil::random_matrix(2, 500, 5);
    Vector traj = testutil::random_vector(200, 6);
    WindowSpec spec;
    spec.window_ms = 800;
    spec.lag_ms = 80;
    spec.overlap = 0.0;
    const auto markers = markers_every(4.0, 1);
    const auto examples = make_windows(feats, traj, spec, markers);
    // only the first window fits inside the 200-sample trajectory
    CHECK(examples.size() == 1);

    Vector tiny = testutil::random_vector(50, 7);
    CHECK_THROWS_AS(make_windows(feats, tiny, spec, markers), Error);
    try {
        make_windows(feats, tiny, spec, markers);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoWindows);
    }
}

TEST_CASE("combine_features stacks 16+9+9 rows in order") {
    const Matrix spatial = testutil::random_matrix(16, 200, 11);
    const Matrix sh = testutil::random_matrix(9, 200, 12);
    const Matrix h2 = testutil::random_matrix(9, 200, 13);
    const Matrix com = combine_features(spatial, sh, h2);
    CHECK(com.rows() == 34);
    CHECK(com.cols() == 200);
    CHECK((com.topRows(16) - spatial).cwiseAbs().maxCoeff() == 0.0);
    CHECK((com.middleRows(16, 9) - sh).cwiseAbs().maxCoeff() == 0.0);
    CHECK((com.bottomRows(9) - h2).cwiseAbs().maxCoeff() == 0.0);

    const Matrix zero = combine_features(Matrix::Zero(16, 8), Matrix::Zero(9, 8), Matrix::Zero(9, 8));
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(combine_features(spatial, testutil::random_matrix(9, 100, 1), h2), Error);
}

TEST_CASE("trial-grouped split: exact counts, determinism, no leakage") {
    // 100 trials, 5 windows each
    std::vector<WindowedExample> examples;
    for (int t = 0; t < 100; ++t)
        for (int w = 0; w < 5; ++w) {
            WindowedExample e;
            e.x = Matrix::Zero(1, 4);
            e.y = Vector::Zero(4);
            e.trial_id = t;
            e.t_start = t * 2.0 + w * 0.08;
            examples.push_back(e);
        }
    const DatasetSplit s = split_dataset(examples, {0.8, 0.1, 0.1}, SplitGrouping::by_trial, 9);
    auto trials_of = [](const std::vector<WindowedExample>& v) {
        std::set<int> out;
        for (const auto& e : v) out.insert(e.trial_id);
        return out;
    };
    CHECK(trials_of(s.train).size() == 80);
    CHECK(trials_of(s.val).size() == 10);
    CHECK(trials_of(s.test).size() == 10);

    const DatasetSplit s2 = split_dataset(examples, {0.8, 0.1, 0.1}, SplitGrouping::by_trial, 9);
    REQUIRE(s2.train.size() == s.train.size());
    bool same = true;
    for (std::size_t i = 0; i < s.train.size(); ++i)
        same = same && s.train[i].trial_id == s2.train[i].trial_id &&
               s.train[i].t_start == s2.train[i].t_start;
    CHECK(same);

    // no trial appears in two splits, hence no overlapping windows leak
    for (int t : trials_of(s.train)) {
        CHECK(trials_of(s.val).count(t) == 0);
        CHECK(trials_of(s.test).count(t) == 0);
    }

    // exhaustive time-support scan between train and test windows
    const double window_len_s = 4.0 / 125.0;  // x spans 4 samples here
    for (const auto& a : s.train)
        for (const auto& b : s.test) {
            const double a0 = a.t_start, a1 = a.t_start + window_len_s;
            const double b0 = b.t_start, b1 = b.t_start + window_len_s;
            CHECK((a1 <= b0 + 1e-12 || b1 <= a0 + 1e-12));
        }
}

TEST_CASE("split validation errors") {
    std::vector<WindowedExample> examples(4);
    for (int i = 0; i < 4; ++i) {
        examples[static_cast<std::size_t>(i)].x = Matrix::Zero(1, 4);
        examples[static_cast<std::size_t>(i)].y = Vector::Zero(4);
        examples[static_cast<std::size_t>(i)].trial_id = 0;  // a single group
    }
    CHECK_THROWS_AS(split_dataset(examples, {0.5, 0.2, 0.2}, SplitGrouping::by_trial, 1), Error);
    CHECK_THROWS_AS(split_dataset(examples, {0.8, 0.1, 0.1}, SplitGrouping::by_trial, 1), Error);
    try {
        split_dataset(examples, {0.8, 0.1, 0.1}, SplitGrouping::by_trial, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewGroups);
    }
}

TEST_CASE("augmentation ops are involutions and counting holds") {
    WindowedExample e;
    e.x = testutil::random_matrix(3, 16, 21);
    e.y = testutil::random_vector(16, 22);
    e.trial_id = 7;

    const WindowedExample f2 = flip_example(flip_example(e));
    CHECK((f2.x - e.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((f2.y - e.y).cwiseAbs().maxCoeff() == 0.0);

    const WindowedExample r = roll_example(roll_example(e, 5), 16 - 5);
    CHECK((r.x - e.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.y - e.y).cwiseAbs().maxCoeff() == 0.0);

    // flip reverses x and y jointly
    const WindowedExample f = flip_example(e);
    CHECK(f.x(1, 0) == e.x(1, 15));
    CHECK(f.y[0] == e.y[15]);

    const auto both = augment(e, {AugmentOp::flip, AugmentOp::roll}, 3);
    CHECK(both.size() == 3);
    const auto flips = augment(e, {AugmentOp::flip}, 3);
    CHECK(flips.size() == 2);

    std::vector<WindowedExample> many(10, e);
    CHECK(augment_all(many, {AugmentOp::flip, AugmentOp::roll}, 3).size() == 30);
    CHECK_THROWS_AS(augment(e, {}, 3), Error);
}

TEST_CASE("dataset directory round trip") {
    TempDir dir("dataset_rt");
    DatasetSplit split;
    for (int i = 0; i < 6; ++i) {
        WindowedExample e;
        e.x = testutil::random_matrix(4, 10, 100 + i);
        e.y = testutil::random_vector(10, 200 + i);
        e.trial_id = i / 2;
        e.group_id = i % 2;
        e.t_start = 0.5 * i;
        if (i < 3) split.train.push_back(e);
        else if (i < 5) split.val.push_back(e);
        else split.test.push_back(e);
    }
    save_dataset(dir.path(), split, "{\"note\":1}\n");
    std::string manifest;
    const DatasetSplit back = load_dataset(dir.path(), &manifest);
    CHECK(manifest == "{\"note\":1}\n");
    REQUIRE(back.train.size() == 3);
    REQUIRE(back.val.size() == 2);
    REQUIRE(back.test.size() == 1);
    CHECK((back.train[1].x - split.train[1].x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.test[0].y - split.test[0].y).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.val[0].trial_id == split.val[0].trial_id);
    CHECK(back.val[0].group_id == split.val[0].group_id);
    CHECK(back.val[0].t_start == split.val[0].t_start);
}
