#pragma once

#include <array>
#include <string>
#include <vector>

#include "curldec/types.hpp"

namespace curldec {

enum class WaveletExtension { periodic, symmetric };

struct WaveletSpec {
    std::string family = "db8";
    int levels = 4;
    WaveletExtension extension = WaveletExtension::periodic;
};

// Orthonormal Daubechies scaling filter (db1..db8); the quadrature mirror
// highpass is derived from it.
const std::vector<double>& wavelet_filter(const std::string& family);

// Coefficient pyramid: approximation at the deepest level plus detail bands
// at levels 1..levels. input_lens records the signal length entering each
// level so the inverse can trim padding exactly.
struct WaveletPyramid {
    WaveletSpec spec;
    std::vector<std::vector<double>> details;  // index 0 = level 1
    std::vector<double> approx;
    std::vector<std::size_t> input_lens;
};

WaveletPyramid dwt_decompose(const std::vector<double>& signal, const WaveletSpec& spec);

// Level mask for reconstruction: keep_approx plus the listed detail levels.
struct LevelMask {
    bool approx = false;
    std::vector<int> details;  // 1-based level numbers

    static LevelMask all(int levels);
    static LevelMask none() { return {}; }
    static LevelMask approx_only() { return {true, {}}; }
    static LevelMask detail_only(int level) { return {false, {level}}; }
};

std::vector<double> idwt_reconstruct(const WaveletPyramid& pyramid, const LevelMask& keep);

// Five rhythm bands as full-rate signals, one matrix per band with the
// input's exact shape. The bands sum to the input.
struct BandSet {
    Matrix delta, theta, alpha, beta, gamma;
    std::array<std::pair<double, double>, 5> band_edges;

    const Matrix& band(int i) const;
    static const char* band_name(int i);
};

// Nominal band edges for a sampling rate, dyadic halving per level with the
// delta floor at the 0.5 Hz baseline cutoff.
std::array<std::pair<double, double>, 5> band_edges_for_fs(double fs);

BandSet band_signals(const EegRecord& record, const WaveletSpec& spec = {});

}  // namespace curldec
