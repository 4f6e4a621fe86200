#include "curldec/dwt.hpp"

#include <cmath>
#include <map>

namespace curldec {

namespace {

// Orthonormal Daubechies scaling filters (sum = sqrt(2), unit norm).
const std::map<std::string, std::vector<double>> kFilters = {
    {"db1", {0.70710678118654746, 0.70710678118654746}},
    {"db2",
     {0.48296291314453421, 0.83651630373780794, 0.22414386804201342, -0.1294095225512604}},
    {"db3",
     {0.33267055295008269, 0.80689150931109266, 0.45987750211849127, -0.13501102001025497,
      -0.085441273882026825, 0.035226291885709526}},
    {"db4",
     {0.23037781330889634, 0.71484657055291545, 0.63088076792985937, -0.02798376941685881,
      -0.18703481171909253, 0.030841381835560705, 0.032883011666885141, -0.010597401785069011}},
    {"db5",
     {0.16010239797419304, 0.60382926979718987, 0.72430852843777205, 0.13842814590131747,
      -0.24229488706638616, -0.03224486958464115, 0.077571493840044567, -0.0062414902127986378,
      -0.012580751999082066, 0.0033357252854737734}},
    {"db6",
     {0.11154074335010891, 0.49462389039845145, 0.75113390802109559, 0.31525035170920263,
      -0.22626469396543597, -0.12976686756726527, 0.097501605587317575, 0.02752286553030377,
      -0.031582039317486071, 0.00055384220116136103, 0.0047772575109454414,
      -0.0010773010853084607}},
    {"db7",
     {0.077852054085008685, 0.39653931948191556, 0.72913209084623454, 0.46978228740519756,
      -0.14390600392856004, -0.2240361849938779, 0.071309219266823168, 0.0806126091510799,
      -0.038029936935014885, -0.016574541630667974, 0.012550998556098987,
      0.00042957797292128471, -0.001801640704047457, 0.00035371379997451054}},
    {"db8",
     {0.054415842243112758, 0.31287159091433425, 0.67563073629729353, 0.5853546836540211,
      -0.015829105256730487, -0.28401554296184794, 0.00047248457385049849, 0.12874742662049174,
      -0.01736930100183863, -0.044088253930816335, 0.013981027917405098, 0.0087460940474089095,
      -0.0048703529934536541, -0.00039174037337696814, 0.00067544940645085177,
      -0.00011747678412482284}},
};

std::vector<double> highpass(const std::vector<double>& g) {
    const std::size_t l = g.size();
    std::vector<double> h(l);
    for (std::size_t k = 0; k < l; ++k)
        h[k] = (k % 2 == 0 ? 1.0 : -1.0) * g[l - 1 - k];
    return h;
}

struct StepResult {
    std::vector<double> approx;
    std::vector<double> detail;
};

StepResult step_periodic(const std::vector<double>& x_in, const std::vector<double>& g,
                         const std::vector<double>& h) {
    std::vector<double> x = x_in;
    if (x.size() % 2 != 0) x.push_back(x.back());
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    StepResult r;
    r.approx.assign(half, 0.0);
    r.detail.assign(half, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
        double a = 0.0, d = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double v = x[(2 * i + k) % n];
            a += g[k] * v;
            d += h[k] * v;
        }
        r.approx[i] = a;
        r.detail[i] = d;
    }
    return r;
}

std::vector<double> inv_step_periodic(const std::vector<double>& a, const std::vector<double>& d,
                                      const std::vector<double>& g, const std::vector<double>& h,
                                      std::size_t out_len) {
    const std::size_t n = 2 * a.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            const std::size_t idx = (2 * i + k) % n;
            x[idx] += a[i] * g[k] + d[i] * h[k];
        }
    }
    x.resize(out_len);
    return x;
}

std::vector<double> extend_symmetric(const std::vector<double>& x, std::size_t pad) {
    const std::size_t n = x.size();
    std::vector<double> ext(n + 2 * pad);
    auto mirror = [&](long long idx) {
        const long long period = 2 * static_cast<long long>(n);
        long long m = ((idx % period) + period) % period;
        if (m >= static_cast<long long>(n)) m = period - 1 - m;
        return x[static_cast<std::size_t>(m)];
    };
    for (std::size_t i = 0; i < ext.size(); ++i)
        ext[i] = mirror(static_cast<long long>(i) - static_cast<long long>(pad));
    return ext;
}

StepResult step_symmetric(const std::vector<double>& x, const std::vector<double>& g,
                          const std::vector<double>& h) {
    const std::size_t n = x.size();
    const std::size_t l = g.size();
    const auto ext = extend_symmetric(x, l - 1);
    // keep every even-offset window over the extended support
    const std::size_t m = (n + l - 2) / 2 + 1;
    StepResult r;
    r.approx.assign(m, 0.0);
    r.detail.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double a = 0.0, d = 0.0;
        for (std::size_t k = 0; k < l; ++k) {
            const double v = ext[2 * j + k];
            a += g[k] * v;
            d += h[k] * v;
        }
        r.approx[j] = a;
        r.detail[j] = d;
    }
    return r;
}

std::vector<double> inv_step_symmetric(const std::vector<double>& a, const std::vector<double>& d,
                                       const std::vector<double>& g, const std::vector<double>& h,
                                       std::size_t out_len) {
    const std::size_t l = g.size();
    const std::size_t ext_len = out_len + 2 * (l - 1);
    std::vector<double> y(ext_len, 0.0);
    for (std::size_t j = 0; j < a.size(); ++j) {
        for (std::size_t k = 0; k < l; ++k) {
            const std::size_t idx = 2 * j + k;
            if (idx < ext_len) y[idx] += a[j] * g[k] + d[j] * h[k];
        }
    }
    std::vector<double> x(out_len);
    for (std::size_t i = 0; i < out_len; ++i) x[i] = y[l - 1 + i];
    return x;
}

std::size_t expected_coeff_len(std::size_t in_len, std::size_t filter_len,
                               WaveletExtension ext) {
    if (ext == WaveletExtension::periodic) return (in_len + 1) / 2;
    return (in_len + filter_len - 2) / 2 + 1;
}

}  // namespace

const std::vector<double>& wavelet_filter(const std::string& family) {
    auto it = kFilters.find(family);
    if (it == kFilters.end())
        throw Error(ErrorCode::InvalidArgument, "unknown wavelet family " + family);
    return it->second;
}

LevelMask LevelMask::all(int levels) {
    LevelMask m;
    m.approx = true;
    for (int j = 1; j <= levels; ++j) m.details.push_back(j);
    return m;
}

WaveletPyramid dwt_decompose(const std::vector<double>& signal, const WaveletSpec& spec) {
    if (spec.levels < 1) throw Error(ErrorCode::InvalidArgument, "levels must be >= 1");
    const std::size_t min_len = static_cast<std::size_t>(1) << spec.levels;
    if (signal.size() < min_len)
        throw Error(ErrorCode::InsufficientLength,
                    "signal length " + std::to_string(signal.size()) + " < 2^levels");
    const auto& g = wavelet_filter(spec.family);
    const auto h = highpass(g);

    WaveletPyramid p;
    p.spec = spec;
    std::vector<double> a = signal;
    for (int j = 0; j < spec.levels; ++j) {
        p.input_lens.push_back(a.size());
        StepResult r = spec.extension == WaveletExtension::periodic ? step_periodic(a, g, h)
                                                                    : step_symmetric(a, g, h);
        p.details.push_back(std::move(r.detail));
        a = std::move(r.approx);
    }
    p.approx = std::move(a);
    return p;
}

std::vector<double> idwt_reconstruct(const WaveletPyramid& pyramid, const LevelMask& keep) {
    const auto& spec = pyramid.spec;
    const auto& g = wavelet_filter(spec.family);
    const auto h = highpass(g);
    const int levels = spec.levels;
    if (static_cast<int>(pyramid.details.size()) != levels ||
        static_cast<int>(pyramid.input_lens.size()) != levels)
        throw Error(ErrorCode::InconsistentPyramid, "level count mismatch");
    for (int j = 0; j < levels; ++j) {
        const std::size_t expect =
            expected_coeff_len(pyramid.input_lens[static_cast<std::size_t>(j)], g.size(),
                               spec.extension);
        if (pyramid.details[static_cast<std::size_t>(j)].size() != expect)
            throw Error(ErrorCode::InconsistentPyramid,
                        "detail length wrong at level " + std::to_string(j + 1));
    }
    if (pyramid.approx.size() != pyramid.details.back().size())
        throw Error(ErrorCode::InconsistentPyramid, "approximation length wrong");

    auto kept_detail = [&](int level) {
        for (int k : keep.details)
            if (k == level) return true;
        return false;
    };

    std::vector<double> cur =
        keep.approx ? pyramid.approx : std::vector<double>(pyramid.approx.size(), 0.0);
    for (int j = levels; j >= 1; --j) {
        const auto& dref = pyramid.details[static_cast<std::size_t>(j - 1)];
        std::vector<double> d = kept_detail(j) ? dref : std::vector<double>(dref.size(), 0.0);
        const std::size_t out_len = pyramid.input_lens[static_cast<std::size_t>(j - 1)];
        cur = spec.extension == WaveletExtension::periodic
                  ? inv_step_periodic(cur, d, g, h, out_len)
                  : inv_step_symmetric(cur, d, g, h, out_len);
    }
    return cur;
}

std::array<std::pair<double, double>, 5> band_edges_for_fs(double fs) {
    return {{{0.5, fs / 32.0},
             {fs / 32.0, fs / 16.0},
             {fs / 16.0, fs / 8.0},
             {fs / 8.0, fs / 4.0},
             {fs / 4.0, fs / 2.0}}};
}

const Matrix& BandSet::band(int i) const {
    switch (i) {
        case 0: return delta;
        case 1: return theta;
        case 2: return alpha;
        case 3: return beta;
        case 4: return gamma;
    }
    throw Error(ErrorCode::InvalidArgument, "band index out of range");
}

const char* BandSet::band_name(int i) {
    constexpr const char* names[5] = {"delta", "theta", "alpha", "beta", "gamma"};
    if (i < 0 || i > 4) throw Error(ErrorCode::InvalidArgument, "band index out of range");
    return names[i];
}

BandSet band_signals(const EegRecord& record, const WaveletSpec& spec) {
    if (spec.levels != 4)
        throw Error(ErrorCode::InvalidArgument, "five-band split requires four levels");
    const Eigen::Index nch = record.channels();
    const Eigen::Index n = record.length();
    BandSet out;
    out.band_edges = band_edges_for_fs(record.fs());
    for (Matrix* m : {&out.delta, &out.theta, &out.alpha, &out.beta, &out.gamma})
        m->resize(nch, n);

    for (Eigen::Index c = 0; c < nch; ++c) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = record.samples()(c, i);
        const auto pyr = dwt_decompose(x, spec);
        const auto dl = idwt_reconstruct(pyr, LevelMask::approx_only());
        const auto th = idwt_reconstruct(pyr, LevelMask::detail_only(4));
        const auto al = idwt_reconstruct(pyr, LevelMask::detail_only(3));
        const auto be = idwt_reconstruct(pyr, LevelMask::detail_only(2));
        const auto ga = idwt_reconstruct(pyr, LevelMask::detail_only(1));
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto s = static_cast<std::size_t>(i);
            out.delta(c, i) = dl[s];
            out.theta(c, i) = th[s];
            out.alpha(c, i) = al[s];
            out.beta(c, i) = be[s];
            out.gamma(c, i) = ga[s];
        }
    }
    return out;
}

}  // namespace curldec
