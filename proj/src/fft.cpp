#include "curldec/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace curldec {

namespace {
// FFTW planning is not thread safe; execution of a plan on its own arrays is.
std::mutex plan_mutex;

std::vector<std::complex<double>> run(const std::vector<std::complex<double>>& x, int sign) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    if (n == 0) return out;
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* res = fftw_alloc_complex(n);
    for (std::size_t i = 0; i < n; ++i) {
        in[i][0] = x[i].real();
        in[i][1] = x[i].imag();
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(n), in, res, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = {res[i][0], res[i][1]};
    fftw_free(in);
    fftw_free(res);
    if (sign == FFTW_BACKWARD) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : out) v *= scale;
    }
    return out;
}
}  // namespace

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x) {
    return run(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x) {
    return run(x, FFTW_BACKWARD);
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& x, std::size_t n) {
    std::vector<std::complex<double>> padded(n);
    const std::size_t m = x.size() < n ? x.size() : n;
    for (std::size_t i = 0; i < m; ++i) padded[i] = {x[i], 0.0};
    return fft(padded);
}

}  // namespace curldec
