#include "difftomo/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace difftomo {

namespace {

std::mutex plan_mutex;

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

fftw_plan get_plan(int rank, int side, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_tuple(rank, side, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::size_t total = 1;
    for (int r = 0; r < rank; ++r) total *= static_cast<std::size_t>(side);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan plan;
    if (rank == 2)
        plan = fftw_plan_dft_2d(side, side, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    else
        plan = fftw_plan_dft_3d(side, side, side, buf, buf, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    cache.emplace(key, plan);
    return plan;
}

void scale(cplx* data, std::size_t total, double s) {
    for (std::size_t i = 0; i < total; ++i) data[i] *= s;
}

}  // namespace

void fft2(cplx* data, int side) {
    fftw_execute_dft(get_plan(2, side, FFTW_FORWARD), as_fftw(data), as_fftw(data));
}

void ifft2(cplx* data, int side) {
    fftw_execute_dft(get_plan(2, side, FFTW_BACKWARD), as_fftw(data), as_fftw(data));
    scale(data, static_cast<std::size_t>(side) * side, 1.0 / (static_cast<double>(side) * side));
}

void fft3(cplx* data, int side) {
    fftw_execute_dft(get_plan(3, side, FFTW_FORWARD), as_fftw(data), as_fftw(data));
}

void ifft3(cplx* data, int side) {
    fftw_execute_dft(get_plan(3, side, FFTW_BACKWARD), as_fftw(data), as_fftw(data));
    const double s = static_cast<double>(side);
    scale(data, static_cast<std::size_t>(side) * side * side, 1.0 / (s * s * s));
}

}  // namespace difftomo
