#pragma once

#include "difftomo/common.hpp"

namespace difftomo {

// Thin FFTW front end. Forward transforms are plain (unnormalized) DFT sums
// matching the analytic conventions here; inverse transforms carry 1/size.
// Plans are cached per size and safe for concurrent execution.

void fft2(cplx* data, int side);    // forward, in place, side x side
void ifft2(cplx* data, int side);   // inverse with 1/side^2
void fft3(cplx* data, int side);    // forward, side^3
void ifft3(cplx* data, int side);   // inverse with 1/side^3

}  // namespace difftomo
