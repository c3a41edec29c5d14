#pragma once

#include "difftomo/projector.hpp"

namespace difftomo {

// 3D DFT of the zero-padded object, on Z_p^3 (wrapped storage, zeta fastest).
struct Spectrum3D {
    LatticeSpec spec;
    std::vector<cplx> values;

    Spectrum3D() = default;
    explicit Spectrum3D(const LatticeSpec& s)
        : spec(s), values(static_cast<std::size_t>(s.p) * s.p * s.p) {}

    std::size_t index(int xi, int eta, int zeta) const {
        const int p = spec.p;
        return (static_cast<std::size_t>(wrap(xi, p)) * p + wrap(eta, p)) * p + wrap(zeta, p);
    }
    cplx& at(int xi, int eta, int zeta) { return values[index(xi, eta, zeta)]; }
    const cplx& at(int xi, int eta, int zeta) const { return values[index(xi, eta, zeta)]; }
};

// A frequency pair where the Fourier slices of two directions agree.
struct CommonLinePair {
    std::array<int, 2> k;        // on the slice of t
    std::array<int, 2> k_prime;  // on the slice of t'
};

Spectrum3D dft3(const Object3D& obj);

// 2D DFT of a p x p image, wrapped storage in and out.
std::vector<cplx> dft2(const std::vector<cplx>& img, int p);
std::vector<cplx> dft2(const Projection2D& proj);

// Value of the object's spectrum on the slice plane of dir at integer pair k:
// the off-plane coordinate (generally non-integer) is evaluated through the
// Laurent expansion over Z_n along that axis.
cplx fourier_slice(const Spectrum3D& spec3, const Direction& dir,
                   const std::array<int, 2>& k);

// Max over Z_p^2 of |dft2(project(obj,dir)) - fourier_slice(dft3(obj), dir, .)|.
double verify_slice_theorem(const Object3D& obj, const Direction& dir);

// Integer frequency pairs where the slices of t and t' intersect; always
// contains the origin pair. Rejects parallel directions.
std::vector<CommonLinePair> common_line_points(const Direction& t, const Direction& t_prime,
                                               const LatticeSpec& spec);

}  // namespace difftomo
