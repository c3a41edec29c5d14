#pragma once

#include <array>
#include <utility>

#include "difftomo/lattice.hpp"

namespace difftomo {

enum class Family : unsigned char { X = 0, Y = 1, Z = 2 };

// Projection direction: the family tags which coordinate carries the unit
// entry, (alpha, beta) are the slopes of the other two coordinates in axis
// order. Slope magnitude 1 is representable (tie directions such as (1,1,0))
// but the ray-transform operators require strict |slope| < 1.
struct Direction {
    Family family = Family::Z;
    double alpha = 0.0;
    double beta = 0.0;

    Direction() = default;
    Direction(Family f, double a, double b) : family(f), alpha(a), beta(b) {
        if (std::abs(alpha) > 1.0 || std::abs(beta) > 1.0)
            throw std::invalid_argument("direction: |alpha|, |beta| must be <= 1");
    }

    // Unnormalized representative (1,a,b), (a,1,b) or (a,b,1).
    std::array<double, 3> rep_vector() const {
        switch (family) {
            case Family::X: return {1.0, alpha, beta};
            case Family::Y: return {alpha, 1.0, beta};
            default: return {alpha, beta, 1.0};
        }
    }

    std::array<double, 3> unit_vector() const {
        auto v = rep_vector();
        double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        return {v[0] / norm, v[1] / norm, v[2] / norm};
    }

    bool operator==(const Direction&) const = default;
};

// Complex image on Z_p^2, wrapped storage (index 0 = origin), c2 fastest.
struct Projection2D {
    LatticeSpec spec;
    Direction direction;
    std::vector<cplx> values;

    Projection2D() = default;
    Projection2D(const LatticeSpec& s, const Direction& d)
        : spec(s), direction(d), values(static_cast<std::size_t>(s.p) * s.p) {}

    std::size_t index(int c1, int c2) const {
        return static_cast<std::size_t>(wrap(c1, spec.p)) * spec.p + wrap(c2, spec.p);
    }
    cplx& at(int c1, int c2) { return values[index(c1, c2)]; }
    const cplx& at(int c1, int c2) const { return values[index(c1, c2)]; }
};

// Line-sum ray transform: for family X, values(c1,c2) = sum_i f~(i, a i + c1,
// b i + c2), computed per slice by an exact FFT fractional shift.
Projection2D project(const Object3D& obj, const Direction& dir);

// Elementwise exp(i kappa f_t).
Projection2D phase_projection(const Object3D& obj, const Direction& dir);

// Elementwise (1 + i kappa f_t / q)^q, principal branch; q=1 is the
// weak-phase linearization, q -> inf approaches phase_projection.
Projection2D hybrid_projection(const Object3D& obj, const Direction& dir, double q);

// Guaranteed projection support extents (l_alpha, l_beta):
// l = 2 floor((1+|slope|)(n-1)/2) + 1; values vanish outside Z_l x Z_l'.
std::pair<int, int> support_bounds(const Direction& dir, const LatticeSpec& spec);

// Low-level kernels shared with the measurement operator. Buffers are raw
// wrapped-storage arrays: objects n^3 (k fastest), images p^2.
void project_raw(const cplx* obj, const LatticeSpec& spec, const Direction& dir, cplx* img);
// Accumulates the adjoint of project_raw into obj (no zeroing).
void project_adjoint_raw(const cplx* img, const LatticeSpec& spec, const Direction& dir,
                         cplx* obj);

// Embed object slice s (centered coordinate along the family axis) into a
// zeroed p^2 image, and the adjoint crop-accumulate.
void slice_embed(const cplx* obj, const LatticeSpec& spec, Family family, int s, cplx* img);
void slice_crop_add(const cplx* img, const LatticeSpec& spec, Family family, int s, cplx* obj);

}  // namespace difftomo
