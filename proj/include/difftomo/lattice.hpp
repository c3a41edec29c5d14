#pragma once

#include "difftomo/common.hpp"

namespace difftomo {

// Lattice geometry: objects live on the centered cube Z_n^3 and are
// zero-padded into Z_p^3 (p odd, p >= 2n-1) for everything spectral.
struct LatticeSpec {
    int n = 0;
    int p = 0;
    double kappa = pi;

    LatticeSpec() = default;
    LatticeSpec(int n_, int p_, double kappa_ = pi) : n(n_), p(p_), kappa(kappa_) {
        validate();
    }

    static LatticeSpec with_default_padding(int n, double kappa = pi) {
        return LatticeSpec(n, 2 * n - 1, kappa);
    }

    void validate() const {
        if (n < 1) throw std::invalid_argument("lattice: n must be positive");
        if (p % 2 == 0 || p < 2 * n - 1)
            throw std::invalid_argument("lattice: p must be odd and >= 2n-1");
        if (!(kappa > 0.0)) throw std::invalid_argument("lattice: kappa must be positive");
    }

    bool operator==(const LatticeSpec&) const = default;
};

// p-periodic Dirichlet kernel: 1 at multiples of p, sin(pi t)/(p sin(pi t/p))
// elsewhere; identity on the integer lattice.
double dirichlet_kernel(double t, const LatticeSpec& spec);

// Complex voxel grid on Z_n^3, stored with index 0 at the origin and
// negative coordinates wrapped (DFT order), k fastest.
struct Object3D {
    LatticeSpec spec;
    std::vector<cplx> values;

    Object3D() = default;
    explicit Object3D(const LatticeSpec& s)
        : spec(s), values(static_cast<std::size_t>(s.n) * s.n * s.n) {}

    std::size_t index(int i, int j, int k) const {
        const int n = spec.n;
        return (static_cast<std::size_t>(wrap(i, n)) * n + wrap(j, n)) * n + wrap(k, n);
    }
    cplx& at(int i, int j, int k) { return values[index(i, j, k)]; }
    const cplx& at(int i, int j, int k) const { return values[index(i, j, k)]; }

    double norm() const;
};

// Band-limited interpolation: sum of f(i,j,k) D_p(x-i) D_p(y-j) D_p(z-k)
// over Z_n^3; p-periodic, exact at integer lattice points.
cplx interpolate(const Object3D& obj, double x, double y, double z);

}  // namespace difftomo
