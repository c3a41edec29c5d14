#include "difftomo/lattice.hpp"

#include <cmath>

namespace difftomo {

double dirichlet_kernel(double t, const LatticeSpec& spec) {
    const double p = static_cast<double>(spec.p);
    const double r = std::remainder(t, p);  // exact periodization, r in [-p/2, p/2]
    if (r == 0.0) return 1.0;
    return std::sin(pi * r) / (p * std::sin(pi * r / p));
}

double Object3D::norm() const {
    double acc = 0.0;
    for (const cplx& v : values) acc += std::norm(v);
    return std::sqrt(acc);
}

cplx interpolate(const Object3D& obj, double x, double y, double z) {
    const int n = obj.spec.n;
    const int lo = range_lo(n), hi = range_hi(n);
    std::vector<double> dx(n), dy(n), dz(n);
    for (int i = lo; i <= hi; ++i) {
        dx[i - lo] = dirichlet_kernel(x - i, obj.spec);
        dy[i - lo] = dirichlet_kernel(y - i, obj.spec);
        dz[i - lo] = dirichlet_kernel(z - i, obj.spec);
    }
    cplx acc = 0.0;
    for (int i = lo; i <= hi; ++i)
        for (int j = lo; j <= hi; ++j) {
            const double dxy = dx[i - lo] * dy[j - lo];
            if (dxy == 0.0) continue;
            for (int k = lo; k <= hi; ++k) acc += obj.at(i, j, k) * (dxy * dz[k - lo]);
        }
    return acc;
}

}  // namespace difftomo
