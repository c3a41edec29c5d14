// Python bindings for the main lattice / projection / measurement /
// reconstruction operations. Arrays cross the boundary as numpy arrays
// indexed by ascending centered coordinates.
#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "difftomo/phantom.hpp"
#include "difftomo/recon.hpp"

namespace py = pybind11;
using namespace difftomo;

namespace {

py::array_t<cplx> object_to_array(const Object3D& obj) {
    const int n = obj.spec.n;
    py::array_t<cplx> out({n, n, n});
    auto view = out.mutable_unchecked<3>();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                view(i, j, k) = obj.at(range_lo(n) + i, range_lo(n) + j, range_lo(n) + k);
    return out;
}

Object3D object_from_array(const LatticeSpec& spec, py::array_t<cplx> arr) {
    auto view = arr.unchecked<3>();
    const int n = spec.n;
    if (view.shape(0) != n || view.shape(1) != n || view.shape(2) != n)
        throw std::invalid_argument("array shape must be (n, n, n)");
    Object3D obj(spec);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                obj.at(range_lo(n) + i, range_lo(n) + j, range_lo(n) + k) = view(i, j, k);
    return obj;
}

py::array_t<cplx> projection_to_array(const Projection2D& proj) {
    const int p = proj.spec.p;
    py::array_t<cplx> out({p, p});
    auto view = out.mutable_unchecked<2>();
    for (int c1 = 0; c1 < p; ++c1)
        for (int c2 = 0; c2 < p; ++c2)
            view(c1, c2) = proj.at(range_lo(p) + c1, range_lo(p) + c2);
    return out;
}

Projection2D projection_from_array(const LatticeSpec& spec, const Direction& dir,
                                   py::array_t<cplx> arr) {
    auto view = arr.unchecked<2>();
    const int p = spec.p;
    if (view.shape(0) != p || view.shape(1) != p)
        throw std::invalid_argument("array shape must be (p, p)");
    Projection2D proj(spec, dir);
    for (int c1 = 0; c1 < p; ++c1)
        for (int c2 = 0; c2 < p; ++c2)
            proj.at(range_lo(p) + c1, range_lo(p) + c2) = view(c1, c2);
    return proj;
}

std::vector<cplx> image_from_array(py::array_t<cplx> arr, int* side_out) {
    auto view = arr.unchecked<2>();
    if (view.shape(0) != view.shape(1)) throw std::invalid_argument("image must be square");
    const int side = static_cast<int>(view.shape(0));
    std::vector<cplx> img(static_cast<std::size_t>(side) * side);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) img[static_cast<std::size_t>(r) * side + c] = view(r, c);
    if (side_out) *side_out = side;
    return img;
}

using Stack = std::vector<std::pair<Direction, Projection2D>>;

}  // namespace

PYBIND11_MODULE(_difftomo, m) {
    m.doc() = "discrete tomographic phase retrieval core";

    py::register_exception<DiversityError>(m, "DiversityError");

    py::enum_<Family>(m, "Family")
        .value("X", Family::X)
        .value("Y", Family::Y)
        .value("Z", Family::Z);

    py::class_<LatticeSpec>(m, "LatticeSpec")
        .def(py::init<int, int, double>(), py::arg("n"), py::arg("p"), py::arg("kappa") = pi)
        .def_static("with_default_padding", &LatticeSpec::with_default_padding, py::arg("n"),
                    py::arg("kappa") = pi)
        .def_readonly("n", &LatticeSpec::n)
        .def_readonly("p", &LatticeSpec::p)
        .def_readonly("kappa", &LatticeSpec::kappa)
        .def("__repr__", [](const LatticeSpec& s) {
            return "LatticeSpec(n=" + std::to_string(s.n) + ", p=" + std::to_string(s.p) +
                   ", kappa=" + std::to_string(s.kappa) + ")";
        });

    py::class_<Direction>(m, "Direction")
        .def(py::init<Family, double, double>(), py::arg("family"), py::arg("alpha"),
             py::arg("beta"))
        .def_readonly("family", &Direction::family)
        .def_readonly("alpha", &Direction::alpha)
        .def_readonly("beta", &Direction::beta)
        .def("rep_vector", &Direction::rep_vector)
        .def("unit_vector", &Direction::unit_vector)
        .def("__repr__", [](const Direction& d) {
            static const char* names[] = {"X", "Y", "Z"};
            return std::string("Direction(") + names[static_cast<int>(d.family)] + ", " +
                   std::to_string(d.alpha) + ", " + std::to_string(d.beta) + ")";
        });

    py::class_<Object3D>(m, "Object3D")
        .def(py::init([](const LatticeSpec& spec, py::array_t<cplx> arr) {
                 return object_from_array(spec, arr);
             }),
             py::arg("spec"), py::arg("values"))
        .def(py::init<const LatticeSpec&>(), py::arg("spec"))
        .def_readonly("spec", &Object3D::spec)
        .def("to_array", &object_to_array)
        .def("norm", &Object3D::norm);

    py::class_<Projection2D>(m, "Projection2D")
        .def(py::init([](const LatticeSpec& spec, const Direction& dir, py::array_t<cplx> arr) {
                 return projection_from_array(spec, dir, arr);
             }),
             py::arg("spec"), py::arg("direction"), py::arg("values"))
        .def_readonly("spec", &Projection2D::spec)
        .def_readonly("direction", &Projection2D::direction)
        .def("to_array", &projection_to_array);

    py::class_<TiltScheme>(m, "TiltScheme")
        .def(py::init([](std::vector<Direction> dirs, double epsilon) {
                 TiltScheme s;
                 s.directions = std::move(dirs);
                 s.epsilon = epsilon;
                 return s;
             }),
             py::arg("directions"), py::arg("epsilon"))
        .def_readwrite("directions", &TiltScheme::directions)
        .def_readwrite("epsilon", &TiltScheme::epsilon)
        .def("__len__", [](const TiltScheme& s) { return s.directions.size(); });

    py::class_<DiversityReport>(m, "DiversityReport")
        .def_readonly("satisfied", &DiversityReport::satisfied)
        .def_readonly("min_node_gap", &DiversityReport::min_node_gap)
        .def_readonly("worst_freq", &DiversityReport::worst_freq)
        .def_readonly("worst_pair", &DiversityReport::worst_pair);

    py::class_<PhaseMask>(m, "PhaseMask");

    py::class_<DiffractionPattern>(m, "DiffractionPattern")
        .def_property_readonly("side", &DiffractionPattern::side)
        .def_property_readonly("intensities", [](const DiffractionPattern& pat) {
            const int side = pat.side();
            py::array_t<double> out({side, side});
            auto view = out.mutable_unchecked<2>();
            for (int r = 0; r < side; ++r)
                for (int c = 0; c < side; ++c)
                    view(r, c) = pat.intensities[static_cast<std::size_t>(r) * side + c];
            return out;
        });

    py::class_<ReconReport>(m, "ReconReport")
        .def_readonly("iterations", &ReconReport::iterations)
        .def_readonly("residual_history", &ReconReport::residual_history)
        .def_readonly("correlation_history", &ReconReport::correlation_history)
        .def_readonly("final_object", &ReconReport::final_object)
        .def_readonly("cg_converged", &ReconReport::cg_converged);

    py::class_<UnwrapResult>(m, "UnwrapResult")
        .def_readonly("unwrapped", &UnwrapResult::unwrapped)
        .def_readonly("object", &UnwrapResult::object)
        .def_readonly("converged", &UnwrapResult::converged)
        .def_readonly("residual", &UnwrapResult::residual);

    py::class_<MeasurementOperator>(m, "MeasurementOperator")
        .def(py::init([](const TiltScheme& scheme, std::optional<PhaseMask> mask,
                         const LatticeSpec& spec, bool oversampled, bool real_constraint) {
                 return MeasurementOperator(scheme, std::move(mask), spec,
                                            OperatorFlags{oversampled, real_constraint});
             }),
             py::arg("scheme"), py::arg("mask"), py::arg("spec"),
             py::arg("oversampled") = false, py::arg("real_constraint") = false)
        .def_property_readonly("measurement_size", &MeasurementOperator::measurement_size)
        .def_property_readonly("pattern_side", &MeasurementOperator::pattern_side)
        .def("forward", [](const MeasurementOperator& op,
                           const Object3D& f) { return op.forward(f); })
        .def("adjoint", [](const MeasurementOperator& op, const std::vector<cplx>& y) {
            return op.adjoint(y);
        });

    // Lattice and projection geometry.
    m.def("dirichlet_kernel", &dirichlet_kernel, py::arg("t"), py::arg("spec"));
    m.def("interpolate", &interpolate, py::arg("object"), py::arg("x"), py::arg("y"),
          py::arg("z"));
    m.def("project", &project, py::arg("object"), py::arg("direction"));
    m.def("phase_projection", &phase_projection, py::arg("object"), py::arg("direction"));
    m.def("hybrid_projection", &hybrid_projection, py::arg("object"), py::arg("direction"),
          py::arg("q"));
    m.def("support_bounds", &support_bounds, py::arg("direction"), py::arg("spec"));
    m.def("verify_slice_theorem", &verify_slice_theorem, py::arg("object"),
          py::arg("direction"));

    // Tilt schemes.
    m.def("tset_scheme", &tset_scheme, py::arg("n"), py::arg("seed"));
    m.def("conical_tilt_scheme", &conical_tilt_scheme, py::arg("count"));
    m.def("dual_axis_scheme", &dual_axis_scheme, py::arg("q"), py::arg("alpha"));
    m.def("scheme_polyline_length", &scheme_polyline_length, py::arg("scheme"));
    m.def("is_epsilon_connected", &is_epsilon_connected, py::arg("scheme"));
    m.def("diversity_check", &diversity_check, py::arg("scheme"), py::arg("spec"),
          py::arg("tol") = 1e-9);

    // Measurements.
    m.def("random_phase_mask", &random_phase_mask, py::arg("spec"), py::arg("seed"));
    m.def(
        "diffraction_pattern",
        [](py::array_t<cplx> image, std::optional<PhaseMask> mask, bool oversampled,
           const LatticeSpec& spec) {
            std::vector<cplx> img = image_from_array(image, nullptr);
            return diffraction_pattern(img, mask ? &*mask : nullptr, oversampled, spec);
        },
        py::arg("image"), py::arg("mask") = std::nullopt, py::arg("oversampled") = false,
        py::arg("spec"));
    m.def(
        "poissonize",
        [](const DiffractionPattern& pattern, double s, std::uint64_t seed) {
            return poissonize(pattern, NoiseSpec(s, seed));
        },
        py::arg("pattern"), py::arg("s"), py::arg("seed"));
    m.def(
        "nsr", [](const DiffractionPattern& pattern, double s) { return nsr(pattern, s); },
        py::arg("pattern"), py::arg("s"));
    m.def("solve_s_for_nsr", &solve_s_for_nsr, py::arg("pattern"), py::arg("target_nsr"));

    // Reconstruction.
    m.def(
        "ap_reconstruct",
        [](const MeasurementOperator& op, const std::vector<double>& b, std::uint64_t seed,
           int max_iters, const Object3D* truth, double cg_tol, int cg_max_iters) {
            return ap_reconstruct(op, b, seed, max_iters, truth,
                                  CgOptions{cg_tol, cg_max_iters});
        },
        py::arg("op"), py::arg("b"), py::arg("init_seed"), py::arg("max_iters"),
        py::arg("ground_truth") = nullptr, py::arg("cg_tol") = 1e-10,
        py::arg("cg_max_iters") = 200);
    m.def(
        "vandermonde_tomography",
        [](const Stack& projections, const LatticeSpec& spec) {
            return vandermonde_tomography(projections, spec);
        },
        py::arg("projections"), py::arg("spec"));
    m.def(
        "unwrap_tilt_series",
        [](const Stack& wrapped, const TiltScheme& scheme, const LatticeSpec& spec,
           int max_outer_iters) {
            return unwrap_tilt_series(wrapped, scheme, spec, max_outer_iters);
        },
        py::arg("wrapped"), py::arg("scheme"), py::arg("spec"),
        py::arg("max_outer_iters") = 50);
    m.def("correlation", &correlation, py::arg("f"), py::arg("f_star"));
    m.def("sector_bound", &sector_bound, py::arg("n"), py::arg("a"), py::arg("b"),
          py::arg("S"));

    // Phantoms.
    m.def("builtin_phantom", &builtin_phantom, py::arg("name"), py::arg("spec"));
}
