#include "hdde/classify.hpp"
#include "hdde/degeneracy.hpp"
#include "hdde/errors.hpp"
#include "hdde/harness.hpp"
#include "hdde/scalar2.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>

namespace py = pybind11;
using namespace hdde;

namespace {

using Rows = std::vector<std::vector<Complex>>;

ComplexMatrix to_matrix(const Rows& rows) {
    if (rows.empty()) throw DimensionError("matrix has no rows");
    const std::size_t c = rows[0].size();
    std::vector<Complex> e;
    for (const auto& r : rows) {
        if (r.size() != c) throw DimensionError("ragged matrix rows");
        e.insert(e.end(), r.begin(), r.end());
    }
    return ComplexMatrix(rows.size(), c, std::move(e));
}

Rows from_matrix(const ComplexMatrix& m) {
    Rows out(m.rows(), std::vector<Complex>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

double to_float(const ExtendedReal& x) {
    if (x.is_pos_inf()) return std::numeric_limits<double>::infinity();
    if (x.is_neg_inf()) return -std::numeric_limits<double>::infinity();
    return x.value();
}

Rectangle to_rect(const std::vector<double>& w) {
    if (w.size() != 4) throw ConfigError("window needs re_min, re_max, im_min, im_max");
    return Rectangle{w[0], w[1], w[2], w[3]};
}

py::dict verdict_dict(const StabilityVerdict& v) {
    py::dict d;
    d["status"] = to_string(v.status);
    d["scale"] = v.scale ? py::cast(*v.scale) : py::none();
    d["strong_witness"] = v.strong_witness ? py::cast(*v.strong_witness) : py::none();
    py::list sups;
    for (const auto& s : v.sups) {
        py::dict e;
        e["k"] = s.k;
        e["sup"] = to_float(s.sup);
        e["uncertainty"] = s.uncertainty;
        sups.append(e);
    }
    d["sups"] = sups;
    d["notes"] = v.notes;
    return d;
}

scalar2::ScalarParams params(Complex a, Complex b, Complex c) { return {a, b, c}; }

} // namespace

PYBIND11_MODULE(_hdde, m) {
    m.doc() = "Eigenvalues, spectral manifolds and stability of DDEs with hierarchical delays";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<NdViolation>(m, "NdViolation", base.ptr());
    py::register_exception<RangeError>(m, "RangeError", base.ptr());

    py::class_<DelaySystem>(m, "DelaySystem")
        .def(py::init([](const std::vector<Rows>& matrices, std::vector<double> sigma) {
                 std::vector<ComplexMatrix> mats;
                 for (const auto& r : matrices) mats.push_back(to_matrix(r));
                 return DelaySystem(std::move(mats), std::move(sigma));
             }),
             py::arg("matrices"), py::arg("sigma"), "matrices A0..An as nested lists, sigma_1..sigma_n")
        .def_static("scalar", &DelaySystem::scalar, py::arg("coefficients"), py::arg("sigma"))
        .def_static("from_json", &parse_system, py::arg("text"))
        .def("to_json", &serialize_system)
        .def_property_readonly("dim", &DelaySystem::dim)
        .def_property_readonly("delay_count", &DelaySystem::delay_count)
        .def_property_readonly("sigma", &DelaySystem::sigmas)
        .def("A", [](const DelaySystem& s, std::size_t k) { return from_matrix(s.A(k)); }, py::arg("k"))
        .def("delays", [](const DelaySystem& s, double eps) { return delays(s, Epsilon(eps)); }, py::arg("eps"))
        .def("__eq__", [](const DelaySystem& a, const DelaySystem& b) { return a == b; });

    m.def(
        "char_value", [](const DelaySystem& s, double eps, Complex lam) { return char_value(s, Epsilon(eps), lam); },
        py::arg("system"), py::arg("eps"), py::arg("lam"), "det of the characteristic matrix");

    m.def(
        "spectrum",
        [](const DelaySystem& s, double eps, const std::vector<double>& window, double tol) {
            RootFinderOptions opts;
            opts.tol = tol;
            const auto rec = compute_spectrum(s, Epsilon(eps), to_rect(window), opts);
            std::vector<std::tuple<Complex, std::size_t, double>> out;
            for (const auto& r : rec.roots) out.emplace_back(r.location, r.multiplicity, r.residual);
            return out;
        },
        py::arg("system"), py::arg("eps"), py::arg("window"), py::arg("tol") = 1e-10,
        "roots in the window as (lambda, multiplicity, residual)");

    m.def(
        "sup_gamma", [](const DelaySystem& s, std::size_t k) { return to_float(sup_gamma(s, k).sup); },
        py::arg("system"), py::arg("k"));
    m.def(
        "classify", [](const DelaySystem& s) { return verdict_dict(classify(s, build_ladder(s))); },
        py::arg("system"));
    m.def(
        "check_nd", [](const DelaySystem& s) { return check_nd(build_ladder(s), s); }, py::arg("system"));
    m.def(
        "describe_ladder", [](const DelaySystem& s) { return describe_ladder(build_ladder(s)); },
        py::arg("system"));
    m.def(
        "rescale", [](double eps, std::size_t k, Complex lam) { return rescale(Epsilon(eps), k, lam); },
        py::arg("eps"), py::arg("k"), py::arg("lam"));

    auto s2 = m.def_submodule("scalar2", "closed forms for x' = a x + b x(t - tau_1) + c x(t - tau_2)");
    s2.def(
        "gamma1", [](Complex a, Complex b, Complex c, double w) { return to_float(scalar2::gamma1(params(a, b, c), w)); },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("omega"));
    s2.def(
        "gamma2",
        [](Complex a, Complex b, Complex c, double w, double phi) {
            return to_float(scalar2::gamma2(params(a, b, c), w, phi));
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("omega"), py::arg("phi1"));
    s2.def(
        "sup_gamma1", [](Complex a, Complex b, Complex c) { return to_float(scalar2::sup_gamma1(params(a, b, c))); },
        py::arg("a"), py::arg("b"), py::arg("c"));
    s2.def(
        "sup_gamma2", [](Complex a, Complex b, Complex c) { return to_float(scalar2::sup_gamma2(params(a, b, c))); },
        py::arg("a"), py::arg("b"), py::arg("c"));
    s2.def(
        "gamma1_zeros", [](Complex a, Complex b, Complex c) { return scalar2::gamma1_zeros(params(a, b, c)); },
        py::arg("a"), py::arg("b"), py::arg("c"));
    s2.def(
        "phi_singular",
        [](Complex a, Complex b, Complex c) {
            std::vector<std::tuple<double, double, double>> out;
            if (const auto ph = scalar2::phi_singular(params(a, b, c)))
                for (const auto& x : {ph->first, ph->second}) out.emplace_back(x.omega, x.phi, x.residual);
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("c"), "(omega, phi, residual) where gamma2 is singular");
    s2.def(
        "classify",
        [](Complex a, Complex b, Complex c) { return verdict_dict(scalar2::classify_scalar(params(a, b, c))); },
        py::arg("a"), py::arg("b"), py::arg("c"));

    m.def("example_names", [] {
        std::vector<std::string> names;
        for (const auto& p : example_presets()) names.push_back(p.name);
        return names;
    });
    m.def(
        "run_example",
        [](const std::string& name, const std::filesystem::path& out) {
            const auto r = run_example(name, out);
            py::dict d;
            d["sup_gamma1"] = py::make_tuple(to_float(r.sup1_closed), to_float(r.sup1_general));
            d["sup_gamma2"] = py::make_tuple(to_float(r.sup2_closed), to_float(r.sup2_general));
            d["max_discrepancy"] = r.sup_discrepancy;
            d["verdict_closed"] = verdict_dict(r.verdict_closed);
            d["verdict_general"] = verdict_dict(r.verdict_general);
            d["files"] = r.files;
            return d;
        },
        py::arg("name"), py::arg("output_dir"), "closed form vs general code for a scalar preset; returns a summary");
}
