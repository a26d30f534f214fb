#include "kakeya/experiments.hpp"
#include "kakeya/exponents.hpp"
#include "kakeya/geometry.hpp"
#include "kakeya/norms.hpp"
#include "kakeya/parallel.hpp"
#include "kakeya/wolff.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
namespace ex = kakeya::experiments;
namespace xp = kakeya::exponents;

namespace {

// Rationals cross the boundary as "a/b" strings; fractions.Fraction parses them.
std::vector<std::string> strs(const std::vector<kakeya::Rational>& v) {
    std::vector<std::string> out;
    for (const auto& r : v) out.push_back(r.str());
    return out;
}

py::dict report(const xp::ExponentReport& r) {
    py::dict d;
    d["n"] = r.n;
    d["p"] = r.p.str();
    d["p_float"] = r.p_float;
    d["k"] = r.argmin_k;
    d["trace"] = r.trace;
    return d;
}

py::dict outcome(const ex::Outcome& o) {
    py::dict d;
    d["ok"] = o.ok;
    d["summary"] = o.summary;
    d["metrics"] = o.metrics;
    py::dict arts;
    for (const auto& a : o.artifacts) arts[py::str(a.name)] = py::bytes(a.content);
    d["artifacts"] = arts;
    return d;
}

ex::Outcome from_dict(const py::dict& d) {
    ex::Outcome o;
    o.ok = d["ok"].cast<bool>();
    o.summary = d["summary"].cast<std::string>();
    for (auto item : d["artifacts"].cast<py::dict>())
        o.artifacts.push_back({item.first.cast<std::string>(), item.second.cast<std::string>()});
    return o;
}

}  // namespace

PYBIND11_MODULE(_kakeya, m) {
    m.doc() = "kakeya-lab core bindings";

    py::register_exception<kakeya::PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<kakeya::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<kakeya::AssertionFailure>(m, "AssertionFailure", PyExc_AssertionError);

    m.def("set_workers", &kakeya::set_workers, py::arg("n"));
    m.def("workers", &kakeya::workers);

    // exponents
    m.def("linear_exponent", [](int n) { return report(xp::linear_exponent(n)); }, py::arg("n"));
    m.def("pwa_exponent", [](int n) { return report(xp::pwa_exponent(n)); }, py::arg("n"));
    m.def("easy_exponent", &xp::easy_exponent, py::arg("n"));
    m.def("hausdorff_bound", [](int n) { return xp::hausdorff_bound(n).str(); }, py::arg("n"));
    m.def("gamma_weights", [](int n, int mm) { return strs(xp::gamma_weights(n, mm)); }, py::arg("n"), py::arg("m"));
    m.def("p_ladder", [](int n, int mm) { return strs(xp::p_ladder(n, mm)); }, py::arg("n"), py::arg("m"));
    m.def("final_conjugate", [](int n, int mm) { return xp::final_conjugate(n, mm).str(); }, py::arg("n"),
          py::arg("m"));
    m.def("verify_xy_zero", &xp::verify_xy_zero, py::arg("n"), py::arg("m"));
    m.def(
        "emit_table",
        [](int figure, int lo, int hi, const std::string& fmt) {
            return xp::emit_table(figure, lo, hi, fmt == "md" ? xp::TableFormat::Markdown : xp::TableFormat::Csv);
        },
        py::arg("figure"), py::arg("lo") = 2, py::arg("hi") = 15, py::arg("format") = "csv");

    // geometry and norms
    py::class_<kakeya::Tube>(m, "Tube")
        .def_readonly("dim", &kakeya::Tube::dim)
        .def_readonly("delta", &kakeya::Tube::delta)
        .def_readonly("direction", &kakeya::Tube::direction)
        .def_readonly("center", &kakeya::Tube::center)
        .def("contains", py::overload_cast<const kakeya::Vec&>(&kakeya::Tube::contains, py::const_))
        .def("volume", &kakeya::Tube::volume);
    py::class_<kakeya::TubeFamily>(m, "TubeFamily")
        .def_readonly("dim", &kakeya::TubeFamily::dim)
        .def_readonly("delta", &kakeya::TubeFamily::delta)
        .def_readonly("tubes", &kakeya::TubeFamily::tubes)
        .def("__len__", &kakeya::TubeFamily::size)
        .def("min_pairwise_angle", &kakeya::TubeFamily::min_pairwise_angle)
        .def("total_volume", &kakeya::TubeFamily::total_volume);
    m.def("make_direction_separated_family", &kakeya::make_direction_separated_family, py::arg("n"),
          py::arg("delta"), py::arg("seed"));
    m.def("kakeya_ratio", &kakeya::kakeya_ratio, py::arg("family"), py::arg("p"), py::arg("h"));
    m.def(
        "rasterize",
        [](const kakeya::TubeFamily& f, double h) {
            auto g = kakeya::rasterize(f, h);
            std::vector<py::ssize_t> shape(g.grid.extent.begin(), g.grid.extent.end());
            py::array_t<double> arr(shape);
            std::copy(g.values.begin(), g.values.end(), arr.mutable_data());
            return py::make_tuple(arr, g.grid.lo, g.grid.h);
        },
        py::arg("family"), py::arg("h"), "Returns (values, lower corner, spacing); axis 0 varies slowest.");

    // wolff
    m.def(
        "poly_average_bound",
        [](const std::vector<double>& coefs, double a, double b, double t) {
            auto r = kakeya::poly_average_bound(coefs, a, b, t);
            py::dict d;
            d["lhs"] = r.lhs;
            d["rhs"] = r.rhs;
            d["integral"] = r.integral;
            d["holds"] = r.holds;
            return d;
        },
        py::arg("coefs"), py::arg("a"), py::arg("b"), py::arg("t"));

    // experiments
    m.def("exponent_system", [](int lo, int hi) { return outcome(ex::exponent_system(lo, hi)); }, py::arg("lo") = 2,
          py::arg("hi") = 20);
    m.def(
        "poly_bound_fuzz",
        [](std::size_t trials, int degree, std::uint64_t seed) {
            return outcome(ex::poly_bound_fuzz(trials, degree, seed));
        },
        py::arg("trials") = 10000, py::arg("max_degree") = 8, py::arg("seed") = 1);
    m.def(
        "bezout",
        [](std::size_t tubes, std::size_t partitions, std::uint64_t seed) {
            ex::BezoutConfig c;
            c.tubes = tubes;
            c.partitions = partitions;
            c.seed = seed;
            return outcome(ex::bezout(c));
        },
        py::arg("tubes") = 1000, py::arg("partitions") = 50, py::arg("seed") = 1);
    m.def(
        "equal_mass",
        [](std::size_t instances, std::uint64_t seed) {
            ex::EqualMassConfig c;
            c.instances = instances;
            c.seed = seed;
            return outcome(ex::equal_mass(c));
        },
        py::arg("instances") = 50, py::arg("seed") = 1);
    m.def(
        "cordoba",
        [](const std::vector<double>& deltas, double p, std::uint64_t seed) {
            return outcome(ex::cordoba(deltas, p, seed));
        },
        py::arg("deltas") = std::vector<double>{1.0 / 16, 1.0 / 32, 1.0 / 64}, py::arg("p") = 2.0, py::arg("seed") = 1);
    m.def(
        "vanishing",
        [](std::size_t families, std::uint64_t seed) {
            ex::VanishingConfig c;
            c.families = families;
            c.seed = seed;
            return outcome(ex::vanishing(c));
        },
        py::arg("families") = 20, py::arg("seed") = 1);
    m.def(
        "sharpness",
        [](double delta, std::size_t families, std::uint64_t seed) {
            ex::SharpnessConfig c;
            c.delta = delta;
            c.random_families = families;
            c.seed = seed;
            return outcome(ex::sharpness(c));
        },
        py::arg("delta") = 1.0 / 32, py::arg("families") = 20, py::arg("seed") = 1);
    m.def(
        "write_artifacts", [](const py::dict& o, const std::string& dir) { return ex::write_artifacts(from_dict(o), dir); },
        py::arg("outcome"), py::arg("dir"));
}
