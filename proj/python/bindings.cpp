// rabigeom._core: Python access to spectra, Berry phases and cyclic evolutions.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rabigeom/dynamics.hpp"
#include "rabigeom/errors.hpp"
#include "rabigeom/geometry.hpp"
#include "rabigeom/model.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace rabigeom;

namespace {

InitialFrame frame_of(const std::string& name) {
    if (name == "displaced") return InitialFrame::displaced_frame;
    if (name == "bare") return InitialFrame::bare;
    throw InvalidParams("frame must be 'displaced' or 'bare', got '" + name + "'");
}

py::dict as_dict(const CyclicResult& r) {
    return py::dict("period"_a = r.period, "p"_a = r.p, "q"_a = r.q, "total_phase"_a = r.total_phase,
                    "dynamical_phase"_a = r.dynamical_phase, "aa_phase"_a = r.aa_phase,
                    "aa_phase_reduced"_a = r.aa_phase_reduced, "aa_phase_formula"_a = r.aa_phase_formula,
                    "geometric_phase"_a = r.geometric_phase, "fidelity"_a = r.fidelity);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectra, Berry curvature and geometric phases of the one- and two-qubit quantum Rabi model";

    auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidParams>(m, "InvalidParams", base);
    py::register_exception<NotJCReduction>(m, "NotJCReduction", base);
    py::register_exception<NotEqualFrequency>(m, "NotEqualFrequency", base);
    py::register_exception<LabelError>(m, "LabelError", base);
    py::register_exception<WeightError>(m, "WeightError", base);
    py::register_exception<NoRational>(m, "NoRational", base);
    py::register_exception<NoAnticrossing>(m, "NoAnticrossing", base);
    py::register_exception<InvalidGrid>(m, "InvalidGrid", base);

    py::class_<RabiParams>(m, "RabiParams")
        .def(py::init([](double omega_c, double omega1, double omega2, double g1, double g2) {
                 RabiParams p{omega_c, omega1, omega2, g1, g2};
                 p.validate();
                 return p;
             }),
             "omega_c"_a = 1.0, "omega1"_a = 1.0, "omega2"_a = 0.0, "g1"_a = 0.0, "g2"_a = 0.0)
        .def_static("jc", &RabiParams::jc, "detuning"_a, "g1"_a, "omega_c"_a = 1.0)
        .def_static("homogeneous", &RabiParams::homogeneous, "detuning"_a, "g"_a, "omega_c"_a = 1.0)
        .def_readwrite("omega_c", &RabiParams::omega_c)
        .def_readwrite("omega1", &RabiParams::omega1)
        .def_readwrite("omega2", &RabiParams::omega2)
        .def_readwrite("g1", &RabiParams::g1)
        .def_readwrite("g2", &RabiParams::g2)
        .def_property_readonly("detuning", &RabiParams::detuning)
        .def("__repr__", [](const RabiParams& p) {
            return "RabiParams(omega_c=" + py::repr(py::float_(p.omega_c)).cast<std::string>() +
                   ", omega1=" + py::repr(py::float_(p.omega1)).cast<std::string>() +
                   ", omega2=" + py::repr(py::float_(p.omega2)).cast<std::string>() +
                   ", g1=" + py::repr(py::float_(p.g1)).cast<std::string>() +
                   ", g2=" + py::repr(py::float_(p.g2)).cast<std::string>() + ")";
        });

    py::class_<BlockEigenpair>(m, "BlockEigenpair")
        .def_readonly("k", &BlockEigenpair::k)
        .def_readonly("l", &BlockEigenpair::l)
        .def_readonly("energy", &BlockEigenpair::energy)
        .def_readonly("coeffs", &BlockEigenpair::coeffs);

    m.def("solve_block", &solve_block, "p"_a, "k"_a, "RWA excitation block k, ascending energies");
    m.def("jc_energies", [](const RabiParams& p, int k) {
        const auto es = jc_eigensystem(p, k);
        return py::make_tuple(es.energy_plus, es.energy_minus);
    }, "p"_a, "k"_a, "(E+, E-) of the Jaynes-Cummings block k");

    py::class_<JcLabel>(m, "JcLabel").def(py::init<int, int>(), "k"_a, "branch"_a);
    py::class_<TwoQubitLabel>(m, "TwoQubitLabel").def(py::init<int, int>(), "k"_a, "l"_a);
    py::class_<EqualFrequencyLabel>(m, "EqualFrequencyLabel").def(py::init<int>(), "l"_a);
    py::class_<AdiabaticLabel>(m, "AdiabaticLabel").def(py::init<int, int, int>(), "n"_a, "kappa"_a, "branch"_a);

    m.def("berry_phase", [](const RabiParams& p, const StateLabel& label) {
        return berry_phase_closed_form(p, label).gamma;
    }, "p"_a, "label"_a, "closed-form Berry phase of a labelled eigenstate");
    m.def("berry_phase_block", [](const BlockEigenpair& e) { return berry_phase_eigenstate(e).gamma; },
          "pair"_a, "2 pi <a^dag a> of an RWA block eigenstate");

    m.def("noneigen_phase_jc", &noneigen_phase_jc_closed, "p"_a);
    m.def("noneigen_phase_two_qubit", &noneigen_phase_two_qubit_closed, "p"_a);
    m.def("noneigen_curvature_jc", &noneigen_curvature_jc, "p"_a);
    m.def("noneigen_curvature_two_qubit", &noneigen_curvature_two_qubit, "p"_a);
    m.def("noneigen_phase_beyond_rwa", [](const RabiParams& p, int M, const std::string& frame) {
        return noneigen_phase_beyond_rwa(p, DisplacedBasis::for_params(p, M), frame_of(frame)).phase.gamma;
    }, "p"_a, "M"_a = 50, "frame"_a = "displaced");

    m.def("sector_energies", [](const RabiParams& p, int kappa, int M) {
        std::vector<double> e;
        for (const auto& pair : truncated_parity_solve(p, DisplacedBasis::for_params(p, M), kappa).pairs)
            e.push_back(pair.energy);
        return e;
    }, "p"_a, "kappa"_a, "M"_a = 50, "beyond-RWA energies of one parity sector, ascending");
    m.def("sector_berry_phases", [](const RabiParams& p, int kappa, int M) {
        const auto basis = DisplacedBasis::for_params(p, M);
        std::vector<double> g;
        for (const auto& pair : truncated_parity_solve(p, basis, kappa).pairs)
            g.push_back(berry_phase_eigenstate(pair, basis).gamma);
        return g;
    }, "p"_a, "kappa"_a, "M"_a = 50);
    m.def("fock_sector_energies", [](const RabiParams& p, int kappa, int n_photons) {
        std::vector<double> e;
        for (const auto& pair : solve_full_rabi_sector(build_full_rabi(p, n_photons), kappa).pairs)
            e.push_back(pair.energy);
        return e;
    }, "p"_a, "kappa"_a, "n_photons"_a);

    m.def("rationalize", [](double x, double tolerance, long max_denominator) {
        const auto r = rationalize(x, tolerance, max_denominator);
        return py::make_tuple(r.p, r.q);
    }, "x"_a, "tolerance"_a = 1e-9, "max_denominator"_a = 64);
    m.def("cyclic_evolution_jc", [](const RabiParams& p, int cycles) { return as_dict(cyclic_evolution_jc(p, cycles)); },
          "p"_a, "cycles"_a = 1);
    m.def("cyclic_evolution_two_qubit", [](const RabiParams& p, double tolerance, long max_denominator) {
        return as_dict(cyclic_evolution_two_qubit(p, tolerance, max_denominator));
    }, "p"_a, "tolerance"_a = 1e-9, "max_denominator"_a = 64);

    m.def("find_anticrossing", [](const RabiParams& base, double g_min, double g_max, int points, int kappa, int M,
                                  int max_level) {
        AnticrossingRequest req;
        req.base = base;
        req.g_min = g_min;
        req.g_max = g_max;
        req.points = points;
        req.kappa = kappa;
        req.M = M;
        const auto [a, pair] = find_anticrossing(req, max_level);
        return py::dict("g_star"_a = a.g_star, "min_gap"_a = a.min_gap, "levels"_a = pair,
                        "max_adiabaticity"_a = a.max_adiabaticity);
    }, "base"_a, "g_min"_a, "g_max"_a, "points"_a = 201, "kappa"_a = 1, "M"_a = 50, "max_level"_a = 6);
}
