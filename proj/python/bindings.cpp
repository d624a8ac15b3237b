#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cospec/design.hpp"
#include "cospec/error.hpp"
#include "cospec/io.hpp"
#include "cospec/ruler.hpp"
#include "cospec/sim.hpp"
#include "cospec/system.hpp"

namespace py = pybind11;
using namespace cospec;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-coset ruler design and cooperative compressive power spectrum estimation";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(PyExc_ValueError, ("ERR:" + e.code() + ": " + e.what()).c_str());
        }
    });

    py::class_<CosetPattern>(m, "CosetPattern")
        .def(py::init<int, std::vector<int>>(), py::arg("period"), py::arg("marks"))
        .def_static("full", &CosetPattern::full)
        .def_property_readonly("period", &CosetPattern::period)
        .def_property_readonly("marks", &CosetPattern::marks)
        .def("__len__", &CosetPattern::size)
        .def("__eq__", [](const CosetPattern& a, const CosetPattern& b) { return a == b; })
        .def("__repr__", [](const CosetPattern& p) { return "CosetPattern(" + io::format_pattern(p) + ")"; });

    py::class_<RulerBank>(m, "RulerBank")
        .def(py::init<int, std::vector<CosetPattern>>(), py::arg("period"), py::arg("patterns"))
        .def(py::init([](int period, const std::vector<std::vector<int>>& marks) {
                 std::vector<CosetPattern> patterns;
                 for (const auto& mk : marks) patterns.emplace_back(period, mk);
                 return RulerBank(period, std::move(patterns));
             }),
             py::arg("period"), py::arg("marks"))
        .def_property_readonly("period", &RulerBank::period)
        .def_property_readonly("marks_per_pattern", &RulerBank::marks_per_pattern)
        .def_property_readonly("patterns", &RulerBank::patterns)
        .def("__len__", &RulerBank::size);

    py::class_<DesignReport>(m, "DesignReport")
        .def_readonly("bank", &DesignReport::bank)
        .def_readonly("achieved_Z", &DesignReport::achieved_Z)
        .def_readonly("lower_bound", &DesignReport::lower_bound)
        .def_readonly("per_pattern_golomb", &DesignReport::per_pattern_golomb)
        .def_readonly("non_overlapping", &DesignReport::non_overlapping)
        .def_readonly("covered", &DesignReport::covered)
        .def_readonly("missing", &DesignReport::missing)
        .def_property_readonly("greedy_trace", [](const DesignReport& r) {
            std::vector<std::tuple<int, int, int>> out;
            for (const auto& s : r.greedy_trace) out.emplace_back(s.pattern, s.mark, s.newly_covered);
            return out;
        });

    py::class_<SystemMatrix>(m, "SystemMatrix")
        .def_property_readonly("period", &SystemMatrix::period)
        .def_property_readonly("columns", &SystemMatrix::columns)
        .def_property_readonly("row_count", &SystemMatrix::row_count)
        .def_property_readonly("structural_columns", [](const SystemMatrix& s) {
            std::vector<int> out;
            for (const auto& r : s.rows()) out.push_back(r.column);
            return out;
        })
        .def("dense", &SystemMatrix::dense, "Row-major dense copy");

    m.def("difference_set", [](const CosetPattern& p) { return difference_set(p).members(); });
    m.def("is_complete_circular_ruler", &is_complete_circular_ruler);
    m.def("is_incomplete_circular_ruler", &is_incomplete_circular_ruler);
    m.def("is_circular_golomb", &is_circular_golomb);
    m.def("are_non_overlapping", &are_non_overlapping);
    m.def("union_covers", [](const RulerBank& b) {
        auto c = union_covers(b);
        return py::make_tuple(c.covered, c.missing);
    });
    m.def("lower_bound_Z", &lower_bound_Z, py::arg("N"), py::arg("M"));

    m.def("design_m2", &design_m2, py::arg("N"));
    m.def(
        "design_greedy",
        [](int n, int mm, int min_patterns) { return design_greedy(n, mm, {.min_patterns = min_patterns}); },
        py::arg("N"), py::arg("M"), py::arg("min_patterns") = 0);
    m.def("verify_bank", &verify_bank);

    m.def("build_system", &build_system);
    m.def("check_full_column_rank", &check_full_column_rank);
    m.def("reconstruct_r0", [](const std::vector<double>& v) { return reconstruct_r0(v); });
    m.def("reconstruct_r1", [](const SystemMatrix& s, const std::vector<cplx>& v) { return reconstruct_r1(s, v); });
    m.def("assemble_rx", [](double r0, const std::vector<cplx>& r1) { return assemble_rx(r0, r1).values; });
    m.def("power_spectrum", [](const std::vector<cplx>& rx) {
        AutocorrelationVector v{static_cast<int>((rx.size() + 1) / 2), rx};
        if (rx.size() % 2 == 0) fail("dimension", "stacked autocorrelation must have odd length 2N-1");
        return power_spectrum(v).values;
    });
    m.def("exact_spectrum", [](const RulerBank& b, const std::vector<cplx>& rx) { return sim::exact_spectrum(b, rx).values; },
          py::arg("bank"), py::arg("rx_lags"));
    m.def("nmse", [](const std::vector<cplx>& est, const std::vector<cplx>& base) {
        return sim::nmse(PowerSpectrum{est}, PowerSpectrum{base});
    });

    m.def("format_bank", &io::format_bank);
    m.def("parse_bank", [](const std::string& text) {
        std::istringstream in(text);
        return io::parse_bank(in);
    });

    m.def(
        "sweep",
        [](const std::string& config_path, std::vector<int> ms, std::vector<int> ps, std::vector<int> ls, int runs,
           bool exact) {
            auto loaded = io::load_sim_config(config_path);
            if (runs > 0) loaded.config.runs = runs;
            if (!ms.empty()) loaded.grid.M = std::move(ms);
            if (!ps.empty()) loaded.grid.P = std::move(ps);
            if (!ls.empty()) loaded.grid.L = std::move(ls);
            sim::SweepOutcome outcome;
            {
                py::gil_scoped_release release;
                outcome = sim::run_sweep(loaded.config, loaded.grid, {.exact = exact});
            }
            py::list rows;
            for (const auto& r : outcome.results) {
                py::dict d;
                d["M"] = r.M;
                d["P"] = r.P;
                d["L"] = r.L;
                d["runs"] = r.runs;
                d["nmse"] = r.nmse;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config"), py::arg("M") = std::vector<int>{}, py::arg("P") = std::vector<int>{},
        py::arg("L") = std::vector<int>{}, py::arg("runs") = 0, py::arg("exact") = false);
}
