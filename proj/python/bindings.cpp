#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pasldpc/constellation.hpp"
#include "pasldpc/errors.hpp"
#include "pasldpc/lifting.hpp"
#include "pasldpc/optimizer.hpp"
#include "pasldpc/paschain.hpp"
#include "pasldpc/protograph.hpp"
#include "pasldpc/rates.hpp"
#include "pasldpc/sim.hpp"
#include "pasldpc/surrogate.hpp"

namespace py = pybind11;
using namespace pasldpc;

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Shaped coded-modulation toolkit core";

    py::register_exception<Error>(mod, "ToolkitError");

    py::class_<AskConstellation>(mod, "AskConstellation")
        .def_readonly("m", &AskConstellation::m)
        .def_readonly("points", &AskConstellation::points)
        .def_readonly("labels", &AskConstellation::labels)
        .def("bit", &AskConstellation::bit, py::arg("point_index"), py::arg("level"));

    py::class_<SymbolPmf>(mod, "SymbolPmf")
        .def(py::init([](std::vector<double> probs) {
                 SymbolPmf pmf;
                 pmf.probs = std::move(probs);
                 return pmf;
             }),
             py::arg("probs"))
        .def_readonly("probs", &SymbolPmf::probs)
        .def("entropy_bits", &SymbolPmf::entropy_bits);

    py::class_<ShapedSource>(mod, "ShapedSource")
        .def_readonly("constellation", &ShapedSource::constellation)
        .def_readonly("pmf", &ShapedSource::pmf)
        .def_readonly("delta", &ShapedSource::delta)
        .def("snr_linear", &ShapedSource::snr_linear);

    mod.def("make_ask", &make_ask, py::arg("m"));
    mod.def("mb_pmf", &mb_pmf, py::arg("constellation"), py::arg("nu"));
    mod.def("mb_from_entropy", &mb_from_entropy, py::arg("constellation"),
            py::arg("target_entropy"));
    mod.def("operating_pmf", &operating_pmf, py::arg("rate_se"), py::arg("code_rate"),
            py::arg("m"));
    mod.def("scale_to_snr", &scale_to_snr, py::arg("constellation"), py::arg("pmf"),
            py::arg("snr_linear"));
    mod.def("amplitude_marginal", &amplitude_marginal);
    mod.def("db_to_linear", &db_to_linear);
    mod.def("linear_to_db", &linear_to_db);

    mod.def("awgn_capacity", &awgn_capacity, py::arg("snr_linear"));
    mod.def("bmd_rate", &bmd_rate, py::arg("source"));
    mod.def("bmd_rate_inverse", &bmd_rate_inverse, py::arg("constellation"), py::arg("pmf"),
            py::arg("rate"));

    py::class_<SurrogateSet>(mod, "SurrogateSet")
        .def_readonly("sigmas", &SurrogateSet::sigmas)
        .def_readonly("snr_db", &SurrogateSet::snr_db)
        .def_readonly("se", &SurrogateSet::se);
    mod.def("fit_surrogates",
            py::overload_cast<const ShapedSource&>(&fit_surrogates), py::arg("source"));
    mod.def("ordering_signature", &ordering_signature);
    mod.def("biawgn_cond_entropy", &biawgn_cond_entropy);

    py::class_<BaseMatrix>(mod, "BaseMatrix")
        .def(py::init<>())
        .def_readwrite("rows", &BaseMatrix::rows)
        .def_readwrite("cols", &BaseMatrix::cols)
        .def_readwrite("entries", &BaseMatrix::entries)
        .def_readwrite("level_of_column", &BaseMatrix::level_of_column)
        .def("design_rate", &BaseMatrix::design_rate)
        .def("violations", [](const BaseMatrix& a) { return a.violations(); });
    mod.def("robust_base_matrix", &robust_base_matrix);
    mod.def("load_base_matrix", &load_base_matrix);
    mod.def("save_base_matrix", &save_base_matrix);
    mod.def("j_function", &j_function);
    mod.def("j_function_inverse", &j_function_inverse);

    py::class_<ThresholdAnalyzer>(mod, "ThresholdAnalyzer")
        .def(py::init([](double code_rate, int m) {
                 ThresholdConfig cfg;
                 cfg.code_rate = code_rate;
                 cfg.m = m;
                 return new ThresholdAnalyzer(cfg);
             }),
             py::arg("code_rate") = 13.0 / 16.0, py::arg("m") = 4)
        .def("threshold_db", &ThresholdAnalyzer::threshold_db,
             py::call_guard<py::gil_scoped_release>())
        .def("gap_db", &ThresholdAnalyzer::gap_db,
             py::call_guard<py::gil_scoped_release>())
        .def("required_snr_db", &ThresholdAnalyzer::required_snr_db)
        .def("surrogates", &ThresholdAnalyzer::surrogates);

    py::class_<SparseParityMatrix>(mod, "SparseParityMatrix")
        .def_readonly("rows", &SparseParityMatrix::rows)
        .def_readonly("cols", &SparseParityMatrix::cols)
        .def_readonly("edges", &SparseParityMatrix::edges)
        .def_readonly("level_of_column", &SparseParityMatrix::level_of_column);
    mod.def("expand_parallel", &expand_parallel, py::arg("base"), py::arg("f"));
    mod.def("lift_circulant", &lift_circulant, py::arg("binary_base"), py::arg("q"),
            py::arg("seed"), py::call_guard<py::gil_scoped_release>());
    mod.def("girth", &girth, py::arg("h"), py::arg("cap") = 8,
            py::call_guard<py::gil_scoped_release>());
    mod.def("write_alist", &write_alist);
    mod.def("read_alist", &read_alist);
    mod.def("write_pgc", &write_pgc);
    mod.def("read_pgc", &read_pgc);

    py::class_<Composition>(mod, "Composition")
        .def(py::init([](std::vector<long> counts) {
                 Composition c;
                 c.counts = std::move(counts);
                 return c;
             }),
             py::arg("counts"))
        .def_readonly("counts", &Composition::counts)
        .def("total", &Composition::total);
    mod.def("composition_from_pmf", &composition_from_pmf);
    mod.def("ccdm_input_bits", &ccdm_input_bits);
    mod.def("ccdm_encode", &ccdm_encode);
    mod.def("ccdm_decode", &ccdm_decode);

    py::class_<SimConfig>(mod, "SimConfig")
        .def(py::init<>())
        .def_readwrite("code_rate", &SimConfig::code_rate)
        .def_readwrite("m", &SimConfig::m)
        .def_readwrite("rates", &SimConfig::rates)
        .def_readwrite("snr_start_db", &SimConfig::snr_start_db)
        .def_readwrite("snr_stop_db", &SimConfig::snr_stop_db)
        .def_readwrite("snr_step_db", &SimConfig::snr_step_db)
        .def_readwrite("target_fer", &SimConfig::target_fer)
        .def_readwrite("max_frames", &SimConfig::max_frames)
        .def_readwrite("min_errors", &SimConfig::min_errors)
        .def_readwrite("master_seed", &SimConfig::master_seed)
        .def_readwrite("workers", &SimConfig::workers)
        .def_readwrite("bp_iterations", &SimConfig::bp_iterations);

    py::class_<SimResult>(mod, "SimResult")
        .def_readonly("rate_se", &SimResult::rate_se)
        .def_readonly("snr_db", &SimResult::snr_db)
        .def_readonly("frames", &SimResult::frames)
        .def_readonly("frame_errors", &SimResult::frame_errors)
        .def_readonly("bit_errors", &SimResult::bit_errors)
        .def_readonly("fer", &SimResult::fer)
        .def_readonly("ci95_lo", &SimResult::ci95_lo)
        .def_readonly("ci95_hi", &SimResult::ci95_hi)
        .def_readonly("seed", &SimResult::seed);
    mod.def("run_fer_point", &run_fer_point, py::arg("h"), py::arg("rate_se"),
            py::arg("snr_db"), py::arg("cfg"), py::call_guard<py::gil_scoped_release>());
    mod.def("run_fer", &run_fer, py::call_guard<py::gil_scoped_release>());
    mod.def("gap_at_target", &gap_at_target);
    mod.def("sim_results_csv", &sim_results_csv);
    mod.def("clopper_pearson", &clopper_pearson, py::arg("errors"), py::arg("trials"),
            py::arg("confidence") = 0.95);
}
