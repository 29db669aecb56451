#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cgtex/artifacts.hpp"
#include "cgtex/em.hpp"
#include "cgtex/evaluation.hpp"
#include "cgtex/marginal.hpp"
#include "cgtex/signal.hpp"
#include "cgtex/special_functions.hpp"
#include "cgtex/texture.hpp"

namespace py = pybind11;
using namespace cgtex;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Compound-Gaussian texture model fitting for multichannel signals";

    // --- special functions ---
    m.def("log_bessel_k", &sf::log_bessel_k, py::arg("order"), py::arg("x"),
          "Natural log of the modified Bessel function of the second kind");
    m.def("log_bessel_k_ratio", &sf::log_bessel_k_ratio, py::arg("order"), py::arg("x"),
          py::arg("order_shift"));
    m.def("dlog_bessel_k_dorder", &sf::dlog_bessel_k_dorder, py::arg("order"), py::arg("x"));
    m.def("digamma", &sf::digamma, py::arg("x"));
    m.def("trigamma", &sf::trigamma, py::arg("x"));
    m.def("log_gamma", &sf::log_gamma, py::arg("x"));

    // --- texture laws ---
    py::class_<Exponential>(m, "Exponential")
        .def(py::init<double>(), py::arg("lam"))
        .def_readwrite("lam", &Exponential::lambda)
        .def("__repr__", [](const Exponential& p) {
            return "Exponential(lam=" + std::to_string(p.lambda) + ")";
        });
    py::class_<Gamma>(m, "Gamma")
        .def(py::init<double, double>(), py::arg("alpha"), py::arg("beta"))
        .def_readwrite("alpha", &Gamma::alpha)
        .def_readwrite("beta", &Gamma::beta)
        .def("__repr__", [](const Gamma& p) {
            return "Gamma(alpha=" + std::to_string(p.alpha) + ", beta=" + std::to_string(p.beta) +
                   ")";
        });
    py::class_<InverseGamma>(m, "InverseGamma")
        .def(py::init<double, double>(), py::arg("alpha"), py::arg("beta"))
        .def_readwrite("alpha", &InverseGamma::alpha)
        .def_readwrite("beta", &InverseGamma::beta)
        .def("__repr__", [](const InverseGamma& p) {
            return "InverseGamma(alpha=" + std::to_string(p.alpha) +
                   ", beta=" + std::to_string(p.beta) + ")";
        });

    m.def("texture_log_pdf", &texture_log_pdf, py::arg("params"), py::arg("z"));
    m.def("texture_mean", &texture_mean, py::arg("params"));
    m.def("sample_texture", &sample_texture, py::arg("params"), py::arg("count"),
          py::arg("seed"));

    // --- signal handling ---
    py::class_<MultichannelRecord>(m, "MultichannelRecord")
        .def_readonly("samples", &MultichannelRecord::samples)
        .def_readonly("sample_rate", &MultichannelRecord::sample_rate)
        .def_readonly("channel_names", &MultichannelRecord::channel_names);
    m.def("ingest_csv", &ingest_csv, py::arg("path"), py::arg("channels"),
          py::arg("sample_rate") = 2000.0);

    py::class_<SegmentedSignal>(m, "SegmentedSignal")
        .def(py::init<Eigen::MatrixXd, int, int>(), py::arg("data"), py::arg("segment_count"),
             py::arg("samples_per_segment"))
        .def_property_readonly("segment_count", &SegmentedSignal::segment_count)
        .def_property_readonly("samples_per_segment", &SegmentedSignal::samples_per_segment)
        .def_property_readonly("channels", &SegmentedSignal::channels)
        .def_property_readonly("samples",
                               [](const SegmentedSignal& s) { return s.samples(); });
    m.def("segment", &segment, py::arg("record"), py::arg("segment_count"),
          py::arg("samples_per_segment"));

    m.def("simulate_cg", &simulate_cg, py::arg("params"), py::arg("mu"), py::arg("sigma"),
          py::arg("segment_count"), py::arg("samples_per_segment"), py::arg("seed"));
    m.def("simulate_fixed_texture", &simulate_fixed_texture, py::arg("z"), py::arg("mu"),
          py::arg("sigma"), py::arg("segment_count"), py::arg("samples_per_segment"),
          py::arg("seed"));

    // --- EM fitting ---
    py::enum_<Family>(m, "Family")
        .value("cge", Family::cge)
        .value("cgg", Family::cgg)
        .value("cgig", Family::cgig);

    py::class_<PosteriorMoments>(m, "PosteriorMoments")
        .def_readonly("e_z", &PosteriorMoments::e_z)
        .def_readonly("e_inv_z", &PosteriorMoments::e_inv_z)
        .def_readonly("e_ln_z", &PosteriorMoments::e_ln_z);

    py::class_<CgFit>(m, "CgFit")
        .def_readonly("family", &CgFit::family)
        .def_readonly("mu", &CgFit::mu)
        .def_readonly("sigma", &CgFit::sigma)
        .def_readonly("texture", &CgFit::texture)
        .def_readonly("posterior", &CgFit::posterior)
        .def_readonly("iterations", &CgFit::iterations)
        .def_readonly("converged", &CgFit::converged)
        .def_readonly("final_phi", &CgFit::final_phi)
        .def_readonly("final_log_likelihood", &CgFit::final_log_likelihood)
        .def_readonly("warnings", &CgFit::warnings)
        .def_property_readonly("trace", [](const CgFit& f) {
            py::list out;
            for (const auto& t : f.trace)
                out.append(py::make_tuple(t.iteration, t.phi, t.log_likelihood));
            return out;
        });

    m.def(
        "fit",
        [](const SegmentedSignal& sig, const std::string& family, double phi_o, int max_iter) {
            FitOptions opts;
            opts.phi_o = phi_o;
            opts.max_iter = max_iter;
            return fit(sig, family_from_string(family), {}, opts);
        },
        py::arg("signal"), py::arg("family"), py::arg("phi_o") = 1e-5,
        py::arg("max_iter") = 1000);

    // --- marginal densities ---
    py::class_<MarginalModel>(m, "MarginalModel")
        .def(py::init<Eigen::VectorXd, Eigen::MatrixXd, TextureParams>(), py::arg("mu"),
             py::arg("sigma"), py::arg("texture"))
        .def("log_pdf", &MarginalModel::log_pdf, py::arg("y"))
        .def("log_likelihood", &MarginalModel::log_likelihood, py::arg("signal"))
        .def("pdf_grid", &MarginalModel::pdf_grid, py::arg("x_edges"), py::arg("y_edges"));

    // --- evaluation ---
    py::class_<EmpiricalDensity>(m, "EmpiricalDensity")
        .def_readonly("x_edges", &EmpiricalDensity::x_edges)
        .def_readonly("y_edges", &EmpiricalDensity::y_edges)
        .def_readonly("mass", &EmpiricalDensity::mass)
        .def_readonly("total_count", &EmpiricalDensity::total_count);
    m.def(
        "build_empdf",
        [](const SegmentedSignal& sig, int bins) { return build_empdf(sig, bins); },
        py::arg("signal"), py::arg("bins") = 100);
    m.def("kld", &kld, py::arg("empdf"), py::arg("model_mass"));
    m.def("r_squared", &r_squared, py::arg("empdf"), py::arg("model_mass"));
    m.def("mardia_kurtosis", &mardia_kurtosis, py::arg("samples"));

    py::class_<MomentReport>(m, "MomentReport")
        .def_readonly("data_mean", &MomentReport::data_mean)
        .def_readonly("data_covariance", &MomentReport::data_covariance)
        .def_readonly("data_mardia_kurtosis", &MomentReport::data_mardia_kurtosis)
        .def_readonly("model_mean", &MomentReport::model_mean)
        .def_readonly("model_covariance", &MomentReport::model_covariance)
        .def_readonly("model_mardia_kurtosis", &MomentReport::model_mardia_kurtosis);
    m.def("moment_report", &moment_report, py::arg("fit"), py::arg("signal"),
          py::arg("mc_samples") = 1000000, py::arg("seed") = 0);

    m.def("save_fit_json", &save_fit_json, py::arg("fit"), py::arg("path"));
    m.def("load_fit_json", &load_fit_json, py::arg("path"));

#ifdef CGTEX_VERSION
    m.attr("__version__") = CGTEX_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
