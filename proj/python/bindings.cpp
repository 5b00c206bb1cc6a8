#include "hetnet/config.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/harness.hpp"
#include "hetnet/net_model.hpp"
#include "hetnet/oracle_check.hpp"
#include "hetnet/power_control.hpp"
#include "hetnet/report.hpp"
#include "hetnet/scheduling.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>

namespace py = pybind11;
using namespace hetnet;

namespace {

LinkSystem paired(const Eigen::MatrixXd& gains, const Eigen::VectorXd& noise, const Eigen::VectorXd& target,
                  const std::optional<Eigen::VectorXd>& p_max, const std::optional<Eigen::VectorXd>& eta)
{
    const Index n = gains.cols();
    return make_paired_system(gains, noise, target, p_max.value_or(Eigen::VectorXd::Constant(n, 1e12)),
                              eta.value_or(Eigen::VectorXd::Constant(n, 0.01)));
}

py::dict state_dict(const PowerState& st)
{
    py::dict d;
    d["p"] = st.p;
    d["sir"] = st.sir;
    d["supported"] = st.supported;
    d["iterations"] = st.iterations;
    d["converged"] = st.converged;
    return d;
}

py::object opt(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::dict row_dict(const MetricsRow& r)
{
    py::dict d;
    d["experiment"] = r.experiment;
    d["sweep_param"] = r.sweep_param;
    d["sweep_value"] = r.sweep_value;
    d["algorithm"] = std::string(to_string(r.run.algorithm));
    d["scheme"] = std::string(to_string(r.run.scheme));
    d["direction"] = std::string(to_string(r.direction));
    d["seed_count"] = r.seed_count;
    d["hpue_outage"] = opt(r.hpue_outage);
    d["lpue_outage"] = opt(r.lpue_outage);
    d["lpue_outage_stderr"] = opt(r.lpue_outage_stderr);
    d["agg_power_w"] = r.agg_power;
    d["agg_throughput"] = r.agg_throughput;
    d["split_throughput"] = r.split_throughput;
    d["spectral_eff"] = r.spectral_eff;
    d["convergence_rate"] = r.convergence_rate;
    d["max_protection_ratio"] = opt(r.max_protection_ratio);
    d["seeds"] = r.seeds;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hetnet, m)
{
    m.doc() = "Monte Carlo simulator of prioritized multi-tier cellular networks";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<GenerationError>(m, "GenerationError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.attr("__version__") = std::string(kToolVersion);

    m.def("path_gain", &path_gain, py::arg("distance"), py::arg("exponent") = 4.0, py::arg("d_min") = 1.0,
          py::arg("k") = 1.0);

    m.def(
        "access_probability",
        [](int n_users, const std::string& scheduler) {
            return access_probability({0, n_users, parse_scheduler(scheduler)});
        },
        py::arg("n_users"), py::arg("scheduler") = "round_robin",
        "Probability that a user joining a cell with n_users incumbents gets the channel.");
    m.def("greedy_access_prob_mc", &greedy_access_prob_mc, py::arg("n_users"), py::arg("trials"), py::arg("seed"));

    m.def(
        "update",
        [](const std::string& algorithm, double r, double target_sir, double p_max, double eta) {
            return base_update(parse_algorithm(algorithm), r, {target_sir, eta, p_max});
        },
        py::arg("algorithm"), py::arg("r"), py::arg("target_sir") = 1.0, py::arg("p_max") = 1.0, py::arg("eta") = 0.0,
        "One distributed power update for effective interference r.");

    m.def(
        "run_power_control",
        [](const std::string& algorithm, const Eigen::MatrixXd& gains, const Eigen::VectorXd& noise,
           const Eigen::VectorXd& target_sir, const std::optional<Eigen::VectorXd>& p_max,
           const std::optional<Eigen::VectorXd>& eta, double tol, int max_iters) {
            PowerControlOptions opts;
            opts.tol = tol;
            opts.max_iters = max_iters;
            return state_dict(run_power_control(parse_algorithm(algorithm), paired(gains, noise, target_sir, p_max, eta), opts));
        },
        py::arg("algorithm"), py::arg("gains"), py::arg("noise"), py::arg("target_sir"), py::arg("p_max") = py::none(),
        py::arg("eta") = py::none(), py::arg("tol") = 1e-9, py::arg("max_iters") = 2000,
        "Iterate a power-control rule on a paired system (user i served by receiver i).");

    m.def(
        "fixed_point_oracle",
        [](const Eigen::MatrixXd& gains, const Eigen::VectorXd& noise, const Eigen::VectorXd& target_sir) {
            return fixed_point_oracle(paired(gains, noise, target_sir, std::nullopt, std::nullopt));
        },
        py::arg("gains"), py::arg("noise"), py::arg("target_sir"));

    m.def(
        "feasibility_check",
        [](const Eigen::MatrixXd& gains, const Eigen::VectorXd& noise, const Eigen::VectorXd& target_sir) {
            const FeasibilityResult r = feasibility_check(paired(gains, noise, target_sir, std::nullopt, std::nullopt));
            py::dict d;
            d["feasible"] = r.feasible;
            d["spectral_radius"] = r.spectral_radius;
            d["iterations"] = r.iterations;
            return d;
        },
        py::arg("gains"), py::arg("noise"), py::arg("target_sir"));

    m.def(
        "spectral_radius", [](const Eigen::MatrixXd& a) { return spectral_radius(a); }, py::arg("matrix"));

    py::class_<SimConfig>(m, "Config")
        .def_readonly("snapshots", &SimConfig::snapshots)
        .def_readonly("base_seed", &SimConfig::base_seed)
        .def_readonly("target_sir_db", &SimConfig::target_sir_db)
        .def_readonly("noise_w", &SimConfig::noise_w)
        .def_readonly("ith_w", &SimConfig::ith_w)
        .def_readonly("sweep_n_small", &SimConfig::sweep_n_small)
        .def_property_readonly("algorithm", [](const SimConfig& c) { return std::string(to_string(c.pc_algorithm)); })
        .def("to_text", &emit_config)
        .def("__eq__", [](const SimConfig& a, const SimConfig& b) { return a == b; })
        .def("__repr__", [](const SimConfig& c) {
            return "<hetnet.Config " + std::string(to_string(c.geometry)) + ", " + std::to_string(c.snapshots) +
                   " snapshots>";
        });

    m.def("fig2_default_text", [] { return std::string(fig2_default_text()); });
    m.def("fig3_default_text", [] { return std::string(fig3_default_text()); });
    m.def("config_keys", &config_keys);
    m.def(
        "parse_config_text",
        [](const std::string& text, const std::vector<std::string>& overrides) { return parse_config_text(text, overrides); },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{});
    m.def(
        "load_config",
        [](const std::filesystem::path& path, const std::vector<std::string>& overrides) {
            return parse_config(path, overrides);
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::string>{});

    py::class_<MetricsReport>(m, "Report")
        .def_readonly("experiment", &MetricsReport::experiment)
        .def_readonly("config", &MetricsReport::config)
        .def_property_readonly("rows",
                               [](const MetricsReport& r) {
                                   py::list out;
                                   for (const auto& row : r.rows)
                                       out.append(row_dict(row));
                                   return out;
                               })
        .def("to_csv", &report_csv)
        .def("to_json", &report_json)
        .def("emit", &emit_report, py::arg("out_dir"))
        .def("__eq__", [](const MetricsReport& a, const MetricsReport& b) { return a == b; })
        .def("__len__", [](const MetricsReport& r) { return r.rows.size(); });

    m.def("experiment_fig2", &experiment_fig2, py::arg("config"), py::arg("jobs") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("experiment_fig3", &experiment_fig3, py::arg("config"), py::arg("jobs") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_monte_carlo", [](const SimConfig& cfg, int jobs) { return run_monte_carlo(cfg, jobs); }, py::arg("config"),
        py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());

    m.def(
        "oracle_check",
        [](int count, std::uint64_t seed) {
            const OracleCheckSummary s = oracle_check(count, seed);
            py::dict d;
            d["instances"] = s.instances;
            d["passed"] = s.passed;
            d["pass_rate"] = s.pass_rate();
            d["failures"] = s.failures;
            return d;
        },
        py::arg("count") = 1000, py::arg("seed") = 1);
}
