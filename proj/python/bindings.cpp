#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qisac/analytics.hpp"
#include "qisac/angles.hpp"
#include "qisac/config.hpp"
#include "qisac/controller.hpp"
#include "qisac/em.hpp"
#include "qisac/errors.hpp"
#include "qisac/montecarlo.hpp"
#include "qisac/physics.hpp"
#include "qisac/scoring.hpp"

namespace py = pybind11;
using namespace qisac;

namespace {

std::vector<int> to_ints(const std::vector<Symbol>& s) {
  std::vector<int> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = index(s[i]);
  return out;
}

std::vector<Symbol> to_symbols(const std::vector<int>& s) {
  std::vector<Symbol> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] ? Symbol::One : Symbol::Zero;
  return out;
}

EmConfig em_config(double eps, int l_max, std::optional<double> theta0, int starts) {
  EmConfig cfg;
  cfg.eps = eps;
  cfg.l_max = l_max;
  if (theta0) cfg.init = FixedInit{*theta0};
  else cfg.init = MultiStartInit{starts};
  return cfg;
}

py::dict trace_dict(const RunTrace& tr) {
  py::list records;
  for (const IterationRecord& r : tr.records) {
    py::dict d;
    d["iter"] = r.iter;
    d["theta_hat"] = r.theta_hat;
    d["psi"] = r.psi;
    d["fc"] = r.fc;
    d["ber_emp"] = r.ber_emp;
    d["ber_theory"] = r.ber_theory;
    d["target"] = to_string(r.target);
    records.append(d);
  }
  py::dict out;
  out["records"] = records;
  out["theta_hat"] = tr.theta_hat;
  out["psi_hat"] = tr.psi_hat;
  out["gamma_min"] = tr.gamma_min;
  out["fc_max"] = tr.fc_max;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Homodyne BPSK phase estimation and LO-phase control";
  m.attr("__version__") = QISAC_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init([](double E, double eta, double Na, double theta) {
             ChannelParams p{E, eta, Na, theta};
             p.validate();
             return p;
           }),
           py::arg("E") = 10.0, py::arg("eta") = 0.8, py::arg("Na") = 3.0, py::arg("theta") = 0.0)
      .def_readwrite("E", &ChannelParams::E)
      .def_readwrite("eta", &ChannelParams::eta)
      .def_readwrite("Na", &ChannelParams::Na)
      .def_readwrite("theta", &ChannelParams::theta)
      .def_property_readonly("amplitude", &ChannelParams::amplitude)
      .def_property_readonly("noise_var", &ChannelParams::noise_var)
      .def("__repr__", [](const ChannelParams& p) {
        return "ChannelParams(E=" + std::to_string(p.E) + ", eta=" + std::to_string(p.eta) +
               ", Na=" + std::to_string(p.Na) + ", theta=" + std::to_string(p.theta) + ")";
      });

  m.def("q_function", &q_function, py::arg("x"));
  m.def("ber_theory", &ber_theory, py::arg("params"), py::arg("psi"));
  m.def(
      "fisher_symbol",
      [](const ChannelParams& p, double psi, std::size_t n) {
        return fisher_symbol(p, psi, n).block;
      },
      py::arg("params"), py::arg("psi"), py::arg("n") = 1,
      "Block Fisher information n * F(psi, theta).");
  m.def("fisher_high_snr", &fisher_high_snr, py::arg("params"), py::arg("psi"));
  m.def(
      "fc_max",
      [](const ChannelParams& p, std::size_t n) {
        const FcMax r = fc_max(p, n);
        return py::make_tuple(r.value, r.phi_argmax);
      },
      py::arg("params"), py::arg("n"), "Returns (F_c^max, argmax offset).");
  m.def(
      "optimal_angles",
      [](double theta_hat) {
        const OptimalAngles a = optimal_angles(theta_hat);
        return py::make_tuple(a.psi_com, a.psi_sen);
      },
      py::arg("theta_hat"), "Returns (psi_com, psi_sen).");
  m.def(
      "pareto_known_theta",
      [](const ChannelParams& p, std::size_t n, double gamma_min) {
        const ParetoPoint r = pareto_known_theta(p, n, gamma_min);
        return py::make_tuple(r.phi_star, r.ber);
      },
      py::arg("params"), py::arg("n"), py::arg("gamma_min"), "Returns (phi_star, ber).");

  m.def(
      "sample_block",
      [](const ChannelParams& p, double psi, std::size_t n, std::uint64_t seed) {
        const ObservationBlock b = sample_block(p, psi, n, seed);
        return py::make_tuple(b.x, to_ints(b.s_true));
      },
      py::arg("params"), py::arg("psi"), py::arg("n"), py::arg("seed"),
      "Returns (x, symbols).");

  m.def(
      "run_em",
      [](const std::vector<double>& x, const ChannelParams& p, double psi, double eps, int l_max,
         std::optional<double> theta0, int starts) {
        const EmResult r = run_em(x, p, psi, em_config(eps, l_max, theta0, starts));
        py::dict out;
        out["theta_hat"] = r.theta_hat;
        out["s_hat"] = to_ints(r.s_hat);
        out["loglik_trace"] = r.loglik_trace;
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["flat_likelihood"] = r.flat_likelihood;
        return out;
      },
      py::arg("x"), py::arg("params"), py::arg("psi"), py::arg("eps") = 1e-3,
      py::arg("l_max") = 500, py::arg("theta0") = py::none(), py::arg("starts") = 8);

  m.def(
      "score_ber",
      [](const std::vector<int>& s_hat, const std::vector<int>& s_true) {
        const BerScore s = score_ber(to_symbols(s_hat), to_symbols(s_true));
        return py::make_tuple(s.ber, s.flipped);
      },
      py::arg("s_hat"), py::arg("s_true"), "Returns (ber, flipped).");

  m.def("wrap_pi", &wrap_pi, py::arg("x"));
  m.def("update_psi", &update_psi, py::arg("psi"), py::arg("psi_tar"), py::arg("lambda_"));
  m.def(
      "select_target",
      [](double fc, double gamma_min, double theta_hat) {
        const Target t = select_target(fc, gamma_min, theta_hat);
        return py::make_tuple(to_string(t.kind), t.psi);
      },
      py::arg("fc"), py::arg("gamma_min"), py::arg("theta_hat"));

  m.def(
      "run_qisac",
      [](const ChannelParams& p, std::size_t n, double gamma_frac, double psi0, double lambda,
         int t_max, std::uint64_t seed) {
        AlgoConfig cfg;
        cfg.gamma_min = gamma_frac;
        cfg.gamma_is_fraction = true;
        cfg.psi0 = psi0;
        cfg.lambda = lambda;
        cfg.t_max = t_max;
        RunTrace tr;
        {
          py::gil_scoped_release release;
          tr = run_qisac(fresh_blocks(p, n, seed), p, cfg);
        }
        return trace_dict(tr);
      },
      py::arg("params"), py::arg("n"), py::arg("gamma_frac"), py::arg("psi0") = kPi / 2.0,
      py::arg("lambda_") = 0.01, py::arg("t_max") = 500, py::arg("seed") = 0);

  m.def(
      "parse_config",
      [](const std::string& text) {
        return echo_run_config(parse_run_config_text(text)).dump();
      },
      py::arg("text"), "Validates a config document and returns it with defaults filled in (JSON).");

  m.def(
      "run_sweep",
      [](const std::string& config_text, unsigned threads) {
        ExperimentSpec spec = to_experiment_spec(parse_run_config_text(config_text));
        spec.threads = threads;
        TradeoffCurve curve;
        {
          py::gil_scoped_release release;
          curve = run_tradeoff_sweep(spec);
        }
        py::list rows;
        for (const TradeoffPoint& pt : curve.points) {
          py::dict d;
          d["gamma_frac"] = pt.point.gamma_frac;
          d["Na"] = pt.point.Na;
          d["N"] = pt.point.N;
          d["ber_sim"] = pt.ber_sim;
          d["ber_stderr"] = pt.ber_stderr;
          d["ber_theory_known_theta"] = pt.ber_theory_known_theta;
          d["trials_ok"] = pt.trials_ok;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config_text"), py::arg("threads") = 0);
}
