/*
 * Copyright 2026 The CoExBO Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "coexbo/acquisition.hpp"
#include "coexbo/engine.hpp"
#include "coexbo/explain.hpp"
#include "coexbo/gp.hpp"
#include "coexbo/oracle.hpp"
#include "coexbo/preference.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace coexbo;

namespace {

Domain make_domain(const Vec& lower, const Vec& upper) { return Domain(lower, upper); }

std::vector<DuelRecord> make_duels(const Mat& X1, const Mat& X2, const Eigen::VectorXi& y) {
  if (X1.rows() != X2.rows() || X1.rows() != y.size() || X1.cols() != X2.cols()) {
    throw InputError("duels: X1, X2 and y must have matching rows");
  }
  std::vector<DuelRecord> out;
  for (Eigen::Index i = 0; i < X1.rows(); ++i) {
    out.push_back({X1.row(i).transpose(), X2.row(i).transpose(), y[i]});
  }
  return out;
}

py::dict attribution_dict(const ShapleyAttribution& a) {
  py::dict d;
  d["phi"] = a.phi;
  d["base"] = a.base;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the coexbo package";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
  py::register_exception<SessionFileError>(m, "SessionFileError", PyExc_ValueError);

  py::class_<GPModel>(m, "GPModel")
      .def_property_readonly("dim", &GPModel::dim)
      .def_property_readonly("size", &GPModel::size)
      .def_property_readonly("outputscale", [](const GPModel& g) { return g.params().outputscale; })
      .def_property_readonly("lengthscales", [](const GPModel& g) { return g.params().lengthscales; })
      .def_property_readonly("noise", [](const GPModel& g) { return g.params().noise; })
      .def_property_readonly("noise_raw", &GPModel::noise_raw)
      .def("posterior",
           [](const GPModel& g, const Vec& x) {
             const Prediction p = posterior(g, x);
             return py::make_tuple(p.mean, p.variance);
           })
      .def("posterior_mean", [](const GPModel& g, const Mat& X) { return posterior_mean(g, X); })
      .def("posterior_cov", [](const GPModel& g, const Mat& A, const Mat& B) { return posterior_cov(g, A, B); })
      .def("ucb", [](const GPModel& g, const Vec& x, double beta_sqrt) { return ucb(g, x, beta_sqrt); },
           py::arg("x"), py::arg("beta_sqrt") = 2.0);

  m.def(
      "fit_gp",
      [](const Mat& X, const Vec& y, const Vec& lower, const Vec& upper, std::uint64_t seed) {
        Dataset d{X, y};
        return fit_gp(d, make_domain(lower, upper), seed);
      },
      py::arg("X"), py::arg("y"), py::arg("lower"), py::arg("upper"), py::arg("seed") = 0);

  py::class_<PreferenceGP>(m, "PreferenceGP")
      .def_property_readonly("n_duels", [](const PreferenceGP& g) { return g.duels().size(); })
      .def("predict",
           [](const PreferenceGP& g, const Vec& x1, const Vec& x2, int n_mc, std::uint64_t seed) {
             const PreferenceProbability p = predict_preference(g, x1, x2, n_mc, seed);
             return py::make_tuple(p.prob_mean, p.prob_var);
           },
           py::arg("x1"), py::arg("x2"), py::arg("n_mc") = 256, py::arg("seed") = 0);

  m.def(
      "fit_preference_gp",
      [](const Mat& X1, const Mat& X2, const Eigen::VectorXi& y, const Vec& lower, const Vec& upper,
         double alpha_eps, std::uint64_t seed) {
        return fit_preference_gp(make_duels(X1, X2, y), make_domain(lower, upper), alpha_eps, seed);
      },
      py::arg("X1"), py::arg("X2"), py::arg("y"), py::arg("lower"), py::arg("upper"),
      py::arg("alpha_eps") = 0.01, py::arg("seed") = 0);

  py::class_<SoftCopeland>(m, "SoftCopeland")
      .def("mean", [](const SoftCopeland& s, const Vec& x) { return copeland_mean(s, x); })
      .def("var", [](const SoftCopeland& s, const Vec& x) { return copeland_var(s, x); })
      .def_property_readonly("normalizer", &SoftCopeland::normalizer);

  m.def(
      "build_soft_copeland",
      [](const PreferenceGP& g, int n_mc, std::uint64_t seed) { return build_soft_copeland(g, n_mc, seed); },
      py::arg("g"), py::arg("n_mc") = 256, py::arg("seed") = 0);

  m.def("product_of_gaussians", [](double mu_pi, double var_pi, double mu_f, double var_f) {
    const GaussianMoments g = product_of_gaussians(mu_pi, var_pi, mu_f, var_f);
    return py::make_tuple(g.mean, g.var);
  });

  m.def(
      "coexbo_af",
      [](const GPModel& gp, const SoftCopeland& sc, const Vec& x, double beta_sqrt, double gamma,
         int t, const std::string& rho) {
        AcqConfig cfg;
        cfg.beta_sqrt = beta_sqrt;
        cfg.gamma = gamma;
        cfg.t = t;
        cfg.rho = rho_convention_from_string(rho);
        return coexbo_af(gp, sc, x, cfg, raw_y_stats(gp.data().y));
      },
      py::arg("gp"), py::arg("belief"), py::arg("x"), py::arg("beta_sqrt") = 2.0,
      py::arg("gamma") = 0.01, py::arg("t") = 1, py::arg("rho") = "swapped");

  m.def(
      "shapley",
      [](const GPModel& gp, const Vec& x, double beta_sqrt) {
        const ShapleyTriple t = shapley_triple(gp, x, beta_sqrt);
        py::dict d;
        d["af"] = attribution_dict(t.af);
        d["mean"] = attribution_dict(t.mean);
        d["std"] = attribution_dict(t.std);
        return d;
      },
      py::arg("gp"), py::arg("x"), py::arg("beta_sqrt") = 2.0);

  m.def(
      "selection_accuracy",
      [](const GPModel& gp, const Vec& x1, const Vec& x2, int n_mc, std::uint64_t seed) {
        const SelectionFeedback f = selection_accuracy(gp, x1, x2, n_mc, seed);
        return py::make_tuple(f.prob_mean, f.prob_var);
      },
      py::arg("gp"), py::arg("x1"), py::arg("x2"), py::arg("n_mc") = 256, py::arg("seed") = 0);

  py::class_<Objective>(m, "Objective")
      .def_property_readonly("name", &Objective::name)
      .def_property_readonly("dim", &Objective::dim)
      .def_property_readonly("lower", [](const Objective& o) { return o.domain().lower(); })
      .def_property_readonly("upper", [](const Objective& o) { return o.domain().upper(); })
      .def_property_readonly("optimum_value",
                             [](const Objective& o) -> py::object {
                               return o.has_optimum() ? py::cast(o.optimum_value()) : py::none();
                             })
      .def_property_readonly("optimum_x", [](const Objective& o) { return o.optimum_x(); })
      .def("__call__", [](const Objective& o, const Vec& x) { return o(x); })
      .def("to_json", [](const Objective& o) { return objective_to_json(o.definition()); });

  m.def("make_objective", &make_objective, py::arg("name"));
  m.def("load_custom_objective", &load_custom_objective, py::arg("json_text"));
  m.def("objective_names", [] {
    std::vector<std::string> names = builtin_objective_names();
    for (const std::string& p : preset_objective_names()) names.push_back(p);
    return names;
  });

  py::class_<Session>(m, "Session")
      .def_static("create", [](const std::string& config_json) { return Session::init(config_from_json(config_json)); },
                  py::arg("config_json"))
      .def_static("from_json", &session_from_json, py::arg("text"))
      .def_static("load", &load_session, py::arg("path"))
      .def("to_json", [](const Session& s) { return session_to_json(s); })
      .def("save", [](const Session& s, const std::string& path) { save_session(s, path); })
      .def_property_readonly("t", &Session::t)
      .def_property_readonly("phase", [](const Session& s) { return to_string(s.phase()); })
      .def_property_readonly("finished", &Session::finished)
      .def_property_readonly("X", [](const Session& s) { return s.data().X; })
      .def_property_readonly("y", [](const Session& s) { return s.data().y; })
      .def_property_readonly("n_duels", [](const Session& s) { return s.duels().size(); })
      .def("simple_regret", &Session::simple_regret)
      .def("incumbent", &Session::incumbent)
      .def("step_candidates_json",
           [](Session& s) {
             const PendingPair& p = s.step_candidates();
             return p.bundle ? bundle_to_json(*p.bundle) : std::string("null");
           })
      .def("pending_pair",
           [](const Session& s) -> py::object {
             if (!s.pending()) return py::none();
             return py::make_tuple(s.pending()->x1, s.pending()->x2);
           })
      .def("apply_choice",
           [](Session& s, int choice) {
             const IterationRecord& r = s.apply_choice(choice);
             py::dict d;
             d["t"] = r.t;
             d["y"] = r.y;
             d["regret"] = r.regret ? py::cast(*r.regret) : py::none();
             d["prob_mean"] = r.feedback.prob_mean;
             d["prob_var"] = r.feedback.prob_var;
             return d;
           })
      .def("synthetic_choice", &Session::synthetic_choice)
      .def("run_iteration", [](Session& s) {
        const IterationRecord& r = s.run_iteration();
        return r.regret ? py::cast(*r.regret) : py::none();
      });

  m.def(
      "run_baseline",
      [](const std::string& kind, const std::string& config_json) {
        return run_baseline(baseline_from_string(kind), config_from_json(config_json));
      },
      py::arg("kind"), py::arg("config_json") = "{}");
  m.def("baseline_names", [] {
    std::vector<std::string> out;
    for (Baseline b : all_baselines()) out.push_back(to_string(b));
    return out;
  });
}
