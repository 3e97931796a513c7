#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cascadelab/analysis.hpp"
#include "cascadelab/criticality.hpp"
#include "cascadelab/distribution.hpp"
#include "cascadelab/errors.hpp"
#include "cascadelab/exact_moments.hpp"
#include "cascadelab/monte_carlo.hpp"
#include "cascadelab/reduction.hpp"
#include "cascadelab/tree.hpp"

namespace py = pybind11;
using namespace cascade;

namespace {

py::dict estimate_dict(const McEstimate& est) {
    py::dict d;
    d["mean"] = est.mean;
    d["stderr"] = est.stderr_;
    d["ci_lo"] = est.ci_lo;
    d["ci_hi"] = est.ci_hi;
    d["max_share"] = est.max_share;
    d["samples"] = est.samples_used;
    d["heavy_tail"] = est.heavy_tail;
    return d;
}

py::dict report_dict(const CriticalityReport& rep) {
    py::dict d;
    d["regime"] = to_string(rep.regime);
    d["q"] = rep.q;
    d["phi"] = rep.phi_value;
    d["totally_critical"] = rep.totally_critical;
    if (rep.q_crit) d["q_crit"] = *rep.q_crit;
    return d;
}

} // namespace

PYBIND11_MODULE(cascadelab, m) {
    m.doc() = "Moment calculus for multiplicative cascades on b-ary trees";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
    py::register_exception<PreconditionError>(m, "PreconditionError",
                                              PyExc_RuntimeError);

    py::class_<WeightDistribution>(m, "WeightDistribution")
        .def(py::init<std::vector<double>, std::vector<double>>(),
             py::arg("atoms"), py::arg("probs"))
        .def_static("parse", &WeightDistribution::parse_literal, py::arg("literal"),
                    py::arg("require_mean_one") = true)
        .def_property_readonly("atoms", &WeightDistribution::atoms)
        .def_property_readonly("probs", &WeightDistribution::probs)
        .def("mean", &WeightDistribution::mean)
        .def("variance", &WeightDistribution::variance)
        .def("moment", &WeightDistribution::moment, py::arg("q"))
        .def("log_moment", &WeightDistribution::log_moment, py::arg("q"))
        .def("__repr__", [](const WeightDistribution& d) {
            return "WeightDistribution(" + d.to_literal() + ")";
        });

    py::class_<StructureFunction>(m, "StructureFunction")
        .def(py::init<unsigned, WeightDistribution>(), py::arg("branching"),
             py::arg("dist"))
        .def("phi", &StructureFunction::phi, py::arg("q"))
        .def("is_totally_critical", &StructureFunction::is_totally_critical)
        .def("classify",
             [](const StructureFunction& sf, double q) {
                 return report_dict(sf.classify(q));
             },
             py::arg("q"))
        .def("find_critical_exponent",
             [](const StructureFunction& sf, double q_max) {
                 const CriticalRootResult r = sf.find_critical_exponent(q_max);
                 py::dict d;
                 d["kind"] = to_string(r.kind);
                 if (r.q_crit) d["q_crit"] = *r.q_crit;
                 return d;
             },
             py::arg("q_max") = 128.0);

    py::class_<MomentTable>(m, "MomentTable")
        .def_property_readonly("branching",
                               [](const MomentTable& t) { return t.branching; })
        .def_property_readonly("q_max", [](const MomentTable& t) { return t.q_max; })
        .def_property_readonly("depth",
                               [](const MomentTable& t) { return t.rows.size() - 1; })
        .def("value", &MomentTable::value, py::arg("n"), py::arg("k"))
        .def("log_value", &MomentTable::log_value, py::arg("n"), py::arg("k"))
        .def("to_csv", [](const MomentTable& t) { return to_csv(t); });

    m.def("cascade_moments", &cascade_moments, py::arg("branching"), py::arg("dist"),
          py::arg("q_max"), py::arg("depth"),
          "Exact integer moments E[Y_n^k] of the depth-n cascade average for "
          "k <= q_max and n <= depth.");

    m.def("theta_moments",
          [](unsigned branching, const std::vector<double>& coeffs,
             const WeightDistribution& dist, unsigned q_max) {
              const MomentRow row =
                  theta_moments(LevelProfile{branching, coeffs}, dist, q_max);
              py::dict d;
              d["value"] = row.value;
              d["log_value"] = row.log_value;
              d["log_domain"] = row.log_domain;
              return d;
          },
          py::arg("branching"), py::arg("profile"), py::arg("dist"), py::arg("q_max"),
          "Exact integer moments of the weighted tree sum with level-constant "
          "coefficients.");

    m.def("reduce_profile",
          [](unsigned branching, const std::vector<double>& coeffs,
             const WeightDistribution& dist) {
              const ProfileReduction r =
                  reduce(LevelProfile{branching, coeffs}, dist);
              py::dict d;
              d["beta"] = r.beta.coeffs;
              d["mean_x"] = r.mean_x;
              d["var_x"] = r.var_x;
              d["squared_atoms"] = r.squared_dist.atoms();
              d["squared_probs"] = r.squared_dist.probs();
              return d;
          },
          py::arg("branching"), py::arg("profile"), py::arg("dist"),
          "One exponent-halving step: the square function of the increment "
          "martingale is the same tree sum at X^2 with these coefficients.");

    m.def("reduction_pipeline",
          [](unsigned branching, const WeightDistribution& dist, double q,
             unsigned depth) {
              const StructureFunction sf(branching, dist);
              const PipelineResult res = reduction_pipeline(sf, q, depth);
              py::dict out;
              out["preflight"] = report_dict(res.preflight);
              py::list stages;
              for (const PipelineStage& s : res.stages) {
                  py::dict d;
                  d["stage"] = s.index;
                  d["exponent"] = s.exponent;
                  d["profile"] = s.profile.coeffs;
                  d["atoms"] = s.dist.atoms();
                  d["probs"] = s.dist.probs();
                  d["ratio_to_ideal"] = s.ratio_to_ideal;
                  stages.append(d);
              }
              out["stages"] = stages;
              return out;
          },
          py::arg("branching"), py::arg("dist"), py::arg("q"), py::arg("depth"),
          "Iterate the halving step on the depth-n cascade profile until the "
          "exponent drops below 2.");

    m.def("evaluate_bounds",
          [](unsigned branching, const std::vector<double>& coeffs,
             const WeightDistribution& dist, double q) {
              const BoundsReport rep =
                  evaluate_bounds_profile(LevelProfile{branching, coeffs}, dist, q);
              py::dict d;
              d["q"] = rep.q;
              d["lower"] = rep.lower;
              d["log_lower"] = rep.log_lower;
              if (rep.upper_core) {
                  d["upper_core"] = *rep.upper_core;
                  d["log_upper_core"] = *rep.log_upper_core;
              }
              return d;
          },
          py::arg("branching"), py::arg("profile"), py::arg("dist"), py::arg("q"),
          "Lower bound (q >= 1) and, for q <= 2, the constant-free upper-bound "
          "core for the q-th moment of the tree sum.");

    m.def("sample_path_average", &sample_Yn, py::arg("branching"), py::arg("dist"),
          py::arg("depth"), py::arg("seed"), py::arg("sample_index"),
          "One realization of the depth-n cascade average.");

    m.def("estimate_moment",
          [](unsigned branching, const WeightDistribution& dist, unsigned depth,
             double q, std::uint64_t seed, std::uint64_t samples, unsigned batches,
             unsigned threads) {
              const McConfig cfg{branching, dist, depth, q, seed, samples, batches};
              return estimate_dict(estimate_moment(cfg, threads));
          },
          py::arg("branching"), py::arg("dist"), py::arg("depth"), py::arg("q"),
          py::arg("seed"), py::arg("samples") = 10'000, py::arg("batches") = 32,
          py::arg("threads") = 1,
          "Monte Carlo estimate of E[Y_n^q] with batch-means error bars; "
          "bit-identical for any thread count.");

    m.def("theorem_report",
          [](unsigned branching, const WeightDistribution& dist, double q, unsigned N,
             const std::string& engine, double tolerance, unsigned window_min,
             unsigned window_max, std::uint64_t seed, std::uint64_t samples,
             unsigned batches, unsigned threads) {
              ReportConfig cfg;
              if (engine == "exact")
                  cfg.engine = Engine::exact;
              else if (engine == "mc")
                  cfg.engine = Engine::mc;
              else
                  throw ConfigError("engine must be \"exact\" or \"mc\"");
              cfg.tolerance = tolerance;
              cfg.window_min = window_min;
              cfg.window_max = window_max;
              cfg.seed = seed;
              cfg.samples = samples;
              cfg.batches = batches;
              cfg.threads = threads;
              const Verdict v = theorem_report(branching, dist, q, N, cfg);
              py::dict d;
              d["theorem"] = v.theorem;
              d["regime"] = v.regime;
              d["target"] = v.target;
              d["slope"] = v.slope;
              d["tolerance"] = v.tolerance;
              d["pass"] = v.pass;
              d["window"] = py::make_tuple(v.window.first, v.window.second);
              d["comparison"] = v.comparison;
              d["r_squared"] = v.fit.r_squared;
              if (v.sup_value) d["sup_value"] = *v.sup_value;
              if (v.sup_bound) d["sup_bound"] = *v.sup_bound;
              if (v.max_share) d["max_share"] = *v.max_share;
              d["series"] = v.series;
              return d;
          },
          py::arg("branching"), py::arg("dist"), py::arg("q"), py::arg("N"),
          py::arg("engine") = "exact", py::arg("tolerance") = 0.1,
          py::arg("window_min") = 0, py::arg("window_max") = 0, py::arg("seed") = 0,
          py::arg("samples") = 10'000, py::arg("batches") = 32,
          py::arg("threads") = 1,
          "Fit the observed moment growth against the predicted law for the "
          "regime of (dist, q) and return a structured verdict.");
}
