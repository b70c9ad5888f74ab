#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <optional>
#include <sstream>

#include "skt/app/commands.hpp"
#include "skt/app/config.hpp"
#include "skt/error.hpp"
#include "skt/fd_reference.hpp"
#include "skt/mc_solver.hpp"
#include "skt/verify.hpp"

namespace py = pybind11;
using namespace skt;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// Stacks one component of every snapshot into a (snapshots, nodes) array.
template <class Get>
py::array_t<double> stack(std::size_t rows, std::size_t cols, Get get) {
  py::array_t<double> out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < rows; ++k) {
    const std::vector<double>& row = get(k);
    for (std::size_t i = 0; i < cols; ++i) m(k, i) = row[i];
  }
  return out;
}

py::dict trajectory_dict(const FieldTrajectory& traj) {
  py::dict d;
  const std::size_t rows = traj.size();
  const std::size_t cols = rows ? traj.front().grid.n : 0;
  std::vector<double> times, x;
  for (const auto& f : traj.fields) times.push_back(f.t);
  for (std::size_t i = 0; i < cols; ++i) x.push_back(traj.front().grid.node(i));
  d["t"] = to_array(times);
  d["x"] = to_array(x);
  d["u1"] = stack(rows, cols, [&](std::size_t k) -> const auto& { return traj.fields[k].u1; });
  d["u2"] = stack(rows, cols, [&](std::size_t k) -> const auto& { return traj.fields[k].u2; });
  d["v1"] = stack(rows, cols, [&](std::size_t k) -> const auto& { return traj.fields[k].v1; });
  d["v2"] = stack(rows, cols, [&](std::size_t k) -> const auto& { return traj.fields[k].v2; });
  return d;
}

py::dict solution_dict(const MonteCarloSolution& s) {
  py::dict d = trajectory_dict(s.trajectory);
  const std::size_t rows = s.errors.size();
  const std::size_t cols = rows ? s.errors.front().u1.size() : 0;
  d["u1_stderr"] = stack(rows, cols, [&](std::size_t k) -> const auto& { return s.errors[k].u1; });
  d["u2_stderr"] = stack(rows, cols, [&](std::size_t k) -> const auto& { return s.errors[k].u2; });
  d["v1_stderr"] = stack(rows, cols, [&](std::size_t k) -> const auto& { return s.errors[k].v1; });
  d["v2_stderr"] = stack(rows, cols, [&](std::size_t k) -> const auto& { return s.errors[k].v2; });
  d["clips"] = s.total_clips();
  d["clamps"] = s.total_clamps();
  d["evaluations"] = s.total_evaluations();
  return d;
}

py::dict report_dict(const CheckReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["statistic"] = r.statistic;
  d["tolerance"] = r.tolerance;
  d["pass"] = r.pass;
  py::dict details;
  for (const auto& [k, v] : r.details) details[py::str(k)] = v;
  d["details"] = details;
  return d;
}

CheckConfig check_config(std::size_t npaths, int nsteps, std::uint64_t seed, unsigned workers,
                         DriftCorrection sign) {
  CheckConfig c;
  c.npaths = npaths;
  c.nsteps = nsteps;
  c.master_seed = seed;
  c.workers = workers;
  c.sign = sign;
  return c;
}

int run_command(const std::string& command, const std::filesystem::path& config,
                const std::filesystem::path& out, std::optional<std::uint64_t> seed,
                std::optional<unsigned> workers, bool flip_correction_sign) {
  app::CommandOptions o;
  o.config = config;
  o.out = out;
  o.seed = seed;
  o.workers = workers;
  o.flip_correction_sign = flip_correction_sign;
  std::ostringstream log;
  int rc = 0;
  {
    py::gil_scoped_release release;
    if (command == "solve-mc") {
      rc = app::cmd_solve_mc(o, log);
    } else if (command == "solve-fd") {
      rc = app::cmd_solve_fd(o, log);
    } else if (command == "verify") {
      rc = app::cmd_verify(o, log);
    } else if (command == "compare") {
      rc = app::cmd_compare(o, log);
    } else {
      throw py::value_error("unknown command '" + command + "'");
    }
  }
  py::print(log.str(), py::arg("end") = "", py::arg("file") = py::module_::import("sys").attr("stderr"));
  return rc;
}

}  // namespace

PYBIND11_MODULE(_skt, m) {
  m.doc() = "Monte Carlo solver for the SKT cross-diffusion system";

  static py::handle error_type = py::exception<Error>(m, "SktError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::enum_<Species>(m, "Species").value("first", Species::first).value("second", Species::second);
  py::enum_<DriftCorrection>(m, "DriftCorrection")
      .value("plus", DriftCorrection::plus)
      .value("minus", DriftCorrection::minus);

  py::class_<Parameters>(m, "Parameters")
      .def(py::init([](double d1, double d2, double d11, double d12, double d21, double d22,
                       double a1, double a2, double a11, double a12, double a21, double a22) {
             Parameters p{d1, d2, d11, d12, d21, d22, a1, a2, a11, a12, a21, a22};
             validate_params(p);
             return p;
           }),
           py::kw_only(), py::arg("d1") = 1.0, py::arg("d2") = 1.0, py::arg("d11") = 0.0,
           py::arg("d12") = 0.0, py::arg("d21") = 0.0, py::arg("d22") = 0.0,
           py::arg("a1") = 0.0, py::arg("a2") = 0.0, py::arg("a11") = 0.0,
           py::arg("a12") = 0.0, py::arg("a21") = 0.0, py::arg("a22") = 0.0)
      .def_readwrite("d1", &Parameters::d1)
      .def_readwrite("d2", &Parameters::d2)
      .def_readwrite("d11", &Parameters::d11)
      .def_readwrite("d12", &Parameters::d12)
      .def_readwrite("d21", &Parameters::d21)
      .def_readwrite("d22", &Parameters::d22)
      .def_readwrite("a1", &Parameters::a1)
      .def_readwrite("a2", &Parameters::a2)
      .def_readwrite("a11", &Parameters::a11)
      .def_readwrite("a12", &Parameters::a12)
      .def_readwrite("a21", &Parameters::a21)
      .def_readwrite("a22", &Parameters::a22);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](double xmin, double xmax, std::size_t n) {
             GridSpec g{xmin, xmax, n};
             validate_grid(g);
             return g;
           }),
           py::arg("xmin") = -8.0, py::arg("xmax") = 8.0, py::arg("n") = 161)
      .def_readonly("xmin", &GridSpec::xmin)
      .def_readonly("xmax", &GridSpec::xmax)
      .def_readonly("n", &GridSpec::n)
      .def_property_readonly("dx", &GridSpec::dx)
      .def_property_readonly("nodes", [](const GridSpec& g) {
        std::vector<double> x(g.n);
        for (std::size_t i = 0; i < g.n; ++i) x[i] = g.node(i);
        return to_array(x);
      });

  py::class_<Profile>(m, "Profile")
      .def_static("gaussian", &Profile::gaussian, py::arg("center"), py::arg("width"),
                  py::arg("mass"))
      .def_static("constant", &Profile::constant, py::arg("value"))
      .def_static("two_bumps", &Profile::two_bumps, py::arg("c1"), py::arg("c2"),
                  py::arg("width"), py::arg("mass"))
      .def_static("parse", &Profile::parse, py::arg("text"))
      .def("__call__", [](const Profile& p, double x) { return p(x); })
      .def("__repr__", &Profile::to_string);

  py::class_<DensityField>(m, "DensityField")
      .def_readonly("grid", &DensityField::grid)
      .def_readonly("t", &DensityField::t)
      .def_property_readonly("u1", [](const DensityField& f) { return to_array(f.u1); })
      .def_property_readonly("u2", [](const DensityField& f) { return to_array(f.u2); })
      .def_property_readonly("v1", [](const DensityField& f) { return to_array(f.v1); })
      .def_property_readonly("v2", [](const DensityField& f) { return to_array(f.v2); });

  m.def("initial_field",
        [](const GridSpec& g, const Profile& u1, const Profile& u2) {
          return field_from_initial(g, u1, u2);
        },
        py::arg("grid"), py::arg("u1"), py::arg("u2"),
        "Nodal values of the initial data and their central-difference gradients.");

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](std::size_t npaths, int substeps, double dt, double T, double picard_tol,
                       int picard_max, std::uint64_t seed, unsigned workers,
                       DriftCorrection sign) {
             SolverConfig c;
             c.npaths = npaths;
             c.substeps = substeps;
             c.dt = dt;
             c.T = T;
             c.picard_tol = picard_tol;
             c.picard_max = picard_max;
             c.master_seed = seed;
             c.workers = workers;
             c.sign = sign;
             validate_solver_config(c);
             return c;
           }),
           py::kw_only(), py::arg("npaths") = 10000, py::arg("substeps") = 5,
           py::arg("dt") = 0.025, py::arg("T") = 0.25, py::arg("picard_tol") = 1e-3,
           py::arg("picard_max") = 10, py::arg("seed") = 20240607, py::arg("workers") = 1,
           py::arg("sign") = DriftCorrection::plus)
      .def_readwrite("npaths", &SolverConfig::npaths)
      .def_readwrite("substeps", &SolverConfig::substeps)
      .def_readwrite("dt", &SolverConfig::dt)
      .def_readwrite("T", &SolverConfig::T)
      .def_readwrite("picard_tol", &SolverConfig::picard_tol)
      .def_readwrite("picard_max", &SolverConfig::picard_max)
      .def_readwrite("seed", &SolverConfig::master_seed)
      .def_readwrite("workers", &SolverConfig::workers)
      .def_readwrite("sign", &SolverConfig::sign);

  m.def("solve_mc",
        [](const DensityField& initial, const Parameters& p, const SolverConfig& cfg,
           const std::string& mode) {
          if (mode == "layered") {
            MonteCarloSolution s;
            {
              py::gil_scoped_release release;
              s = solve_layered(initial, p, cfg);
            }
            return solution_dict(s);
          }
          if (mode != "picard") throw py::value_error("mode must be 'layered' or 'picard'");
          PicardResult r;
          {
            py::gil_scoped_release release;
            r = solve_picard(initial, p, cfg);
          }
          py::dict d = solution_dict(r.solution);
          d["picard_iterations"] = r.iterations;
          d["picard_converged"] = r.converged;
          d["picard_residuals"] = r.residual_history;
          return d;
        },
        py::arg("initial"), py::arg("params"), py::arg("config"), py::arg("mode") = "layered",
        "Monte Carlo solution at t = 0, dt, ..., T as (snapshots, nodes) arrays.");

  m.def("solve_fd",
        [](const DensityField& initial, const Parameters& p, double T, double dt_fd,
           double snapshot_dt) {
          FieldTrajectory traj;
          {
            py::gil_scoped_release release;
            traj = fd_solve(initial, p, T, FDConfig{dt_fd}, snapshot_dt);
          }
          return trajectory_dict(traj);
        },
        py::arg("initial"), py::arg("params"), py::arg("T"), py::arg("dt_fd"),
        py::arg("snapshot_dt") = 0.0);

  m.def("fd_admissible_step", &fd_admissible_step, py::arg("field"), py::arg("params"));

  m.def("exact_linear",
        py::vectorize([](double center, double width, double mass, double d, double alpha,
                         double t, double x) {
          return exact_linear(GaussianSpec{center, width, mass}, d, alpha, t, x);
        }),
        py::arg("center"), py::arg("width"), py::arg("mass"), py::arg("d"), py::arg("alpha"),
        py::arg("t"), py::arg("x"));

  m.def("gamma_martingale",
        [](const DensityField& field, const Parameters& p, Species q, double center, double width,
           double t, std::size_t npaths, int nsteps, std::uint64_t seed, unsigned workers,
           DriftCorrection sign) {
          CheckReport r;
          {
            py::gil_scoped_release release;
            r = gamma_martingale(field, p, q, make_gaussian_test(center, width), t,
                                 check_config(npaths, nsteps, seed, workers, sign));
          }
          return report_dict(r);
        },
        py::arg("field"), py::arg("params"), py::arg("species"), py::arg("center") = 0.0,
        py::arg("width") = 1.0, py::arg("t") = 0.05, py::arg("npaths") = 10000,
        py::arg("nsteps") = 20, py::arg("seed") = 7, py::arg("workers") = 1,
        py::arg("sign") = DriftCorrection::plus);

  m.def("flow_monotonicity",
        [](const DensityField& field, const Parameters& p, Species q, double t,
           std::size_t npaths, int nsteps, std::uint64_t seed, unsigned workers) {
          CheckReport r;
          {
            py::gil_scoped_release release;
            r = flow_monotonicity(field, p, q, t,
                                  check_config(npaths, nsteps, seed, workers, DriftCorrection::plus));
          }
          return report_dict(r);
        },
        py::arg("field"), py::arg("params"), py::arg("species"), py::arg("t") = 0.05,
        py::arg("npaths") = 1000, py::arg("nsteps") = 20, py::arg("seed") = 7,
        py::arg("workers") = 1);

  m.def("duality_pairing",
        [](const DensityField& field, const Parameters& p, Species q, const Profile& u0,
           double center, double width, double t, std::size_t npaths, int nsteps,
           std::uint64_t seed, unsigned workers) {
          CheckReport r;
          {
            py::gil_scoped_release release;
            r = duality_pairing(field, p, q, u0, make_gaussian_test(center, width), t,
                                check_config(npaths, nsteps, seed, workers, DriftCorrection::plus));
          }
          return report_dict(r);
        },
        py::arg("field"), py::arg("params"), py::arg("species"), py::arg("u0"),
        py::arg("center") = 0.0, py::arg("width") = 1.0, py::arg("t") = 0.025,
        py::arg("npaths") = 10000, py::arg("nsteps") = 20, py::arg("seed") = 7,
        py::arg("workers") = 1);

  m.def("weak_residual_refinement",
        [](const GridSpec& g, const Profile& u1, const Profile& u2, const Parameters& p, double T,
           double dt_fd, Species q, double center, double width, double factor) {
          CheckReport r;
          {
            py::gil_scoped_release release;
            r = weak_residual_refinement(g, u1, u2, p, T, dt_fd, make_gaussian_test(center, width),
                                         q, factor);
          }
          return report_dict(r);
        },
        py::arg("grid"), py::arg("u1"), py::arg("u2"), py::arg("params"), py::arg("T"),
        py::arg("dt_fd"), py::arg("species"), py::arg("center") = 0.0, py::arg("width") = 1.0,
        py::arg("factor") = 3.0);

  py::class_<app::RunConfig>(m, "RunConfig")
      .def_readonly("scenario", &app::RunConfig::scenario)
      .def_readonly("params", &app::RunConfig::params)
      .def_readonly("grid", &app::RunConfig::grid)
      .def_readonly("solver", &app::RunConfig::solver)
      .def_readonly("u1", &app::RunConfig::u1_0)
      .def_readonly("u2", &app::RunConfig::u2_0)
      .def_property_readonly("dt_fd", [](const app::RunConfig& c) { return c.fd.dt_fd; })
      .def("initial_field", &app::RunConfig::initial_field);

  m.def("load_config", &app::load_config, py::arg("path"));
  m.def("parse_config", &app::parse_config, py::arg("text"));
  m.def("scenario_defaults", &app::scenario_defaults, py::arg("name"));

  m.def("run", &run_command, py::arg("command"), py::arg("config"), py::arg("out") = ".",
        py::arg("seed") = std::nullopt, py::arg("workers") = std::nullopt,
        py::arg("flip_correction_sign") = false,
        "Runs a CLI subcommand in-process and returns its exit code.");
}
