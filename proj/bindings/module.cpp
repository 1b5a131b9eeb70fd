#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "meva/aggregate.hpp"
#include "meva/burgers.hpp"
#include "meva/experiments.hpp"
#include "meva/laplace.hpp"
#include "meva/operator_agg.hpp"
#include "meva/tabular.hpp"
#include "meva/theory.hpp"
#include "meva/train.hpp"

namespace py = pybind11;
using namespace meva;

namespace {

KernelSpec make_spec(const std::string& family, double lengthscale) {
  KernelSpec spec;
  if (family == "matern32") spec.family = KernelFamily::matern32;
  else if (family == "rbf") spec.family = KernelFamily::rbf;
  else if (family == "expsin2") spec.family = KernelFamily::expsin2;
  else throw InvalidInput("unknown kernel family: " + family);
  spec.lengthscale = lengthscale;
  return spec;
}

BurgersScheme scheme_from_string(const std::string& name) {
  for (auto s : {BurgersScheme::explicit_fd, BurgersScheme::implicit_fd, BurgersScheme::lax_wendroff,
                 BurgersScheme::spectral, BurgersScheme::fvm, BurgersScheme::tvd, BurgersScheme::riemann}) {
    if (name == scheme_name(s)) return s;
  }
  throw InvalidInput("unknown scheme: " + name);
}

Matrix grid_to_matrix(const GridFunction& g) {
  Matrix out(g.nx, g.ny);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) out(i, j) = g.at(i, j);
  return out;
}

GridFunction matrix_to_grid(const Matrix& m) {
  GridFunction g(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) g.at(i, j) = m(i, j);
  return g;
}

}  // namespace

PYBIND11_MODULE(_mevagg, m) {
  m.doc() = "minimal-variance model aggregation core";

  py::register_exception<Error>(m, "MevaError");

  // weight formulas
  m.def("mva_weights", &mva_weights, py::arg("a"));
  m.def("softmax_weights", &softmax_weights, py::arg("log_vars"));
  m.def(
      "rotated_weights",
      [](const Vector& log_vars, const Matrix& basis) { return rotated_weights({log_vars, basis}); },
      py::arg("log_vars"), py::arg("basis") = Matrix());
  m.def(
      "mea_weights", [](const Matrix& c, const Vector& gamma) { return mea_weights({c, gamma}); }, py::arg("c"),
      py::arg("gamma"));
  m.def("aggregate_pointwise", &aggregate_pointwise, py::arg("weights"), py::arg("model_values"));

  // kernels and ridge regression
  m.def(
      "kernel_eval",
      [](const std::string& family, double lengthscale, const Vector& u, const Vector& v) {
        return kernel_eval(make_spec(family, lengthscale), u, v);
      },
      py::arg("family"), py::arg("lengthscale"), py::arg("u"), py::arg("v"));
  m.def(
      "gram",
      [](const std::string& family, double lengthscale, const Matrix& x, const Matrix& x2) {
        return gram(make_spec(family, lengthscale), x, x2);
      },
      py::arg("family"), py::arg("lengthscale"), py::arg("x"), py::arg("x2"));
  m.def("median_lengthscale", &median_lengthscale, py::arg("x"), py::arg("cap") = 512);

  py::class_<KrrModel>(m, "KrrModel")
      .def_readonly("anchors", &KrrModel::anchors)
      .def_readonly("coefficients", &KrrModel::coefficients)
      .def("predict", [](const KrrModel& self, const Vector& x) { return krr_predict(self, x); })
      .def("predict_many", [](const KrrModel& self, const Matrix& x) { return krr_predict_many(self, x); });
  m.def(
      "krr_fit",
      [](const Matrix& x, const Matrix& y, const std::string& family, double lengthscale, double reg, bool center) {
        return krr_fit(x, y, make_spec(family, lengthscale), reg, center);
      },
      py::arg("x"), py::arg("y"), py::arg("family"), py::arg("lengthscale"), py::arg("reg"),
      py::arg("center_targets") = false);

  // training
  py::class_<ErrorSamples>(m, "ErrorSamples")
      .def_static("from_values", &ErrorSamples::from_values, py::arg("inputs"), py::arg("model_values"),
                  py::arg("targets"))
      .def_readonly("inputs", &ErrorSamples::inputs)
      .def_readonly("errors", &ErrorSamples::errors)
      .def_readonly("targets", &ErrorSamples::targets)
      .def_readonly("model_values", &ErrorSamples::model_values);

  py::class_<MevaAggregator>(m, "MevaAggregator")
      .def("weights_at", &MevaAggregator::weights_at, py::arg("x"))
      .def("predict", &MevaAggregator::predict, py::arg("x"), py::arg("model_values"));
  py::class_<MeeaModel>(m, "MeeaModel")
      .def("predict", &MeeaModel::predict, py::arg("x"), py::arg("model_values"))
      .def("weights", &MeeaModel::weights, py::arg("x"));
  py::class_<SoftmaxInterpolant>(m, "SoftmaxInterpolant")
      .def("weights_at", &SoftmaxInterpolant::weights_at, py::arg("x"))
      .def("predict", &SoftmaxInterpolant::predict, py::arg("x"), py::arg("model_values"));

  m.def(
      "fit_meva_sharp",
      [](const ErrorSamples& s, const std::string& family, double lengthscale, double reg, const Matrix& basis,
         bool center) { return fit_meva_sharp(s, make_spec(family, lengthscale), reg, basis, center); },
      py::arg("samples"), py::arg("family"), py::arg("lengthscale"), py::arg("reg"), py::arg("basis") = Matrix(),
      py::arg("center_targets") = false);
  m.def(
      "fit_meva_gn",
      [](const ErrorSamples& s, const std::string& family, double lengthscale, double reg, int iters,
         const Matrix& basis) { return fit_meva_gn(s, make_spec(family, lengthscale), reg, iters, basis); },
      py::arg("samples"), py::arg("family"), py::arg("lengthscale"), py::arg("reg"), py::arg("iters"),
      py::arg("basis") = Matrix());
  m.def(
      "fit_meea",
      [](const ErrorSamples& s, const std::string& family, double lengthscale, double reg) {
        return fit_meea(s, make_spec(family, lengthscale), reg);
      },
      py::arg("samples"), py::arg("family"), py::arg("lengthscale"), py::arg("reg"));
  m.def(
      "fit_direct_mva",
      [](const ErrorSamples& s, const std::string& family, double lengthscale, double reg, int steps, double lr) {
        return fit_direct_mva(s, make_spec(family, lengthscale), reg, steps, lr);
      },
      py::arg("samples"), py::arg("family"), py::arg("lengthscale"), py::arg("reg"), py::arg("steps"),
      py::arg("lr"));
  m.def(
      "fit_meea_softmax",
      [](const ErrorSamples& s, const std::string& family, double lengthscale, double reg, int iters) {
        return fit_meea_softmax(s, make_spec(family, lengthscale), reg, iters);
      },
      py::arg("samples"), py::arg("family"), py::arg("lengthscale"), py::arg("reg"), py::arg("iters"));

  // pde bank: fields move across the boundary as dense matrices
  m.def(
      "sample_laplace_pair",
      [](std::uint64_t seed, int nx, int ny) {
        Rng rng(seed);
        const LaplaceSample s = sample_laplace_pair(rng, nx, ny);
        return py::make_tuple(grid_to_matrix(s.f), grid_to_matrix(s.u));
      },
      py::arg("seed"), py::arg("nx"), py::arg("ny"));
  m.def(
      "laplace_fdm",
      [](const Matrix& f, const std::string& grading) {
        Grading g = Grading::uniform;
        if (grading == "left_dense") g = Grading::left_dense;
        else if (grading == "right_dense") g = Grading::right_dense;
        else if (grading != "uniform") throw InvalidInput("unknown grading: " + grading);
        const SolverResult r = laplace_fdm(matrix_to_grid(f), g);
        return py::make_tuple(grid_to_matrix(r.field), r.diverged);
      },
      py::arg("f"), py::arg("grading") = "uniform");
  m.def(
      "laplace_spectral",
      [](const Matrix& f) {
        const SolverResult r = laplace_spectral(matrix_to_grid(f));
        return py::make_tuple(grid_to_matrix(r.field), r.diverged);
      },
      py::arg("f"));
  m.def(
      "laplace_gp",
      [](const Matrix& f, int n_colloc, double lengthscale, std::uint64_t seed) {
        Rng rng(seed);
        const SolverResult r = laplace_gp(matrix_to_grid(f), n_colloc, lengthscale, rng);
        return py::make_tuple(grid_to_matrix(r.field), r.diverged);
      },
      py::arg("f"), py::arg("n_colloc"), py::arg("lengthscale"), py::arg("seed"));
  m.def(
      "sample_burgers_ic",
      [](std::uint64_t seed, int nx) {
        Rng rng(seed);
        return Vector(sample_burgers_ic(rng, nx).values);
      },
      py::arg("seed"), py::arg("nx"));
  m.def(
      "burgers_solve",
      [](const Vector& u0, const std::string& scheme, double nu, int nt) {
        GridFunction g(static_cast<int>(u0.size()), 1);
        g.values = u0;
        const SolverResult r = burgers_solve(g, scheme_from_string(scheme), nu, nt);
        return py::make_tuple(grid_to_matrix(r.field), r.diverged);
      },
      py::arg("u0"), py::arg("scheme"), py::arg("nu"), py::arg("nt"));
  m.def(
      "burgers_reference",
      [](const Vector& u0, double nu, int nx_fine, int nt_fine, int nt) {
        GridFunction g(static_cast<int>(u0.size()), 1);
        g.values = u0;
        return grid_to_matrix(burgers_reference(g, nu, nx_fine, nt_fine, nt));
      },
      py::arg("u0"), py::arg("nu"), py::arg("nx_fine"), py::arg("nt_fine"), py::arg("nt"));

  // grid io
  m.def(
      "write_grid",
      [](const Matrix& values, const std::string& path) { write_grid(matrix_to_grid(values), path); },
      py::arg("values"), py::arg("path"));
  m.def(
      "read_grid", [](const std::string& path) { return grid_to_matrix(read_grid(path)); }, py::arg("path"));

  // theory lab
  py::class_<TheoremCase>(m, "TheoremCase")
      .def_readonly("a", &TheoremCase::a)
      .def_readonly("b", &TheoremCase::b)
      .def_readonly("var_y", &TheoremCase::var_y)
      .def_readonly("eps", &TheoremCase::eps);
  py::class_<ClosedForms>(m, "ClosedForms")
      .def_readonly("s", &ClosedForms::s)
      .def_readonly("t", &ClosedForms::t)
      .def_readonly("u", &ClosedForms::u)
      .def_readonly("mix_lambda", &ClosedForms::mix_lambda)
      .def_readonly("alpha_star", &ClosedForms::alpha_star)
      .def_readonly("alpha_v", &ClosedForms::alpha_v)
      .def_readonly("alpha_r", &ClosedForms::alpha_r)
      .def_readonly("loss_star", &ClosedForms::loss_star)
      .def_readonly("loss_v", &ClosedForms::loss_v);
  m.def(
      "random_theorem_case",
      [](std::uint64_t seed, int n, double eps, double b_scale) {
        Rng rng(seed);
        return random_theorem_case(rng, n, eps, b_scale);
      },
      py::arg("seed"), py::arg("n"), py::arg("eps"), py::arg("b_scale"));
  m.def("closed_forms", &closed_forms, py::arg("case"));
  m.def("true_loss", &true_loss, py::arg("alpha"), py::arg("case"));
  m.def(
      "sample_case",
      [](const TheoremCase& c, int n, std::uint64_t seed) {
        Rng rng(seed);
        Matrix mm;
        Vector yy;
        sample_case(c, n, rng, mm, yy);
        return py::make_tuple(mm, yy);
      },
      py::arg("case"), py::arg("n"), py::arg("seed"));
  m.def(
      "geometric_mean_log10_mse", [](const std::vector<double>& v) { return geometric_mean_log10_mse(v); },
      py::arg("per_sample_mse"));

  m.attr("__version__") = "0.1.0";
}
