#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "carfin/car.hpp"
#include "carfin/definetti.hpp"
#include "carfin/gns.hpp"
#include "carfin/io.hpp"
#include "carfin/perms.hpp"
#include "carfin/states.hpp"
#include "carfin/verify.hpp"

namespace py = pybind11;
using namespace carfin;

PYBIND11_MODULE(_core, m) {
    m.doc() = "finite CAR algebras, exchangeable fermionic states, and de Finetti "
              "measure recovery";

    py::register_exception<capacity_error>(m, "CapacityError", PyExc_RuntimeError);
    py::register_exception<not_symmetric_error>(m, "NotSymmetricError", PyExc_ValueError);
    py::register_exception<infeasible_moments_error>(m, "InfeasibleMomentsError",
                                                     PyExc_ValueError);

    py::class_<CarContext>(m, "CarContext")
        .def(py::init<int>(), py::arg("n_modes"))
        .def_property_readonly("n", &CarContext::modes)
        .def_property_readonly("dim", &CarContext::dim)
        .def("annihilator", &CarContext::annihilator, py::arg("j"))
        .def("creator", &CarContext::creator, py::arg("j"))
        .def("identity", &CarContext::identity)
        .def("parity_unitary", &CarContext::parity_unitary)
        .def("parity", &CarContext::parity, py::arg("a"))
        .def("even_odd_split", &CarContext::even_odd_split, py::arg("a"))
        .def("matrix_unit", &CarContext::matrix_unit, py::arg("j"), py::arg("k"), py::arg("l"))
        .def("gamma_iso",
             [](const CarContext& ctx, const std::vector<std::tuple<int, int, int>>& word) {
                 std::vector<WordFactor> w;
                 for (const auto& [site, k, l] : word) w.push_back({site, k, l});
                 return ctx.gamma_iso(w);
             },
             py::arg("word"))
        .def("normalized_trace", &CarContext::normalized_trace, py::arg("a"))
        .def("initial_support", &CarContext::initial_support, py::arg("a"),
             py::arg("tol") = 1e-12)
        .def("embed_initial", &CarContext::embed_initial, py::arg("a"), py::arg("m"));

    py::class_<Permutation>(m, "Permutation")
        .def_static("identity", &Permutation::identity, py::arg("n"))
        .def_static("transposition", &Permutation::transposition, py::arg("n"), py::arg("i"),
                    py::arg("j"))
        .def_static("from_image", &Permutation::from_image, py::arg("image"))
        .def("__call__", &Permutation::operator(), py::arg("j"))
        .def("__len__", &Permutation::size)
        .def("inverse", &Permutation::inverse)
        .def("compose", &Permutation::compose)
        .def_property_readonly("image", &Permutation::image);

    py::class_<FockUnitary>(m, "FockUnitary")
        .def("to_dense", &FockUnitary::to_dense)
        .def("conjugate", &FockUnitary::conjugate, py::arg("a"))
        .def("inverse", &FockUnitary::inverse)
        .def("compose", &FockUnitary::compose);

    m.def("second_quantize", &second_quantize, py::arg("g"));
    m.def("alpha", &alpha, py::arg("ctx"), py::arg("g"), py::arg("a"));
    m.def("symmetrize_operator", &symmetrize_operator, py::arg("ctx"), py::arg("a"));
    m.def("mixing_permutation", &mixing_permutation, py::arg("stage"), py::arg("n"));
    m.def("intersecting_fraction",
          [](int mm, int kk, int nn) {
              auto f = intersecting_fraction(mm, kk, nn);
              return py::make_tuple(f.exact, f.estimate);
          },
          py::arg("m"), py::arg("k"), py::arg("N"));

    py::class_<State>(m, "State")
        .def(py::init([](int n, const Mat& density) { return State{n, density}; }),
             py::arg("n"), py::arg("density"))
        .def_readonly("n", &State::n)
        .def_readonly("density", &State::density);

    m.def("validate_state", &validate_state, py::arg("phi"), py::arg("tol") = 1e-10);
    m.def("evaluate", &evaluate, py::arg("phi"), py::arg("a"));
    m.def("product_state", &product_state, py::arg("mu"), py::arg("n"));
    m.def("mixture_of_product_states", &mixture_of_product_states, py::arg("atoms"),
          py::arg("n"));
    m.def("symmetrize_state", &symmetrize_state, py::arg("ctx"), py::arg("phi"));
    m.def("is_symmetric", &is_symmetric, py::arg("ctx"), py::arg("phi"),
          py::arg("tol") = 1e-10);
    m.def("is_even", &is_even, py::arg("ctx"), py::arg("phi"), py::arg("tol") = 1e-10);
    m.def("restrict_state", &restrict_state, py::arg("ctx"), py::arg("phi"), py::arg("k"));
    m.def("occupation_moments", &occupation_moments, py::arg("ctx"), py::arg("phi"),
          py::arg("K"));
    m.def("weak_clustering_average", &weak_clustering_average, py::arg("ctx"), py::arg("phi"),
          py::arg("a"), py::arg("b"));
    m.def("strong_clustering_check", &strong_clustering_check, py::arg("ctx"), py::arg("phi"),
          py::arg("a"), py::arg("b"), py::arg("stage"));

    py::class_<GnsRep>(m, "GnsRep")
        .def_property_readonly("dim", &GnsRep::dim)
        .def_property_readonly("rank", &GnsRep::rank)
        .def("cyclic_vector", &GnsRep::cyclic_vector)
        .def("vector_of", &GnsRep::vector_of, py::arg("x"))
        .def("rep_apply", &GnsRep::rep_apply, py::arg("a"), py::arg("x"))
        .def("unitary_apply", &GnsRep::unitary_apply, py::arg("g"), py::arg("x"));

    m.def("build_gns", &build_gns, py::arg("ctx"), py::arg("phi"),
          py::arg("require_covariance") = true);
    m.def("invariant_projection", &invariant_projection, py::arg("gns"), py::arg("k"));
    m.def("nested_ergodic_check", [](const GnsRep& gns) {
        ErgodicReport rep = nested_ergodic_check(gns);
        py::dict out;
        out["loewner_min_eigs"] = rep.loewner_min_eigs;
        out["fixed_space_deviation"] = rep.fixed_space_deviation;
        out["cyclic_invariance"] = rep.cyclic_invariance;
        out["fixed_dim"] = rep.fixed_dim;
        out["passed"] = rep.passed();
        return out;
    });
    m.def("cesaro_conjugation_average", &cesaro_conjugation_average, py::arg("gns"),
          py::arg("a"));
    m.def("ep_odd_compression", &ep_odd_compression, py::arg("ctx"), py::arg("gns"),
          py::arg("a"));

    py::class_<MeasureAtom>(m, "MeasureAtom")
        .def(py::init([](double mu, double w) { return MeasureAtom{mu, w}; }), py::arg("mu"),
             py::arg("weight"))
        .def_readonly("mu", &MeasureAtom::mu)
        .def_readonly("weight", &MeasureAtom::weight);

    py::class_<MixingMeasure>(m, "MixingMeasure")
        .def(py::init([](const std::vector<std::pair<double, double>>& atoms) {
                 MixingMeasure measure;
                 for (const auto& [mu, w] : atoms) measure.atoms.push_back({mu, w});
                 return measure;
             }),
             py::arg("atoms"))
        .def_readonly("atoms", &MixingMeasure::atoms)
        .def("moment", &MixingMeasure::moment, py::arg("k"))
        .def("validate", &MixingMeasure::validate, py::arg("tol") = 1e-9);

    m.def("recover_measure",
          [](const std::vector<double>& moments, int grid_size, double tol, double ridge) {
              RecoveryOptions opt{grid_size, tol, ridge};
              RecoveryResult res = recover_measure(moments, opt);
              py::dict out;
              out["measure"] = res.measure;
              out["residual"] = res.residual;
              out["grid_size"] = res.grid_size;
              return out;
          },
          py::arg("moments"), py::arg("grid_size") = 1001, py::arg("tol") = 1e-6,
          py::arg("ridge") = 0.0);
    m.def("reconstruct_state", &reconstruct_state, py::arg("measure"), py::arg("n"));
    m.def("decompose_state",
          [](const CarContext& ctx, const State& phi, int grid_size, double tol,
             std::uint64_t seed) {
              RecoveryOptions opt{grid_size, tol, 0.0};
              DecompositionReport rep = decompose_state(ctx, phi, opt, seed);
              py::dict out;
              out["measure"] = rep.measure;
              out["moments"] = rep.moments;
              out["residual"] = rep.residual;
              out["battery_deviation"] = rep.battery_max;
              return out;
          },
          py::arg("ctx"), py::arg("phi"), py::arg("grid_size") = 1001, py::arg("tol") = 1e-6,
          py::arg("seed") = 424242);
    m.def("classify_type", [](double mu) {
        FactorType t = classify_type(mu);
        return py::make_tuple(t.name(), t.lambda);
    });
    m.def("eigenvalue_ratio_spectrum", [](double mu, int n) {
        RatioSpectrum s = eigenvalue_ratio_spectrum(mu, n);
        return py::make_tuple(s.eigenvalues, s.ratios);
    });

    m.def("load_state", &load_state, py::arg("path"), py::arg("tol") = 1e-8);
    m.def("save_state", &save_state, py::arg("phi"), py::arg("path"));
    m.def("load_measure", &load_measure, py::arg("path"));
    m.def("save_measure", &save_measure, py::arg("measure"), py::arg("path"));

    m.def("run_verification", [](int n, std::uint64_t seed) {
        VerifyReport rep = run_verification(n, seed);
        py::list checks;
        for (const auto& c : rep.checks) {
            py::dict jc;
            jc["name"] = c.name;
            jc["deviation"] = c.deviation;
            jc["tolerance"] = c.tolerance;
            jc["pass"] = c.pass;
            jc["note"] = c.note;
            checks.append(std::move(jc));
        }
        py::dict out;
        out["n"] = rep.n;
        out["seed"] = rep.seed;
        out["checks"] = checks;
        out["all_pass"] = rep.all_pass;
        return out;
    }, py::arg("n"), py::arg("seed") = 42);
}
