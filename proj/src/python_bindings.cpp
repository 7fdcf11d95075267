#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "genuslab/census.hpp"
#include "genuslab/genus.hpp"
#include "genuslab/grouptheory.hpp"
#include "genuslab/qforms.hpp"

namespace py = pybind11;
using namespace genuslab;

namespace {

using Triple = std::tuple<i64, i64, i64>;

Triple as_tuple(const QuadForm& f) { return {f.a, f.b, f.c}; }
QuadForm as_form(const Triple& t) { return {std::get<0>(t), std::get<1>(t), std::get<2>(t)}; }

RunOptions run_options(int threads, bool segmented) {
    RunOptions opt;
    opt.threads = threads;
    opt.segmented = segmented;
    return opt;
}

std::string census_json(const std::string& experiment, i64 d, i64 x, std::optional<i64> a,
                        std::optional<Triple> form, int r, std::uint64_t seed, int threads, bool segmented) {
    const RunOptions opt = run_options(threads, segmented);
    CensusReport rep;
    if (experiment == "exceptional") {
        rep = exceptional_count(d, x, opt);
    } else if (experiment == "shifted") {
        rep = shifted_prime_exceptional_count(d, x, a.value_or(1), opt);
    } else if (experiment == "corollary4") {
        const QuadForm f = form ? as_form(*form) : ClassGroup(d).form(0);
        rep = corollary4_count(f, x, a.value_or(1), opt);
    } else if (experiment == "primes-by-class") {
        rep = to_report(prime_class_histogram(d, x, opt));
    } else if (experiment == "split-reciprocal") {
        rep = split_reciprocal_sum(d, x, opt);
    } else if (experiment == "kfactor") {
        rep = k_factor_histogram(d, x, opt);
    } else if (experiment == "lemma3") {
        rep = lemma3_count(d, x, r, 0.1, opt);
    } else {
        throw std::invalid_argument("unknown census experiment: " + experiment);
    }
    rep.seed = seed;
    return rep.to_json().dump();
}

py::dict theorem1(const std::vector<i64>& orders, const std::vector<Element>& set, double eps) {
    const FiniteAbelianGroup g(orders);
    for (Element e : set)
        if (e >= g.size()) throw std::invalid_argument("element outside the group");
    Theorem1Params params;
    params.eps = eps;
    const auto rep = classify_theorem1(set, g, params);
    const auto check = verify_theorem1(rep, set, g);
    py::dict out;
    out["alternative"] = to_string(rep.alternative);
    out["group_size"] = rep.group_size;
    out["sums_size"] = rep.sums_size;
    out["verified"] = check.ok;
    out["reason"] = check.reason;
    if (rep.alternative == Alternative::SmallOmega) {
        out["chosen"] = rep.chosen;
        out["omega"] = rep.omega.elements();
        out["k_bound"] = rep.k_bound;
        out["bounds_met"] = rep.bounds_met;
    } else if (rep.alternative == Alternative::Subgroup) {
        out["subgroup"] = rep.subgroup.elements();
        out["index"] = rep.index;
        out["exceptional"] = rep.exceptional;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Binary quadratic forms, class groups, sumset classification and census experiments.";

    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);

    m.def("reduce", [](i64 a, i64 b, i64 c) { return as_tuple(reduce({a, b, c})); }, py::arg("a"), py::arg("b"),
          py::arg("c"), "Reduced representative of a positive definite primitive form.");
    m.def("compose", [](const Triple& f, const Triple& g) { return as_tuple(compose_forms(as_form(f), as_form(g))); },
          py::arg("f"), py::arg("g"), "Reduced composition of two forms of the same discriminant.");
    m.def("kronecker", &kronecker, py::arg("a"), py::arg("n"));

    py::class_<ClassGroup>(m, "ClassGroup")
        .def(py::init<i64>(), py::arg("D"))
        .def_property_readonly("D", &ClassGroup::D)
        .def_property_readonly("h", &ClassGroup::h)
        .def_property_readonly("genera", &ClassGroup::genera_count)
        .def_property_readonly("forms",
                               [](const ClassGroup& g) {
                                   std::vector<Triple> out;
                                   for (const auto& f : g.forms()) out.push_back(as_tuple(f));
                                   return out;
                               })
        .def_property_readonly("invariants",
                               [](const ClassGroup& g) {
                                   std::vector<i64> out;
                                   for (const auto& [gen, ord] : g.cyclic_decomposition()) out.push_back(ord);
                                   return out;
                               })
        .def("compose", &ClassGroup::compose, py::arg("x"), py::arg("y"))
        .def("inverse", &ClassGroup::inverse, py::arg("x"))
        .def("order", &ClassGroup::order, py::arg("x"))
        .def("class_of", [](const ClassGroup& g, const Triple& f) { return g.class_of(as_form(f)); }, py::arg("form"))
        .def("classes_representing",
             [](const ClassGroup& g, i64 n) {
                 std::vector<ClassIndex> out;
                 for (Element e : classes_representing(n, g).elements()) out.push_back(e);
                 return out;
             },
             py::arg("n"))
        .def("genus_of",
             [](const ClassGroup& g) { return genus_partition(g).genus_of; })
        .def("to_json", [](const ClassGroup& g) { return to_json(g).dump(); })
        .def("__repr__", [](const ClassGroup& g) {
            return "ClassGroup(D=" + std::to_string(g.D()) + ", h=" + std::to_string(g.h()) + ")";
        });

    m.def("genus_represents_local",
          [](i64 n, const Triple& f) { return genus_represents_local(n, as_form(f)); }, py::arg("n"),
          py::arg("form"));
    m.def("theorem1", &theorem1, py::arg("orders"), py::arg("set"), py::arg("eps") = 0.1,
          "Classify a subset of Z/d_0 x Z/d_1 x ... and re-verify the witness.");
    m.def("census_json", &census_json, py::arg("experiment"), py::arg("D"), py::arg("X"), py::arg("a") = py::none(),
          py::arg("form") = py::none(), py::arg("r") = 3, py::arg("seed") = 1, py::arg("threads") = 1,
          py::arg("segmented") = false);
    m.def("constants_json", [](i64 d, i64 a, i64 truncation) { return constants_json(d, a, truncation).dump(); },
          py::arg("D"), py::arg("a") = 1, py::arg("truncation") = 1000000);
    m.def("u_f", [](const Triple& f, i64 x) { return u_f(as_form(f), x); }, py::arg("form"), py::arg("X"));
    m.def("li", &li, py::arg("x"));
}
