// genuslab command-line front end.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "genuslab/census.hpp"
#include "genuslab/genus.hpp"
#include "genuslab/grouptheory.hpp"
#include "genuslab/qforms.hpp"
#include "json.hpp"

using namespace genuslab;
using nlohmann::json;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_resource = 3;
constexpr std::size_t max_theorem1_group = std::size_t{1} << 16;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    i64 D = -23;
    i64 X = 1000;
    i64 a = 1;
    double eps = 0.1;
    int threads = 0;
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string out;
    bool segmented = false;
};

std::vector<i64> parse_int_list(const std::string& s) {
    std::vector<i64> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stoll(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("not an integer list: " + s);
        }
    }
    return out;
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw UsageError("cannot open output file " + c.out);
    f << text;
}

RunOptions run_options(const Common& c) {
    RunOptions opt;
    opt.threads = c.threads > 0 ? c.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    opt.segmented = c.segmented;
    return opt;
}

std::string render(const Common& c, const CensusReport& r) {
    if (c.format == "json") return r.to_json().dump(2) + "\n";
    return r.to_csv();
}

QuadForm select_form(const std::string& spec, i64 d) {
    if (spec.empty()) return reduced_forms(d).front();
    const auto v = parse_int_list(spec);
    if (v.size() != 3) throw UsageError("--form expects a,b,c");
    const QuadForm f{v[0], v[1], v[2]};
    if (f.discriminant() != d) throw UsageError("--form has discriminant " + std::to_string(f.discriminant()));
    return f;
}

// ---------------------------------------------------------------------------

int cmd_classgroup(const Common& c) {
    const ClassGroup g(c.D);
    if (c.format == "json") {
        emit(c, to_json(g).dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    os << "D = " << g.D() << (g.discriminant().is_fundamental ? " (fundamental)" : "") << "\n";
    os << "h = " << g.h() << "\n";
    os << "g = " << g.genera_count() << "\n";
    os << "structure = ";
    if (g.cyclic_decomposition().empty()) os << "trivial";
    for (std::size_t i = 0; i < g.cyclic_decomposition().size(); ++i)
        os << (i ? " x " : "") << "C" << g.cyclic_decomposition()[i].second;
    os << "\n";
    for (const auto& [gen, ord] : g.cyclic_decomposition())
        os << "generator " << g.form(gen).str() << " of order " << ord << "\n";
    os << "forms:";
    for (const auto& f : g.forms()) os << " " << f.str();
    os << "\nambiguous:";
    for (auto i : g.ambiguous()) os << " " << g.form(i).str();
    os << "\n";
    emit(c, os.str());
    return 0;
}

struct CensusArgs {
    std::string experiment;
    std::string form;
    int r = 3;
    i64 z = 1000;
};

int cmd_census(const Common& c, const CensusArgs& ca) {
    const RunOptions opt = run_options(c);
    Discriminant::make(c.D);
    CensusReport rep;
    const std::string& e = ca.experiment;
    if (e == "exceptional") {
        rep = exceptional_count(c.D, c.X, opt);
    } else if (e == "shifted") {
        rep = shifted_prime_exceptional_count(c.D, c.X, c.a, opt);
    } else if (e == "corollary4") {
        rep = corollary4_count(select_form(ca.form, c.D), c.X, c.a, opt);
    } else if (e == "primes-by-class") {
        rep = to_report(prime_class_histogram(c.D, c.X, opt));
    } else if (e == "kfactor") {
        rep = k_factor_histogram(c.D, c.X, opt);
    } else if (e == "lemma3") {
        rep = lemma3_count(c.D, c.X, ca.r, c.eps, opt);
    } else if (e == "split-reciprocal") {
        rep = split_reciprocal_sum(c.D, c.X, opt);
    } else if (e == "lemma4") {
        rep.experiment = "lemma4";
        rep.D = c.D;
        rep.X = c.X;
        const auto rnd = lemma4_count(c.X, random_residue_family(c.X, c.seed));
        rep.rows.push_back({"random", static_cast<double>(rnd.observed), true, rnd.bound,
                            "(log log Y)^3 prod(1-|R_l|/l) Y + Y/(log Y)^10"});
        const auto prim = lemma4_count(c.X, primality_family(isqrt(c.X)));
        rep.rows.push_back({"primality", static_cast<double>(prim.observed), true, prim.bound,
                            "(log log Y)^3 prod(1-|R_l|/l) Y + Y/(log Y)^10"});
    } else if (e == "lemma5") {
        const ClassGroup g(c.D);
        const ClassIndex cls = g.class_of(select_form(ca.form, c.D));
        const auto res = lemma5_count(c.D, c.X, cls, two_residue_family(ca.z, c.seed));
        rep.experiment = "lemma5";
        rep.D = c.D;
        rep.X = c.X;
        const auto& f = g.form(cls);
        rep.rows.push_back({"C=(" + std::to_string(f.a) + ";" + std::to_string(f.b) + ";" + std::to_string(f.c) + ")",
                            static_cast<double>(res.observed), true, res.predicted, "Y/(h (log Y)^2)"});
    } else if (e == "ideals") {
        rep.experiment = "ideals";
        rep.D = c.D;
        rep.X = c.X;
        const auto res = ideal_count(c.D, c.X);
        rep.rows.push_back({"ideals", static_cast<double>(res.observed), true, res.c1 * static_cast<double>(c.X),
                            "L(1 chi_D) x"});
    } else if (e == "u_f") {
        const QuadForm f = select_form(ca.form, c.D);
        rep.experiment = "u_f";
        rep.D = c.D;
        rep.X = c.X;
        const double lx = std::log(std::max<double>(static_cast<double>(c.X), 3.0));
        rep.rows.push_back({"f=(" + std::to_string(f.a) + ";" + std::to_string(f.b) + ";" + std::to_string(f.c) + ")",
                            static_cast<double>(u_f(f, c.X)), true, static_cast<double>(c.X) / std::sqrt(lx),
                            "X/sqrt(log X)"});
    } else {
        throw UsageError("unknown experiment: " + e);
    }
    rep.seed = c.seed;
    emit(c, render(c, rep));
    return 0;
}

struct Theorem1Args {
    std::string group;
    std::string set;
    i64 classgroup = 0;
    bool squares = false;
    std::size_t random_size = 0;
};

int cmd_theorem1(const Common& c, const Theorem1Args& t) {
    FiniteAbelianGroup g;
    std::vector<Element> a;
    if (t.classgroup != 0) {
        const ClassGroup cg(t.classgroup);
        g = cg.abelian();
        if (!t.squares) throw UsageError("--classgroup requires --squares");
        for (ClassIndex i = 0; i < cg.h(); ++i) a.push_back(cg.to_abelian(cg.compose(i, i)));
    } else {
        if (t.group.empty()) throw UsageError("theorem1 needs --group or --classgroup");
        const auto orders = parse_int_list(t.group);
        double size = 1;
        for (i64 o : orders) {
            if (o < 1) throw UsageError("group orders must be positive");
            size *= static_cast<double>(o);
        }
        if (size > static_cast<double>(max_theorem1_group)) throw ResourceError("group larger than 2^16");
        g = FiniteAbelianGroup(orders);
        if (!t.set.empty()) {
            for (i64 v : parse_int_list(t.set)) {
                if (v < 0 || static_cast<std::size_t>(v) >= g.size()) throw UsageError("set element out of range");
                a.push_back(static_cast<Element>(v));
            }
        } else {
            std::mt19937_64 rng(c.seed);
            const std::size_t k = t.random_size ? t.random_size : std::min<std::size_t>(8, g.size());
            for (std::size_t i = 0; i < k; ++i) a.push_back(static_cast<Element>(rng() % g.size()));
        }
    }
    if (g.size() > max_theorem1_group) throw ResourceError("group larger than 2^16");
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    Theorem1Params params;
    params.eps = c.eps;
    const Theorem1Report rep = classify_theorem1(a, g, params);
    const Theorem1Check chk = verify_theorem1(rep, a, g);
    if (!chk.ok) {
        std::cerr << "witness failed verification: " << chk.reason << "\n";
        return 1;
    }
    json j;
    j["schema"] = 1;
    j["group"] = g.orders();
    j["set"] = a;
    j["eps"] = c.eps;
    j["alternative"] = to_string(rep.alternative);
    j["sums_size"] = rep.sums_size;
    j["group_size"] = rep.group_size;
    j["bounds_met"] = rep.bounds_met;
    j["verified"] = true;
    if (rep.alternative == Alternative::SmallOmega) {
        j["chosen"] = rep.chosen;
        j["omega"] = rep.omega.elements();
        j["k"] = rep.chosen.size();
        j["k_bound"] = rep.k_bound;
        j["omega_bound"] = rep.omega_bound;
    } else if (rep.alternative == Alternative::Subgroup) {
        j["subgroup"] = rep.subgroup.elements();
        j["index"] = rep.index;
        j["exceptional"] = rep.exceptional;
    }
    json tr;
    tr["chosen"] = rep.transcript.chosen;
    tr["sizes"] = rep.transcript.sizes;
    j["transcript"] = tr;
    if (c.format == "json") {
        emit(c, j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    os << "group = " << g.describe() << "\n";
    os << "alternative = " << to_string(rep.alternative) << "\n";
    os << "|s(A)| = " << rep.sums_size << " of " << rep.group_size << "\n";
    if (rep.alternative == Alternative::SmallOmega)
        os << "k = " << rep.chosen.size() << " (bound " << rep.k_bound << "), |Omega| = " << rep.omega.size()
           << " (bound " << rep.omega_bound << ")\n";
    if (rep.alternative == Alternative::Subgroup)
        os << "subgroup of index " << rep.index << ", |A \\ H| = " << rep.exceptional.size() << "\n";
    os << "greedy sizes:";
    for (auto s : rep.transcript.sizes) os << " " << s;
    os << "\nverified = true\n";
    emit(c, os.str());
    return 0;
}

int cmd_constants(const Common& c, i64 truncation) {
    const json j = constants_json(c.D, c.a, truncation);
    if (c.format == "json") {
        emit(c, j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    os << "key,value\n";
    for (const char* k : {"D", "a", "truncation", "C0", "C0_delta", "C0_raw", "C0_raw_delta", "L1", "theta",
                          "theta_argmax", "theta_golden", "theta_argmax_golden", "omega_D"}) {
        const auto& v = j.at(k);
        os << k << ',';
        if (v.is_null()) os << "";
        else if (v.is_number_float()) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
            os << buf;
        } else os << v.dump();
        os << "\n";
    }
    for (const auto& row : j.at("residual_table")) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "residual z=%.0f,%.12g\n", row.at("z").get<double>(), row.at("residual").get<double>());
        os << buf;
    }
    emit(c, os.str());
    return 0;
}

int cmd_genus_check(const Common& c) {
    const auto results = calibrate_local_criteria(calibration_forms(), c.X);
    json arr = json::array();
    std::ostringstream os;
    os << "reading,tested,mismatches\n";
    for (const auto& r : results) {
        arr.push_back({{"reading", r.reading.name()}, {"tested", r.tested}, {"mismatches", r.mismatches}});
        os << r.reading.name() << ',' << r.tested << ',' << r.mismatches << "\n";
    }
    const LocalCriteriaReading resolved;
    os << "resolved," << resolved.name() << "\n";
    if (c.format == "json") {
        json j{{"schema", 1}, {"limit", c.X}, {"readings", arr}, {"resolved", resolved.name()}};
        emit(c, j.dump(2) + "\n");
    } else {
        emit(c, os.str());
    }
    return 0;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("-D", c.D, "discriminant (negative, 0 or 1 mod 4)")->allow_extra_args(false);
    app->add_option("-X", c.X, "bound X (or Y, xi, x)");
    app->add_option("-a", c.a, "shift a");
    app->add_option("--eps", c.eps, "epsilon");
    app->add_option("--threads", c.threads, "worker threads (default: all cores)");
    app->add_option("--seed", c.seed, "seed for randomized experiments");
    app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--out", c.out, "output path (default stdout)");
    app->add_flag("--segmented", c.segmented, "recompute tables per window");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"genuslab: class groups, genus theory and representation censuses"};
    app.require_subcommand(1);
    Common common;

    auto* classgroup = app.add_subcommand("classgroup", "class group summary");
    add_common(classgroup, common);

    CensusArgs ca;
    auto* census = app.add_subcommand("census", "run a census experiment");
    add_common(census, common);
    census->add_option("experiment", ca.experiment,
                       "exceptional|shifted|corollary4|primes-by-class|kfactor|lemma3|lemma4|lemma5|ideals|u_f|split-reciprocal")
        ->required();
    census->add_option("--form", ca.form, "form a,b,c (default principal)");
    census->add_option("-r", ca.r, "maximum number of prime factors (lemma3)");
    census->add_option("--z", ca.z, "sieving range for the lemma5 residue family");

    Theorem1Args ta;
    auto* theorem1 = app.add_subcommand("theorem1", "classify a subset of a finite abelian group");
    add_common(theorem1, common);
    theorem1->add_option("--group", ta.group, "cyclic orders, e.g. 2,4");
    theorem1->add_option("--set", ta.set, "elements as mixed-radix indices, e.g. 1,2");
    theorem1->add_option("--classgroup", ta.classgroup, "use the class group of this discriminant");
    theorem1->add_flag("--squares", ta.squares, "take A = {C^2}");
    theorem1->add_option("--random-size", ta.random_size, "random set size when --set is absent");

    i64 truncation = 1000000;
    auto* constants = app.add_subcommand("constants", "sieve constants for D and a");
    add_common(constants, common);
    constants->add_option("--truncation", truncation, "prime truncation for C0");

    auto* genus_check = app.add_subcommand("genus-check", "calibrate the local representation criteria");
    add_common(genus_check, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_usage;
    }

    try {
        if (*classgroup) return cmd_classgroup(common);
        if (*census) return cmd_census(common, ca);
        if (*theorem1) return cmd_theorem1(common, ta);
        if (*constants) return cmd_constants(common, truncation);
        if (*genus_check) {
            if (!genus_check->count("-X")) common.X = 10000;
            return cmd_genus_check(common);
        }
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return exit_resource;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource limit: out of memory; try --segmented or a smaller X\n";
        return exit_resource;
    } catch (const std::length_error& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return exit_resource;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_usage;
}
