#include "eqdiff/workbench.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "eqdiff/cartan.hpp"
#include "eqdiff/chern_weil.hpp"
#include "eqdiff/diffcoh.hpp"
#include "eqdiff/json_io.hpp"
#include "eqdiff/simplicial.hpp"

#ifndef EQDIFF_EXAMPLES_DIR
#define EQDIFF_EXAMPLES_DIR "examples_data"
#endif

namespace eqdiff::workbench {

namespace {

using complexes::Coefficients;
using io::expect_object;
using linalg::Rational;

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
    return s;
}

std::string coeff_symbol(Coefficients c) {
    switch (c) {
        case Coefficients::Z: return "ℤ";
        case Coefficients::Q: return "ℂ";
        case Coefficients::QmodZ: return "ℂ/ℤ";
    }
    return "?";
}

std::pair<int, int> degrees_or(const Options& o, int lo, int hi) { return o.degrees.value_or(std::pair{lo, hi}); }

std::string degree_range(std::pair<int, int> d) {
    return d.first == d.second ? std::to_string(d.first) : std::to_string(d.first) + ".." + std::to_string(d.second);
}

// Exactly one of the listed keys must be present.
std::string pick_input(const json& inputs, std::initializer_list<const char*> keys, const std::string& command) {
    std::string found;
    for (const char* k : keys)
        if (inputs.contains(k)) {
            if (!found.empty()) throw SchemaError(command + " takes only one of its input kinds, got both '" + found +
                                                  "' and '" + k + "'");
            found = k;
        }
    if (found.empty()) {
        std::vector<std::string> names(keys.begin(), keys.end());
        throw SchemaError(command + " needs one of the inputs: " + join(names, ", "));
    }
    return found;
}

// Verification suites collect named pass/fail lines.
struct Checklist {
    std::vector<std::pair<std::string, bool>> items;
    void add(std::string name, bool ok) { items.emplace_back(std::move(name), ok); }

    Report finish(const std::string& suite, json details) const {
        Report r;
        r.command = "verify";
        std::size_t failed = 0;
        json checks = json::array();
        std::ostringstream text;
        text << "verification suite " << suite << "\n";
        for (const auto& [name, ok] : items) {
            failed += !ok;
            checks.push_back({{"name", name}, {"pass", ok}});
            text << "  " << (ok ? "PASS " : "FAIL ") << name << "\n";
        }
        r.passed = failed == 0;
        r.summary = failed == 0 ? "all " + std::to_string(items.size()) + " checks pass"
                                : std::to_string(failed) + " of " + std::to_string(items.size()) + " checks fail";
        text << r.summary << "\n";
        r.text = text.str();
        r.result = {{"suite", suite}, {"checks", checks}, {"details", std::move(details)}};
        return r;
    }
};

// ---------------------------------------------------------------------------
// cohomology

Report run_cohomology(const JobSpec& job) {
    const json& in = job.inputs;
    expect_object(in, {}, {"action", "double_complex"}, "cohomology inputs");
    std::string kind = pick_input(in, {"action", "double_complex"}, "cohomology");
    auto [lo, hi] = degrees_or(job.options, 0, 4);
    const Coefficients coeff = job.options.coeff;

    complexes::DoubleComplex dc;
    std::string label;
    if (kind == "action") {
        simplicial::GAction act = io::action_from_json(in.at("action"));
        std::size_t needed = static_cast<std::size_t>(std::max(hi, 0)) + (coeff == Coefficients::QmodZ ? 2 : 1);
        std::size_t P = job.options.truncation ? job.options.truncation : static_cast<std::size_t>(std::max(hi, 0)) + 2;
        if (P < needed)
            throw SchemaError("truncation " + std::to_string(P) + " is too small for degree " + std::to_string(hi));
        dc = simplicial::cellular_double_complex(simplicial::bar_levels(act, P), coeff);
        label = "H^n_G(M; " + coeff_symbol(coeff) + ") for " + act.label + ", bar truncation P = " + std::to_string(P);
    } else {
        dc = io::double_complex_from_json(in.at("double_complex"));
        label = "H^n(Tot; " + coeff_symbol(coeff) + ") of a " + std::to_string(dc.P + 1) + " x " +
                std::to_string(dc.Q + 1) + " double complex";
    }

    Report r;
    r.command = "cohomology";
    std::vector<std::string> values;
    json degrees = json::array();
    std::ostringstream text;
    text << label << "\n";
    for (int n = lo; n <= hi; ++n) {
        simplicial::CohomologyValue v = simplicial::double_complex_cohomology(dc, n, coeff);
        values.push_back(v.to_string());
        degrees.push_back({{"n", n}, {"value", io::to_json(v)}});
        text << "  n = " << n << ": " << v.to_string() << "\n";
    }
    r.summary = join(values, ", ");
    r.text = text.str();
    r.result = {{"label", label}, {"coeff", complexes::to_string(coeff)}, {"degrees", degrees}};
    return r;
}

// ---------------------------------------------------------------------------
// diffcoh

struct LensPair {
    std::size_t p, q;
};

std::vector<LensPair> lens_pairs(const json& j) {
    auto one = [](const json& e) {
        expect_object(e, {"p", "q"}, {}, "lens bundle");
        if (!e.at("p").is_number_integer() || !e.at("q").is_number_integer() || e.at("p").get<long long>() < 1 ||
            e.at("q").get<long long>() < 0)
            throw SchemaError("lens bundle needs integers p >= 1 and q >= 0");
        return LensPair{e.at("p").get<std::size_t>(), e.at("q").get<std::size_t>()};
    };
    std::vector<LensPair> out;
    if (j.is_array())
        for (const auto& e : j) out.push_back(one(e));
    else
        out.push_back(one(j));
    if (out.empty()) throw SchemaError("lens needs at least one (p, q) pair");
    return out;
}

Report run_diffcoh(const JobSpec& job) {
    const json& in = job.inputs;
    expect_object(in, {}, {"action", "lens", "homotopy"}, "diffcoh inputs");
    std::string kind = pick_input(in, {"action", "lens", "homotopy"}, "diffcoh");
    Report r;
    r.command = "diffcoh";
    std::ostringstream text;

    if (kind == "action") {
        simplicial::GAction act = io::action_from_json(in.at("action"));
        auto [lo, hi] = degrees_or(job.options, 0, 3);
        std::vector<std::string> values;
        json degrees = json::array();
        text << "Ĥ^n_G(M) for " << act.label << "\n";
        for (int n = lo; n <= hi; ++n) {
            diffcoh::DiffCohReport d = diffcoh::differential_cohomology_zero_dim(act, n);
            values.push_back(d.to_string());
            degrees.push_back(io::to_json(d));
            text << "  n = " << n << ": " << d.to_string() << "   (forms part " << d.forms_part.to_string()
                 << ", integral part " << d.integral_part.to_string() << ")\n";
        }
        r.summary = join(values, ", ");
        r.result = {{"label", act.label}, {"degrees", degrees}};
    } else if (kind == "lens") {
        std::vector<std::string> values;
        json classes = json::array();
        text << "first equivariant differential Chern class of the flat lens bundles, in ℚ/ℤ\n";
        for (const auto& [p, q] : lens_pairs(in.at("lens"))) {
            Rational c = diffcoh::flat_equivariant_chern_class(p, q);
            Rational h = diffcoh::evaluate_on_fundamental_domain(diffcoh::FlatEquivariantLineBundle::lens(p, q));
            values.push_back(c.get_str());
            classes.push_back({{"p", p}, {"q", q}, {"class", io::to_json(c)}, {"holonomy", io::to_json(h)}});
            text << "  (p, q) = (" << p << ", " << q << "): " << c.get_str() << "   (holonomy over a fundamental domain "
                 << h.get_str() << ")\n";
        }
        r.summary = join(values, ", ");
        r.result = {{"classes", classes}};
    } else {
        const json& h = in.at("homotopy");
        expect_object(h, {"action", "cocycle"}, {}, "homotopy input");
        simplicial::GAction act = io::action_from_json(h.at("action"));
        diffcoh::IntervalCocycle x = io::interval_cocycle_from_json(h.at("cocycle"));
        diffcoh::HomotopyFormulaReport rep = diffcoh::homotopy_formula_check(act, x);
        text << "homotopy formula i_1^*x − i_0^*x = a(∫ R(x)) in Ĥ^1 for " << act.label << "\n";
        for (std::size_t m = 0; m < rep.lhs.size(); ++m)
            text << "  point " << m << ": " << rep.lhs[m].get_str() << " vs " << rep.rhs[m].get_str() << "\n";
        r.summary = rep.holds ? "holds" : "fails";
        r.passed = rep.holds;
        r.result = io::to_json(rep);
    }
    r.text = text.str();
    return r;
}

// ---------------------------------------------------------------------------
// hexagon

std::string verdict_word(const std::optional<bool>& v) { return v ? (*v ? "exact" : "NOT exact") : "not evaluated"; }

Report run_hexagon(const JobSpec& job) {
    const json& in = job.inputs;
    expect_object(in, {}, {"action", "double_complex", "forms", "forms_degree"}, "hexagon inputs");
    std::string kind = pick_input(in, {"action", "double_complex"}, "hexagon");
    Report r;
    r.command = "hexagon";
    std::ostringstream text;
    json reports = json::array();
    std::vector<std::string> values;

    if (kind == "action") {
        if (in.contains("forms") || in.contains("forms_degree"))
            throw SchemaError("supplied forms go with a double_complex input");
        simplicial::GAction act = io::action_from_json(in.at("action"));
        auto [lo, hi] = degrees_or(job.options, 0, 3);
        text << "differential cohomology hexagon for " << act.label << "\n";
        for (int n = lo; n <= hi; ++n) {
            diffcoh::HexagonReport h = diffcoh::hexagon(act, n);
            bool ok = h.all_exact() && h.all_commute() && h.beta_image_is_torsion.value_or(false);
            r.passed = r.passed && ok;
            values.push_back("n=" + std::to_string(n) + (ok ? " exact" : " FAILED"));
            reports.push_back(io::to_json(h));
            text << "\n" << h.to_text();
        }
        r.summary = join(values, ", ");
        r.result = {{"label", act.label}, {"degrees", reports}};
    } else {
        complexes::DoubleComplex dc = io::double_complex_from_json(in.at("double_complex"));
        std::optional<diffcoh::SuppliedForms> forms;
        int forms_degree = -1;
        if (in.contains("forms")) {
            forms = io::supplied_forms_from_json(in.at("forms"));
            if (!in.contains("forms_degree")) throw SchemaError("supplied forms need 'forms_degree'");
            if (!in.at("forms_degree").is_number_integer()) throw SchemaError("forms_degree must be an integer");
            forms_degree = in.at("forms_degree").get<int>();
        } else if (in.contains("forms_degree")) {
            throw SchemaError("forms_degree without forms");
        }
        auto [lo, hi] = degrees_or(job.options, 0, 4);
        if (forms && (forms_degree < lo || forms_degree > hi))
            throw SchemaError("forms_degree lies outside the requested degrees");
        text << "hexagon corners from a supplied double complex\n";
        for (int n = lo; n <= hi; ++n) {
            diffcoh::HexagonReport h =
                diffcoh::hexagon_supplied(dc, n, n == forms_degree ? forms : std::optional<diffcoh::SuppliedForms>{});
            values.push_back("n=" + std::to_string(n) + " top row " + verdict_word(h.top_row));
            if (h.top_row && !*h.top_row) r.passed = false;
            reports.push_back(io::to_json(h));
            text << "\n" << h.to_text();
        }
        r.summary = join(values, ", ");
        r.result = {{"degrees", reports}};
    }
    r.text = text.str();
    return r;
}

// ---------------------------------------------------------------------------
// cartan

Report run_cartan(const JobSpec& job) {
    const json& in = job.inputs;
    expect_object(in, {"action"}, {"forms"}, "cartan inputs");
    cartan::LinearAction act = io::linear_action_from_json(in.at("action"));
    Report r;
    r.command = "cartan";
    std::ostringstream text;
    std::vector<std::string> values;

    if (in.contains("forms")) {
        if (!in.at("forms").is_array()) throw SchemaError("forms must be an array of strings");
        json out = json::array();
        text << "Cartan differential d_C = d + Σ u_a ι(X_a^#) on forms over ℝ^" << act.m << "\n";
        for (const auto& f : in.at("forms")) {
            if (!f.is_string()) throw SchemaError("forms must be an array of strings");
            cartan::EquivariantForm w = cartan::EquivariantForm::parse(f.get<std::string>(), act.k(), act.m);
            cartan::EquivariantForm dw = cartan::cartan_d(act, w);
            cartan::EquivariantForm d2 = cartan::cartan_d(act, dw);
            bool inv = cartan::is_invariant(act, w);
            bool square_is_lie = d2 == cartan::lie_operator(act, w);
            r.passed = r.passed && square_is_lie && (!inv || d2.is_zero());
            values.push_back(dw.to_string());
            out.push_back({{"form", io::to_json(w)},
                           {"d_C", io::to_json(dw)},
                           {"d_C_squared", io::to_json(d2)},
                           {"invariant", inv},
                           {"square_is_lie_operator", square_is_lie}});
            text << "  ω = " << w.to_string() << "\n    d_C ω = " << dw.to_string() << "\n    d_C² ω = "
                 << d2.to_string() << (square_is_lie ? "   (= Σ u_a L_{X_a} ω)" : "   (MISMATCH with Σ u_a L_{X_a} ω)")
                 << (inv ? ", ω invariant" : "") << "\n";
        }
        r.summary = join(values, "; ");
        r.result = {{"forms", out}};
    } else {
        auto [lo, hi] = degrees_or(job.options, 0, 5);
        const unsigned D = job.options.bound;
        json out = json::array();
        text << "truncated Cartan cohomology over ℚ, weight bound D = " << D << " (stability checked at D + 2)\n";
        for (int n = lo; n <= hi; ++n) {
            cartan::CartanCohomology c = cartan::cartan_cohomology_truncated(act, n, D);
            values.push_back(std::to_string(c.dimension));
            out.push_back(io::to_json(c));
            text << "  n = " << n << ": dimension " << c.dimension << (c.saturated ? " (top weight contributes)" : "")
                 << "\n";
        }
        r.summary = join(values, ", ");
        r.result = {{"bound", D}, {"degrees", out}};
    }
    r.text = text.str();
    return r;
}

// ---------------------------------------------------------------------------
// chern

chern_weil::FormMatrix connection_from_json(const json& j, std::size_t k, std::size_t m) {
    if (!j.is_array()) throw SchemaError("a connection is a square array of form strings");
    std::vector<std::vector<std::string>> entries;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != j.size()) throw SchemaError("a connection is a square array of form strings");
        entries.emplace_back();
        for (const auto& e : row) {
            if (!e.is_string()) throw SchemaError("connection entries must be form strings");
            entries.back().push_back(e.get<std::string>());
        }
    }
    return chern_weil::FormMatrix::parse(entries, k, m);
}

Report run_chern(const JobSpec& job) {
    const json& in = job.inputs;
    expect_object(in, {"action", "polynomial"}, {"bundle", "connection", "rank", "other_connection"}, "chern inputs");
    cartan::LinearAction act = io::linear_action_from_json(in.at("action"));
    const std::size_t k = act.k(), m = act.m;

    std::optional<std::size_t> rank;
    if (in.contains("rank")) {
        if (!in.at("rank").is_number_integer() || in.at("rank").get<long long>() < 1)
            throw SchemaError("rank must be a positive integer");
        rank = in.at("rank").get<std::size_t>();
    }
    std::optional<chern_weil::BundleAction> bundle;
    if (in.contains("bundle")) {
        bundle = io::bundle_action_from_json(in.at("bundle"), k);
        if (!bundle->drho.empty()) rank = rank.value_or(bundle->drho.front().rows());
    }
    std::optional<chern_weil::FormMatrix> conn;
    if (in.contains("connection")) {
        conn = connection_from_json(in.at("connection"), k, m);
        rank = rank.value_or(conn->rank());
    }
    if (!rank) throw SchemaError("chern needs a bundle, a connection or an explicit rank");
    if (!bundle) bundle = chern_weil::BundleAction::trivial(k, *rank);
    if (!conn) conn = chern_weil::FormMatrix(*rank, k, m);
    if (conn->rank() != *rank || (!bundle->drho.empty() && bundle->drho.front().rows() != *rank))
        throw SchemaError("bundle, connection and rank disagree");
    chern_weil::ConnectionMatrix c{*conn};
    c.validate();
    const bool flat = conn->is_zero();

    std::vector<chern_weil::InvariantPolynomial> polys;
    const json& pj = in.at("polynomial");
    if (pj.is_string()) {
        polys.push_back(chern_weil::InvariantPolynomial::parse(pj.get<std::string>()));
    } else if (pj.is_array() && !pj.empty()) {
        for (const auto& p : pj) {
            if (!p.is_string()) throw SchemaError("polynomial names must be strings");
            polys.push_back(chern_weil::InvariantPolynomial::parse(p.get<std::string>()));
        }
    } else {
        throw SchemaError("polynomial must be a name or a nonempty list of names");
    }

    std::optional<chern_weil::ConnectionMatrix> other;
    if (in.contains("other_connection")) {
        other = chern_weil::ConnectionMatrix{connection_from_json(in.at("other_connection"), k, m)};
        other->validate();
        if (other->rank() != *rank) throw SchemaError("other_connection has the wrong rank");
    }

    // P(Σ u_a dρ(X_a)) as a form, for comparison in the flat case.
    chern_weil::FormMatrix drho_u(*rank, k, m);
    for (std::size_t a = 0; a < bundle->drho.size(); ++a)
        drho_u = drho_u + chern_weil::FormMatrix::constant(bundle->drho[a], k, m) * cartan::EquivariantForm::u(k, m, a);

    Report r;
    r.command = "chern";
    std::ostringstream text;
    std::vector<std::string> values;
    json out = json::array();
    text << "equivariant characteristic forms, rank " << *rank << " bundle over ℝ^" << m
         << (flat ? ", flat connection" : "") << "\n";
    for (const auto& p : polys) {
        cartan::EquivariantForm w = chern_weil::characteristic_form(p, c, *bundle, act);
        json entry = {{"polynomial", p.name()}, {"form", io::to_json(w)}, {"exterior_degree", w.max_form_degree()}};
        text << "  " << p.name() << ": " << w.to_string() << "\n";
        if (flat) {
            bool matches = w == p.evaluate(drho_u) && w.max_form_degree() == 0;
            r.passed = r.passed && matches;
            entry["equals_P_of_drho"] = matches;
            text << "    exterior degree " << w.max_form_degree() << ", "
                 << (matches ? "equals P(dρ)" : "DIFFERS from P(dρ)") << "\n";
        }
        if (other) {
            cartan::EquivariantForm t = chern_weil::transgression(c, *other, p, *bundle, act);
            cartan::EquivariantForm diff = chern_weil::characteristic_form(p, *other, *bundle, act) - w;
            bool ok = cartan::cartan_d(act, t) == diff;
            r.passed = r.passed && ok;
            entry["transgression"] = io::to_json(t);
            entry["transgression_identity"] = ok;
            text << "    transgression: " << t.to_string() << (ok ? "   (d_C matches)" : "   (d_C MISMATCH)") << "\n";
        }
        values.push_back(w.to_string());
        out.push_back(std::move(entry));
    }
    r.summary = join(values, "; ");
    r.text = text.str();
    r.result = {{"rank", *rank}, {"flat", flat}, {"forms", out}};
    return r;
}

// ---------------------------------------------------------------------------
// verify

simplicial::GAction required_action(const json& in, const std::string& suite) {
    if (!in.contains("action")) throw SchemaError("suite " + suite + " needs an action");
    return io::action_from_json(in.at("action"));
}

Report verify_hexagon(const JobSpec& job) {
    simplicial::GAction act = required_action(job.inputs, "hexagon");
    auto [lo, hi] = degrees_or(job.options, 0, 4);
    Checklist cl;
    json details = json::array();
    for (int n = lo; n <= hi; ++n) {
        diffcoh::HexagonReport h = diffcoh::hexagon(act, n);
        std::string at = " (n = " + std::to_string(n) + ")";
        cl.add("top row exact" + at, h.top_row.value_or(false));
        cl.add("bottom row exact" + at, h.bottom_row.value_or(false));
        cl.add("flat diagonal exact" + at, h.flat_diagonal.value_or(false));
        cl.add("topological diagonal exact" + at, h.topological_diagonal.value_or(false));
        cl.add("hexagon commutes" + at, h.all_commute());
        cl.add("image of −β is the torsion of H^n(ℤ)" + at, h.beta_image_is_torsion.value_or(false));
        details.push_back(io::to_json(h));
    }
    return cl.finish("hexagon for " + act.label, details);
}

Report verify_sweep(const JobSpec& job) {
    expect_object(job.inputs, {"suite"}, {"max_points"}, "sweep inputs");
    std::size_t points = 4;
    if (job.inputs.contains("max_points")) {
        if (!job.inputs.at("max_points").is_number_integer() || job.inputs.at("max_points").get<long long>() < 1)
            throw SchemaError("max_points must be a positive integer");
        points = job.inputs.at("max_points").get<std::size_t>();
    }
    int max_n = degrees_or(job.options, 0, 4).second;
    auto entries = diffcoh::hexagon_sweep(diffcoh::small_groups(), points, max_n);
    Checklist cl;
    json details = json::array();
    for (const auto& e : entries) {
        std::string at = e.action + ", n = " + std::to_string(e.n);
        cl.add("exact and commutative: " + at, e.exact && e.commutes && e.i_onto && e.ker_i_matches);
        cl.add("image of −β is torsion: " + at, e.bockstein_is_torsion);
        details.push_back(io::to_json(e));
    }
    return cl.finish("hexagon sweep over groups of order <= 6 on <= " + std::to_string(points) + " points", details);
}

Report verify_bockstein(const JobSpec& job) {
    simplicial::GAction act = required_action(job.inputs, "bockstein");
    auto [lo, hi] = degrees_or(job.options, 1, 4);
    std::size_t P = job.options.truncation ? job.options.truncation : static_cast<std::size_t>(std::max(hi, 0)) + 2;
    auto c = complexes::total_complex(simplicial::cellular_double_complex(simplicial::bar_levels(act, P)));
    Checklist cl;
    json details = json::array();
    for (int n = lo; n <= hi; ++n) {
        complexes::BocksteinReport b = complexes::bockstein(c, n);
        cl.add("image of −β = torsion of H^" + std::to_string(n) + " = " + b.torsion.to_string(), b.image_is_torsion);
        details.push_back({{"n", n}, {"image", io::to_json(b.image)}, {"torsion", io::to_json(b.torsion)}});
    }
    return cl.finish("Bockstein for " + act.label, details);
}

Report verify_contraction(const JobSpec& job) {
    std::vector<simplicial::GAction> actions;
    if (job.inputs.contains("action")) {
        actions.push_back(io::action_from_json(job.inputs.at("action")));
    } else {
        for (const auto& g : diffcoh::small_groups()) actions.push_back(simplicial::coset_action(g, {g.identity()}));
        actions.push_back(simplicial::free_circle(3));
    }
    std::mt19937_64 rng(job.options.seed);
    std::uniform_int_distribution<int> coeff(-3, 3);
    const std::size_t trials = 100;
    std::vector<simplicial::BarLevels> bars;
    for (const auto& a : actions) bars.push_back(simplicial::bar_levels(a, 3));
    std::size_t good = 0;
    Checklist cl;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto& bl = bars[t % bars.size()];
        std::size_t p = 1 + rng() % 3;
        std::size_t k = rng() % bl.action.space().cells.size();
        // Closed cochains at level p >= 1 are the boundaries of level p - 1.
        std::vector<Rational> eta(bl.cells(p - 1, k));
        for (auto& x : eta) x = coeff(rng);
        auto omega = simplicial::vertical_differential(bl, p - 1, k, eta);
        auto back = simplicial::vertical_differential(bl, p - 1, k, simplicial::group_average(bl, p, k, omega));
        if (back == omega)
            ++good;
        else
            cl.add("∂(∫_G ω) = ω on trial " + std::to_string(t) + " (" + bl.action.label + ", level " +
                       std::to_string(p) + ")",
                   false);
    }
    cl.add("∂(∫_G ω) = ω on " + std::to_string(good) + " of " + std::to_string(trials) + " random closed cochains",
           good == trials);
    return cl.finish("contraction", {{"trials", trials}, {"seed", job.options.seed}});
}

Report verify_getzler(const JobSpec& job) {
    simplicial::GAction act =
        job.inputs.contains("action") ? io::action_from_json(job.inputs.at("action")) : simplicial::two_points_swap();
    std::size_t P = job.options.truncation ? job.options.truncation : 3;
    std::size_t failures = cartan::getzler_chain_map_failures(simplicial::bar_levels(act, P));
    Checklist cl;
    cl.add("𝒥∘∂ = d̄∘𝒥 on every basis cochain through level " + std::to_string(P) + " for " + act.label,
           failures == 0);
    return cl.finish("getzler", {{"levels", P}, {"failures", failures}});
}

Report verify_counterexample(const JobSpec&) {
    complexes::CounterexampleReport bad = complexes::bad_resolution_counterexample();
    complexes::CounterexampleReport honest =
        complexes::bad_resolution_counterexample(std::vector<std::vector<bool>>{{}, {false, false}, {false, false, false}});
    auto gauss = [](const complexes::GaussianRational& z) {
        return json{{"re", io::to_json(z.re)}, {"im", io::to_json(z.im)}};
    };
    Checklist cl;
    cl.add("one conjugated lift gives ∂∘∂ ≠ 0 on the witness", bad.nonzero());
    cl.add("the lifts are the identity on ℤ", bad.lifts_restrict_to_identity_on_Z);
    cl.add("honest lifts give ∂∘∂ = 0", !honest.nonzero() && honest.composite_on_real == complexes::GaussianRational{});
    return cl.finish("counterexample", {{"level", bad.level},
                                        {"witness", gauss(bad.witness)},
                                        {"composite", gauss(bad.composite)},
                                        {"honest_composite", gauss(honest.composite)}});
}

Report verify_lens(const JobSpec&) {
    Checklist cl;
    json details = json::array();
    for (auto [p, q] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 1}, {3, 1}, {5, 2}, {7, 3}}) {
        Rational expected(static_cast<unsigned long>(q), static_cast<unsigned long>(p));
        expected.canonicalize();
        Rational c = diffcoh::flat_equivariant_chern_class(p, q);
        Rational dual = diffcoh::flat_equivariant_chern_class(p, p - q);
        Rational sum = c + dual;
        cl.add("class of (" + std::to_string(p) + ", " + std::to_string(q) + ") is " + expected.get_str(), c == expected);
        cl.add("classes of q and p − q add to 0 in ℚ/ℤ for p = " + std::to_string(p),
               sum.get_den() == 1);
        details.push_back({{"p", p}, {"q", q}, {"class", io::to_json(c)}});
    }
    return cl.finish("lens", details);
}

Report run_verify(const JobSpec& job) {
    const json& in = job.inputs;
    if (!in.is_object() || !in.contains("suite") || !in.at("suite").is_string())
        throw SchemaError("verify needs an input 'suite'");
    std::string suite = in.at("suite").get<std::string>();
    if (suite != "sweep") expect_object(in, {"suite"}, {"action"}, "verify inputs");
    if (suite == "hexagon") return verify_hexagon(job);
    if (suite == "sweep") return verify_sweep(job);
    if (suite == "bockstein") return verify_bockstein(job);
    if (suite == "contraction") return verify_contraction(job);
    if (suite == "getzler") return verify_getzler(job);
    if (suite == "counterexample") return verify_counterexample(job);
    if (suite == "lens") return verify_lens(job);
    throw SchemaError("unknown suite '" + suite +
                      "' (expected hexagon, sweep, bockstein, contraction, getzler, counterexample or lens)");
}

Options options_from_json(const json& j) {
    expect_object(j, {}, {"degrees", "degree", "coeff", "truncation", "bound", "format", "seed"}, "options");
    Options o;
    if (j.contains("degrees") && j.contains("degree")) throw SchemaError("options take degrees or degree, not both");
    for (const char* key : {"degrees", "degree"}) {
        if (!j.contains(key)) continue;
        const json& d = j.at(key);
        if (d.is_string())
            o.degrees = parse_degrees(d.get<std::string>());
        else if (d.is_number_integer())
            o.degrees = parse_degrees(std::to_string(d.get<long long>()));
        else
            throw SchemaError(std::string(key) + " must be a string like \"0..5\" or an integer");
    }
    auto count = [&](const char* key) -> std::uint64_t {
        const json& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) throw SchemaError(std::string(key) + " must be a nonnegative integer");
        return v.get<std::uint64_t>();
    };
    if (j.contains("coeff")) {
        if (!j.at("coeff").is_string()) throw SchemaError("coeff must be a string");
        o.coeff = complexes::coefficients_from_string(j.at("coeff").get<std::string>());
    }
    if (j.contains("truncation")) o.truncation = count("truncation");
    if (j.contains("bound")) o.bound = static_cast<unsigned>(count("bound"));
    if (j.contains("seed")) o.seed = count("seed");
    if (j.contains("format")) {
        if (!j.at("format").is_string()) throw SchemaError("format must be a string");
        o.format = format_from_string(j.at("format").get<std::string>());
    }
    return o;
}

json options_json(const Options& o) {
    json j = {{"coeff", complexes::to_string(o.coeff)},
              {"truncation", o.truncation},
              {"bound", o.bound},
              {"format", o.format == Format::Json ? "json" : "text"},
              {"seed", o.seed}};
    if (o.degrees) j["degrees"] = degree_range(*o.degrees);
    return j;
}

}  // namespace

std::string to_string(Command c) {
    switch (c) {
        case Command::Cohomology: return "cohomology";
        case Command::Diffcoh: return "diffcoh";
        case Command::Hexagon: return "hexagon";
        case Command::Cartan: return "cartan";
        case Command::Chern: return "chern";
        case Command::Verify: return "verify";
    }
    return "?";
}

Command command_from_string(const std::string& s) {
    for (Command c : {Command::Cohomology, Command::Diffcoh, Command::Hexagon, Command::Cartan, Command::Chern,
                      Command::Verify})
        if (to_string(c) == s) return c;
    throw SchemaError("unknown command '" + s + "' (expected cohomology, diffcoh, hexagon, cartan, chern or verify)");
}

Format format_from_string(const std::string& s) {
    if (s == "text") return Format::Text;
    if (s == "json") return Format::Json;
    throw SchemaError("unknown format '" + s + "' (expected text or json)");
}

std::pair<int, int> parse_degrees(const std::string& s) {
    auto number = [&](const std::string& t) {
        if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }) || t.size() > 4)
            throw SchemaError("malformed degree range '" + s + "' (expected n or a..b)");
        return std::stoi(t);
    };
    auto dots = s.find("..");
    int lo = number(s.substr(0, dots));
    int hi = dots == std::string::npos ? lo : number(s.substr(dots + 2));
    if (hi < lo) throw SchemaError("degree range '" + s + "' is empty");
    if (hi > 64) throw SchemaError("degrees above 64 are out of scope");
    return {lo, hi};
}

JobSpec parse_job(const json& j) {
    try {
        expect_object(j, {"command"}, {"inputs", "options"}, "job");
        if (!j.at("command").is_string()) throw SchemaError("command must be a string");
        JobSpec job;
        job.command = command_from_string(j.at("command").get<std::string>());
        if (j.contains("inputs")) {
            if (!j.at("inputs").is_object()) throw SchemaError("inputs must be a JSON object");
            job.inputs = j.at("inputs");
        }
        if (j.contains("options")) job.options = options_from_json(j.at("options"));
        return job;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed job: ") + e.what());
    }
}

json to_json(const JobSpec& job) {
    return {{"command", to_string(job.command)}, {"inputs", job.inputs}, {"options", options_json(job.options)}};
}

json to_json(const Report& r) {
    return {{"command", r.command}, {"summary", r.summary}, {"passed", r.passed}, {"text", r.text}, {"result", r.result}};
}

Report report_from_json(const json& j) {
    expect_object(j, {"command", "summary", "passed", "text", "result"}, {}, "report");
    if (!j.at("command").is_string() || !j.at("summary").is_string() || !j.at("text").is_string() ||
        !j.at("passed").is_boolean())
        throw SchemaError("report fields have the wrong types");
    return {j.at("command").get<std::string>(), j.at("summary").get<std::string>(), j.at("text").get<std::string>(),
            j.at("result"), j.at("passed").get<bool>()};
}

std::string render(const Report& r, Format f) {
    if (f == Format::Json) return to_json(r).dump(2) + "\n";
    return r.text + "summary: " + r.summary + "\n";
}

Report run(const JobSpec& job) {
    try {
        switch (job.command) {
            case Command::Cohomology: return run_cohomology(job);
            case Command::Diffcoh: return run_diffcoh(job);
            case Command::Hexagon: return run_hexagon(job);
            case Command::Cartan: return run_cartan(job);
            case Command::Chern: return run_chern(job);
            case Command::Verify: return run_verify(job);
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed input: ") + e.what());
    }
    throw InternalError("unhandled command");
}

std::string examples_dir() {
    if (const char* env = std::getenv("EQDIFF_EXAMPLES_DIR"); env && *env) return env;
    return EQDIFF_EXAMPLES_DIR;
}

Example example_from_json(const json& j) {
    expect_object(j, {"name", "job", "expected"}, {"description"}, "example");
    io::expect_object(j.at("expected"), {"summary"}, {}, "example expectation");
    if (!j.at("name").is_string() || !j.at("expected").at("summary").is_string())
        throw SchemaError("example name and expected summary must be strings");
    Example e;
    e.name = j.at("name").get<std::string>();
    if (j.contains("description")) {
        if (!j.at("description").is_string()) throw SchemaError("example description must be a string");
        e.description = j.at("description").get<std::string>();
    }
    e.job = parse_job(j.at("job"));
    e.expected_summary = j.at("expected").at("summary").get<std::string>();
    return e;
}

std::vector<Example> bundled_examples() {
    namespace fs = std::filesystem;
    const fs::path dir = examples_dir();
    if (!fs::is_directory(dir)) throw InternalError("example directory " + dir.string() + " is missing");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Example> out;
    for (const auto& f : files) {
        std::ifstream in(f);
        try {
            out.push_back(example_from_json(json::parse(in)));
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(f.filename().string() + ": " + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError(f.filename().string() + ": " + e.what());
        }
    }
    return out;
}

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->family()) {
            case ErrorFamily::Schema: return 2;
            case ErrorFamily::Math: return 3;
            case ErrorFamily::Internal: return 4;
        }
    }
    if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
    return 4;
}

json error_json(const std::exception& e) {
    std::string kind = "InternalError";
    if (const auto* err = dynamic_cast<const Error*>(&e))
        kind = err->kind();
    else if (dynamic_cast<const nlohmann::json::exception*>(&e))
        kind = "SchemaError";
    return {{"error", {{"kind", kind}, {"message", e.what()}, {"exit_code", exit_code_for(e)}}}};
}

}  // namespace eqdiff::workbench
