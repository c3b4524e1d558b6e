#include "prodwalk/io.hpp"

#include "prodwalk/error.hpp"

#include <fstream>
#include <sstream>

namespace prodwalk {
namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::SchemaError, "field '" + field + "': " + what);
}

double number_at(const Json& j, const std::string& field) {
    if (!j.is_number()) schema_error(field, "expected a number");
    return j.get<double>();
}

std::string_view provenance_name(Provenance p) {
    switch (p) {
    case Provenance::analytic: return "analytic";
    case Provenance::exact_finite: return "exact-finite";
    case Provenance::monte_carlo: return "monte-carlo";
    }
    return "analytic";
}

Json to_json(const ProvenanceTag& t) {
    Json j{{"kind", provenance_name(t.kind)}};
    if (t.kind == Provenance::monte_carlo) {
        j["samples"] = t.samples;
        j["seed"] = t.seed;
    }
    return j;
}

Json to_json(const Ledger& l) {
    return Json{{"alpha", l.alpha}, {"beta", l.beta}, {"c_head", l.c}, {"c_sup", l.c_sup}};
}

} // namespace

Json parse_json_text(std::string_view text, std::string_view source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorCode::SchemaError, std::string(source) + ":" + std::to_string(line) + ":" +
                                                std::to_string(col) + ": malformed JSON");
    }
}

Distribution distribution_from_json(const Json& j) {
    if (!j.is_object()) schema_error("<root>", "expected an object");
    if (!j.contains("kind") || !j["kind"].is_string()) schema_error("kind", "expected \"finite\" or \"one_plus_cosine\"");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "one_plus_cosine") return make_one_plus_cosine();
    if (kind != "finite") schema_error("kind", "unknown kind \"" + kind + "\"");

    if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty()) {
        schema_error("atoms", "expected a nonempty array of [value, probability] pairs");
    }
    std::vector<Atom> atoms;
    const auto& arr = j["atoms"];
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string field = "atoms[" + std::to_string(i) + "]";
        if (!arr[i].is_array() || arr[i].size() != 2) schema_error(field, "expected [value, probability]");
        atoms.push_back({number_at(arr[i][0], field + "[0]"), number_at(arr[i][1], field + "[1]")});
    }
    return make_finite(std::move(atoms));
}

CoefficientVector coefficients_from_json(const Json& j, std::optional<Norm> norm_override) {
    const Json* coeffs = &j;
    Norm norm = Norm::l1;
    if (j.is_object()) {
        if (!j.contains("coeffs")) schema_error("coeffs", "missing");
        coeffs = &j["coeffs"];
        if (j.contains("norm")) {
            if (!j["norm"].is_string()) schema_error("norm", "expected \"l1\", \"l2\" or \"linf\"");
            try {
                norm = parse_norm(j["norm"].get<std::string>());
            } catch (const Error& e) {
                schema_error("norm", e.what());
            }
        }
    }
    if (norm_override) norm = *norm_override;
    if (!coeffs->is_array() || coeffs->empty()) schema_error("coeffs", "expected a nonempty array");

    std::vector<double> data;
    std::size_t dim = 0;
    for (std::size_t i = 0; i < coeffs->size(); ++i) {
        const auto& entry = (*coeffs)[i];
        const std::string field = "coeffs[" + std::to_string(i) + "]";
        if (entry.is_number()) {
            if (dim != 0 && dim != 1) schema_error(field, "mixes scalars and vectors");
            dim = 1;
            data.push_back(entry.get<double>());
        } else if (entry.is_array() && !entry.empty()) {
            if (dim != 0 && dim != entry.size()) schema_error(field, "dimension differs from coeffs[0]");
            dim = entry.size();
            for (std::size_t c = 0; c < entry.size(); ++c) {
                data.push_back(number_at(entry[c], field + "[" + std::to_string(c) + "]"));
            }
        } else {
            schema_error(field, "expected a number or a nonempty array of numbers");
        }
    }
    return CoefficientVector(norm, dim, std::move(data));
}

std::vector<std::int64_t> sequence_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) schema_error("<root>", "expected a nonempty integer array");
    std::vector<std::int64_t> seq;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number_integer()) schema_error("[" + std::to_string(i) + "]", "expected an integer");
        seq.push_back(j[i].get<std::int64_t>());
    }
    return seq;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

Json to_json(const ValidationReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return Json{{"ok", r.ok()}, {"checks", checks}};
}

Json to_json(const MomentProfile& p) {
    return Json{{"lambda", p.lambda}, {"mu", p.mu},   {"p_eps", p.p_eps},
                {"tail_A", p.tail_A}, {"eps", p.eps}, {"A", p.A},
                {"provenance",
                 {{"lambda", to_json(p.lambda_src)},
                  {"mu", to_json(p.mu_src)},
                  {"p_eps", to_json(p.p_eps_src)},
                  {"tail_A", to_json(p.tail_src)}}}};
}

Json to_json(const Certificate& c) {
    Json inputs{{"lambda", c.inputs.lambda}, {"mu", c.inputs.mu}};
    if (c.theorem == Theorem::thm1) {
        inputs["p"] = c.inputs.p;
        inputs["eps"] = c.inputs.eps;
    } else {
        inputs["A"] = c.inputs.A;
        inputs["k"] = c.inputs.k;
    }
    return Json{{"theorem", to_string(c.theorem)}, {"c", c.c},           {"applicable", c.applicable},
                {"reason", c.reason},              {"inputs", inputs}, {"ledger", to_json(c.ledger)}};
}

Json to_json(const EstimateResult& e) {
    return Json{{"mean", e.mean},           {"std_error", e.std_error},
                {"ci99", {e.ci99.first, e.ci99.second}},
                {"samples", e.samples},     {"seed", e.seed},
                {"method", to_string(e.method)}};
}

Json to_json(const CoefficientVector& cv) {
    Json coeffs = Json::array();
    for (std::size_t i = 0; i < cv.size(); ++i) {
        const auto p = cv[i];
        if (cv.dim() == 1) {
            coeffs.push_back(p[0]);
        } else {
            coeffs.push_back(std::vector<double>(p.begin(), p.end()));
        }
    }
    return Json{{"norm", to_string(cv.norm())}, {"coeffs", coeffs}};
}

Json to_json(const RademacherResult& r) {
    return Json{{"value_products", r.value_products}, {"value_plain", r.value_plain}, {"sqrt_n", r.sqrt_n}};
}

Json to_json(const SuiteReport& r) {
    Json lemmas = Json::array();
    for (const auto& l : r.lemmas) {
        lemmas.push_back({{"name", l.name},
                          {"instances", l.instances},
                          {"hypothesis_met", l.hypothesis_met},
                          {"violations", l.violations},
                          {"worst_margin", l.worst_margin}});
    }
    return Json{{"trials", r.trials}, {"seed", r.seed}, {"total_violations", r.total_violations()}, {"lemmas", lemmas}};
}

Json to_json(const LacunarySequence& s) {
    return Json{{"terms", s.terms}, {"ratios", s.ratios}, {"summability_prefix", s.summability_prefix}};
}

Json to_json(const QuadratureResult& q) {
    return Json{{"value", q.value},
                {"grid_size", q.grid_size},
                {"refinement_delta", q.refinement_delta},
                {"l1_mass", q.l1_mass},
                {"ratio", q.ratio}};
}

Json to_json(const SweepReport& r) {
    Json trials = Json::array();
    for (std::size_t k = 0; k < r.trials.size(); ++k) {
        const auto& t = r.trials[k];
        trials.push_back({{"trial", k}, {"ratio", t.ratio}, {"coeffs", t.coeffs}, {"quadrature", to_json(t.quadrature)}});
    }
    return Json{{"seed", r.seed},
                {"tol", r.tol},
                {"min_ratio", r.min_ratio},
                {"max_ratio", r.max_ratio},
                {"argmin", r.argmin},
                {"argmin_coeffs", r.trials.at(r.argmin).coeffs},
                {"histogram", r.histogram},
                {"trials", trials}};
}

Json to_json(const SearchConfig& c) {
    return Json{{"n", c.n},
                {"d", c.d},
                {"norm", to_string(c.norm)},
                {"budget", c.budget},
                {"restarts", c.restarts},
                {"seed", c.seed},
                {"oracle", {{"method", to_string(c.oracle.method)}, {"samples", c.oracle.samples}}}};
}

Json to_json(const SearchResult& r) {
    Json trace = Json::array();
    for (const auto& t : r.trace) {
        trace.push_back({{"start", t.start},
                         {"values", t.values},
                         {"evaluations", t.evaluations},
                         {"converged", t.converged}});
    }
    return Json{{"best_ratio", r.best_ratio},
                {"best_coeffs", to_json(r.best_coeffs)},
                {"evaluations_used", r.evaluations_used},
                {"best_restart", r.best_restart},
                {"budget_exhausted", r.budget_exhausted},
                {"verified_ratio", r.verified_ratio},
                {"verified_std_error", r.verified_std_error},
                {"method", to_string(r.method)},
                {"step_schedule", {{"initial", r.initial_step}, {"factor", 0.5}, {"floor", r.min_step}}},
                {"trace", trace}};
}

std::string sweep_csv(const SweepReport& r) {
    std::ostringstream os;
    os.precision(17);
    const std::size_t width = r.trials.empty() ? 0 : r.trials.front().coeffs.size();
    os << "trial,ratio";
    for (std::size_t i = 0; i < width; ++i) os << ",a" << i;
    os << '\n';
    for (std::size_t k = 0; k < r.trials.size(); ++k) {
        os << k << ',' << r.trials[k].ratio;
        for (double c : r.trials[k].coeffs) os << ',' << c;
        os << '\n';
    }
    return os.str();
}

std::string trace_csv(const SearchResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << "restart,start,step,value\n";
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
        const auto& t = r.trace[k];
        for (std::size_t s = 0; s < t.values.size(); ++s) os << k << ',' << t.start << ',' << s << ',' << t.values[s] << '\n';
    }
    return os.str();
}

} // namespace prodwalk
