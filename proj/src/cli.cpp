#include "prodwalk/cli.hpp"

#include "prodwalk/error.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>

namespace prodwalk::cli {
namespace {

struct Flags {
    std::string dist;
    std::string coeffs;
    std::string norm;
    std::string seq;
    std::string out;
    std::string manifest;
    long long n = 0;
    std::size_t samples = 100'000;
    std::size_t budget = 10'000;
    std::size_t restarts = 4;
    std::size_t trials = 100;
    std::size_t dim = 1;
    std::uint64_t seed = 0;
    double tol = 1e-8;
    double C = 1.0;
};

struct Outcome {
    Json result;
    std::string csv;
};

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Distribution load_distribution(const std::string& path) {
    return distribution_from_json(parse_json_text(read_file(path), path));
}

CoefficientVector load_coefficients(const Flags& f, bool norm_given) {
    std::optional<Norm> norm;
    if (norm_given) norm = parse_norm(f.norm);
    return coefficients_from_json(parse_json_text(read_file(f.coeffs), f.coeffs), norm);
}

LacunarySequence load_sequence(const std::string& path) {
    const auto raw = sequence_from_json(parse_json_text(read_file(path), path));
    return validate_lacunary(raw);
}

std::vector<double> scalar_coefficients(const CoefficientVector& cv) {
    PRODWALK_REQUIRE(cv.dim() == 1, ErrorCode::InvalidArgument, "Riesz combinations take scalar coefficients");
    return {cv.data().begin(), cv.data().end()};
}

Outcome cmd_validate(const Flags& f) {
    const auto dist = load_distribution(f.dist);
    return {to_json(validate(dist)), {}};
}

Outcome cmd_certify(const Flags& f, bool n_given) {
    const auto dist = load_distribution(f.dist);
    const auto certs = certify_all(dist, n_given ? static_cast<std::size_t>(f.n) : kDefaultLedgerLength);
    Json list = Json::array();
    for (const auto& c : certs) list.push_back(to_json(c));
    return {Json{{"certificates", list}, {"best_c", best_constant(certs)}}, {}};
}

Outcome cmd_estimate(const Flags& f, bool norm_given, const Oracle& oracle) {
    const auto dist = load_distribution(f.dist);
    const auto cv = load_coefficients(f, norm_given);
    const auto est = estimate_l1(dist, cv, oracle);
    return {Json{{"estimate", to_json(est)}, {"l1_mass", cv.l1_mass()}, {"ratio", ratio_of(est, cv)},
                 {"coefficients", to_json(cv)}},
            {}};
}

Outcome cmd_riesz(const Flags& f) {
    const auto seq = load_sequence(f.seq);
    const auto cv = load_coefficients(f, false);
    const auto a = scalar_coefficients(cv);
    const auto q = riesz_l1(a, seq, f.tol);
    return {Json{{"sequence", to_json(seq)}, {"quadrature", to_json(q)}}, {}};
}

Outcome cmd_sweep(const Flags& f) {
    const auto seq = load_sequence(f.seq);
    PRODWALK_REQUIRE(f.n >= 0, ErrorCode::InvalidArgument, "--n must be >= 0");
    const auto report = riesz_ratio_sweep(seq, static_cast<std::size_t>(f.n), f.trials, f.seed, f.tol);
    return {Json{{"sequence", to_json(seq)}, {"sweep", to_json(report)}}, sweep_csv(report)};
}

Outcome cmd_adversary(const Flags& f, bool samples_given, bool C_given, bool norm_given) {
    const auto dist = load_distribution(f.dist);
    PRODWALK_REQUIRE(f.n >= 0, ErrorCode::InvalidArgument, "--n must be >= 0");
    const Oracle oracle{samples_given ? Method::monte_carlo : Method::exact, f.samples, f.seed};
    if (C_given) {
        ProbeOptions options;
        options.restarts = f.restarts;
        options.oracle = oracle;
        const auto res = mw_probe(dist, static_cast<std::size_t>(f.n), f.C, f.budget, f.seed, options);
        return {Json{{"search", to_json(res)}, {"probe", {{"C", f.C}, {"n", f.n}}}}, trace_csv(res)};
    }
    SearchConfig config;
    config.n = static_cast<std::size_t>(f.n);
    config.d = f.dim;
    config.norm = norm_given ? parse_norm(f.norm) : Norm::l1;
    config.budget = f.budget;
    config.restarts = f.restarts;
    config.seed = f.seed;
    config.oracle = oracle;
    const auto res = minimize_ratio(dist, config);
    Json result{{"config", to_json(config)}, {"search", to_json(res)}};
    const auto certs = dist.is_finite() ? certify_all(dist) : std::vector<Certificate>{};
    result["certificate_floor"] = best_constant(certs);
    return {result, trace_csv(res)};
}

Outcome cmd_suite(const Flags& f) {
    const auto dist = load_distribution(f.dist);
    return {to_json(lemma_suite(dist, f.trials, f.seed)), {}};
}

Outcome cmd_rademacher(const Flags& f) {
    PRODWALK_REQUIRE(f.n >= 1 && f.n <= 20, ErrorCode::NTooLarge, "rademacher needs 1 <= n <= 20");
    return {to_json(rademacher_exact(static_cast<int>(f.n))), {}};
}

// Flag values exactly as given, keyed without the leading dashes.
Json given_args(const CLI::App& sub) {
    Json args = Json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->count() == 0) continue;
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "out") continue;
        args[name] = opt->results().front();
    }
    return args;
}

} // namespace

std::string csv_path_for(const std::string& json_path) {
    const std::string ext = ".json";
    if (json_path.size() > ext.size() && json_path.compare(json_path.size() - ext.size(), ext.size(), ext) == 0) {
        return json_path.substr(0, json_path.size() - ext.size()) + ".csv";
    }
    return json_path + ".csv";
}

void write_report(const Json& body, const Json& manifest, const std::string& path, const std::string& csv,
                  std::ostream& fallback) {
    Json doc = body;
    doc["manifest"] = manifest;
    const std::string text = doc.dump(2) + "\n";
    if (path.empty()) {
        fallback << text;
        return;
    }
    write_file(path, text);
    if (!csv.empty()) write_file(csv_path_for(path), csv);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"prodwalk: L1 bounds for linear combinations of products of mean-one random variables"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    Flags f;

    std::map<std::string, CLI::App*> subs;
    auto add = [&](const std::string& name, const std::string& description) {
        CLI::App* s = app.add_subcommand(name, description);
        s->add_option("--out", f.out, "report path (JSON); stdout when omitted");
        subs[name] = s;
        return s;
    };
    auto dist_opt = [&](CLI::App* s) { s->add_option("--dist", f.dist, "distribution JSON")->required(); };
    auto coeffs_opt = [&](CLI::App* s) { s->add_option("--coeffs", f.coeffs, "coefficient JSON")->required(); };
    auto norm_opt = [&](CLI::App* s) {
        s->add_option("--norm", f.norm, "l1|l2|linf")->check(CLI::IsMember({"l1", "l2", "linf"}));
    };
    auto seed_opt = [&](CLI::App* s) { s->add_option("--seed", f.seed, "64-bit seed (default 0)"); };

    auto* validate_cmd = add("validate", "check nonnegativity, mean one and nondegeneracy");
    dist_opt(validate_cmd);

    auto* certify_cmd = add("certify", "certified lower-bound constants");
    dist_opt(certify_cmd);
    certify_cmd->add_option("--n", f.n, "ledger length (default 16)")->check(CLI::NonNegativeNumber);

    auto* exact_cmd = add("exact", "exact E||sum v_i R_i|| by enumeration");
    dist_opt(exact_cmd);
    coeffs_opt(exact_cmd);
    norm_opt(exact_cmd);

    auto* estimate_cmd = add("estimate", "Monte Carlo E||sum v_i R_i||");
    dist_opt(estimate_cmd);
    coeffs_opt(estimate_cmd);
    norm_opt(estimate_cmd);
    estimate_cmd->add_option("--samples", f.samples, "sample paths (default 1e5)");
    seed_opt(estimate_cmd);

    auto* ratio_cmd = add("ratio", "L1-to-l1 ratio (exact unless --samples is given)");
    dist_opt(ratio_cmd);
    coeffs_opt(ratio_cmd);
    norm_opt(ratio_cmd);
    ratio_cmd->add_option("--samples", f.samples, "Monte Carlo sample paths");
    seed_opt(ratio_cmd);

    auto* riesz_cmd = add("riesz", "circle L1 norm of a Riesz-product combination");
    riesz_cmd->add_option("--seq", f.seq, "lacunary frequency JSON array")->required();
    coeffs_opt(riesz_cmd);
    riesz_cmd->add_option("--tol", f.tol, "relative refinement tolerance (default 1e-8)");

    auto* sweep_cmd = add("sweep", "random Riesz ratio sweep");
    sweep_cmd->add_option("--seq", f.seq, "lacunary frequency JSON array")->required();
    sweep_cmd->add_option("--n", f.n, "highest product index")->required();
    sweep_cmd->add_option("--trials", f.trials, "number of random vectors (default 100)");
    sweep_cmd->add_option("--tol", f.tol, "relative refinement tolerance (default 1e-8)");
    seed_opt(sweep_cmd);

    auto* adversary_cmd = add("adversary", "search for small ratios (or the constrained probe with --C)");
    dist_opt(adversary_cmd);
    adversary_cmd->add_option("--n", f.n, "highest coefficient index")->required();
    adversary_cmd->add_option("--dim", f.dim, "coefficient dimension (default 1)");
    norm_opt(adversary_cmd);
    adversary_cmd->add_option("--budget", f.budget, "objective evaluations (default 1e4)");
    adversary_cmd->add_option("--restarts", f.restarts, "restarts (default 4)");
    adversary_cmd->add_option("--samples", f.samples, "Monte Carlo oracle with this many common paths");
    adversary_cmd->add_option("--C", f.C, "partial-sum bound; switches to the constrained maximisation probe");
    seed_opt(adversary_cmd);

    auto* suite_cmd = add("suite", "exact checks of the auxiliary inequalities");
    dist_opt(suite_cmd);
    suite_cmd->add_option("--trials", f.trials, "random instances (default 100)");
    seed_opt(suite_cmd);

    auto* rademacher_cmd = add("rademacher", "exact sign-product sum against sqrt(n)");
    rademacher_cmd->add_option("--n", f.n, "1..20")->required();

    auto* rerun_cmd = add("rerun", "re-execute the manifest embedded in a report");
    rerun_cmd->add_option("--manifest", f.manifest, "report JSON produced earlier")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << "run with --help for the flag grammar\n";
        return 2;
    }

    std::string command;
    CLI::App* sub = nullptr;
    for (const auto& [name, s] : subs) {
        if (s->parsed()) {
            command = name;
            sub = s;
        }
    }

    if (command == "rerun") {
        Json report;
        try {
            report = parse_json_text(read_file(f.manifest), f.manifest);
        } catch (const Error& e) {
            err << "rerun: " << e.what() << "\n";
            return 2;
        }
        if (!report.contains("manifest") || !report["manifest"].contains("command") ||
            !report["manifest"].contains("args")) {
            err << "rerun: '" << f.manifest << "' carries no manifest\n";
            return 2;
        }
        const auto& m = report["manifest"];
        std::vector<std::string> replay{m["command"].get<std::string>()};
        for (const auto& [key, value] : m["args"].items()) {
            replay.push_back("--" + key);
            replay.push_back(value.get<std::string>());
        }
        if (!f.out.empty()) {
            replay.emplace_back("--out");
            replay.push_back(f.out);
        }
        return run(replay, out, err);
    }

    Json args_json = given_args(*sub);
    const bool has_seed = sub->get_option_no_throw("--seed") != nullptr;
    Json manifest{{"command", command},
                  {"args", args_json},
                  {"seed", has_seed ? Json(f.seed) : Json(nullptr)},
                  {"output", f.out.empty() ? Json(nullptr) : Json(f.out)},
                  {"tool_version", kToolVersion},
                  {"timestamp", utc_timestamp()}};
    Json inputs = Json::object();
    for (const char* key : {"dist", "coeffs", "seq"}) {
        if (args_json.contains(key)) inputs[key] = args_json[key];
    }
    manifest["inputs"] = inputs;

    auto given = [&](const char* name) {
        const CLI::Option* o = sub->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };

    Outcome outcome;
    int code = 0;
    try {
        if (command == "validate") {
            outcome = cmd_validate(f);
        } else if (command == "certify") {
            outcome = cmd_certify(f, given("--n"));
        } else if (command == "exact") {
            outcome = cmd_estimate(f, given("--norm"), Oracle{Method::exact, 0, 0});
        } else if (command == "estimate") {
            outcome = cmd_estimate(f, given("--norm"), Oracle{Method::monte_carlo, f.samples, f.seed});
        } else if (command == "ratio") {
            const Oracle oracle = given("--samples") ? Oracle{Method::monte_carlo, f.samples, f.seed}
                                                     : Oracle{Method::exact, 0, 0};
            outcome = cmd_estimate(f, given("--norm"), oracle);
        } else if (command == "riesz") {
            outcome = cmd_riesz(f);
        } else if (command == "sweep") {
            outcome = cmd_sweep(f);
        } else if (command == "adversary") {
            outcome = cmd_adversary(f, given("--samples"), given("--C"), given("--norm"));
        } else if (command == "suite") {
            outcome = cmd_suite(f);
        } else if (command == "rademacher") {
            outcome = cmd_rademacher(f);
        }
        outcome.result = Json{{"result", outcome.result}};
    } catch (const Error& e) {
        outcome.result = Json{{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}};
        outcome.csv.clear();
        code = 1;
    }

    try {
        write_report(outcome.result, manifest, f.out, outcome.csv, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return code;
}

} // namespace prodwalk::cli
