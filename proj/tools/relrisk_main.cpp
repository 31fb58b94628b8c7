#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "relrisk/counterfactual.hpp"
#include "relrisk/error.hpp"
#include "relrisk/glm.hpp"
#include "relrisk/io.hpp"
#include "relrisk/measures.hpp"
#include "relrisk/risk.hpp"
#include "relrisk/switchmodel.hpp"

namespace {

using nlohmann::ordered_json;
using namespace relrisk;

struct CommonOpts {
    std::string format = "json";
    std::string out_path;
    int precision = 6;
};

void emit(const CommonOpts& c, const std::string& text) {
    if (c.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + c.out_path);
    f << text;
}

std::string render(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string csv_escape_free(const std::string& s) { return s; }  // fields never contain commas

void emit_kv_csv(const CommonOpts& c, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string out = "key,value\n";
    for (const auto& [k, v] : kv) {
        out += csv_escape_free(k);
        out += ',';
        out += v;
        out += '\n';
    }
    emit(c, out);
}

std::string fmt(const CommonOpts& c, double v) { return io::format_double(v, c.precision); }

TwoByTwoTable load_table(const std::string& spec) {
    if (!spec.empty() && spec.front() == '{') {
        return io::table_from_json(nlohmann::json::parse(spec));
    }
    std::ifstream f(spec);
    if (!f) throw std::invalid_argument("cannot open table file: " + spec);
    nlohmann::json j;
    f >> j;
    return io::table_from_json(j);
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            values.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": cannot parse \"" + item +
                                        "\" as a number");
        }
    }
    if (values.empty()) {
        throw std::invalid_argument(std::string(what) + ": empty list");
    }
    return values;
}

MeasureValue compute_measure(Scale scale, RiskPair rp) {
    switch (scale) {
        case Scale::risk_ratio: return risk_ratio(rp);
        case Scale::survival_ratio: return survival_ratio(rp);
        case Scale::risk_difference: return risk_difference(rp);
        case Scale::odds_ratio: return odds_ratio(rp);
        case Scale::relative_risk_reduction: return relative_risk_reduction(rp);
        case Scale::relative_survival_reduction: return relative_survival_reduction(rp);
        case Scale::switch_selected: return switch_select(rp);
        case Scale::grrr: return grrr(rp);
    }
    throw std::invalid_argument("unknown scale");
}

// ---------------------------------------------------------------------------
// measure

struct MeasureArgs {
    CommonOpts common;
    std::string table_spec;
    double p0 = -1.0, p1 = -1.0;
    bool p0_given = false, p1_given = false;
    std::string scales = "rr,sr,rd,or,rrr,rsr,switch,grrr";
    double level = 0.95;
};

int run_measure(const MeasureArgs& a) {
    std::optional<TwoByTwoTable> table;
    RiskPair rp;
    if (!a.table_spec.empty()) {
        if (a.p0_given || a.p1_given) {
            throw std::invalid_argument("give either --table or --p0/--p1, not both");
        }
        table = load_table(a.table_spec);
        rp = estimate_risks(*table);
    } else if (a.p0_given && a.p1_given) {
        rp = {a.p0, a.p1};
        detail::check_risk_pair(rp);
    } else {
        throw std::invalid_argument("need --table or both --p0 and --p1");
    }

    std::vector<Scale> scales;
    {
        std::stringstream ss(a.scales);
        std::string id;
        while (std::getline(ss, id, ',')) {
            const auto s = parse_scale(id);
            if (!s) throw std::invalid_argument("unknown scale id: \"" + id + "\"");
            scales.push_back(*s);
        }
        if (scales.empty()) throw std::invalid_argument("--scales: empty list");
    }

    ordered_json out;
    out["p0"] = rp.p0;
    out["p1"] = rp.p1;
    if (table) out["table"] = io::table_to_json(*table);
    ordered_json entries = ordered_json::array();

    std::string csv = "scale,value,selected,ci_low,ci_high,ci_level,reason\n";
    int computed = 0;
    for (Scale s : scales) {
        ordered_json e;
        e["scale"] = scale_id(s);
        std::string cells[6];  // value, selected, ci_low, ci_high, ci_level, reason
        try {
            const MeasureValue m = compute_measure(s, rp);
            ++computed;
            e["value"] = m.value;
            cells[0] = fmt(a.common, m.value);
            if (m.selected) {
                e["selected"] = scale_id(*m.selected);
                cells[1] = scale_id(*m.selected);
            }
        } catch (const Error& err) {
            e["value"] = nullptr;
            e["reason"] = errc_name(err.code());
            cells[5] = errc_name(err.code());
        }
        if (table && (s == Scale::risk_ratio || s == Scale::survival_ratio ||
                      s == Scale::odds_ratio)) {
            try {
                const ConfidenceInterval ci = wald_ci(*table, s, a.level);
                e["ci_low"] = ci.low;
                e["ci_high"] = ci.high;
                e["ci_level"] = ci.level;
                cells[2] = fmt(a.common, ci.low);
                cells[3] = fmt(a.common, ci.high);
                cells[4] = fmt(a.common, ci.level);
            } catch (const Error& err) {
                e["ci_reason"] = errc_name(err.code());
            }
        }
        entries.push_back(e);
        csv += std::string(scale_id(s)) + ',' + cells[0] + ',' + cells[1] + ',' + cells[2] +
               ',' + cells[3] + ',' + cells[4] + ',' + cells[5] + '\n';
    }
    out["measures"] = entries;

    emit(a.common, a.common.format == "json" ? render(out) : csv);
    return computed == 0 ? 2 : 0;
}

// ---------------------------------------------------------------------------
// transport

struct TransportArgs {
    CommonOpts common;
    double p0 = 0.0;
    std::string scale;
    double value = 0.0;
    std::string selected;
};

int run_transport(const TransportArgs& a) {
    const auto scale = parse_scale(a.scale);
    if (!scale) throw std::invalid_argument("unknown scale id: \"" + a.scale + "\"");
    MeasureValue m{*scale, a.value, std::nullopt};
    if (*scale == Scale::switch_selected) {
        const auto sel = parse_scale(a.selected);
        if (!sel || (*sel != Scale::risk_ratio && *sel != Scale::survival_ratio)) {
            throw std::invalid_argument("switch transport needs --selected rr or --selected sr");
        }
        m.selected = *sel;
    } else if (!a.selected.empty()) {
        throw std::invalid_argument("--selected applies to the switch scale only");
    }

    ordered_json out;
    out["p0"] = a.p0;
    out["scale"] = scale_id(*scale);
    out["value"] = a.value;
    if (m.selected) out["selected"] = scale_id(*m.selected);

    int code = 0;
    std::string p1_cell, error_cell, implied_cell;
    try {
        const double p1 = apply_measure(a.p0, m);
        out["p1"] = p1;
        p1_cell = fmt(a.common, p1);
    } catch (const NotClosedError& err) {
        out["p1"] = nullptr;
        out["error"] = errc_name(err.code());
        out["implied"] = err.implied();
        out["message"] = err.what();
        error_cell = errc_name(err.code());
        implied_cell = fmt(a.common, err.implied());
        code = 2;
    } catch (const Error& err) {
        out["p1"] = nullptr;
        out["error"] = errc_name(err.code());
        out["message"] = err.what();
        error_cell = errc_name(err.code());
        code = 2;
    }

    if (a.common.format == "json") {
        emit(a.common, render(out));
    } else {
        std::string csv = "p0,scale,value,selected,p1,error,implied\n";
        csv += fmt(a.common, a.p0) + ',' + std::string(scale_id(*scale)) + ',' +
               fmt(a.common, a.value) + ',' + (m.selected ? std::string(scale_id(*m.selected)) : "") +
               ',' + p1_cell + ',' + error_cell + ',' + implied_cell + '\n';
        emit(a.common, csv);
    }
    return code;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    CommonOpts common;
    std::string pattern;
    double q = 0.0, r = 0.0;
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double treat_probability = 0.5;
};

int run_simulate(const SimulateArgs& a) {
    const auto pattern = parse_switch_pattern(a.pattern);
    if (!pattern) throw std::invalid_argument("unknown pattern: \"" + a.pattern + "\"");
    if (!a.seed_given) throw std::invalid_argument("simulate requires --seed");

    const SwitchModel model{*pattern, a.q, a.r};
    const SimulatedCohort cohort = simulate_cohort(model, a.n, a.seed);
    const TwoByTwoTable t = observed_table(cohort, a.treat_probability, a.seed);
    const RiskPair exact = exact_risks(model);

    ordered_json out;
    out["pattern"] = switch_pattern_id(*pattern);
    out["q"] = a.q;
    out["r"] = a.r;
    out["n"] = a.n;
    out["seed"] = a.seed;
    out["treat_probability"] = a.treat_probability;
    out["counts"] = {{"doomed", cohort.counts.n_doomed},
                     {"causal", cohort.counts.n_causal},
                     {"preventive", cohort.counts.n_preventive},
                     {"immune", cohort.counts.n_immune}};
    out["table"] = io::table_to_json(t);
    out["exact"] = {{"p0", exact.p0}, {"p1", exact.p1}};
    std::string emp_p0, emp_p1;
    try {
        const RiskPair emp = estimate_risks(t);
        out["empirical"] = {{"p0", emp.p0}, {"p1", emp.p1}};
        emp_p0 = fmt(a.common, emp.p0);
        emp_p1 = fmt(a.common, emp.p1);
    } catch (const Error& err) {
        out["empirical"] = nullptr;
        out["empirical_reason"] = errc_name(err.code());
    }

    if (a.common.format == "json") {
        emit(a.common, render(out));
    } else {
        emit_kv_csv(a.common,
                    {{"pattern", std::string(switch_pattern_id(*pattern))},
                     {"q", fmt(a.common, a.q)},
                     {"r", fmt(a.common, a.r)},
                     {"n", std::to_string(a.n)},
                     {"seed", std::to_string(a.seed)},
                     {"treat_probability", fmt(a.common, a.treat_probability)},
                     {"doomed", std::to_string(cohort.counts.n_doomed)},
                     {"causal", std::to_string(cohort.counts.n_causal)},
                     {"preventive", std::to_string(cohort.counts.n_preventive)},
                     {"immune", std::to_string(cohort.counts.n_immune)},
                     {"a1_y1", std::to_string(t.a1_y1)},
                     {"a1_y0", std::to_string(t.a1_y0)},
                     {"a0_y1", std::to_string(t.a0_y1)},
                     {"a0_y0", std::to_string(t.a0_y0)},
                     {"exact_p0", fmt(a.common, exact.p0)},
                     {"exact_p1", fmt(a.common, exact.p1)},
                     {"empirical_p0", emp_p0},
                     {"empirical_p1", emp_p1}});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    CommonOpts common;
    std::string pattern;
    double q = 0.0;
    std::string baseline_risks;
};

int run_sweep(const SweepArgs& a) {
    const auto pattern = parse_switch_pattern(a.pattern);
    if (!pattern) throw std::invalid_argument("unknown pattern: \"" + a.pattern + "\"");
    const std::vector<double> risks = parse_double_list(a.baseline_risks, "--baseline-risks");
    const std::vector<SweepRow> rows = stability_sweep(*pattern, a.q, risks);
    if (a.common.format == "json") {
        emit(a.common, render(io::sweep_json(rows)));
    } else {
        emit(a.common, io::sweep_csv(rows, a.common.precision));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    CommonOpts common;
    std::string data_path;
    std::string link = "auto";
};

int run_fit(const FitArgs& a) {
    const RegressionDataset d = io::read_regression_csv_file(a.data_path);
    FitResult fit;
    if (a.link == "log") {
        fit = fit_log_binomial(d, ReferenceLevel::outcome);
    } else if (a.link == "complement") {
        fit = fit_log_binomial(d, ReferenceLevel::complement);
    } else {
        fit = auto_link(d);
    }

    const bool on_outcome = fit.reference_level == ReferenceLevel::outcome;
    const double effect = std::exp(fit.coefficients[1]);
    const std::string scale_label = on_outcome ? "adjusted RR" : "adjusted SR";

    ordered_json out;
    out["link"] = a.link;
    out["reference_level"] = on_outcome ? "outcome" : "complement";
    out["scale"] = scale_label;
    out["exposure_effect"] = effect;
    ordered_json coefs = ordered_json::array();
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
        coefs.push_back({{"name", fit.coefficient_names[i]},
                         {"estimate", fit.coefficients[i]},
                         {"std_error", fit.std_errors[i]}});
    }
    out["coefficients"] = coefs;
    out["loglik"] = fit.loglik;
    out["converged"] = fit.converged;
    out["iterations"] = fit.iterations;
    out["max_fitted_probability"] = fit.max_fitted_probability;
    if (!fit.converged) out["error"] = errc_name(errc::not_converged);

    if (a.common.format == "json") {
        emit(a.common, render(out));
    } else {
        std::vector<std::pair<std::string, std::string>> kv{
            {"link", a.link},
            {"reference_level", on_outcome ? "outcome" : "complement"},
            {"scale", scale_label},
            {"exposure_effect", fmt(a.common, effect)},
        };
        for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
            kv.emplace_back("coef_" + fit.coefficient_names[i], fmt(a.common, fit.coefficients[i]));
            kv.emplace_back("se_" + fit.coefficient_names[i], fmt(a.common, fit.std_errors[i]));
        }
        kv.emplace_back("loglik", fmt(a.common, fit.loglik));
        kv.emplace_back("converged", fit.converged ? "true" : "false");
        kv.emplace_back("iterations", std::to_string(fit.iterations));
        kv.emplace_back("max_fitted_probability", fmt(a.common, fit.max_fitted_probability));
        emit_kv_csv(a.common, kv);
    }
    return fit.converged ? 0 : 2;
}

// ---------------------------------------------------------------------------
// interpret

struct InterpretArgs {
    CommonOpts common;
    std::string table_spec;
    double p0 = 0.0, p1 = 0.0;
    bool p0_given = false, p1_given = false;
    std::string direction;
};

int run_interpret(const InterpretArgs& a) {
    RiskPair rp;
    if (!a.table_spec.empty()) {
        if (a.p0_given || a.p1_given) {
            throw std::invalid_argument("give either --table or --p0/--p1, not both");
        }
        rp = estimate_risks(load_table(a.table_spec));
    } else if (a.p0_given && a.p1_given) {
        rp = {a.p0, a.p1};
        detail::check_risk_pair(rp);
    } else {
        throw std::invalid_argument("need --table or both --p0 and --p1");
    }

    const bool benefit = a.direction == "benefit";
    ordered_json out;
    out["direction"] = a.direction;
    out["p0"] = rp.p0;
    out["p1"] = rp.p1;

    if (benefit ? rp.p1 > rp.p0 : rp.p1 < rp.p0) {
        const std::string msg = benefit
                                    ? "risk increases under treatment; --direction benefit "
                                      "contradicts the data"
                                    : "risk decreases under treatment; --direction harm "
                                      "contradicts the data";
        out["value"] = nullptr;
        out["error"] = "DirectionContradiction";
        out["message"] = msg;
        emit(a.common, a.common.format == "json"
                           ? render(out)
                           : "key,value\nerror,DirectionContradiction\nmessage," + msg + "\n");
        return 2;
    }

    const MeasureValue m = benefit ? relative_risk_reduction(rp) : relative_survival_reduction(rp);
    const std::string interpretation =
        benefit ? "proportion prevented among those who would get the outcome if untreated"
                : "proportion harmed among those who would survive untreated";
    const std::string caveat =
        benefit ? "assumes treatment causes the outcome in no one (no-causation monotonicity)"
                : "assumes treatment prevents the outcome in no one (no-prevention monotonicity)";
    out["value"] = m.value;
    out["interpretation"] = interpretation;
    out["caveat"] = caveat;

    if (a.common.format == "json") {
        emit(a.common, render(out));
    } else {
        emit_kv_csv(a.common, {{"direction", a.direction},
                               {"p0", fmt(a.common, rp.p0)},
                               {"p1", fmt(a.common, rp.p1)},
                               {"value", fmt(a.common, m.value)},
                               {"interpretation", interpretation},
                               {"caveat", caveat}});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Effect-measure toolkit for risks, switch mechanisms, and log-binomial fits"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--output", common.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", common.out_path, "Write output to this file instead of stdout");
    app.add_option("--precision", common.precision, "Decimal places in CSV output")
        ->check(CLI::Range(0, 17))
        ->capture_default_str();

    MeasureArgs measure_args;
    CLI::App* measure = app.add_subcommand("measure", "Effect measures from a table or risk pair");
    measure->fallthrough();
    measure->add_option("--table", measure_args.table_spec, "2x2 table: inline JSON or a file path");
    measure->add_option("--p0", measure_args.p0, "Untreated risk")
        ->each([&](const std::string&) { measure_args.p0_given = true; });
    measure->add_option("--p1", measure_args.p1, "Treated risk")
        ->each([&](const std::string&) { measure_args.p1_given = true; });
    measure->add_option("--scales", measure_args.scales, "Comma-separated scale ids")
        ->capture_default_str();
    measure->add_option("--level", measure_args.level, "Confidence level for intervals")
        ->capture_default_str();

    TransportArgs transport_args;
    CLI::App* transport =
        app.add_subcommand("transport", "Predict the treated risk at a new baseline");
    transport->fallthrough();
    transport->add_option("--p0", transport_args.p0, "Baseline risk")->required();
    transport->add_option("--scale", transport_args.scale, "Scale id of the carried value")
        ->required();
    transport->add_option("--value", transport_args.value, "Measure value to invert")->required();
    transport->add_option("--selected", transport_args.selected,
                          "Ratio picked by the switch rule (rr|sr), for --scale switch");

    SimulateArgs simulate_args;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Simulate a switch-mechanism cohort and a randomized 2x2");
    simulate->fallthrough();
    simulate->add_option("--pattern", simulate_args.pattern, "Switch mechanism")->required();
    simulate->add_option("--q", simulate_args.q, "Switch prevalence")->required();
    simulate->add_option("--r", simulate_args.r, "Background risk")->required();
    simulate->add_option("--n", simulate_args.n, "Cohort size")->required();
    simulate->add_option("--seed", simulate_args.seed, "Master seed")
        ->each([&](const std::string&) { simulate_args.seed_given = true; });
    simulate->add_option("--treat-probability", simulate_args.treat_probability,
                         "Randomization probability")
        ->capture_default_str();

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "Measure stability across baseline risks");
    sweep->fallthrough();
    sweep->add_option("--pattern", sweep_args.pattern, "Switch mechanism")->required();
    sweep->add_option("--q", sweep_args.q, "Switch prevalence")->required();
    sweep->add_option("--baseline-risks", sweep_args.baseline_risks,
                      "Comma-separated background risks")
        ->required();

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "Log-binomial regression from individual-level CSV");
    fit->fallthrough();
    fit->add_option("--data", fit_args.data_path, "CSV file with header a,y[,covariates]")
        ->required();
    fit->add_option("--link", fit_args.link, "auto, log, or complement")
        ->check(CLI::IsMember({"auto", "log", "complement"}))
        ->capture_default_str();

    InterpretArgs interpret_args;
    CLI::App* interpret =
        app.add_subcommand("interpret", "Read a relative reduction as a response-type fraction");
    interpret->fallthrough();
    interpret->add_option("--table", interpret_args.table_spec,
                          "2x2 table: inline JSON or a file path");
    interpret->add_option("--p0", interpret_args.p0, "Untreated risk")
        ->each([&](const std::string&) { interpret_args.p0_given = true; });
    interpret->add_option("--p1", interpret_args.p1, "Treated risk")
        ->each([&](const std::string&) { interpret_args.p1_given = true; });
    interpret->add_option("--direction", interpret_args.direction, "benefit or harm")
        ->check(CLI::IsMember({"benefit", "harm"}))
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        measure_args.common = common;
        transport_args.common = common;
        simulate_args.common = common;
        sweep_args.common = common;
        fit_args.common = common;
        interpret_args.common = common;
        if (measure->parsed()) return run_measure(measure_args);
        if (transport->parsed()) return run_transport(transport_args);
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
        if (fit->parsed()) return run_fit(fit_args);
        if (interpret->parsed()) return run_interpret(interpret_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: invalid JSON: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
