// Batch front end: every subcommand runs one library operation and emits a
// small table, CSV (default) or JSON, to stdout or --out. Output is
// deterministic: fixed column order, fixed flag echo, 17-significant-digit
// reals in CSV, no timestamps. Exit codes: 0 ok, 2 usage, 3 precondition /
// search exhausted, 4 invariant violation (with a context dump on stderr --
// a 4 means the run produced a counterexample to something the library
// promises, which is exactly the event worth a loud exit).

#include "qrkit/arithmetic.hpp"
#include "qrkit/errors.hpp"
#include "qrkit/pell.hpp"
#include "qrkit/quadform.hpp"
#include "qrkit/series.hpp"
#include "qrkit/ternary.hpp"
#include "qrkit/witness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
using namespace qrkit;

namespace {

constexpr const char* kTool = "qrkit";
constexpr const char* kVersion = "0.1.0";

std::string fmt_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// One result table. Rows hold typed json values so the JSON writer keeps
// numbers as numbers; the CSV writer formats them itself.
struct Table {
    std::vector<std::string> columns;
    std::vector<json> rows;   // objects keyed by column name
    json extras = json::object(); // scalar results that aren't rows
};

std::string csv_cell(const json& v)
{
    std::string s;
    if (v.is_null())
        return "";
    else if (v.is_string())
        s = v.get<std::string>();
    else if (v.is_boolean())
        return v.get<bool>() ? "1" : "0";
    else if (v.is_number_float())
        return fmt_real(v.get<double>());
    else
        return v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    out += '"';
    return out;
}

void write_csv(std::ostream& os, const std::string& echo, const Table& t)
{
    os << "# " << kTool << " " << kVersion << "\n";
    os << "# " << echo << "\n";
    for (auto it = t.extras.begin(); it != t.extras.end(); ++it)
        os << "# " << it.key() << " " << csv_cell(it.value()) << "\n";
    for (size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < t.columns.size(); ++i)
            os << (i ? "," : "") << csv_cell(row.at(t.columns[i]));
        os << "\n";
    }
}

void write_json(std::ostream& os, const std::string& command, const std::string& echo,
                const Table& t)
{
    json root;
    root["schema"] = 1;
    root["tool"] = kTool;
    root["version"] = kVersion;
    root["command"] = command;
    root["config"] = echo;
    for (auto it = t.extras.begin(); it != t.extras.end(); ++it)
        root[it.key()] = it.value();
    root["columns"] = t.columns;
    root["rows"] = t.rows;
    os << root.dump(2) << "\n";
}

void error_record(const char* kind, const std::string& message)
{
    json rec{{"schema", 1}, {"error", kind}, {"message", message}};
    std::cerr << rec.dump() << "\n";
}

json row_of(const std::vector<std::string>& cols, std::initializer_list<json> vals)
{
    json r = json::object();
    size_t i = 0;
    for (const auto& v : vals)
        r[cols[i++]] = v;
    return r;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"number theory toolkit: symbols, Pell, forms, series, sieves"};
    app.require_subcommand(1);

    std::string format = "csv";
    std::string out_path;
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", out_path, "write to this file instead of stdout");

    // every value a subcommand might take; each subcommand binds the subset
    // it owns (the flag vocabulary is shared across subcommands on purpose)
    int64_t opt_d = 0, opt_D = 0;
    int64_t t_a = 0, t_b = 0, t_beta = 0; // ternary coefficients (signed)
    uint64_t opt_a = 0, opt_b = 0, opt_beta = 0;
    uint64_t opt_x = 0, opt_limit = 0;
    int64_t opt_m = 0;
    double opt_s = 2.0, opt_target = 1.0;
    uint64_t lattice_cutoff = 1000, prime_cutoff = 1000, n_cutoff = 1000;
    std::vector<double> eps_schedule;
    std::string series_check;

    auto* c_symbol = app.add_subcommand("symbol", "Jacobi/Legendre symbol (a/beta)");
    c_symbol->add_option("--a", opt_d, "numerator, any integer")->required();
    c_symbol->add_option("--beta", opt_beta, "odd modulus > 0")->required();

    auto* c_pell = app.add_subcommand("pell", "fundamental solution of T^2 - D U^2 = 1");
    c_pell->add_option("--D", opt_x, "nonsquare D > 1")->required();

    auto* c_cases = app.add_subcommand(
        "pell-cases", "two-prime case split, or the six-equation solver with --a");
    c_cases->add_option("--a", opt_a, "prime = 1 (mod 4) (six-equation mode)");
    c_cases->add_option("--b", opt_b, "prime = 3 (mod 4)")->required();
    c_cases->add_option("--beta", opt_beta, "prime = 3 (mod 4), distinct from --b")->required();

    auto* c_classnum = app.add_subcommand("classnum", "class number and representatives");
    c_classnum->add_option("--d", opt_d, "discriminant, 0 or 1 (mod 4), not a square")
        ->required();

    auto* c_repr = app.add_subcommand("represent",
                                      "proper representations of --x across all classes");
    c_repr->add_option("--d", opt_d, "discriminant")->required();
    c_repr->add_option("--x", opt_m, "value to represent")->required();

    auto* c_ternary = app.add_subcommand("ternary",
                                         "solvability of a x^2 + b y^2 + c z^2 = 0 (c = --beta)");
    c_ternary->add_option("--a", t_a, "coefficient a")->required();
    c_ternary->add_option("--b", t_b, "coefficient b")->required();
    c_ternary->add_option("--beta", t_beta, "coefficient c")->required();

    auto* c_verify = app.add_subcommand("verify-qr", "eight-case reciprocity sweep");
    c_verify->add_option("--limit", opt_limit, "sweep odd primes below this")
        ->default_val(1000);

    auto* c_series = app.add_subcommand("series", "zeta/L-series identity checks");
    c_series->add_option("--check", series_check, "which identity")
        ->check(CLI::IsMember({"euler", "fundamental", "classnum", "teege", "diverge"}))
        ->required();
    c_series->add_option("--d", opt_d, "discriminant (fundamental, classnum)");
    c_series->add_option("--D", opt_D, "symbol numerator (euler)");
    c_series->add_option("--a", opt_a, "prime = 1 (mod 4) (teege)");
    c_series->add_option("--s", opt_s, "series exponent > 1")->capture_default_str();
    c_series->add_option("--x", opt_target, "target the product must exceed (diverge)");
    c_series->add_option("--lattice-cutoff", lattice_cutoff, "lattice sum cutoff")
        ->capture_default_str();
    c_series->add_option("--prime-cutoff", prime_cutoff, "prime product cutoff")
        ->capture_default_str();
    c_series->add_option("--n-cutoff", n_cutoff, "n-series cutoff")->capture_default_str();
    c_series->add_option("--eps-schedule", eps_schedule, "s = 1 + eps evaluation points")
        ->delimiter(',');

    auto* c_witness = app.add_subcommand("witness", "smallest nonresidue witness for --a");
    c_witness->add_option("--a", opt_a, "prime = 1 (mod 4)")->required();
    c_witness->add_option("--limit", opt_limit, "search ceiling")->default_val(1000000);

    auto* c_descent = app.add_subcommand("descent", "x^2 + p = B b' descent from B_start");
    c_descent->add_option("--a", opt_a, "prime p = 1 (mod 8)")->required();
    c_descent->add_option("--beta", opt_beta, "admissible start B_start")->required();

    auto* c_rogers = app.add_subcommand("rogers", "four-way ln p / p partition at x");
    c_rogers->add_option("--D", opt_D, "nonzero D, not a positive square")->required();
    c_rogers->add_option("--x", opt_x, "sieve bound")->required();

    auto* c_mertens = app.add_subcommand("mertens", "sum of ln p / p against ln x");
    c_mertens->add_option("--x", opt_x, "sieve bound")->required();

    // --format / --out live on the parent; let them appear after the
    // subcommand too
    for (auto* sub : {c_symbol, c_pell, c_cases, c_classnum, c_repr, c_ternary, c_verify,
                      c_series, c_witness, c_descent, c_rogers, c_mertens})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_record("usage", e.what());
        return 2;
    }

    // canonical config echo: subcommand then its flags in declaration order
    std::string command, echo;
    auto echo_flag = [&](const CLI::App* sub, const char* name, const std::string& rendered) {
        if (sub->count(name))
            echo += std::string(" ") + name + " " + rendered;
    };

    Table table;
    try {
        if (app.got_subcommand(c_symbol)) {
            command = "symbol";
            echo_flag(c_symbol, "--a", std::to_string(opt_d));
            echo_flag(c_symbol, "--beta", std::to_string(opt_beta));
            int sym = arithmetic::jacobi_symbol(opt_d, opt_beta);
            table.columns = {"a", "beta", "symbol"};
            table.rows.push_back(row_of(table.columns, {opt_d, opt_beta, sym}));
        } else if (app.got_subcommand(c_pell)) {
            command = "pell";
            echo_flag(c_pell, "--D", std::to_string(opt_x));
            auto sol = pell::fundamental_pell(opt_x);
            table.columns = {"D", "T", "U"};
            table.rows.push_back(row_of(table.columns, {opt_x, sol.T.str(), sol.U.str()}));
        } else if (app.got_subcommand(c_cases)) {
            command = "pell-cases";
            echo_flag(c_cases, "--a", std::to_string(opt_a));
            echo_flag(c_cases, "--b", std::to_string(opt_b));
            echo_flag(c_cases, "--beta", std::to_string(opt_beta));
            if (c_cases->count("--a")) {
                auto r = pell::solve_six_equations(opt_a, opt_b, opt_beta);
                auto [u, v] = r.coefficients();
                table.columns = {"a", "b", "beta", "u", "v", "sign", "M", "N", "method",
                                 "equation"};
                table.rows.push_back(row_of(
                    table.columns,
                    {r.a, r.b, r.beta, u, v, r.sign, r.M.str(), r.N.str(),
                     r.method == pell::SixMethod::bounded_search ? "bounded-search"
                                                                 : "pell-split",
                     r.equation()}));
            } else {
                auto r = pell::classify_two_prime_case(opt_b, opt_beta);
                table.columns = {"b", "B", "leading", "M", "N", "equation"};
                table.rows.push_back(row_of(
                    table.columns,
                    {r.b, r.B,
                     r.which == pell::TwoPrimeCase::first_prime_leads ? r.b : r.B,
                     r.M.str(), r.N.str(), r.equation()}));
            }
        } else if (app.got_subcommand(c_classnum)) {
            command = "classnum";
            echo_flag(c_classnum, "--d", std::to_string(opt_d));
            auto cs = quadform::class_number(opt_d);
            std::string reps;
            for (const auto& q : cs.representatives)
                reps += (reps.empty() ? "" : ";") + q.str();
            table.columns = {"d", "h", "representatives"};
            table.rows.push_back(row_of(table.columns, {opt_d, cs.h(), reps}));
        } else if (app.got_subcommand(c_repr)) {
            command = "represent";
            echo_flag(c_repr, "--d", std::to_string(opt_d));
            echo_flag(c_repr, "--x", std::to_string(opt_m));
            auto cs = quadform::class_number(opt_d);
            quadform::ReprDomain domain{};
            if (opt_d > 0) {
                if (!cs.disc.determinant)
                    throw UsageError("represent needs 4 | d when d > 0 (automorph domain)");
                domain = quadform::AutomorphDomain{
                    pell::fundamental_pell((uint64_t)*cs.disc.determinant)};
            }
            table.columns = {"form", "x", "y"};
            for (const auto& rep : cs.representatives)
                for (auto [x, y] : quadform::proper_representations(rep, opt_m, domain))
                    table.rows.push_back(row_of(table.columns, {rep.str(), x, y}));
            table.extras["count"] = table.rows.size();
        } else if (app.got_subcommand(c_ternary)) {
            command = "ternary";
            echo_flag(c_ternary, "--a", std::to_string(t_a));
            echo_flag(c_ternary, "--b", std::to_string(t_b));
            echo_flag(c_ternary, "--beta", std::to_string(t_beta));
            ternary::TernaryForm f{t_a, t_b, t_beta};
            auto conds = ternary::ternary_conditions(f);
            auto wit = ternary::ternary_solve(f);
            if (conds.all_hold() != wit.has_value())
                throw InvariantViolation("conditions and bounded search disagree on " +
                                         std::to_string(t_a) + "," + std::to_string(t_b) + "," +
                                         std::to_string(t_beta));
            table.columns = {"a", "b", "c", "residue_a", "residue_b", "residue_c",
                             "sign_condition", "solvable", "x", "y", "z"};
            json x = nullptr, y = nullptr, z = nullptr;
            if (wit) {
                x = (*wit)[0];
                y = (*wit)[1];
                z = (*wit)[2];
            }
            table.rows.push_back(row_of(table.columns, {t_a, t_b, t_beta, conds.residue_a,
                                                        conds.residue_b, conds.residue_c,
                                                        conds.sign_condition, wit.has_value(),
                                                        x, y, z}));
        } else if (app.got_subcommand(c_verify)) {
            command = "verify-qr";
            echo_flag(c_verify, "--limit", std::to_string(opt_limit));
            auto rep = ternary::verify_reciprocity_cases(opt_limit);
            if (!rep.violations.empty()) {
                std::string dump = "reciprocity violated for pairs:";
                for (const auto& v : rep.violations)
                    dump += " (" + std::to_string(v.p) + "," + std::to_string(v.q) + ") case " +
                            std::to_string(v.case_index + 1);
                throw InvariantViolation(dump);
            }
            table.extras["prime_count"] = rep.prime_count;
            table.extras["pair_count"] = rep.pair_count;
            table.columns = {"case", "count"};
            for (int i = 0; i < 8; ++i)
                table.rows.push_back(row_of(table.columns, {i + 1, rep.case_counts[i]}));
        } else if (app.got_subcommand(c_series)) {
            command = "series";
            echo_flag(c_series, "--check", series_check);
            echo_flag(c_series, "--d", std::to_string(opt_d));
            echo_flag(c_series, "--D", std::to_string(opt_D));
            echo_flag(c_series, "--a", std::to_string(opt_a));
            echo_flag(c_series, "--s", fmt_real(opt_s));
            echo_flag(c_series, "--x", fmt_real(opt_target));
            echo_flag(c_series, "--lattice-cutoff", std::to_string(lattice_cutoff));
            echo_flag(c_series, "--prime-cutoff", std::to_string(prime_cutoff));
            echo_flag(c_series, "--n-cutoff", std::to_string(n_cutoff));
            if (c_series->count("--eps-schedule")) {
                std::string es;
                for (double e : eps_schedule)
                    es += (es.empty() ? "" : ",") + fmt_real(e);
                echo += " --eps-schedule " + es;
            }
            series::SeriesParams params{opt_s, lattice_cutoff, prime_cutoff, n_cutoff};
            auto schedule = eps_schedule.empty() ? series::default_eps_schedule() : eps_schedule;
            table.columns = {"d", "s", "lattice_cutoff", "prime_cutoff", "n_cutoff",
                             "lhs", "rhs", "residual"};
            auto push = [&](json d, double s, uint64_t M, uint64_t P, uint64_t N, double lhs,
                            double rhs, double residual) {
                table.rows.push_back(
                    row_of(table.columns, {d, s, M, P, N, lhs, rhs, residual}));
            };
            if (series_check == "euler") {
                if (!c_series->count("--D"))
                    throw UsageError("series --check euler needs --D");
                auto r = series::dirichlet_series_expansion_check(opt_D, params);
                push(opt_D, params.s, params.lattice_cutoff, params.prime_cutoff,
                     params.n_cutoff, r.sum_side, r.product_side, r.residual);
            } else if (series_check == "fundamental") {
                if (!c_series->count("--d"))
                    throw UsageError("series --check fundamental needs --d");
                auto r = series::fundamental_identity_check(quadform::make_discriminant(opt_d),
                                                            params);
                push(opt_d, params.s, params.lattice_cutoff, params.prime_cutoff,
                     params.n_cutoff, r.lhs, r.rhs, r.residual);
            } else if (series_check == "classnum") {
                if (!c_series->count("--d"))
                    throw UsageError("series --check classnum needs --d");
                auto r = series::class_number_formula_check(quadform::make_discriminant(opt_d),
                                                            schedule);
                for (size_t i = 0; i < r.eps.size(); ++i)
                    push(opt_d, 1.0 + r.eps[i], 0, 0, 0, r.scaled[i], r.closed_form,
                         std::abs(r.scaled[i] - r.closed_form) / r.closed_form);
                push(opt_d, 1.0, 0, 0, 0, r.extrapolated, r.closed_form,
                     r.relative_deviation);
                table.extras["monotone"] = r.monotone;
            } else if (series_check == "teege") {
                if (!c_series->count("--a"))
                    throw UsageError("series --check teege needs --a");
                auto r = series::teege_identity_check(opt_a, params);
                for (size_t i = 0; i < r.eps.size(); ++i)
                    push((int64_t)opt_a, 1.0 + r.eps[i], params.lattice_cutoff,
                         params.prime_cutoff, params.n_cutoff, r.lhs, r.rhs[i],
                         r.deviation[i]);
                push((int64_t)opt_a, 1.0, params.lattice_cutoff, params.prime_cutoff,
                     params.n_cutoff, r.lhs, r.rhs_extrapolated,
                     std::abs(r.rhs_extrapolated - r.lhs));
                table.extras["deviation_decreasing"] = r.deviation_decreasing;
            } else { // diverge
                auto r = series::divergence_witness(opt_target);
                if (!r.complete)
                    throw SearchExhausted("product still below target at the prime ceiling");
                // prime_cutoff column carries P*, the reported crossing point
                push(0, 1.0, 0, r.p_star, 0, r.half_product, opt_target,
                     r.half_product - opt_target);
                table.extras["half_minorant"] = r.half_minorant;
                std::string lead;
                for (uint64_t q : r.leading_primes)
                    lead += (lead.empty() ? "" : ";") + std::to_string(q);
                table.extras["leading_primes"] = lead;
            }
        } else if (app.got_subcommand(c_witness)) {
            command = "witness";
            echo_flag(c_witness, "--a", std::to_string(opt_a));
            echo_flag(c_witness, "--limit", std::to_string(opt_limit));
            auto w = witness::find_witness(opt_a, opt_limit);
            table.columns = {"a", "beta", "method"};
            table.rows.push_back(
                row_of(table.columns, {w.a, w.beta, witness::method_name(w.method)}));
        } else if (app.got_subcommand(c_descent)) {
            command = "descent";
            echo_flag(c_descent, "--a", std::to_string(opt_a));
            echo_flag(c_descent, "--beta", std::to_string(opt_beta));
            auto chain = witness::teege_descent(opt_a, opt_beta);
            table.columns = {"x", "B", "b_prime"};
            for (const auto& s : chain.steps)
                table.rows.push_back(row_of(table.columns, {s.x, s.B, s.b_prime}));
            table.extras["p"] = chain.p;
            table.extras["terminal"] = chain.terminal;
        } else if (app.got_subcommand(c_rogers)) {
            command = "rogers";
            echo_flag(c_rogers, "--D", std::to_string(opt_D));
            echo_flag(c_rogers, "--x", std::to_string(opt_x));
            auto r = witness::rogers_partition(opt_D, opt_x);
            table.columns = {"x", "s1+", "s1-", "s3+", "s3-", "quarter_ln_x"};
            table.rows.push_back(row_of(table.columns, {r.x, r.s1_plus, r.s1_minus, r.s3_plus,
                                                        r.s3_minus, r.quarter_ln_x}));
        } else if (app.got_subcommand(c_mertens)) {
            command = "mertens";
            echo_flag(c_mertens, "--x", std::to_string(opt_x));
            auto r = witness::mertens_sum(opt_x);
            table.columns = {"x", "sum", "ln_x", "deviation", "terms"};
            table.rows.push_back(
                row_of(table.columns, {opt_x, r.value, r.reference, r.deviation, r.terms}));
        }
    } catch (const UsageError& e) {
        error_record("usage", e.what());
        return 2;
    } catch (const PreconditionError& e) {
        error_record("precondition", e.what());
        return 3;
    } catch (const SearchExhausted& e) {
        error_record("search-exhausted", e.what());
        return 3;
    } catch (const InvariantViolation& e) {
        error_record("invariant", e.what());
        return 4;
    }

    echo = command + echo + " --format " + format;

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) {
            error_record("usage", "cannot open --out path " + out_path);
            return 2;
        }
    }
    std::ostream& os = out_path.empty() ? std::cout : file;
    if (format == "csv")
        write_csv(os, echo, table);
    else
        write_json(os, command, echo, table);
    return 0;
}
