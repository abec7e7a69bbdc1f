#include "lshmodel/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <variant>

#include "lshmodel/errors.hpp"
#include "lshmodel/geometry.hpp"
#include "lshmodel/grid_lsh.hpp"
#include "lshmodel/mc.hpp"
#include "lshmodel/model.hpp"
#include "lshmodel/quadrature.hpp"
#include "lshmodel/rng.hpp"

namespace lshmodel::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Tabular output in three renderings.

using Value = std::variant<std::monostate, long long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
    std::vector<std::string> notes;
};

std::string render(const Value& v, std::string_view empty) {
    struct Visitor {
        std::string_view empty;
        std::string operator()(std::monostate) const { return std::string(empty); }
        std::string operator()(long long x) const { return std::to_string(x); }
        std::string operator()(double x) const { return fmt::format("{:.12g}", x); }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{empty}, v);
}

nlohmann::ordered_json to_json(const Value& v) {
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(long long x) const { return x; }
        nlohmann::ordered_json operator()(double x) const {
            if (!std::isfinite(x))
                return nullptr;
            // Same 12 significant digits as the CSV rendering.
            return std::stod(fmt::format("{:.12g}", x));
        }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, v);
}

enum class Format { Table, Csv, Json };

void emit(const Table& t, Format format, std::ostream& out, std::ostream& err) {
    switch (format) {
    case Format::Csv: {
        for (const auto& n : t.notes)
            err << "note: " << n << '\n';
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            out << (c ? "," : "") << t.columns[c];
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << render(row[c], "");
            out << '\n';
        }
        break;
    }
    case Format::Json: {
        nlohmann::ordered_json doc;
        doc["notes"] = t.notes;
        doc["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            nlohmann::ordered_json obj;
            for (std::size_t c = 0; c < row.size(); ++c)
                obj[t.columns[c]] = to_json(row[c]);
            doc["rows"].push_back(std::move(obj));
        }
        out << doc.dump(2) << '\n';
        break;
    }
    case Format::Table: {
        for (const auto& n : t.notes)
            out << "# " << n << '\n';
        std::vector<std::size_t> width(t.columns.size());
        std::vector<std::vector<std::string>> cells;
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            width[c] = t.columns[c].size();
        for (const auto& row : t.rows) {
            auto& line = cells.emplace_back();
            for (std::size_t c = 0; c < row.size(); ++c) {
                line.push_back(render(row[c], "-"));
                width[c] = std::max(width[c], line.back().size());
            }
        }
        auto print = [&](const std::vector<std::string>& line) {
            for (std::size_t c = 0; c < line.size(); ++c)
                out << (c ? "  " : "") << fmt::format("{:>{}}", line[c], width[c]);
            out << '\n';
        };
        print(t.columns);
        for (const auto& line : cells)
            print(line);
        break;
    }
    }
}

// ---------------------------------------------------------------------------
// Shared flags.

struct IntRange {
    int first = 1;
    int last = 1;
};

IntRange parse_range(const std::string& text, const char* flag) {
    auto parse_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw UsageError(fmt::format("{}: expected an integer or range a..b, got '{}'", flag, text));
        return v;
    };
    const auto dots = text.find("..");
    IntRange r;
    if (dots == std::string::npos) {
        r.first = r.last = parse_int(text);
    } else {
        r.first = parse_int(text.substr(0, dots));
        r.last = parse_int(text.substr(dots + 2));
    }
    if (r.first > r.last)
        throw UsageError(fmt::format("{}: empty range '{}'", flag, text));
    return r;
}

struct CommonFlags {
    std::string format = "table";
    int threads = 0;
    std::optional<std::uint64_t> seed;

    Format parsed_format() const {
        if (format == "csv")
            return Format::Csv;
        if (format == "json")
            return Format::Json;
        return Format::Table;
    }

    // Machine-readable output of randomized commands must name its seed.
    std::uint64_t require_seed() const {
        if (seed)
            return *seed;
        if (parsed_format() != Format::Table)
            throw UsageError("--seed is required with --format csv or json");
        return 42;
    }
};

void add_format(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}));
}

void add_random(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--seed", flags.seed, "Base seed (required for csv/json)");
    cmd->add_option("--threads", flags.threads, "Worker threads, 0 = OpenMP default")
        ->check(CLI::NonNegativeNumber);
}

double z_score(double mean, double stderr_, double exact) {
    const double diff = std::fabs(mean - exact);
    if (stderr_ > 0.0)
        return diff / stderr_;
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
    return SplitMix64::stream(seed, purpose)();
}

constexpr std::uint64_t kDataSeed = 0;
constexpr std::uint64_t kShiftSeed = 1;
constexpr std::uint64_t kQuerySeed = 2;

const char* kTypoNote =
    "p(m,1,d) uses standard inclusion-exclusion ending in +/- C(m,m) p(1,m,d); the variant "
    "last term p(1,m-1,d) disagrees with Monte Carlo";
const char* kSelectivityNote =
    "recall = share of the true range answers retrieved (model prediction p(m,ell,d)); "
    "selectivity = share of the whole data set retrieved";

struct Grid {
    IntRange m, ell, d;
};

template <typename F>
void for_each_query(const Grid& grid, int m_cap, std::ostream& err, F&& f) {
    for (int m = grid.m.first; m <= grid.m.last; ++m)
        for (int ell = grid.ell.first; ell <= grid.ell.last; ++ell)
            for (int d = grid.d.first; d <= grid.d.last; ++d) {
                if (ell > m) {
                    err << fmt::format("notice: skipping m={} ell={} d={}: ell > m\n", m, ell, d);
                    continue;
                }
                if (m < 1 || ell < 1 || d < 1 || m > m_cap)
                    throw UsageError(fmt::format("need 1 <= ell <= m <= {} and d >= 1", m_cap));
                f(m, ell, d);
            }
}

// ---------------------------------------------------------------------------
// Subcommands.

struct GridFlags {
    std::string m = "1", ell = "1", d = "1";

    void add(CLI::App* cmd) {
        cmd->add_option("--m", m, "Tables: value or range a..b");
        cmd->add_option("--ell", ell, "Coverage multiplicity: value or range a..b");
        cmd->add_option("--d", d, "Dimensions: value or range a..b");
    }
    Grid parse() const { return {parse_range(m, "--m"), parse_range(ell, "--ell"), parse_range(d, "--d")}; }
};

int cmd_model(const GridFlags& gf, const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    Table t{{"m", "ell", "d", "model_exact", "model_float"}, {}, {kTypoNote}};
    for_each_query(gf.parse(), model::kMaxTables, err, [&](int m, int ell, int d) {
        const Rational p = model::p_at_least(m, ell, d);
        t.rows.push_back({m * 1LL, ell * 1LL, d * 1LL, to_fraction_string(p), to_double(p)});
    });
    emit(t, flags.parsed_format(), out, err);
    return kExitOk;
}

int cmd_mc(const GridFlags& gf, std::uint64_t samples, const CommonFlags& flags, std::ostream& out,
           std::ostream& err) {
    if (samples == 0)
        throw UsageError("--samples must be positive");
    const std::uint64_t seed = flags.require_seed();
    Table t{{"m", "ell", "d", "model_exact", "model_float", "mc_mean", "mc_stderr", "samples", "seed",
             "z_model_vs_mc"},
            {},
            {kTypoNote}};
    bool failed = false;
    for_each_query(gf.parse(), mc::kMaxCells, err, [&](int m, int ell, int d) {
        const Rational p = model::p_at_least(m, ell, d);
        const auto est = mc::mc_estimate_p(m, ell, d, samples, seed, flags.threads);
        const double z = z_score(est.mean, est.stderr_, to_double(p));
        failed |= !(z <= 5.0);
        t.rows.push_back({m * 1LL, ell * 1LL, d * 1LL, to_fraction_string(p), to_double(p), est.mean,
                          est.stderr_, static_cast<long long>(samples), std::to_string(seed), z});
    });
    emit(t, flags.parsed_format(), out, err);
    return failed ? kExitVerificationFailed : kExitOk;
}

int cmd_integrals(int d_max, int m_max, double tol, std::uint64_t samples, const CommonFlags& flags,
                  std::ostream& out, std::ostream& err) {
    if (!(tol > 0.0))
        throw UsageError("--tol must be positive");
    if (d_max < 1 || d_max > quad::kMaxReducedDim || m_max < 1 || m_max > quad::kMaxReducedDim)
        throw UsageError("--d-max and --m-max must be in [1, 12]");
    quad::QuadOptions options;
    options.mc_samples = samples;
    options.seed = flags.require_seed();

    Table t{{"id", "d", "m", "numeric", "tensor", "mc_mean", "mc_stderr", "printed_exact",
             "printed_float", "derived_exact", "derived_float", "lower_order_exact",
             "abs_err_numeric_vs_printed", "abs_err_numeric_vs_derived", "separation_stderr",
             "verdict"},
            {},
            {"MIN_* and COMBINED integrate the upper order statistic (density d x^(d-1)), the one "
             "that reproduces the closed forms; lower_order_exact is the smallest-coordinate "
             "reading",
             "COMBINED shows the printed form (2m+1)/(8^d (m+1) 2^(m+1)) next to the derived "
             "(2d+1)/((d+1) 2^(d+1)) (1/8)^m; a COMBINED mismatch is reported, not a failure"}};
    bool failed = false;
    for (const auto& c : quad::check_all(d_max, m_max, tol, options)) {
        if (c.id != quad::IntegralId::COMBINED && c.verdict != quad::Verdict::MATCHES_PRINTED)
            failed = true;
        Value tensor = c.tensor ? Value(*c.tensor) : Value();
        Value lower = c.lower_order_closed_form ? Value(to_fraction_string(*c.lower_order_closed_form))
                                                : Value();
        t.rows.push_back({std::string(quad::to_string(c.id)), c.d * 1LL, c.m * 1LL, c.numeric, tensor,
                          c.mc_mean, c.mc_stderr, to_fraction_string(c.printed_closed_form),
                          to_double(c.printed_closed_form), to_fraction_string(c.derived_closed_form),
                          to_double(c.derived_closed_form), lower, c.abs_err_numeric_vs_printed,
                          c.abs_err_numeric_vs_derived, c.candidate_separation,
                          std::string(quad::to_string(c.verdict))});
    }
    emit(t, flags.parsed_format(), out, err);
    return failed ? kExitVerificationFailed : kExitOk;
}

struct EmpiricalFlags {
    std::size_t n = 100'000;
    int d = 2;
    int grid = 4;
    int m = 1;
    int ell = 1;
    std::size_t queries = 1000;
    std::size_t builds = 100;
    std::string input;
};

int cmd_empirical(const EmpiricalFlags& ef, const CommonFlags& flags, std::ostream& out,
                  std::ostream& err) {
    const std::uint64_t seed = flags.require_seed();
    if (ef.queries == 0)
        throw UsageError("--queries must be positive");
    if (ef.ell < 1 || ef.ell > ef.m)
        throw UsageError("need 1 <= ell <= m");

    lsh::PointSet points;
    std::size_t wrapped = 0;
    if (!ef.input.empty()) {
        auto loaded = lsh::load_csv(ef.input);
        points = std::move(loaded.points);
        wrapped = loaded.wrapped_values;
        if (wrapped > 0)
            err << fmt::format("warning: {} values outside [0,1) reduced modulo 1\n", wrapped);
    } else {
        if (ef.n == 0 || ef.d < 1)
            throw UsageError("--n and --d must be positive");
        points = lsh::generate_uniform(ef.n, static_cast<std::size_t>(ef.d), derive_seed(seed, kDataSeed));
    }
    lsh::GridConfig config{ef.m, ef.grid, derive_seed(seed, kShiftSeed)};
    try {
        config.validate();
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
    if (ef.builds == 0 || ef.builds > ef.queries)
        throw UsageError("--builds must be in [1, queries]");
    const auto report = lsh::measure_recall_rebuilt(points, config, ef.queries, ef.builds, ef.ell,
                                                    derive_seed(seed, kQuerySeed), flags.threads);

    Table t{{"m", "ell", "d", "g", "n", "queries", "builds", "scored_queries", "mean_recall",
             "stderr_recall",
             "mean_selectivity", "predicted_exact", "predicted_recall", "wrapped_values", "seed"},
            {},
            {kSelectivityNote}};
    t.rows.push_back({ef.m * 1LL, ef.ell * 1LL, static_cast<long long>(points.dim()), ef.grid * 1LL,
                      static_cast<long long>(points.size()), static_cast<long long>(report.queries),
                      static_cast<long long>(report.builds), static_cast<long long>(report.scored_queries), report.mean_recall,
                      report.stderr_recall, report.mean_selectivity,
                      to_fraction_string(report.predicted_exact), report.predicted_recall,
                      static_cast<long long>(wrapped), std::to_string(seed)});
    emit(t, flags.parsed_format(), out, err);
    return kExitOk;
}

struct ReportFlags {
    std::uint64_t samples = 100'000;
    bool with_empirical = false;
    std::size_t n = 100'000;
    int grid = 4;
    std::size_t queries = 500;
    std::size_t builds = 50;
};

int cmd_report(const GridFlags& gf, const ReportFlags& rf, const CommonFlags& flags,
               std::ostream& out, std::ostream& err) {
    if (rf.samples == 0)
        throw UsageError("--samples must be positive");
    if (rf.with_empirical && (rf.n == 0 || rf.queries == 0 || rf.builds == 0 || rf.grid < 2))
        throw UsageError("--n, --queries and --builds must be positive and --grid >= 2");
    const std::uint64_t seed = flags.require_seed();

    Table t{{"m", "ell", "d", "model_exact", "model_float", "mc_mean", "mc_stderr", "empirical_recall",
             "empirical_stderr", "z_model_vs_mc"},
            {},
            {kTypoNote}};
    if (rf.with_empirical)
        t.notes.emplace_back(kSelectivityNote);

    bool failed = false;
    std::map<int, lsh::PointSet> data;
    for_each_query(gf.parse(), mc::kMaxCells, err, [&](int m, int ell, int d) {
        const Rational p = model::p_at_least(m, ell, d);
        const auto est = mc::mc_estimate_p(m, ell, d, rf.samples, seed, flags.threads);
        const double z = z_score(est.mean, est.stderr_, to_double(p));
        failed |= !(z <= 5.0);
        Value recall, recall_err;
        if (rf.with_empirical) {
            auto it = data.find(d);
            if (it == data.end())
                it = data.emplace(d, lsh::generate_uniform(rf.n, static_cast<std::size_t>(d),
                                                           derive_seed(seed, kDataSeed)))
                         .first;
            const auto r = lsh::measure_recall_rebuilt(
                it->second, {m, rf.grid, derive_seed(seed, kShiftSeed)}, rf.queries,
                std::min(rf.builds, rf.queries), ell, derive_seed(seed, kQuerySeed), flags.threads);
            recall = r.mean_recall;
            recall_err = r.stderr_recall;
        }
        t.rows.push_back({m * 1LL, ell * 1LL, d * 1LL, to_fraction_string(p), to_double(p), est.mean,
                          est.stderr_, recall, recall_err, z});
    });
    emit(t, flags.parsed_format(), out, err);
    return failed ? kExitVerificationFailed : kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grid LSH coverage model: exact values, Monte Carlo, quadrature and empirical recall",
                 "lshmodel"};
    app.require_subcommand(1);

    CommonFlags flags;
    GridFlags grid;

    auto* model_cmd = app.add_subcommand("model", "Exact p(m, ell, d) over a parameter grid");
    grid.add(model_cmd);
    add_format(model_cmd, flags);

    std::uint64_t mc_samples = 100'000;
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimates checked against the exact model");
    grid.add(mc_cmd);
    mc_cmd->add_option("--samples", mc_samples, "Cell draws per estimate");
    add_format(mc_cmd, flags);
    add_random(mc_cmd, flags);

    int d_max = 6, m_max = 6;
    double tol = 1e-9;
    std::uint64_t quad_samples = 200'000;
    auto* int_cmd = app.add_subcommand("integrals", "Numerical checks of the helper integrals");
    int_cmd->add_option("--d-max", d_max, "Largest number of x variables");
    int_cmd->add_option("--m-max", m_max, "Largest number of (y, v) pairs");
    int_cmd->add_option("--tol", tol, "Relative tolerance for the deterministic route");
    int_cmd->add_option("--samples", quad_samples, "Monte Carlo samples per integral");
    add_format(int_cmd, flags);
    add_random(int_cmd, flags);

    EmpiricalFlags ef;
    auto* emp_cmd = app.add_subcommand("empirical", "Recall of a grid LSH index on real or synthetic data");
    emp_cmd->add_option("--n", ef.n, "Synthetic points");
    emp_cmd->add_option("--d", ef.d, "Synthetic dimensionality");
    emp_cmd->add_option("--grid", ef.grid, "Cells per axis g (cell side 1/g)");
    emp_cmd->add_option("--m", ef.m, "Tables");
    emp_cmd->add_option("--ell", ef.ell, "Minimum number of colliding tables");
    emp_cmd->add_option("--queries", ef.queries, "Random queries");
    emp_cmd->add_option("--builds", ef.builds, "Independent index builds (shift draws) sharing the queries");
    emp_cmd->add_option("--input", ef.input, "CSV point file (overrides --n/--d)");
    add_format(emp_cmd, flags);
    add_random(emp_cmd, flags);

    ReportFlags rf;
    auto* rep_cmd = app.add_subcommand("report", "Joined model / Monte Carlo / empirical table");
    grid.add(rep_cmd);
    rep_cmd->add_option("--samples", rf.samples, "Cell draws per Monte Carlo estimate");
    rep_cmd->add_flag("--with-empirical", rf.with_empirical, "Also measure index recall");
    rep_cmd->add_option("--n", rf.n, "Synthetic points for the empirical columns");
    rep_cmd->add_option("--grid", rf.grid, "Cells per axis for the empirical columns");
    rep_cmd->add_option("--queries", rf.queries, "Queries for the empirical columns");
    rep_cmd->add_option("--builds", rf.builds, "Index builds for the empirical columns");
    add_format(rep_cmd, flags);
    add_random(rep_cmd, flags);

    std::vector<std::string> argv_storage(args.begin(), args.end());
    if (argv_storage.empty())
        argv_storage.emplace_back("lshmodel");
    std::vector<char*> argv;
    for (auto& a : argv_storage)
        argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    try {
        if (*model_cmd)
            return cmd_model(grid, flags, out, err);
        if (*mc_cmd)
            return cmd_mc(grid, mc_samples, flags, out, err);
        if (*int_cmd)
            return cmd_integrals(d_max, m_max, tol, quad_samples, flags, out, err);
        if (*emp_cmd)
            return cmd_empirical(ef, flags, out, err);
        if (*rep_cmd)
            return cmd_report(grid, rf, flags, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace lshmodel::cli
