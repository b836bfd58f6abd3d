#include "tvclt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tvclt/errors.hpp"
#include "tvclt/metrics.hpp"
#include "tvclt/stein.hpp"

namespace tvclt {

using ordered_json = nlohmann::ordered_json;

const char* version_string() { return "tvclt 0.1.0"; }

// ---------------------------------------------------------------- config

namespace {

[[noreturn]] void bad(const std::string& msg) { throw ValidationError(msg); }

void require_keys(const ordered_json& j,
                  const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, val] : j.items()) {
        (void)val;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            bad("unknown key '" + key + "' in " + where);
    }
}

const ordered_json& need(const ordered_json& j, const char* k,
                         const std::string& where) {
    if (!j.contains(k)) bad(where + " is missing required key '" + k + "'");
    return j.at(k);
}

double num_field(const ordered_json& j, const char* k, double dflt,
                 const std::string& where) {
    if (!j.contains(k)) return dflt;
    const auto& v = j.at(k);
    if (!v.is_number()) bad(where + "." + k + " must be a number");
    return v.get<double>();
}

std::size_t uint_field(const ordered_json& j, const char* k, std::size_t dflt,
                       const std::string& where) {
    if (!j.contains(k)) return dflt;
    const auto& v = j.at(k);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        bad(where + "." + k + " must be a nonnegative integer");
    return static_cast<std::size_t>(v.get<long long>());
}

bool bool_field(const ordered_json& j, const char* k, bool dflt,
                const std::string& where) {
    if (!j.contains(k)) return dflt;
    const auto& v = j.at(k);
    if (!v.is_boolean()) bad(where + "." + k + " must be a boolean");
    return v.get<bool>();
}

std::string str_field(const ordered_json& j, const char* k,
                      const std::string& dflt, const std::string& where) {
    if (!j.contains(k)) return dflt;
    const auto& v = j.at(k);
    if (!v.is_string()) bad(where + "." + k + " must be a string");
    return v.get<std::string>();
}

std::vector<double> num_array(const ordered_json& v, const std::string& where) {
    if (!v.is_array()) bad(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) bad(where + " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
              c == '-'))
            return false;
    return true;
}

BaseSpec base_from_json(const ordered_json& j, const std::string& where) {
    if (!j.is_object()) bad(where + " must be an object");
    BaseSpec b;
    const auto& fam = need(j, "family", where);
    if (!fam.is_string()) bad(where + ".family must be a string");
    b.family = fam.get<std::string>();
    if (b.family == "normal" || b.family == "laplace" ||
        b.family == "logistic") {
        require_keys(j, {"family", "scale"}, where);
        b.scale = num_field(j, "scale", 1.0, where);
        if (!(b.scale > 0.0)) bad(where + ".scale must be positive");
    } else if (b.family == "gaussian_mixture") {
        require_keys(j, {"family", "weights", "means", "sigmas"}, where);
        b.weights = num_array(need(j, "weights", where), where + ".weights");
        b.means = num_array(need(j, "means", where), where + ".means");
        b.sigmas = num_array(need(j, "sigmas", where), where + ".sigmas");
        if (b.weights.empty() || b.weights.size() != b.means.size() ||
            b.weights.size() != b.sigmas.size())
            bad(where + ": weights/means/sigmas must share a nonzero length");
        for (double w : b.weights)
            if (!(w > 0.0)) bad(where + ".weights must be positive");
        for (double s : b.sigmas)
            if (s < 0.0) bad(where + ".sigmas must be nonnegative");
    } else if (b.family == "smoothed_rademacher") {
        require_keys(j, {"family", "delta"}, where);
        b.delta = num_field(j, "delta", 0.0, where);
        if (b.delta < 0.0) bad(where + ".delta must be nonnegative");
    } else if (b.family == "smoothed_uniform") {
        require_keys(j, {"family", "half_width", "delta"}, where);
        b.half_width = num_field(j, "half_width", 1.0, where);
        b.delta = num_field(j, "delta", 0.0, where);
        if (!(b.half_width > 0.0)) bad(where + ".half_width must be positive");
        if (b.delta < 0.0) bad(where + ".delta must be nonnegative");
    } else {
        bad(where + ": unknown family '" + b.family + "'");
    }
    return b;
}

ProfileSpec profile_from_json(const ordered_json& j, const std::string& where) {
    ProfileSpec p;
    if (!j.is_object()) bad(where + " must be an object");
    p.kind = str_field(j, "kind", "iid", where);
    if (p.kind == "iid") {
        require_keys(j, {"kind"}, where);
    } else if (p.kind == "cycle") {
        require_keys(j, {"kind", "scales"}, where);
        p.scales = num_array(need(j, "scales", where), where + ".scales");
        if (p.scales.empty()) bad(where + ".scales must be nonempty");
        for (double s : p.scales)
            if (!(s > 0.0)) bad(where + ".scales must be positive");
    } else {
        bad(where + ": unknown profile kind '" + p.kind + "'");
    }
    return p;
}

ExperimentConfig config_from_json(const ordered_json& j) {
    if (!j.is_object()) bad("config root must be an object");
    require_keys(j,
                 {"sequences", "n_values", "epsilon_grid", "delta_grid",
                  "grid", "c_constant", "checks", "output", "seed"},
                 "config");
    ExperimentConfig cfg;

    const auto& seqs = need(j, "sequences", "config");
    if (!seqs.is_array() || seqs.empty())
        bad("config.sequences must be a nonempty array");
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        const std::string where = "sequences[" + std::to_string(i) + "]";
        const auto& sj = seqs.at(i);
        if (!sj.is_object()) bad(where + " must be an object");
        require_keys(sj, {"name", "base", "profile"}, where);
        SequenceSpec s;
        const auto& nm = need(sj, "name", where);
        if (!nm.is_string()) bad(where + ".name must be a string");
        s.name = nm.get<std::string>();
        if (!valid_name(s.name))
            bad(where + ".name must match [A-Za-z0-9_-]+");
        s.base = base_from_json(need(sj, "base", where), where + ".base");
        if (sj.contains("profile"))
            s.profile = profile_from_json(sj.at("profile"), where + ".profile");
        for (const auto& prev : cfg.sequences)
            if (prev.name == s.name) bad("duplicate sequence name " + s.name);
        cfg.sequences.push_back(std::move(s));
    }

    const auto& ns = need(j, "n_values", "config");
    if (!ns.is_array() || ns.empty())
        bad("config.n_values must be a nonempty array");
    for (const auto& v : ns) {
        if (!v.is_number_integer() || v.get<long long>() <= 0)
            bad("config.n_values must contain positive integers");
        const auto n = static_cast<std::size_t>(v.get<long long>());
        if (!cfg.n_values.empty() && n <= cfg.n_values.back())
            bad("config.n_values must be strictly ascending");
        cfg.n_values.push_back(n);
    }

    if (j.contains("epsilon_grid")) {
        const auto& e = j.at("epsilon_grid");
        require_keys(e, {"count", "lo", "hi"}, "epsilon_grid");
        cfg.epsilon_grid.count = uint_field(e, "count", 50, "epsilon_grid");
        cfg.epsilon_grid.lo = num_field(e, "lo", 1e-3, "epsilon_grid");
        cfg.epsilon_grid.hi = num_field(e, "hi", 1.0, "epsilon_grid");
        if (cfg.epsilon_grid.count < 2)
            bad("epsilon_grid.count must be at least 2");
        if (!(cfg.epsilon_grid.lo > 0.0 &&
              cfg.epsilon_grid.lo < cfg.epsilon_grid.hi &&
              cfg.epsilon_grid.hi <= 1.0))
            bad("epsilon_grid needs 0 < lo < hi <= 1");
    }

    if (j.contains("delta_grid")) {
        cfg.delta_grid = num_array(j.at("delta_grid"), "config.delta_grid");
        for (std::size_t i = 0; i < cfg.delta_grid.size(); ++i) {
            if (cfg.delta_grid[i] < 0.0)
                bad("config.delta_grid must be nonnegative");
            if (i > 0 && cfg.delta_grid[i] > cfg.delta_grid[i - 1])
                bad("config.delta_grid must be non-ascending");
        }
    }

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        require_keys(g, {"m", "extent_sigmas"}, "grid");
        cfg.grid.m = uint_field(g, "m", cfg.grid.m, "grid");
        cfg.grid.extent_sigmas =
            num_field(g, "extent_sigmas", cfg.grid.extent_sigmas, "grid");
        if (!is_power_of_two(cfg.grid.m) || cfg.grid.m < 64)
            bad("grid.m must be a power of two, at least 64");
        if (!(cfg.grid.extent_sigmas > 0.0))
            bad("grid.extent_sigmas must be positive");
    }

    cfg.c_constant = num_field(j, "c_constant", 1.0, "config");
    if (!(cfg.c_constant > 0.0)) bad("config.c_constant must be positive");

    if (j.contains("checks")) {
        const auto& c = j.at("checks");
        require_keys(c, {"identities", "atom_smoothing"}, "checks");
        cfg.checks.identities = bool_field(c, "identities", true, "checks");
        cfg.checks.atom_smoothing =
            bool_field(c, "atom_smoothing", true, "checks");
    }

    if (j.contains("output")) {
        const auto& o = j.at("output");
        require_keys(o, {"dir", "formats"}, "output");
        cfg.output.dir = str_field(o, "dir", "out", "output");
        if (cfg.output.dir.empty()) bad("output.dir must be nonempty");
        if (o.contains("formats")) {
            const auto& f = o.at("formats");
            if (!f.is_array() || f.empty())
                bad("output.formats must be a nonempty array");
            cfg.output.formats.clear();
            for (const auto& e : f) {
                if (!e.is_string()) bad("output.formats must hold strings");
                const auto s = e.get<std::string>();
                if (s != "csv" && s != "json" && s != "svg")
                    bad("output.formats: unknown format '" + s + "'");
                if (std::find(cfg.output.formats.begin(),
                              cfg.output.formats.end(),
                              s) != cfg.output.formats.end())
                    bad("output.formats: duplicate '" + s + "'");
                cfg.output.formats.push_back(s);
            }
        }
    }

    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_integer() || v.get<long long>() < 0)
            bad("config.seed must be a nonnegative integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    return cfg;
}

ordered_json base_to_json(const BaseSpec& b) {
    ordered_json j;
    j["family"] = b.family;
    if (b.family == "normal" || b.family == "laplace" ||
        b.family == "logistic") {
        j["scale"] = b.scale;
    } else if (b.family == "gaussian_mixture") {
        j["weights"] = b.weights;
        j["means"] = b.means;
        j["sigmas"] = b.sigmas;
    } else if (b.family == "smoothed_rademacher") {
        j["delta"] = b.delta;
    } else if (b.family == "smoothed_uniform") {
        j["half_width"] = b.half_width;
        j["delta"] = b.delta;
    }
    return j;
}

ordered_json config_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["sequences"] = ordered_json::array();
    for (const auto& s : cfg.sequences) {
        ordered_json sj;
        sj["name"] = s.name;
        sj["base"] = base_to_json(s.base);
        ordered_json pj;
        pj["kind"] = s.profile.kind;
        if (s.profile.kind == "cycle") pj["scales"] = s.profile.scales;
        sj["profile"] = pj;
        j["sequences"].push_back(sj);
    }
    j["n_values"] = cfg.n_values;
    j["epsilon_grid"] = {{"count", cfg.epsilon_grid.count},
                         {"lo", cfg.epsilon_grid.lo},
                         {"hi", cfg.epsilon_grid.hi}};
    j["delta_grid"] = cfg.delta_grid;
    j["grid"] = {{"m", cfg.grid.m}, {"extent_sigmas", cfg.grid.extent_sigmas}};
    j["c_constant"] = cfg.c_constant;
    j["checks"] = {{"identities", cfg.checks.identities},
                   {"atom_smoothing", cfg.checks.atom_smoothing}};
    j["output"] = {{"dir", cfg.output.dir}, {"formats", cfg.output.formats}};
    j["seed"] = cfg.seed;
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("short write: " + path);
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config ") + path + ": " + e.what());
    }
    return config_from_json(j);
}

std::string config_to_text(const ExperimentConfig& cfg) {
    return config_json(cfg).dump(2) + "\n";
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    write_file(path, config_to_text(cfg));
}

DistPtr build_base(const BaseSpec& b) {
    if (b.family == "normal") return Distribution::normal(b.scale);
    if (b.family == "laplace") return Distribution::laplace(b.scale);
    if (b.family == "logistic") return Distribution::logistic(b.scale);
    if (b.family == "gaussian_mixture")
        return Distribution::gaussian_mixture(b.weights, b.means, b.sigmas);
    if (b.family == "smoothed_rademacher")
        return Distribution::smoothed_rademacher(b.delta);
    if (b.family == "smoothed_uniform")
        return Distribution::smoothed_uniform(b.half_width, b.delta);
    throw ValidationError("unknown family: " + b.family);
}

SumSequence build_sequence(const SequenceSpec& s, std::size_t max_n) {
    if (max_n == 0) throw ValidationError("sequence length must be positive");
    const DistPtr base = build_base(s.base);
    std::vector<DistPtr> specs;
    specs.reserve(max_n);
    if (s.profile.kind == "iid") {
        specs.assign(max_n, base);
    } else if (s.profile.kind == "cycle") {
        std::vector<DistPtr> scaled;
        scaled.reserve(s.profile.scales.size());
        for (double lam : s.profile.scales) scaled.push_back(base->scaled(lam));
        for (std::size_t k = 1; k <= max_n; ++k)
            specs.push_back(scaled[(k - 1) % scaled.size()]);
    } else {
        throw ValidationError("unknown profile kind: " + s.profile.kind);
    }
    return SumSequence(std::move(specs));
}

// ------------------------------------------------------------- run suites

std::vector<IdentityCell> identity_suite() {
    const std::vector<std::pair<std::string, DistPtr>> families = {
        {"normal", Distribution::normal()},
        {"laplace", Distribution::laplace()},
        {"logistic", Distribution::logistic()},
        {"smoothed_rademacher", Distribution::smoothed_rademacher(0.5)},
    };
    const std::vector<DiffFn> fns = {sin_fn(), tanh_fn(), arctan_fn(),
                                     bump_fn()};
    std::vector<IdentityCell> cells;
    cells.reserve(families.size() * fns.size());
    for (const auto& [name, spec] : families)
        for (const auto& fn : fns) {
            IdentityCell c;
            c.family = name;
            c.test_fn = fn.name;
            c.ibp_gap = check_ibp_score(*spec, fn).gap;
            c.kernel_gap = check_kernel_identity(*spec, fn).gap;
            cells.push_back(std::move(c));
        }
    return cells;
}

SteinCheckSummary stein_equation_suite(std::uint64_t seed, std::size_t count) {
    SteinCheckSummary s;
    s.count = count;
    for (std::size_t i = 0; i < count; ++i) {
        const SteinSolution sol = solve_stein(random_piecewise_linear(seed + i));
        s.max_residual = std::max(s.max_residual, sol.max_residual(-8.0, 8.0));
        s.max_sup_f = std::max(s.max_sup_f, sol.sup_f());
        s.max_sup_fprime = std::max(s.max_sup_fprime, sol.sup_fprime());
    }
    return s;
}

RunReport run(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.version = version_string();
    rep.config_text = config_to_text(cfg);
    if (cfg.sequences.empty() || cfg.n_values.empty())
        throw ValidationError("config needs sequences and n_values");

    std::vector<SequenceSpec> seqs = cfg.sequences;
    std::sort(seqs.begin(), seqs.end(),
              [](const SequenceSpec& a, const SequenceSpec& b) {
                  return a.name < b.name;
              });
    const std::size_t max_n = cfg.n_values.back();

    std::vector<SumSequence> built;
    built.reserve(seqs.size());
    for (const auto& s : seqs) built.push_back(build_sequence(s, max_n));

    struct Job {
        std::size_t seq = 0, n = 0;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < seqs.size(); ++i)
        for (std::size_t n : cfg.n_values) jobs.push_back({i, n});

    rep.rows.resize(jobs.size());
    rep.lindeberg.resize(jobs.size());
    const std::vector<double> eps = epsilon_grid(
        cfg.epsilon_grid.count, cfg.epsilon_grid.lo, cfg.epsilon_grid.hi);

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            const Job jb = jobs[i];
            CaseRow& row = rep.rows[i];
            row.sequence = seqs[jb.seq].name;
            LindebergTable& lt = rep.lindeberg[i];
            lt.sequence = row.sequence;
            lt.n = jb.n;
            try {
                row.report = bound_report(built[jb.seq], jb.n, cfg.grid);
                lt.points.reserve(eps.size());
                for (double e : eps)
                    lt.points.push_back(
                        {e, lindeberg_functional(built[jb.seq], jb.n, e)});
            } catch (const std::exception& e) {
                row.error = e.what();
                row.report = BoundReport{};
                row.report.n = jb.n;
                lt.points.clear();
            }
        }
    };
    std::size_t nw = cfg.threads;
    if (nw == 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        nw = std::max(1u, std::min(4u, hc));
    }
    nw = std::min(nw, jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < nw; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (cfg.checks.identities) {
        rep.identities = identity_suite();
        for (const auto& c : rep.identities)
            rep.max_identity_gap =
                std::max({rep.max_identity_gap, c.ibp_gap, c.kernel_gap});
        rep.stein = stein_equation_suite(cfg.seed, 20);
    }

    if (cfg.checks.atom_smoothing) {
        try {
            // +-1 atoms smoothed at the delta matching their unit variance
            const DistPtr atoms = Distribution::smoothed_rademacher(0.0);
            const SumSequence sm =
                SumSequence(std::vector<DistPtr>(max_n, atoms)).smoothed(1.0);
            const double jval = sm.spec(1)->fisher_j();
            for (std::size_t n : cfg.n_values) {
                SmoothedAtomsRow r;
                r.n = n;
                r.j = jval;
                const TvBound b = tv_bound(sm, n);
                r.tv_bound = b.value;
                r.bound_finite = b.finite;
                r.tv_actual = distance_to_normal(sum_density(sm, n, cfg.grid)).tv;
                rep.smoothed_atoms.push_back(r);
            }
        } catch (const std::exception& e) {
            rep.atoms_error = e.what();
        }
    }

    if (!cfg.delta_grid.empty()) {
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            SmoothingTable st;
            st.sequence = seqs[i].name;
            st.n = max_n;
            try {
                st.rows = smoothing_stability(built[i], max_n, cfg.delta_grid,
                                              cfg.grid);
            } catch (const std::exception& e) {
                st.error = e.what();
            }
            rep.smoothing.push_back(std::move(st));
        }
    }

    bool ok = true;
    for (const auto& r : rep.rows)
        if (!r.error.empty() || !r.report.bound_holds) ok = false;
    if (cfg.checks.identities) {
        if (!(rep.max_identity_gap < kIdentityTol)) ok = false;
        if (!(rep.stein.max_residual < kResidualTol)) ok = false;
    }
    if (cfg.checks.atom_smoothing) {
        if (!rep.atoms_error.empty()) ok = false;
        for (const auto& r : rep.smoothed_atoms)
            if (!r.bound_finite || !(r.tv_actual <= r.tv_bound + 1e-6))
                ok = false;
    }
    for (const auto& st : rep.smoothing)
        if (!st.error.empty()) ok = false;
    rep.ok = ok;
    rep.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
}

// ----------------------------------------------------------------- emit

namespace {

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

std::string csv_text(const RunReport& rep) {
    std::string s =
        "sequence,n,j_max,feller,m_n,tv_bound,tv_actual,k_actual,slack_ratio\n";
    for (const CaseRow& r : rep.rows) {
        const BoundReport& b = r.report;
        const bool failed = !r.error.empty();
        const auto v = [&](double x) {
            return failed ? std::string("nan") : fmt_num(x);
        };
        s += r.sequence;
        s += ',';
        s += std::to_string(b.n);
        s += ',';
        s += v(b.j_max);
        s += ',';
        s += v(b.feller);
        s += ',';
        s += v(b.m_n);
        s += ',';
        s += v(b.tv_bound);
        s += ',';
        s += v(b.tv_actual);
        s += ',';
        s += v(b.k_actual);
        s += ',';
        s += v(b.slack_ratio);
        s += '\n';
    }
    return s;
}

ordered_json report_json(const RunReport& rep, const ExperimentConfig& cfg) {
    ordered_json j;
    j["version"] = rep.version;
    j["config"] = config_json(cfg);
    j["cases"] = ordered_json::array();
    for (const CaseRow& r : rep.rows) {
        const BoundReport& b = r.report;
        ordered_json c;
        c["sequence"] = r.sequence;
        c["n"] = b.n;
        c["j_values"] = b.j_values;
        c["j_max"] = b.j_max;
        c["feller"] = b.feller;
        c["m_n"] = b.m_n;
        c["tv_bound"] = b.tv_bound;  // infinities serialize as null
        c["bound_finite"] = b.bound_finite;
        c["infinite_reason"] = b.infinite_reason;
        c["tv_actual"] = b.tv_actual;
        c["k_actual"] = b.k_actual;
        c["slack_abs"] = b.slack_abs;
        c["slack_ratio"] = b.slack_ratio;
        c["bound_holds"] = b.bound_holds;
        c["error"] = r.error;
        j["cases"].push_back(std::move(c));
    }
    j["lindeberg"] = ordered_json::array();
    for (const LindebergTable& t : rep.lindeberg) {
        ordered_json tj;
        tj["sequence"] = t.sequence;
        tj["n"] = t.n;
        tj["eps"] = ordered_json::array();
        tj["l_n"] = ordered_json::array();
        for (const auto& p : t.points) {
            tj["eps"].push_back(p.eps);
            tj["l_n"].push_back(p.l_n);
        }
        j["lindeberg"].push_back(std::move(tj));
    }
    if (!rep.identities.empty()) {
        ordered_json idj;
        idj["max_gap"] = rep.max_identity_gap;
        idj["cells"] = ordered_json::array();
        for (const auto& c : rep.identities)
            idj["cells"].push_back({{"family", c.family},
                                    {"test_fn", c.test_fn},
                                    {"ibp_gap", c.ibp_gap},
                                    {"kernel_gap", c.kernel_gap}});
        j["identities"] = std::move(idj);
        j["stein"] = {{"count", rep.stein.count},
                      {"max_residual", rep.stein.max_residual},
                      {"max_sup_f", rep.stein.max_sup_f},
                      {"max_sup_fprime", rep.stein.max_sup_fprime}};
    }
    if (!rep.smoothed_atoms.empty() || !rep.atoms_error.empty()) {
        ordered_json aj;
        aj["error"] = rep.atoms_error;
        aj["rows"] = ordered_json::array();
        for (const auto& r : rep.smoothed_atoms)
            aj["rows"].push_back({{"n", r.n},
                                  {"j", r.j},
                                  {"tv_bound", r.tv_bound},
                                  {"bound_finite", r.bound_finite},
                                  {"tv_actual", r.tv_actual}});
        j["atom_smoothing"] = std::move(aj);
    }
    if (!rep.smoothing.empty()) {
        j["smoothing"] = ordered_json::array();
        for (const auto& st : rep.smoothing) {
            ordered_json sj;
            sj["sequence"] = st.sequence;
            sj["n"] = st.n;
            sj["error"] = st.error;
            sj["rows"] = ordered_json::array();
            for (const auto& r : st.rows)
                sj["rows"].push_back({{"delta", r.delta},
                                      {"tv_bound", r.tv_bound},
                                      {"bound_finite", r.bound_finite},
                                      {"tv_actual", r.tv_actual}});
            j["smoothing"].push_back(std::move(sj));
        }
    }
    j["ok"] = rep.ok;
    return j;
}

// ---- svg line charts

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;
    bool dashed = false;
};

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
}

std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, std::vector<Series> series,
                      bool log_x, bool log_y) {
    const double L = 70, R = 610, T = 46, B = 396;
    const auto tx = [log_x](double v) { return log_x ? std::log10(v) : v; };
    const auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };
    const auto ux = [log_x](double t) { return log_x ? std::pow(10.0, t) : t; };
    const auto uy = [log_y](double t) { return log_y ? std::pow(10.0, t) : t; };

    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool have = false;
    for (const auto& s : series)
        for (const auto& [x, y] : s.pts) {
            const double a = tx(x), b = ty(y);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            if (!have) {
                x0 = x1 = a;
                y0 = y1 = b;
                have = true;
            } else {
                x0 = std::min(x0, a);
                x1 = std::max(x1, a);
                y0 = std::min(y0, b);
                y1 = std::max(y1, b);
            }
        }
    if (x1 - x0 < 1e-12) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 - y0 < 1e-12) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const auto px = [&](double t) { return L + (t - x0) / (x1 - x0) * (R - L); };
    const auto py = [&](double t) { return B - (t - y0) / (y1 - y0) * (B - T); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"440\" viewBox=\"0 0 640 440\">\n";
    s += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
    s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"14\">" +
         title + "</text>\n";
    // axes
    s += "<line x1=\"" + fmt_coord(L) + "\" y1=\"" + fmt_coord(B) +
         "\" x2=\"" + fmt_coord(R) + "\" y2=\"" + fmt_coord(B) +
         "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt_coord(L) + "\" y1=\"" + fmt_coord(B) +
         "\" x2=\"" + fmt_coord(L) + "\" y2=\"" + fmt_coord(T) +
         "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double txv = x0 + (x1 - x0) * i / 4.0;
        const double tyv = y0 + (y1 - y0) * i / 4.0;
        s += "<line x1=\"" + fmt_coord(px(txv)) + "\" y1=\"" + fmt_coord(B) +
             "\" x2=\"" + fmt_coord(px(txv)) + "\" y2=\"" + fmt_coord(B + 5) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt_coord(px(txv)) + "\" y=\"" + fmt_coord(B + 18) +
             "\" text-anchor=\"middle\" font-family=\"monospace\" "
             "font-size=\"10\">" +
             fmt_tick(ux(txv)) + "</text>\n";
        s += "<line x1=\"" + fmt_coord(L - 5) + "\" y1=\"" +
             fmt_coord(py(tyv)) + "\" x2=\"" + fmt_coord(L) + "\" y2=\"" +
             fmt_coord(py(tyv)) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt_coord(L - 8) + "\" y=\"" +
             fmt_coord(py(tyv) + 3) +
             "\" text-anchor=\"end\" font-family=\"monospace\" "
             "font-size=\"10\">" +
             fmt_tick(uy(tyv)) + "</text>\n";
    }
    s += "<text x=\"340\" y=\"428\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"12\">" +
         xlabel + "</text>\n";
    s += "<text x=\"16\" y=\"220\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 "
         "16 220)\">" +
         ylabel + "</text>\n";

    const char* colors[] = {"#000000", "#888888", "#444444", "#bbbbbb",
                            "#666666", "#aaaaaa"};
    double ly = T + 8;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& sr = series[si];
        const char* color = colors[si % 6];
        std::string pts;
        for (const auto& [x, y] : sr.pts) {
            const double a = tx(x), b = ty(y);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            if (!pts.empty()) pts += ' ';
            pts += fmt_coord(px(a)) + "," + fmt_coord(py(b));
        }
        if (!pts.empty()) {
            s += "<polyline fill=\"none\" stroke=\"";
            s += color;
            s += "\" stroke-width=\"1.5\"";
            if (sr.dashed) s += " stroke-dasharray=\"6,4\"";
            s += " points=\"" + pts + "\"/>\n";
        }
        s += "<line x1=\"" + fmt_coord(R - 140) + "\" y1=\"" + fmt_coord(ly) +
             "\" x2=\"" + fmt_coord(R - 118) + "\" y2=\"" + fmt_coord(ly) +
             "\" stroke=\"";
        s += color;
        s += "\"";
        if (sr.dashed) s += " stroke-dasharray=\"6,4\"";
        s += "/>\n";
        s += "<text x=\"" + fmt_coord(R - 112) + "\" y=\"" + fmt_coord(ly + 3) +
             "\" font-family=\"monospace\" font-size=\"10\">" + sr.label +
             "</text>\n";
        ly += 14;
    }
    s += "</svg>\n";
    return s;
}

constexpr double kLogFloor = 1e-18;  // plotting floor for log axes

void write_svgs(const RunReport& rep, const std::string& dir) {
    // group rows and tables by sequence, preserving sorted order
    std::vector<std::string> names;
    for (const auto& r : rep.rows)
        if (names.empty() || names.back() != r.sequence)
            names.push_back(r.sequence);
    for (const std::string& name : names) {
        Series actual{"tv_actual", {}, false};
        Series bound{"tv_bound", {}, true};
        for (const auto& r : rep.rows) {
            if (r.sequence != name || !r.error.empty()) continue;
            const auto n = static_cast<double>(r.report.n);
            actual.pts.push_back(
                {n, std::max(r.report.tv_actual, kLogFloor)});
            if (r.report.bound_finite)
                bound.pts.push_back(
                    {n, std::max(r.report.tv_bound, kLogFloor)});
        }
        write_file(dir + "/" + name + "_tv_decay.svg",
                   svg_chart(name + ": distance to normal vs n", "n",
                             "distance", {actual, bound}, true, true));

        std::vector<Series> lser;
        for (const auto& t : rep.lindeberg) {
            if (t.sequence != name || t.points.empty()) continue;
            Series s{"n=" + std::to_string(t.n), {}, false};
            for (const auto& p : t.points)
                s.pts.push_back({p.eps, std::max(p.l_n, kLogFloor)});
            lser.push_back(std::move(s));
        }
        write_file(dir + "/" + name + "_lindeberg.svg",
                   svg_chart(name + ": Lindeberg functional vs epsilon",
                             "epsilon", "L_n", lser, true, true));
    }
}

}  // namespace

void emit(const RunReport& rep, const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output.dir, ec);
    if (ec) throw IoError("cannot create output dir: " + cfg.output.dir);
    for (const std::string& f : cfg.output.formats) {
        if (f == "csv") {
            write_file(cfg.output.dir + "/report.csv", csv_text(rep));
        } else if (f == "json") {
            write_file(cfg.output.dir + "/report.json",
                       report_json(rep, cfg).dump(2) + "\n");
        } else if (f == "svg") {
            write_svgs(rep, cfg.output.dir);
        } else {
            throw ValidationError("unknown output format: " + f);
        }
    }
}

}  // namespace tvclt
