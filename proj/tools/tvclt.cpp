#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvclt/bounds.hpp"
#include "tvclt/errors.hpp"
#include "tvclt/harness.hpp"
#include "tvclt/metrics.hpp"
#include "tvclt/quad.hpp"

namespace {

struct CommonFlags {
    std::string config_path, out_dir;
    std::vector<std::string> formats;
    std::size_t threads = 0;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
    cmd->add_option("config", fl.config_path, "experiment config (JSON)")
        ->required();
    cmd->add_option("--out-dir", fl.out_dir, "output directory override")
        ->envname("TVCLT_OUT_DIR");
    cmd->add_option("--format", fl.formats,
                    "output format override (csv, json, svg)")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    cmd->add_option("--threads", fl.threads, "worker threads (0 = auto)")
        ->envname("TVCLT_THREADS");
    cmd->add_option("--seed", fl.seed,
                    "seed override for randomized test functions");
}

void apply_overrides(tvclt::ExperimentConfig& cfg, CLI::App* cmd,
                     const CommonFlags& fl) {
    if (cmd->count("--out-dir")) cfg.output.dir = fl.out_dir;
    if (cmd->count("--format")) {
        cfg.output.formats.clear();
        for (const auto& f : fl.formats)
            if (std::find(cfg.output.formats.begin(), cfg.output.formats.end(),
                          f) == cfg.output.formats.end())
                cfg.output.formats.push_back(f);
    }
    if (cmd->count("--threads")) cfg.threads = fl.threads;
    if (cmd->count("--seed")) cfg.seed = fl.seed;
}

int cmd_run(CLI::App* cmd, const CommonFlags& fl) {
    tvclt::ExperimentConfig cfg = tvclt::load_config(fl.config_path);
    apply_overrides(cfg, cmd, fl);
    const tvclt::RunReport rep = tvclt::run(cfg);
    for (const auto& r : rep.rows) {
        if (!r.error.empty()) {
            std::printf("case %s n=%zu: error: %s\n", r.sequence.c_str(),
                        r.report.n, r.error.c_str());
            continue;
        }
        const auto& b = r.report;
        if (b.bound_finite)
            std::printf(
                "case %s n=%zu: tv_actual=%.6e tv_bound=%.6e ratio=%.4f %s\n",
                r.sequence.c_str(), b.n, b.tv_actual, b.tv_bound,
                b.slack_ratio, b.bound_holds ? "holds" : "VIOLATED");
        else
            std::printf("case %s n=%zu: tv_actual=%.6e tv_bound=inf (%s)\n",
                        r.sequence.c_str(), b.n, b.tv_actual,
                        b.infinite_reason.c_str());
    }
    if (!rep.identities.empty()) {
        std::printf("identities: max gap %.3e over %zu cells\n",
                    rep.max_identity_gap, rep.identities.size());
        std::printf(
            "stein: %zu solutions, max residual %.3e, sup|f| %.4f, sup|f'| "
            "%.4f\n",
            rep.stein.count, rep.stein.max_residual, rep.stein.max_sup_f,
            rep.stein.max_sup_fprime);
    }
    if (!rep.atoms_error.empty())
        std::printf("atom smoothing: error: %s\n", rep.atoms_error.c_str());
    for (const auto& a : rep.smoothed_atoms)
        std::printf("atom smoothing n=%zu: J=%.6f tv_actual=%.6e %s\n", a.n,
                    a.j, a.tv_actual,
                    a.bound_finite ? "bound finite" : "bound infinite");
    for (const auto& st : rep.smoothing) {
        if (!st.error.empty()) {
            std::printf("smoothing %s: error: %s\n", st.sequence.c_str(),
                        st.error.c_str());
            continue;
        }
        for (const auto& row : st.rows)
            std::printf("smoothing %s n=%zu delta=%g: tv_actual=%.6e\n",
                        st.sequence.c_str(), st.n, row.delta, row.tv_actual);
    }
    tvclt::emit(rep, cfg);
    for (const auto& f : cfg.output.formats) {
        if (f == "svg")
            std::printf("wrote %s/<sequence>_{tv_decay,lindeberg}.svg\n",
                        cfg.output.dir.c_str());
        else
            std::printf("wrote %s/report.%s\n", cfg.output.dir.c_str(),
                        f.c_str());
    }
    std::printf("elapsed %.1f s\n", rep.elapsed_s);
    std::printf("%s\n", rep.ok ? "ok" : "FAILED");
    return rep.ok ? 0 : 1;
}

int cmd_check_identities(CLI::App* cmd, const CommonFlags& fl) {
    tvclt::ExperimentConfig cfg = tvclt::load_config(fl.config_path);
    apply_overrides(cfg, cmd, fl);
    const auto cells = tvclt::identity_suite();
    double max_gap = 0.0;
    for (const auto& c : cells) {
        std::printf("%-22s %-12s ibp_gap=%.3e kernel_gap=%.3e\n",
                    c.family.c_str(), c.test_fn.c_str(), c.ibp_gap,
                    c.kernel_gap);
        max_gap = std::max({max_gap, c.ibp_gap, c.kernel_gap});
    }
    const auto st = tvclt::stein_equation_suite(cfg.seed, 20);
    std::printf(
        "stein: %zu solutions, max residual %.3e, sup|f| %.4f, sup|f'| %.4f\n",
        st.count, st.max_residual, st.max_sup_f, st.max_sup_fprime);
    const bool ok = max_gap < tvclt::kIdentityTol &&
                    st.max_residual < tvclt::kResidualTol &&
                    st.max_sup_f <= tvclt::quad::kSqrt2Pi + 1e-6 &&
                    st.max_sup_fprime <= 4.0 + 1e-6;
    std::printf("%s (max gap %.3e)\n", ok ? "ok" : "FAILED", max_gap);
    return ok ? 0 : 1;
}

int cmd_bound(CLI::App* cmd, const CommonFlags& fl, std::size_t n) {
    tvclt::ExperimentConfig cfg = tvclt::load_config(fl.config_path);
    apply_overrides(cfg, cmd, fl);
    std::vector<tvclt::SequenceSpec> seqs = cfg.sequences;
    std::sort(seqs.begin(), seqs.end(),
              [](const tvclt::SequenceSpec& a, const tvclt::SequenceSpec& b) {
                  return a.name < b.name;
              });
    for (const auto& s : seqs) {
        const tvclt::SumSequence seq = tvclt::build_sequence(s, n);
        const tvclt::TvBound b = tvclt::tv_bound(seq, n);
        if (b.finite) {
            const double feller = tvclt::feller_ratio(seq, n);
            const double m_n = tvclt::truncated_moment(seq, n);
            std::printf("%s n=%zu: feller=%.6f m_n=%.6e tv_bound=%.6e\n",
                        s.name.c_str(), n, feller, m_n, b.value);
        } else {
            std::printf("%s n=%zu: tv_bound=inf (%s)\n", s.name.c_str(), n,
                        b.reason.c_str());
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"total-variation CLT bound certification"};
    app.require_subcommand(1);

    CommonFlags run_fl, chk_fl, bnd_fl;
    std::size_t bound_n = 0;

    CLI::App* run_cmd =
        app.add_subcommand("run", "run the full experiment suite");
    add_common(run_cmd, run_fl);
    CLI::App* chk_cmd = app.add_subcommand(
        "check-identities", "run the identity and equation checks only");
    add_common(chk_cmd, chk_fl);
    CLI::App* bnd_cmd =
        app.add_subcommand("bound", "evaluate the TV bound at one n");
    add_common(bnd_cmd, bnd_fl);
    bnd_cmd->add_option("--n", bound_n, "number of summands")->required();
    CLI::App* ver_cmd = app.add_subcommand("version", "print version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ver_cmd->parsed()) {
            std::printf("%s\n", tvclt::version_string());
            return 0;
        }
        if (run_cmd->parsed()) return cmd_run(run_cmd, run_fl);
        if (chk_cmd->parsed()) return cmd_check_identities(chk_cmd, chk_fl);
        if (bnd_cmd->parsed()) return cmd_bound(bnd_cmd, bnd_fl, bound_n);
    } catch (const tvclt::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
