#include "ksm/cli.hpp"

#include "ksm/config.hpp"
#include "ksm/diagnostics.hpp"
#include "ksm/error.hpp"
#include "ksm/experiments.hpp"
#include "ksm/series_io.hpp"
#include "ksm/stepper.hpp"
#include "report_json.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace ksm {
namespace fs = std::filesystem;
using detail::json;
using detail::to_json;

namespace {

void write_report(const fs::path& path, const json& report) {
    fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path.string() + " for writing");
    os << report.dump(2) << '\n';
}

std::string member_dir(const char* prefix, std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%02zu", prefix, index);
    return buf;
}

/// Everything that can be said about a single trajectory. Analyses whose
/// preconditions fail are skipped with a note instead of failing the run.
json trajectory_report(const RunConfig& config, const Trajectory& traj, const AuditReport& audit_rep) {
    json rep;
    rep["complete"] = traj.complete;
    rep["failure"] = traj.failure;
    rep["warnings"] = traj.meta.warnings;
    rep["audit"] = to_json(audit_rep);
    json skipped = json::object();
    auto attempt = [&](const char* key, auto&& fn) {
        try {
            rep[key] = fn();
        } catch (const std::exception& e) {
            skipped[key] = e.what();
        }
    };
    attempt("inequalities", [&] { return to_json(inequality_scan(traj)); });
    attempt("decay", [&] {
        return to_json(decay_metrics(traj, config.diagnostics.t_ref, config.diagnostics.decay_threshold));
    });
    attempt("supersolution", [&] {
        const auto fit = fit_supersolution(traj, config.diagnostics.tau, config.diagnostics.kappa);
        return to_json(fit, config.diagnostics.tau, config.diagnostics.kappa);
    });
    attempt("weak_residual", [&] { return to_json(weak_residual(traj, default_test_function(config))); });
    rep["skipped"] = skipped;
    return rep;
}

int finish_single(const RunConfig& config, const Trajectory& traj, const fs::path& report_path) {
    const AuditReport a = audit(traj);
    write_report(report_path, trajectory_report(config, traj, a));
    for (const auto& w : traj.meta.warnings) std::cerr << "warning: " << w << '\n';
    if (!traj.complete) {
        std::cerr << "error: run stopped early: " << traj.failure << '\n';
        return kExitNumerical;
    }
    if (!a.pass()) {
        for (const auto& f : a.failures) std::cerr << "audit: " << f << '\n';
        return kExitAudit;
    }
    std::cerr << "ok: " << traj.records.size() << " records, report " << report_path.string() << '\n';
    return kExitOk;
}

/// Persists every member run of a study and remembers whether all passed the audit.
struct MemberSink {
    fs::path root;
    const char* prefix;
    bool audits_pass = true;

    RunObserver observer() {
        return [this](std::size_t i, const RunConfig& cfg, const Trajectory& traj) {
            const fs::path dir = root / member_dir(prefix, i);
            write_series(dir, cfg, traj);
            const AuditReport a = audit(traj);
            write_report(dir / "report.json", trajectory_report(cfg, traj, a));
            if (!a.pass()) {
                audits_pass = false;
                for (const auto& f : a.failures) std::cerr << "audit (" << dir.string() << "): " << f << '\n';
            }
        };
    }
};

template <class Report>
int finish_study(const Report& rep, const MemberSink& sink, const fs::path& report_path) {
    write_report(report_path, to_json(rep));
    if (!rep.complete) {
        std::cerr << "error: study stopped early: " << rep.failure << '\n';
        return kExitNumerical;
    }
    if (!sink.audits_pass) return kExitAudit;
    std::cerr << "ok: report " << report_path.string() << '\n';
    return kExitOk;
}

fs::path output_dir(const std::string& flag, const RunConfig& config) {
    return flag.empty() ? fs::path(config.output.dir) : fs::path(flag);
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Chemotaxis-consumption solver with diagnostics and studies"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;

    auto* run_cmd = app.add_subcommand("run", "integrate one configuration and write its trajectory");
    auto* sweep_cmd = app.add_subcommand("sweep", "run the configured epsilon sweep");
    auto* relax_cmd = app.add_subcommand("relax", "run the point-mass relaxation experiment");
    auto* refine_cmd = app.add_subcommand("refine", "run the grid/time refinement study");
    for (auto* sub : {run_cmd, sweep_cmd, relax_cmd, refine_cmd}) {
        sub->add_option("-c,--config", config_path, "JSON configuration")->required();
        sub->add_option("-o,--out", out, "output directory (default: output.dir from the config)");
    }
    std::string check_dir;
    auto* check_cmd = app.add_subcommand("check", "re-audit a stored trajectory without re-simulating");
    check_cmd->add_option("dir", check_dir, "trajectory directory")->required();
    check_cmd->add_option("-o,--out", out, "report path (default: <dir>/check_report.json)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cerr << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        if (check_cmd->parsed()) {
            const StoredRun stored = read_series(check_dir);
            if (!stored.diag_hash_matches) std::cerr << "warning: diag.csv does not match its recorded hash\n";
            const fs::path report = out.empty() ? fs::path(check_dir) / "check_report.json" : fs::path(out);
            json rep;
            const Trajectory& traj = stored.trajectory;
            const AuditReport a = audit(traj);
            rep = trajectory_report(stored.config, traj, a);
            rep["diag_hash_matches"] = stored.diag_hash_matches;
            write_report(report, rep);
            if (!a.pass()) {
                for (const auto& f : a.failures) std::cerr << "audit: " << f << '\n';
                return kExitAudit;
            }
            std::cerr << "ok: " << traj.records.size() << " records pass the audit\n";
            return kExitOk;
        }

        const RunConfig config = load_config(config_path);
        const fs::path dir = output_dir(out, config);

        if (run_cmd->parsed()) {
            const Trajectory traj = run(config);
            write_series(dir, config, traj);
            return finish_single(config, traj, dir / "report.json");
        }
        if (sweep_cmd->parsed()) {
            if (!config.sweep) throw ValidationError("config has no sweep section");
            MemberSink sink{dir, "eps"};
            const SweepReport rep = epsilon_sweep(config, config.sweep->epsilons, sink.observer());
            return finish_study(rep, sink, dir / "sweep_report.json");
        }
        if (relax_cmd->parsed()) {
            if (!config.relax) throw ValidationError("config has no relax section");
            MemberSink sink{dir, "grid"};
            const RelaxReport rep = relaxation_experiment(config, config.relax->cells, config.relax->tau, sink.observer());
            return finish_study(rep, sink, dir / "relax_report.json");
        }
        if (refine_cmd->parsed()) {
            if (!config.refine) throw ValidationError("config has no refine section");
            MemberSink sink{dir, "level"};
            const ConvergenceReport rep =
                refinement_study(config, config.refine->cells, config.refine->scale_dt, sink.observer());
            return finish_study(rep, sink, dir / "refine_report.json");
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace ksm
