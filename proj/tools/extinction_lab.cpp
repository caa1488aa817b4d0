// Command line front end for the extinction laboratory.  Every subcommand
// reads one flat key=value config file, writes its artifacts atomically into
// job.output_dir, and reports through exit codes: 0 success, 2 validation
// error, 3 solver failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "extlab/asymptotics/ratefit.hpp"
#include "extlab/errors.hpp"
#include "extlab/evolution/original.hpp"
#include "extlab/evolution/relative.hpp"
#include "extlab/evolution/rescale.hpp"
#include "extlab/io/config.hpp"
#include "extlab/io/csv.hpp"
#include "extlab/io/persist.hpp"
#include "extlab/io/svg.hpp"
#include "extlab/merlezaag/verify.hpp"
#include "extlab/pipeline/experiment.hpp"
#include "extlab/pipeline/split.hpp"
#include "extlab/spectrum/eigen.hpp"
#include "extlab/stationary/newton.hpp"
#include "extlab/stationary/shooting.hpp"

namespace fs = std::filesystem;
using namespace extlab;

namespace {

// Validation problems (bad config, bad file, mismatched data) exit 2; anything
// that went wrong while solving exits 3.
int exit_code_for(const Error& e) {
    const bool validation =
        dynamic_cast<const SchemaMismatch*>(&e) || dynamic_cast<const MeshMismatch*>(&e) ||
        dynamic_cast<const PreconditionViolated*>(&e) ||
        dynamic_cast<const UnsupportedDimension*>(&e) ||
        dynamic_cast<const ResolutionTooCoarse*>(&e) ||
        dynamic_cast<const SubcriticalityViolated*>(&e) ||
        dynamic_cast<const NotFastDiffusion*>(&e) || dynamic_cast<const NonPositive*>(&e) ||
        dynamic_cast<const NegativeWeight*>(&e) || dynamic_cast<const EmptySeries*>(&e) ||
        dynamic_cast<const EmptyTrajectory*>(&e) ||
        dynamic_cast<const MismatchedProfile*>(&e) ||
        dynamic_cast<const WindowTooShort*>(&e) ||
        dynamic_cast<const NonPositiveValues*>(&e) ||
        dynamic_cast<const ModeCutoffEmpty*>(&e) ||
        dynamic_cast<const InvalidExponent*>(&e) || dynamic_cast<const GridTooCoarse*>(&e);
    return validation ? 2 : 3;
}

struct Stage {
    LabConfig lab;
    MediumParams prm;
    std::shared_ptr<const Mesh> mesh;
    fs::path dir;
};

Stage open_stage(const std::string& config_path) {
    Stage st;
    st.lab = read_lab_config(config_path);
    st.prm = validate_params(st.lab.m, domain_dimension(st.lab.domain));
    st.mesh = build_mesh(st.lab.domain, st.lab.resolution);
    st.dir = st.lab.output_dir;
    fs::create_directories(st.dir);
    return st;
}

StationaryProfile compute_profile(const Stage& st) {
    const bool radial = std::holds_alternative<Interval>(st.lab.domain) ||
                        std::holds_alternative<RadialBall>(st.lab.domain);
    const Field init = radial
                           ? solve_radial_shooting(st.mesh, st.prm, st.lab.profile_tol).V
                           : mountain_pass_init(st.mesh, st.prm);
    return solve_newton(st.mesh, st.prm, init, st.lab.profile_tol);
}

Field profile_field(const Stage& st, const std::string& profile_path) {
    if (profile_path.empty())
        return compute_profile(st).V;
    return attach_profile(load_profile(profile_path), st.mesh);
}

SpectralDecomposition compute_spectrum(const Stage& st, const Field& V) {
    const Pencil pen = assemble_pencil(V, st.prm);
    const double ztol =
        st.lab.zero_tol > 0.0 ? st.lab.zero_tol : default_zero_tol(st.prm, *st.mesh);
    return solve_eigens(pen, st.lab.num_modes, ztol);
}

Field seed_field(const Stage& st, const Field& V, const SpectralDecomposition& dec) {
    if (!st.lab.seed_file.empty())
        return attach_profile(load_profile(st.lab.seed_file), st.mesh);
    const int idx = st.lab.seed_mode >= 0 ? st.lab.seed_mode : dec.I + dec.K;
    if (idx >= static_cast<int>(dec.eigenfields.size()))
        throw PreconditionViolated("seed mode index beyond computed modes");
    Field h0 = dec.eigenfields[static_cast<std::size_t>(idx)];
    h0.v *= st.lab.seed_amplitude;
    (void)V;
    return h0;
}

void write_text(const fs::path& path, const std::string& body) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
    }
    fs::rename(tmp, path);
}

int cmd_stationary(const std::string& config_path) {
    const Stage st = open_stage(config_path);
    const StationaryProfile prof = compute_profile(st);
    persist_profile(prof.V, st.dir / "profile.csv");
    std::cout << "profile.csv  cells=" << prof.V.size()
              << " residual=" << prof.residual_norm << " energy=" << prof.energy
              << "\n";
    return 0;
}

int cmd_spectrum(const std::string& config_path, const std::string& profile_path,
                 int k_override) {
    Stage st = open_stage(config_path);
    if (k_override > 0)
        st.lab.num_modes = k_override;
    const Field V = profile_field(st, profile_path);
    const SpectralDecomposition dec = compute_spectrum(st, V);
    persist_spectrum(dec, st.dir);
    std::cout << "spectrum.csv  modes=" << dec.eigenvalues.size() << " I=" << dec.I
              << " K=" << dec.K << " lambda_K=" << dec.lambda_K << "\n";
    return 0;
}

int cmd_evolve(const std::string& config_path) {
    const Stage st = open_stage(config_path);
    const Field V = compute_profile(st).V;
    const SpectralDecomposition dec = compute_spectrum(st, V);
    const Field h0 = seed_field(st, V, dec);
    const Trajectory traj = evolve(h0, V, st.prm, st.lab.evolution);
    persist_trajectory(traj, st.dir / "trajectory.csv");
    std::cout << "trajectory.csv  steps=" << traj.times.size()
              << " t_end=" << traj.times.back()
              << (traj.stopped_early ? " (stopped early)" : "") << "\n";
    return 0;
}

int cmd_evolve_original(const std::string& config_path) {
    const Stage st = open_stage(config_path);
    const Field V = compute_profile(st).V;
    const RescaleMaps maps = rescale_maps(st.prm, st.lab.extinction_time);
    Field w0{V.mesh, maps.amplitude(0.0) * V.v.array().pow(st.prm.p).matrix()};
    if (st.lab.seed_amplitude != 0.0 && st.lab.seed_file.empty() && st.lab.seed_mode >= 0) {
        // optional multiplicative perturbation along a computed eigenfield
        const SpectralDecomposition dec = compute_spectrum(st, V);
        const Field h0 = seed_field(st, V, dec);
        w0.v = w0.v.array() * (1.0 + h0.v.array()).pow(st.prm.p);
    } else if (st.lab.seed_amplitude != 0.0) {
        w0.v *= std::pow(1.0 + st.lab.seed_amplitude, st.prm.p);
    }
    const double tau_end =
        st.lab.tau_end > 0.0 ? st.lab.tau_end : 0.9 * st.lab.extinction_time;
    const Trajectory traj =
        evolve_original(w0, st.prm, st.lab.dtau, tau_end,
                        st.lab.evolution.snapshot_stride, st.lab.evolution.positivity_floor);
    persist_trajectory(traj, st.dir / "original.csv");
    std::cout << "original.csv  steps=" << traj.times.size()
              << " tau_end=" << traj.times.back() << "\n";
    return 0;
}

int cmd_rates(const std::string& config_path, const std::string& series_path) {
    const Stage st = open_stage(config_path);
    const fs::path src =
        series_path.empty() ? st.dir / "trajectory.csv" : fs::path(series_path);
    const TrajectoryTable table = load_trajectory(src);
    const DichotomyVerdict verdict = classify_decay(table.t, table.norm_p1, st.lab.decay);
    std::string body = "source=" + src.string() + "\n";
    body += std::string("verdict=") + decay_name(verdict.tag) + "\n";
    if (verdict.tag == DichotomyVerdict::Tag::Exponential)
        body += "rate=" + format_real(verdict.rate) + "\n" +
                "drift=" + format_real(verdict.exp_fit.drift) + "\n";
    if (verdict.tag == DichotomyVerdict::Tag::AlgebraicOrSlower)
        body += "exponent=" + format_real(verdict.exponent) + "\n" +
                "min_t_value=" + format_real(verdict.min_t_value) + "\n";
    body += "window_lo=" + format_real(verdict.window_used.first) + "\n" +
            "window_hi=" + format_real(verdict.window_used.second) + "\n";
    write_text(st.dir / "rates.txt", body);
    std::cout << "rates.txt  verdict=" << decay_name(verdict.tag) << "\n";
    return 0;
}

int cmd_split(const std::string& config_path) {
    const Stage st = open_stage(config_path);
    const Field V = compute_profile(st).V;
    const SpectralDecomposition dec = compute_spectrum(st, V);
    const Field h0 = seed_field(st, V, dec);
    const Trajectory traj = evolve(h0, V, st.prm, st.lab.evolution);
    const SubspaceSplit split = split_trajectory(traj, dec, V, st.prm);
    persist_modeseries(split.series, st.dir / "modeseries.csv");
    persist_trajectory(traj, split, st.dir / "trajectory_modes.csv");
    std::cout << "modeseries.csv  snapshots=" << split.times.size()
              << " lambda_half=" << split.lambda_half << "\n";
    return 0;
}

int cmd_mzcheck(const std::string& config_path, const std::string& series_path) {
    const Stage st = open_stage(config_path);
    const fs::path src =
        series_path.empty() ? st.dir / "modeseries.csv" : fs::path(series_path);
    const ModeSeries series = load_modeseries(src);
    if (!(st.lab.mz_eps > 0.0))
        throw PreconditionViolated("mzcheck needs mz.eps set in the config");
    const double s0 = series.s.empty() ? 0.0 : series.s.front();
    std::string body = "source=" + src.string() + "\n" +
                       "eps=" + format_real(st.lab.mz_eps) + "\n" +
                       "s0=" + format_real(s0) + "\n";
    std::string verdict;
    try {
        const MzHypothesesReport hyp = check_hypotheses_mz(series, st.lab.mz_eps, s0);
        body += std::string("hypotheses=") + (hyp.passed ? "pass" : "fail") + "\n" +
                "slack=" + format_real(hyp.slack) + "\n";
        verdict = mz_name(check_conclusion_mz(series, st.lab.mz_eps, s0));
    } catch (const HypothesesFailed&) {
        verdict = "hypotheses-failed";
    }
    body += "verdict=" + verdict + "\n";
    write_text(st.dir / "mz.txt", body);
    std::cout << "mz.txt  verdict=" << verdict << "\n";
    return 0;
}

int cmd_dichotomy(const std::string& config_path) {
    const Stage st = open_stage(config_path);
    const DichotomyReport rep = dichotomy_experiment(to_dichotomy_config(st.lab));

    persist_profile(rep.profile.V, st.dir / "profile.csv");
    persist_spectrum(rep.dec, st.dir);
    persist_trajectory(rep.traj, st.dir / "trajectory.csv");
    persist_trajectory(rep.traj, rep.split, st.dir / "trajectory_modes.csv");
    persist_modeseries(rep.verified, st.dir / "modeseries.csv");

    CsvTable report;
    report.header = {"job", "mode_verdict", "decay_verdict", "agree", "eps", "s0",
                     "lambda_K", "lambda_half", "rate", "exponent", "outcome"};
    report.rows.push_back(
        {st.lab.job_id, mz_name(rep.mode_verdict), decay_name(rep.decay_verdict.tag),
         rep.agree ? "1" : "0", format_real(rep.eps_used), format_real(rep.s0),
         format_real(rep.dec.lambda_K), format_real(rep.split.lambda_half),
         format_real(rep.decay_verdict.rate), format_real(rep.decay_verdict.exponent),
         rep.outcome});
    write_csv(report, st.dir / "report.csv");

    std::string body = "job " + st.lab.job_id + "\n";
    body += "spectrum: I=" + std::to_string(rep.dec.I) + " K=" + std::to_string(rep.dec.K) +
            " lambda_K=" + format_real(rep.dec.lambda_K) + "\n";
    body += std::string("mode verdict: ") + mz_name(rep.mode_verdict) +
            " (eps=" + format_real(rep.eps_used) + ", s0=" + format_real(rep.s0) + ")\n";
    body += std::string("decay verdict: ") + decay_name(rep.decay_verdict.tag);
    if (rep.decay_verdict.tag == DichotomyVerdict::Tag::Exponential)
        body += " rate=" + format_real(rep.decay_verdict.rate);
    if (rep.decay_verdict.tag == DichotomyVerdict::Tag::AlgebraicOrSlower)
        body += " exponent=" + format_real(rep.decay_verdict.exponent);
    body += "\noutcome: " + rep.outcome + "\n";
    write_text(st.dir / "report.txt", body);

    std::cout << "report.csv  " << rep.outcome << "\n";
    return 0;
}

int cmd_plot(const std::string& series_path, const std::string& kind,
             const std::string& out_path) {
    const CsvTable table = read_csv(series_path);
    PlotKind pk;
    if (kind == "norms")
        pk = PlotKind::NormDecay;
    else if (kind == "dichotomy")
        pk = PlotKind::Dichotomy;
    else
        throw SchemaMismatch("plot kind must be norms or dichotomy, got '" + kind + "'");
    emit_plot(table, pk, out_path);
    std::cout << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* cap = std::getenv("EXTLAB_THREADS")) {
        const int n = std::atoi(cap);
        if (n > 0)
            Eigen::setNbThreads(n);
    }

    CLI::App app{"numerical laboratory for extinction asymptotics of fast diffusion"};
    app.require_subcommand(1);

    std::string config_path, profile_path, series_path, out_path, plot_kind = "norms";
    int k_override = 0;

    auto* stationary = app.add_subcommand("stationary", "solve the stationary profile");
    stationary->add_option("--config", config_path, "config file")->required();

    auto* spectrum = app.add_subcommand("spectrum", "eigenpairs of the linearized operator");
    spectrum->add_option("--config", config_path, "config file")->required();
    spectrum->add_option("--profile", profile_path, "reuse a saved profile.csv");
    spectrum->add_option("-k", k_override, "number of modes");

    auto* evolve_cmd = app.add_subcommand("evolve", "rescaled relative-error run");
    evolve_cmd->add_option("--config", config_path, "config file")->required();

    auto* original = app.add_subcommand("evolve-original", "original-variable run");
    original->add_option("--config", config_path, "config file")->required();

    auto* rates = app.add_subcommand("rates", "classify decay of a saved trajectory");
    rates->add_option("--config", config_path, "config file")->required();
    rates->add_option("--trajectory", series_path, "trajectory.csv to classify");

    auto* split = app.add_subcommand("split", "run and project onto spectral subspaces");
    split->add_option("--config", config_path, "config file")->required();

    auto* mzcheck = app.add_subcommand("mzcheck", "verify a saved mode series");
    mzcheck->add_option("--config", config_path, "config file")->required();
    mzcheck->add_option("--series", series_path, "modeseries.csv to verify");

    auto* dichotomy = app.add_subcommand("dichotomy", "full experiment with report");
    dichotomy->add_option("--config", config_path, "config file")->required();

    auto* plot = app.add_subcommand("plot", "render a saved series to SVG");
    plot->add_option("--series", series_path, "input CSV")->required();
    plot->add_option("--kind", plot_kind, "norms | dichotomy");
    plot->add_option("--out", out_path, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*stationary)
            return cmd_stationary(config_path);
        if (*spectrum)
            return cmd_spectrum(config_path, profile_path, k_override);
        if (*evolve_cmd)
            return cmd_evolve(config_path);
        if (*original)
            return cmd_evolve_original(config_path);
        if (*rates)
            return cmd_rates(config_path, series_path);
        if (*split)
            return cmd_split(config_path);
        if (*mzcheck)
            return cmd_mzcheck(config_path, series_path);
        if (*dichotomy)
            return cmd_dichotomy(config_path);
        if (*plot)
            return cmd_plot(series_path, plot_kind, out_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
