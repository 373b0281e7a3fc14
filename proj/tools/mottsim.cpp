// mottsim: command-line front end for the one-dimensional spin-mesh
// scattering model.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

#include "mott/mott.hpp"

namespace {

enum ExitCode { ok = 0, mismatch = 2, solver_failure = 3, config_failure = 4 };

std::string amplitude(mott::complex z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "% .12e %+.12e i  (|.|^2 = %.12e)", z.real(), z.imag(), std::norm(z));
    return buf;
}

int run_single_spin(double k0, double beta, double gamma, double eps) {
    const auto s = mott::solve_single_spin(k0, beta, gamma, eps);
    std::cout << std::setprecision(12);
    std::cout << "k0 = " << k0 << ", beta = " << beta << ", gamma = " << gamma << ", epsilon = " << eps << '\n';
    std::cout << "k1 = " << s.k1.real() << (s.k1.imag() >= 0 ? " + " : " - ") << std::abs(s.k1.imag()) << " i"
              << (s.excited_open ? "  (open)" : "  (closed)") << '\n';
    std::cout << "R0 = " << amplitude(s.R0) << '\n'
              << "T0 = " << amplitude(s.T0) << '\n'
              << "R1 = " << amplitude(s.R1) << '\n'
              << "T1 = " << amplitude(s.T1) << '\n';
    const double p_exc = mott::single_spin_excitation_probability(k0, beta, gamma, eps);
    const double p_gnd = std::norm(s.R0) + std::norm(s.T0);
    std::cout << "P_exc = " << p_exc << '\n'
              << "P_gnd = " << p_gnd << '\n'
              << "spin entropy S = " << mott::binary_spin_entropy(p_exc) << '\n'
              << "gamma_max = " << mott::gamma_max(k0, beta, eps) << '\n';
    return ok;
}

int run_solve(const std::string& config_path, const std::string& out_path, const std::string& path_name) {
    const auto tree = mott::read_config_file(config_path);
    const auto det = mott::detector_from_config(tree);
    const double k0 = mott::k0_from_config(tree);
    mott::SolveOptions opt;
    if (path_name == "dense") opt.path = mott::SolverPath::dense;
    else if (path_name == "sparse") opt.path = mott::SolverPath::sparse;

    const auto sol = mott::solve_scattering(det, k0, opt);
    const auto probs = mott::aggregate_channels(mott::channel_fluxes(sol), det.n_spins());
    std::cout << std::setprecision(12);
    std::cout << "E = " << sol.energy << "\nk0 = " << k0 << "\nn_spins = " << det.n_spins()
              << "\ndetector_hash = " << mott::hex64(mott::detector_hash(det)) << "\nsolver = " << mott::to_string(sol.path)
              << "\nP_gnd = " << probs.P_gnd << "\nP_OS = " << probs.P_OS << "\nP_trk = " << probs.P_trk
              << "\nentropy = " << probs.spin_entropy << (det.n_spins() > 1 ? "  (Shannon over channels)" : "")
              << "\nunitarity_defect = " << probs.unitarity_defect << "\nresidual = " << sol.residual
              << "\nrcond = " << sol.rcond << '\n';
    for (std::size_t w = 0; w < probs.by_weight.size(); ++w) std::cout << "P(w=" << w << ") = " << probs.by_weight[w] << '\n';

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw mott::ConfigError("cannot open " + out_path);
        out << "channel,bits,weight,open,k_re,k_im,R_re,R_im,T_re,T_im,p\n" << std::setprecision(15);
        for (std::uint32_t c = 0; c < sol.channel_count(); ++c) {
            const mott::ChannelIndex ci{c, det.n_spins()};
            const auto& kin = sol.kinematics[c];
            out << c << ',' << mott::to_binary(ci) << ',' << mott::hamming_weight(ci) << ',' << kin.open << ','
                << kin.wavenumber.real() << ',' << kin.wavenumber.imag() << ',' << sol.R[c].real() << ',' << sol.R[c].imag()
                << ',' << sol.T[c].real() << ',' << sol.T[c].imag() << ',' << probs.p[c] << '\n';
        }
    }
    if (!(probs.unitarity_defect < mott::unitarity_rejection_threshold)) {
        std::cerr << "error: unitarity defect " << probs.unitarity_defect << " exceeds "
                  << mott::unitarity_rejection_threshold << '\n';
        return solver_failure;
    }
    return ok;
}

int run_sweep(const std::string& config_path, const std::string& out_path, int jobs, std::optional<std::uint64_t> seed,
              bool timing) {
    const auto spec = mott::sweep_from_config(mott::read_config_file(config_path), seed);
    std::unique_ptr<std::ofstream> file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file = std::make_unique<std::ofstream>(out_path);
        if (!*file) throw mott::ConfigError("cannot open " + out_path);
        out = file.get();
    }
    const auto summary = mott::run_sweep(spec, *out, jobs, timing);
    std::cerr << summary.rows << " rows, " << summary.failed << " failed\n";
    return summary.failed == 0 ? ok : solver_failure;
}

void write_snapshot(const std::string& prefix, int index, const mott::WavePacketState& s) {
    const std::string path = prefix + "." + std::to_string(index) + ".dat";
    std::ofstream out(path);
    if (!out) throw mott::ConfigError("cannot open " + path);
    out << "# t = " << std::setprecision(12) << s.t << "\n# x";
    for (std::uint32_t c = 0; c < s.channel_count(); ++c) out << " |psi_" << mott::to_binary({c, s.n_spins}) << "|^2";
    out << '\n' << std::setprecision(10);
    for (int j = 0; j < s.grid.n_points(); ++j) {
        out << s.grid.x(j);
        for (std::uint32_t c = 0; c < s.channel_count(); ++c) out << ' ' << std::norm(s.channel(c)[j]);
        out << '\n';
    }
}

int run_propagate(const std::string& config_path, const std::string& out_path, const std::string& snapshot_prefix) {
    const auto tree = mott::read_config_file(config_path);
    const auto det = mott::detector_from_config(tree);
    const auto grid = mott::grid_from_config(tree);
    const auto packet = mott::packet_from_config(tree);
    const double dt = mott::require_number(tree, "run.dt");
    const int steps = mott::require_int(tree, "run.steps");
    const int sample_every = std::max(1, mott::int_or(tree, "run.sample_every", 1));
    const int snapshot_every = mott::int_or(tree, "run.snapshot_every", 0);

    const auto h = mott::discretize_hamiltonian(det, grid);
    auto state = mott::initial_state(grid, det.n_spins(), packet);

    std::unique_ptr<std::ofstream> file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file = std::make_unique<std::ofstream>(out_path);
        if (!*file) throw mott::ConfigError("cannot open " + out_path);
        out = file.get();
    }
    const int n = det.n_spins();
    const bool per_channel = n <= 6;
    *out << "t,norm,energy";
    if (per_channel)
        for (std::uint32_t c = 0; c < state.channel_count(); ++c) *out << ",P_" << mott::to_binary({c, n});
    else
        for (int w = 0; w <= n; ++w) *out << ",P_w" << w;
    *out << '\n' << std::setprecision(12);

    auto sample = [&] {
        const auto probs = mott::configuration_probabilities(state);
        *out << state.t << ',' << mott::total_norm(state) << ',' << mott::energy(state, h);
        for (double p : per_channel ? probs.p : probs.by_weight) *out << ',' << p;
        *out << '\n';
    };

    sample();
    int snapshot = 0;
    if (!snapshot_prefix.empty() && snapshot_every > 0) write_snapshot(snapshot_prefix, snapshot++, state);
    for (int done = 0; done < steps;) {
        const int chunk = std::min(sample_every, steps - done);
        state = mott::propagate(state, h, dt, chunk);
        done += chunk;
        sample();
        if (!snapshot_prefix.empty() && snapshot_every > 0 && done % snapshot_every == 0)
            write_snapshot(snapshot_prefix, snapshot++, state);
    }

    const auto probs = mott::configuration_probabilities(state);
    std::cerr << std::setprecision(8) << "t = " << state.t << ", norm = " << mott::total_norm(state) << '\n';
    for (std::size_t w = 0; w < probs.by_weight.size(); ++w) std::cerr << "P(w=" << w << ") = " << probs.by_weight[w] << '\n';
    return ok;
}

int run_reproduce(const std::string& table, bool strict) {
    const double tolerance = strict ? 5e-5 : 1e-3;
    const auto cells = table == "table1" ? mott::table1_cells() : mott::table2_cells();
    const auto results = mott::reproduce(cells, tolerance);
    mott::print_comparison(std::cout, table, results, tolerance);
    bool solver_error = false, mismatch_seen = false;
    for (const auto& r : results) {
        solver_error |= !r.error.empty();
        mismatch_seen |= r.error.empty() && !r.ok;
    }
    if (solver_error) return solver_failure;
    return mismatch_seen ? mismatch : ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-mesh scattering simulator: stationary solves, sweeps and wave-packet runs"};
    app.require_subcommand(1);

    double k0 = 1.0, beta = 0.0, gamma = 0.0, eps = 0.0;
    auto* single = app.add_subcommand("single-spin", "closed-form single-spin amplitudes and excitation probability");
    single->add_option("--k0", k0, "incident wavenumber")->required();
    single->add_option("--beta", beta, "elastic strength");
    single->add_option("--gamma", gamma, "spin-flip strength");
    single->add_option("--eps", eps, "excitation energy")->check(CLI::NonNegativeNumber);

    std::string config, out, solver = "auto", snapshots, table;
    int jobs = 1;
    bool strict = false, timing = false;
    std::optional<std::uint64_t> seed;

    auto* solve = app.add_subcommand("solve", "stationary N-spin solve from a config file");
    solve->add_option("--config", config, "config file")->required();
    solve->add_option("--out", out, "per-channel amplitude CSV");
    solve->add_option("--solver", solver, "auto, dense or sparse")->check(CLI::IsMember({"auto", "dense", "sparse"}));

    auto* sweep = app.add_subcommand("sweep", "parameter sweep, one CSV row per run");
    sweep->add_option("--config", config, "config file")->required();
    sweep->add_option("--out", out, "output CSV (default stdout)");
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "base seed for random meshes");
    sweep->add_flag("--timing", timing, "record wall times (output is then not byte-reproducible)");

    auto* prop = app.add_subcommand("propagate", "time-dependent wave-packet run");
    prop->add_option("--config", config, "config file")->required();
    prop->add_option("--out", out, "time-series CSV (default stdout)");
    prop->add_option("--snapshots", snapshots, "prefix for |psi_c(x)|^2 snapshot files");

    auto* repro = app.add_subcommand("reproduce", "recompute the published probability tables");
    repro->add_option("table", table, "table1 or table2")->required()->check(CLI::IsMember({"table1", "table2"}));
    repro->add_flag("--strict", strict, "tolerance 5e-5 instead of 1e-3");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : config_failure;
    }

    try {
        if (*single) return run_single_spin(k0, beta, gamma, eps);
        if (*solve) return run_solve(config, out, solver);
        if (*sweep) return run_sweep(config, out, jobs, seed, timing);
        if (*prop) return run_propagate(config, out, snapshots);
        if (*repro) return run_reproduce(table, strict);
    } catch (const mott::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return solver_failure;
    }
    return ok;
}
