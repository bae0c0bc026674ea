// krylov — command-line front end: Lanczos coefficients from spin chains or
// spectral weights, equilibrium measures, Green's functions, the spectral
// bootstrap, transport coefficients, universality kernels.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "krylov/bootstrap.hpp"
#include "krylov/coulomb_gas.hpp"
#include "krylov/greens.hpp"
#include "krylov/io.hpp"
#include "krylov/ortho_poly.hpp"
#include "krylov/parallel.hpp"
#include "krylov/pauli.hpp"
#include "krylov/transport.hpp"
#include "krylov/ullman_compare.hpp"
#include "krylov/universality.hpp"
#include "krylov/weight_lanczos.hpp"
#include "krylov/weights.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct WeightArgs {
    std::string family = "sech";
    double rho = 0.0;
    double omega0 = 1.0;
    double pinv = 2.0;
    double freud_p = 2.0;

    void attach(CLI::App* app) {
        app->add_option("--family", family,
                        "gen-hermite | gaussian-rho | sech | quartic-root | freud | "
                        "tabulated:<csv>");
        app->add_option("--rho", rho, "low-frequency power-law exponent");
        app->add_option("--omega0", omega0, "gaussian-rho frequency scale");
        app->add_option("--pinv", pinv, "quartic-root exponent 1/pinv");
        app->add_option("--p", freud_p, "freud growth exponent");
    }

    krylov::WeightSpec build() const {
        using namespace krylov;
        if (family == "gen-hermite") return weights::gen_hermite(rho);
        if (family == "gaussian-rho") return weights::gaussian_rho(rho, omega0);
        if (family == "sech") return weights::sech(rho);
        if (family == "quartic-root") return weights::quartic_root(rho, pinv);
        if (family == "freud") return weights::freud(freud_p, rho);
        if (family.rfind("tabulated:", 0) == 0) {
            auto t = io::read_csv(family.substr(10));
            return weights::tabulated(t.col("omega"), t.col("phi_over_2pi"));
        }
        throw CLI::ValidationError("--family", "unknown weight family: " + family);
    }
};

std::map<std::string, std::string> base_meta(int argc, char** argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i) cmd += ' ';
        cmd += argv[i];
    }
    return {{"command", cmd}, {"version", kVersion}};
}

krylov::LanczosSequence load_coeffs(const std::string& path) {
    return krylov::io::read_sequence(path);
}

int run(int argc, char** argv) {
    CLI::App app{"Lanczos coefficients of quantum operator dynamics: spectral bootstrap, "
                 "Green's-function terminators, transport coefficients, RMT universality"};
    app.require_subcommand(1);
    auto meta = base_meta(argc, argv);

    bool json_errors = false;
    unsigned threads = 0;
    app.add_flag("--json-errors", json_errors, "machine-readable errors on stderr");
    app.add_option("--threads", threads, "cap internal parallelism (default: cores)");
    app.set_version_flag("--version", kVersion);

    // ---- lanczos {model, weight} ----
    auto* lanczos = app.add_subcommand("lanczos", "compute Lanczos coefficients");
    lanczos->require_subcommand(1);

    auto* lmodel = lanczos->add_subcommand("model", "exact spin-chain Liouvillian Lanczos");
    std::string model = "mfim", seed_name = "energy-current", out = "coeffs.json";
    double gx = 1.4, gz = 0.9045, delta = 1.5, gfield = 1.0, trunc = 0.0;
    int nmax = 20, max_support = 64;
    lmodel->add_option("--model", model, "mfim | xxz | heisenberg | tfim");
    lmodel->add_option("--gx", gx);
    lmodel->add_option("--gz", gz);
    lmodel->add_option("--delta", delta);
    lmodel->add_option("--g", gfield);
    lmodel->add_option("--seed", seed_name,
                       "energy-current | spin-current | energy-density | local-z | yy-bond | "
                       "z-sum");
    lmodel->add_option("--n", nmax);
    lmodel->add_option("--trunc", trunc, "relative coefficient pruning threshold (0 = exact)");
    lmodel->add_option("--max-support", max_support);
    lmodel->add_option("--out", out);

    auto* lweight = lanczos->add_subcommand("weight", "extended-precision Stieltjes");
    WeightArgs lw_args;
    lw_args.attach(lweight);
    int lw_n = 40;
    unsigned lw_bits = 512;
    std::string lw_out = "coeffs.json";
    lweight->add_option("--n", lw_n);
    lweight->add_option("--bits", lw_bits, "working precision in bits (>= 128)");
    lweight->add_option("--out", lw_out);

    // ---- eqmeasure ----
    auto* eqm = app.add_subcommand("eqmeasure", "equilibrium Coulomb-gas density");
    WeightArgs eq_args;
    eq_args.attach(eqm);
    int eq_n = 40, eq_points = 2000;
    std::string eq_out = "sigma.csv";
    eqm->add_option("--n", eq_n);
    eqm->add_option("--points", eq_points);
    eqm->add_option("--out", eq_out);

    // ---- greens ----
    auto* gr = app.add_subcommand("greens", "continued-fraction Green's function on a grid");
    std::string gr_coeffs, gr_term = "semicircle", gr_side = "minus", gr_out = "green.csv";
    int gr_n = 40, gr_points = 4000;
    double gr_wmin = 0.0, gr_wmax = 0.0, gr_rho = 0.0, gr_sigma0 = 0.0, gr_beta = 0.0;
    gr->add_option("--coeffs", gr_coeffs)->required();
    gr->add_option("--terminator", gr_term, "semicircle | bessel | exact-gaussian");
    gr->add_option("--n", gr_n);
    gr->add_option("--omega-min", gr_wmin);
    gr->add_option("--omega-max", gr_wmax);
    gr->add_option("--points", gr_points);
    gr->add_option("--side", gr_side, "minus | plus");
    gr->add_option("--rho", gr_rho, "bessel/exact terminator exponent");
    gr->add_option("--sigma0", gr_sigma0, "bessel terminator sigma_n(0)");
    gr->add_option("--beta", gr_beta, "bandwidth override (default 2 b_n)");
    gr->add_option("--out", gr_out);

    // ---- bootstrap {bulk, bessel, airy} ----
    auto* bs = app.add_subcommand("bootstrap", "spectral bootstrap solvers");
    bs->require_subcommand(1);
    struct BsArgs {
        std::string coeffs, out = "phi.csv";
        int n = 40;
        double rho = 0.0, domega = 1e-3, omega_max = 0.0, omega_min = 0.0, beta = 0.0;
        bool rk4 = false, full_bessel = false, no_step_check = false, allow_odd = false;
    } bs_args;
    for (const char* name : {"bulk", "bessel", "airy"}) {
        auto* sub = bs->add_subcommand(name);
        sub->add_option("--coeffs", bs_args.coeffs)->required();
        sub->add_option("--n", bs_args.n);
        sub->add_option("--rho", bs_args.rho);
        sub->add_option("--domega", bs_args.domega);
        sub->add_option("--omega-max", bs_args.omega_max);
        sub->add_option("--omega-min", bs_args.omega_min);
        sub->add_option("--beta", bs_args.beta, "bandwidth override (default 2 b_n)");
        sub->add_flag("--rk4", bs_args.rk4, "4th-order integrator variant");
        sub->add_flag("--full-bessel", bs_args.full_bessel, "keep subleading staggered terms");
        sub->add_flag("--no-step-check", bs_args.no_step_check);
        sub->add_flag("--allow-odd", bs_args.allow_odd);
        sub->add_option("--out", bs_args.out);
    }

    // ---- transport {diffusion, gamma, rho} ----
    auto* tr = app.add_subcommand("transport", "hydrodynamic coefficients");
    tr->require_subcommand(1);
    std::string tr_coeffs, tr_out = "transport.json";
    double tr_chi = 0.0, tr_p = 2.0, tr_q = 0.0;
    bool tr_force = false;
    for (const char* name : {"diffusion", "gamma", "rho"}) {
        auto* sub = tr->add_subcommand(name);
        sub->add_option("--coeffs", tr_coeffs)->required();
        sub->add_option("--chi", tr_chi, "static susceptibility");
        sub->add_option("--p", tr_p);
        sub->add_option("--q", tr_q);
        sub->add_flag("--force", tr_force, "allow the p=1 zero-mode fit");
        sub->add_option("--out", tr_out);
    }

    // ---- universality {sine, bessel, airy} ----
    auto* un = app.add_subcommand("universality", "unfolded kernel vs reference kernels");
    un->require_subcommand(1);
    std::string un_coeffs, un_phi, un_sigma, un_out = "kernel.csv";
    double un_omega0 = 0.0, un_rho = 0.0, un_umax = 3.0;
    int un_n = 40, un_points = 121;
    for (const char* name : {"sine", "bessel", "airy"}) {
        auto* sub = un->add_subcommand(name);
        sub->add_option("--coeffs", un_coeffs)->required();
        sub->add_option("--phi", un_phi, "bootstrap CSV holding the weight estimate")->required();
        sub->add_option("--sigma", un_sigma, "CSV holding sigma/I (default: --phi file)");
        sub->add_option("--omega0", un_omega0, "unfolding anchor");
        sub->add_option("--rho", un_rho);
        sub->add_option("--n", un_n);
        sub->add_option("--umax", un_umax);
        sub->add_option("--points", un_points);
        sub->add_option("--out", un_out);
    }

    // ---- confinement ----
    auto* cf = app.add_subcommand("confinement", "sigma_n(0) growth-class diagnostic");
    WeightArgs cf_args;
    cf_args.attach(cf);
    std::string cf_nlist = "100,300,1000,3000", cf_out = "conf.csv";
    cf->add_option("--nlist", cf_nlist, "comma-separated ascending n values");
    cf->add_option("--out", cf_out);

    // ---- reconstruct ----
    auto* rc = app.add_subcommand("reconstruct", "Lanczos coefficients from a tabulated estimate");
    std::string rc_phi, rc_out = "coeffs.json", rc_ref;
    int rc_n = 40;
    rc->add_option("--phi", rc_phi, "bootstrap CSV (omega, phi_or_envelope columns)")->required();
    rc->add_option("--n", rc_n);
    rc->add_option("--ref", rc_ref, "reference coeffs.json to report deviation against");
    rc->add_option("--out", rc_out);

    CLI11_PARSE(app, argc, argv);

    if (threads == 0)
        if (const char* env = std::getenv("KRYLOV_THREADS")) threads = std::atoi(env);
    if (threads > 0) krylov::set_thread_cap(threads);
    meta["threads"] = std::to_string(krylov::thread_cap());

    using namespace krylov;
    try {
        if (lmodel->parsed()) {
            HamiltonianSpec H;
            if (model == "mfim")
                H = hamiltonians::mfim(gx, gz);
            else if (model == "xxz")
                H = hamiltonians::xxz(delta);
            else if (model == "heisenberg")
                H = hamiltonians::heisenberg();
            else if (model == "tfim")
                H = hamiltonians::tfim(gfield);
            else
                throw CLI::ValidationError("--model", "unknown model: " + model);
            OpSum seed(OpMode::Translation);
            if (seed_name == "energy-current")
                seed = seeds::energy_current(H);
            else if (seed_name == "spin-current")
                seed = seeds::spin_current(H);
            else if (seed_name == "energy-density")
                seed = seeds::energy_density(H);
            else if (seed_name == "local-z")
                seed = seeds::local_z();
            else if (seed_name == "yy-bond")
                seed = seeds::yy_bond();
            else if (seed_name == "z-sum")
                seed = seeds::z_sum();
            else
                throw CLI::ValidationError("--seed", "unknown seed: " + seed_name);
            PauliLanczosOptions opt;
            opt.n_max = nmax;
            opt.trunc = trunc;
            opt.max_support = max_support;
            auto seq = lanczos_from_hamiltonian(H, seed, opt);
            seq.meta.insert(meta.begin(), meta.end());
            seq.meta["seed"] = seed_name;
            io::write_sequence(out, seq);
        } else if (lweight->parsed()) {
            if (const char* env = std::getenv("KRYLOV_BITS"); env && lw_bits == 512)
                lw_bits = std::atoi(env);
            auto spec = lw_args.build();
            StieltjesOptions opt;
            opt.precision_bits = lw_bits;
            auto seq = stieltjes_coefficients(spec, lw_n, opt);
            seq.meta.insert(meta.begin(), meta.end());
            io::write_sequence(lw_out, seq);
        } else if (eqm->parsed()) {
            auto spec = eq_args.build();
            const double beta = coulomb::mrs_number(spec, eq_n);
            auto m = coulomb::equilibrium_density(spec, eq_n,
                                                  coulomb::uniform_grid(0.0, beta, eq_points));
            io::CsvTable t;
            t.header = {"omega", "sigma", "I"};
            t.columns = {m.grid, m.sigma, m.cumulative};
            meta["beta_n"] = meta_num(m.beta_n);
            io::write_csv(eq_out, t, meta);
        } else if (gr->parsed()) {
            auto seq = load_coeffs(gr_coeffs);
            gr_n = std::min(gr_n, seq.size());
            const double beta = gr_beta > 0 ? gr_beta : 2.0 * seq.at(gr_n);
            if (gr_wmax <= gr_wmin) gr_wmax = beta;
            Terminator term = Terminator::semicircle(beta);
            if (gr_term == "bessel") {
                if (gr_sigma0 <= 0)
                    throw CLI::ValidationError("--sigma0", "bessel terminator needs sigma0 > 0");
                term = Terminator::bessel(gr_rho, gr_sigma0, beta);
            } else if (gr_term == "exact-gaussian") {
                term = Terminator::exact_model(weights::gaussian_rho(gr_rho, 1.0));
            } else if (gr_term != "semicircle") {
                throw CLI::ValidationError("--terminator", "unknown terminator: " + gr_term);
            }
            const Side side = gr_side == "plus" ? Side::Plus : Side::Minus;
            io::CsvTable t;
            t.header = {"omega", "reG", "imG", "phi"};
            t.columns.assign(4, {});
            for (auto& c : t.columns) c.resize(gr_points);
            std::vector<std::complex<double>> g(gr_points);
            parallel_for(gr_points, [&](std::size_t i) {
                const double w = gr_wmin + (gr_wmax - gr_wmin) * double(i) / (gr_points - 1);
                g[i] = continued_fraction(seq, term, gr_n, w, side);
                t.columns[0][i] = w;
            });
            auto sp = spectral_from_green(g, side);
            for (int i = 0; i < gr_points; ++i) {
                t.columns[1][i] = g[i].real();
                t.columns[2][i] = g[i].imag();
                t.columns[3][i] = sp.phi[i];
            }
            meta["beta_n"] = meta_num(beta);
            if (sp.negative_flag) meta["warning"] = "NegativeSpectralWeight";
            io::write_csv(gr_out, t, meta);
        } else if (bs->parsed()) {
            auto seq = load_coeffs(bs_args.coeffs);
            BootstrapOptions opt;
            opt.d_omega = bs_args.domega;
            opt.integrator = bs_args.rk4 ? Integrator::Rk4 : Integrator::Euler;
            opt.step_check = !bs_args.no_step_check;
            opt.beta_override = bs_args.beta;
            opt.full_bessel = bs_args.full_bessel;
            opt.allow_odd_bessel = bs_args.allow_odd;
            SpectralEstimate est;
            const std::string kind = bs->get_subcommands().front()->get_name();
            const double beta = bs_args.beta > 0 ? bs_args.beta : 2.0 * seq.at(bs_args.n);
            if (kind == "bulk") {
                const double wmax = bs_args.omega_max > 0 ? bs_args.omega_max : 0.99 * beta;
                est = bs_args.omega_min > 0
                          ? bulk_bootstrap_from(seq, bs_args.n, bs_args.omega_min, wmax, opt)
                          : bulk_bootstrap(seq, bs_args.n, wmax, opt);
            } else if (kind == "bessel") {
                const double wmax = bs_args.omega_max > 0 ? bs_args.omega_max : 2.0;
                est = bessel_bootstrap(seq, bs_args.n, bs_args.rho, wmax, opt);
            } else {
                est = airy_bootstrap(seq, bs_args.n, bs_args.rho, bs_args.omega_min, opt);
            }
            io::CsvTable t;
            t.header = {"omega", "phi_or_envelope", "sigma", "I"};
            t.columns = {est.omega, est.phi, est.sigma, est.cumulative};
            if (!est.fn.empty()) {
                t.header.push_back("fn");
                t.columns.push_back(est.fn);
            }
            meta["solver"] = est.solver;
            meta["n"] = std::to_string(est.n);
            meta["rho"] = meta_num(est.rho);
            meta["beta_n"] = meta_num(est.beta_n);
            meta["d_omega"] = meta_num(est.d_omega);
            meta["envelope"] = est.envelope ? "1" : "0";
            io::write_csv(bs_args.out, t, meta);
        } else if (tr->parsed()) {
            auto seq = load_coeffs(tr_coeffs);
            const std::string kind = tr->get_subcommands().front()->get_name();
            nlohmann::ordered_json j;
            j["meta"] = meta;
            auto fill = [&](nlohmann::ordered_json& dst, const TransportResult& r) {
                auto& pn = dst["per_n"] = nlohmann::ordered_json::array();
                for (auto [m, v] : r.per_n) pn.push_back({m, v});
                dst["intercept"] = r.intercept;
                dst["stderr"] = r.stderr_intercept;
                dst["power"] = r.power;
            };
            if (kind == "diffusion") {
                if (tr_chi <= 0)
                    throw CLI::ValidationError("--chi", "diffusion needs --chi > 0");
                fill(j, diffusion_constant(seq, tr_chi));
            } else if (kind == "gamma") {
                auto [g1, g32] = superdiffusion_gamma(seq, tr_chi > 0 ? tr_chi : 0.25);
                fill(j, g1);
                nlohmann::ordered_json alt;
                fill(alt, g32);
                j["extrapolation_n32"] = alt;
                j["ghd_target"] = ghd_gamma_target();
            } else {
                auto fit = estimate_rho(seq, tr_p, tr_q, tr_force);
                j["rho"] = fit.rho;
                j["stderr"] = fit.stderr_rho;
                j["points"] = fit.points;
            }
            std::ofstream os(tr_out);
            os << j.dump(2) << "\n";
        } else if (un->parsed()) {
            auto seq = load_coeffs(un_coeffs);
            const std::string kind = un->get_subcommands().front()->get_name();
            auto phi_csv = io::read_csv(un_phi);
            auto sigma_csv = un_sigma.empty() ? phi_csv : io::read_csv(un_sigma);

            SpectralEstimate est;
            est.n = un_n;
            est.rho = un_rho;
            est.solver = (kind == "airy") ? "airy" : (kind == "bessel" ? "bessel" : "bulk");
            est.envelope = (kind == "bessel");
            est.omega = phi_csv.col("omega");
            est.phi = phi_csv.col("phi_or_envelope");
            est.sigma = sigma_csv.col("sigma");
            est.cumulative = sigma_csv.col("I");
            if (phi_csv.has("fn")) est.fn = phi_csv.col("fn");
            est.beta_n = 2.0 * seq.at(un_n);

            WeightView w(est);
            auto F = UnfoldingMap::from_estimate(est, kind == "airy" ? est.beta_n : un_omega0);
            io::CsvTable t;
            t.header = {"u", "v", "measured", "reference"};
            t.columns.assign(4, {});
            for (int i = 0; i < un_points; ++i) {
                double u, v;
                if (kind == "airy") {
                    u = -un_umax + un_umax * double(i) / (un_points - 1);
                    v = 0.0;
                } else {
                    u = (-un_umax / 2) + un_umax * double(i) / (un_points - 1);
                    v = -u;
                }
                double measured, reference;
                try {
                    measured = unfolded_kernel_ratio(seq, w, F, u, v, un_n);
                } catch (const Error&) {
                    continue;  // outside the tabulated image
                }
                if (kind == "sine")
                    reference = sine_kernel(u, v);
                else if (kind == "airy")
                    reference = airy_kernel(u, v);
                else
                    reference =
                        (bessel_universality_phase(un_rho, u, v) * bessel_kernel(un_rho, u, v))
                            .real();
                t.columns[0].push_back(u);
                t.columns[1].push_back(v);
                t.columns[2].push_back(measured);
                t.columns[3].push_back(reference);
            }
            meta["kind"] = kind;
            io::write_csv(un_out, t, meta);
        } else if (cf->parsed()) {
            auto spec = cf_args.build();
            std::vector<int> ns;
            std::stringstream ss(cf_nlist);
            std::string tok;
            while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
            auto d = confinement_diagnostic(spec, ns);
            io::CsvTable t;
            t.header = {"n", "sigma0"};
            t.columns.assign(2, {});
            for (std::size_t i = 0; i < d.n.size(); ++i) {
                t.columns[0].push_back(d.n[i]);
                t.columns[1].push_back(d.sigma0[i]);
            }
            meta["growth_class"] = d.growth_class;
            meta["loglog_exponent"] = meta_num(d.loglog_exponent);
            meta["logn_r2"] = meta_num(d.logn_r2);
            io::write_csv(cf_out, t, meta);
            std::cout << d.growth_class << "\n";
        } else if (rc->parsed()) {
            auto t = io::read_csv(rc_phi);
            const auto& om = t.col("omega");
            const auto& phi = t.col("phi_or_envelope");
            std::vector<double> w(phi.size());
            for (std::size_t i = 0; i < phi.size(); ++i) w[i] = phi[i] / (2 * M_PI);
            auto tab = weights::tabulated(om, w);
            auto seq = reconstruct_coefficients(tab, rc_n);
            seq.meta.insert(meta.begin(), meta.end());
            io::write_sequence(rc_out, seq);
            if (!rc_ref.empty()) {
                auto ref = load_coeffs(rc_ref);
                double worst = 0;
                const int m = std::min(seq.size(), ref.size());
                for (int i = 1; i <= m; ++i)
                    worst = std::max(worst, std::abs(seq.at(i) - ref.at(i)) / ref.at(i));
                std::cout << "max coefficient deviation: " << io::fmt17(worst) << "\n";
            }
        }
        return 0;
    } catch (const Error& e) {
        if (json_errors)
            std::cerr << nlohmann::json{{"error", e.name()}, {"message", e.what()}}.dump() << "\n";
        else
            std::cerr << e.name() << ": " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        if (json_errors)
            std::cerr << nlohmann::json{{"error", "ValidationError"}, {"message", e.what()}}.dump()
                      << "\n";
        else
            std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
