// carfin: build finite CAR algebras, test exchangeability structure, and
// invert the mixing measure of a symmetric fermionic state.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "carfin/definetti.hpp"
#include "carfin/gns.hpp"
#include "carfin/io.hpp"
#include "carfin/perms.hpp"
#include "carfin/states.hpp"
#include "carfin/verify.hpp"

namespace {

using carfin::cx;
using carfin::Mat;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitParseOrDomain = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitCapacity = 4;
constexpr int kExitChecksFailed = 5;

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const carfin::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const carfin::infeasible_moments_error& e) {
        std::cerr << "infeasible moments: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const carfin::not_symmetric_error& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParseOrDomain;
    }
}

json measure_to_json(const carfin::MixingMeasure& measure) {
    json atoms = json::array();
    for (const auto& a : measure.atoms) atoms.push_back({{"mu", a.mu}, {"weight", a.weight}});
    return atoms;
}

std::vector<std::pair<double, double>> parse_mixture(const std::string& spec) {
    std::vector<std::pair<double, double>> atoms;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("mixture atoms look like mu:weight, comma-separated");
        atoms.emplace_back(std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1)));
    }
    if (atoms.empty()) throw std::invalid_argument("empty mixture spec");
    return atoms;
}

int cmd_decompose(const std::string& state_path, int grid, double tol,
                  const std::string& out_path, bool roundtrip, std::uint64_t seed) {
    carfin::State phi = carfin::load_state(state_path);
    carfin::CarContext ctx(phi.n);
    carfin::RecoveryOptions options;
    options.grid_size = grid;
    options.tol = tol;
    carfin::DecompositionReport rep = carfin::decompose_state(ctx, phi, options, seed);
    carfin::save_measure(rep.measure, out_path);

    json out;
    out["n_modes"] = phi.n;
    out["seed"] = rep.seed;
    out["grid"] = grid;
    out["tol"] = tol;
    out["moments"] = rep.moments;
    out["residual"] = rep.residual;
    out["battery_deviation"] = rep.battery_max;
    out["battery_detail"] = {{"occupation_products", rep.battery_occupation},
                             {"two_site_words", rep.battery_two_site},
                             {"random_symmetrized", rep.battery_random}};
    out["measure"] = measure_to_json(rep.measure);
    out["measure_file"] = out_path;
    if (roundtrip) {
        carfin::MixingMeasure reloaded = carfin::load_measure(out_path);
        carfin::State recon = carfin::reconstruct_state(reloaded, phi.n);
        auto moments = carfin::occupation_moments(ctx, recon, phi.n);
        double dev = 0.0;
        for (std::size_t k = 0; k < moments.size(); ++k)
            dev = std::max(dev, std::abs(moments[k] - rep.moments[k]));
        // occupation battery of the reloaded reconstruction against the input
        double battery = 0.0;
        for (Eigen::Index mask = 0; mask < carfin::pow2(phi.n); ++mask) {
            cx lhs = 0.0, rhs = 0.0;
            for (Eigen::Index s = 0; s < ctx.dim(); ++s) {
                if ((s & mask) != 0) continue;
                lhs += phi.density(s, s);
                rhs += recon.density(s, s);
            }
            battery = std::max(battery, std::abs(lhs - rhs));
        }
        out["roundtrip"] = {{"moment_deviation", dev}, {"battery_deviation", battery}};
    }
    std::cout << out.dump(1) << "\n";
    return kExitOk;
}

int cmd_verify(int n, std::uint64_t seed) {
    carfin::VerifyReport rep = carfin::run_verification(n, seed);
    json checks = json::array();
    for (const auto& c : rep.checks) {
        json jc = {{"name", c.name},
                   {"deviation", c.deviation},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}};
        if (!c.note.empty()) jc["note"] = c.note;
        checks.push_back(std::move(jc));
    }
    json out = {{"n", rep.n}, {"seed", rep.seed}, {"checks", checks}, {"all_pass", rep.all_pass}};
    std::cout << out.dump(1) << "\n";
    return rep.all_pass ? kExitOk : kExitChecksFailed;
}

int cmd_count(int m, int k, int big_n) {
    auto f = carfin::intersecting_fraction(m, k, big_n);
    std::printf("m k N exact estimate abs_error\n");
    std::printf("%d %d %d %.9g %.9g %.3g\n", m, k, big_n, f.exact, f.estimate,
                std::abs(f.exact - f.estimate));
    return kExitOk;
}

int cmd_cluster(double mu, bool have_mu, const std::string& state_path, int stages, int n) {
    if (!have_mu && state_path.empty())
        throw std::invalid_argument("cluster: provide --mu or --state");
    carfin::State phi;
    if (have_mu) {
        phi = carfin::product_state(mu, n);
    } else {
        phi = carfin::load_state(state_path);
        n = phi.n;
    }
    carfin::CarContext ctx(n);
    if (!carfin::is_symmetric(ctx, phi, 1e-8))
        throw carfin::not_symmetric_error("cluster: state is not symmetric");
    if ((Eigen::Index(1) << stages) > n)
        throw carfin::capacity_error("cluster: 2^stages exceeds the mode count");
    Mat e11 = ctx.matrix_unit(1, 1, 1);
    std::printf("stage defect\n");
    for (int m = 1; m <= stages; ++m) {
        cx defect = carfin::strong_clustering_check(ctx, phi, e11, e11, m);
        std::printf("%d %.12g\n", m, std::abs(defect));
    }
    return kExitOk;
}

int cmd_classify(double mu, int witness_n) {
    carfin::FactorType type = carfin::classify_type(mu);
    if (type.tag == carfin::FactorTag::III_lambda) {
        auto spec = carfin::eigenvalue_ratio_spectrum(mu, witness_n);
        double lo = spec.ratios.front(), hi = spec.ratios.front();
        for (double r : spec.ratios) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        std::printf("III_lambda lambda=%.9g ratio_witness_n=%d ratios_in=[%.12g,%.12g]\n",
                    type.lambda, witness_n, lo, hi);
    } else if (type.tag == carfin::FactorTag::II_1) {
        std::printf("II_1\n");
    } else {
        std::printf("I_infinity\n");
    }
    return kExitOk;
}

int cmd_oddness(const std::string& n_list) {
    std::vector<int> ns;
    std::istringstream ss(n_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
    if (ns.empty()) throw std::invalid_argument("oddness: empty n list");
    for (int n : ns)
        if (n < 1 || n > carfin::kMaxModes)
            throw carfin::capacity_error("oddness: n outside 1.." +
                                         std::to_string(carfin::kMaxModes));
    auto rows = carfin::oddness_decay(
        ns, [](const carfin::CarContext& c) { return c.annihilator(1); });
    std::printf("n,average,gns_compression,sqrt_bound\n");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int n = rows[i].first;
        carfin::CarContext ctx(n);
        carfin::GnsRep gns = carfin::build_gns(ctx, carfin::product_state(0.5, n));
        double comp = carfin::ep_odd_compression(ctx, gns, ctx.annihilator(1));
        std::printf("%d,%.12g,%.12g,%.12g\n", n, rows[i].second.real(), comp,
                    std::sqrt(1.0 / double(n)));
    }
    return kExitOk;
}

int cmd_make_state(double mu, bool have_mu, const std::string& mixture, int n,
                   const std::string& out_path) {
    if (!have_mu && mixture.empty())
        throw std::invalid_argument("make-state: provide --mu or --mixture");
    carfin::State phi;
    if (have_mu)
        phi = carfin::product_state(mu, n);
    else
        phi = carfin::mixture_of_product_states(parse_mixture(mixture), n);
    carfin::save_state(phi, out_path);
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite CAR algebra toolkit: exchangeable fermionic states, "
                 "clustering diagnostics, and de Finetti measure recovery"};
    app.require_subcommand(1);

    // decompose
    std::string state_path, out_path;
    int grid = 1001;
    double tol = 1e-6;
    bool roundtrip = false;
    std::uint64_t seed = 424242;
    auto* decompose = app.add_subcommand(
        "decompose", "recover the mixing measure of a symmetric state");
    decompose->add_option("--state", state_path, "state JSON file")->required();
    decompose->add_option("--grid", grid, "grid size on [0,1]")->capture_default_str();
    decompose->add_option("--tol", tol, "feasibility tolerance")->capture_default_str();
    decompose->add_option("--out", out_path, "output measure CSV")->required();
    decompose->add_flag("--roundtrip", roundtrip, "reload the CSV, reconstruct, compare");
    decompose->add_option("--seed", seed, "battery RNG seed")->capture_default_str();

    // verify
    int verify_n = 4;
    std::uint64_t verify_seed = 42;
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    verify->add_option("--n", verify_n, "mode count")->required();
    verify->add_option("--seed", verify_seed, "RNG seed")->capture_default_str();

    // count
    int count_m = 1, count_k = 1, count_n = 2;
    auto* count = app.add_subcommand(
        "count", "overlap fraction of permuted index windows (exact vs mk/N)");
    count->add_option("--m", count_m)->required();
    count->add_option("--k", count_k)->required();
    count->add_option("--N", count_n)->required();

    // cluster
    double cluster_mu = 0.5;
    std::string cluster_state;
    int cluster_stages = 1, cluster_n = 4;
    auto* cluster = app.add_subcommand(
        "cluster", "dyadic-shift clustering defects of a product state or mixture");
    auto* mu_opt = cluster->add_option("--mu", cluster_mu, "product state parameter");
    auto* state_opt =
        cluster->add_option("--state", cluster_state, "state JSON file instead of --mu");
    cluster->add_option("--stages", cluster_stages, "number of dyadic stages")->required();
    cluster->add_option("--n", cluster_n, "mode count (with --mu)")->capture_default_str();
    mu_opt->excludes(state_opt);

    // classify
    double classify_mu = 0.5;
    int classify_n = 6;
    auto* classify = app.add_subcommand("classify", "factor type of the product state");
    classify->add_option("--mu", classify_mu)->required();
    classify->add_option("--n", classify_n, "ratio witness modes")->capture_default_str();

    // oddness
    std::string n_list;
    auto* oddness = app.add_subcommand(
        "oddness", "group-averaged anticommutator decay and GNS compression bound");
    oddness->add_option("--n-list", n_list, "comma-separated mode counts")->required();

    // make-state
    double make_mu = 0.5;
    std::string make_mixture;
    int make_n = 4;
    std::string make_out;
    auto* make_state = app.add_subcommand("make-state", "write a product or mixture state file");
    auto* mk_mu = make_state->add_option("--mu", make_mu, "product state parameter");
    auto* mk_mix = make_state->add_option("--mixture", make_mixture,
                                          "atoms as mu:weight,mu:weight,...");
    make_state->add_option("--n", make_n, "mode count")->required();
    make_state->add_option("--out", make_out, "output JSON path")->required();
    mk_mu->excludes(mk_mix);

    CLI11_PARSE(app, argc, argv);

    if (decompose->parsed())
        return guarded([&] {
            return cmd_decompose(state_path, grid, tol, out_path, roundtrip, seed);
        });
    if (verify->parsed()) return guarded([&] { return cmd_verify(verify_n, verify_seed); });
    if (count->parsed())
        return guarded([&] { return cmd_count(count_m, count_k, count_n); });
    if (cluster->parsed())
        return guarded([&] {
            return cmd_cluster(cluster_mu, mu_opt->count() > 0, cluster_state, cluster_stages,
                               cluster_n);
        });
    if (classify->parsed())
        return guarded([&] { return cmd_classify(classify_mu, classify_n); });
    if (oddness->parsed()) return guarded([&] { return cmd_oddness(n_list); });
    if (make_state->parsed())
        return guarded([&] {
            return cmd_make_state(make_mu, mk_mu->count() > 0, make_mixture, make_n, make_out);
        });
    return kExitParseOrDomain;
}
