#include <chrono>
#include <iomanip>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "packspec/fakespec.hpp"
#include "packspec/morrey.hpp"
#include "packspec/packing.hpp"
#include "packspec/penergy.hpp"
#include "packspec/space.hpp"
#include "packspec/sweep.hpp"

using nlohmann::ordered_json;
using namespace packspec;

namespace {

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// temp file + rename so readers never see partial output
void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot move output into place: " + path);
}

std::vector<int> parse_indices(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t dash = item.find('-');
        if (dash != std::string::npos && dash > 0) {
            int a = std::stoi(item.substr(0, dash));
            int b = std::stoi(item.substr(dash + 1));
            for (int v = a; v <= b; ++v) out.push_back(v);
        } else {
            out.push_back(std::stoi(item));
        }
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

ordered_json family_json(const DisjointFamily& fam) {
    ordered_json j = ordered_json::array();
    for (auto& s : fam.supports) j.push_back(s);
    return j;
}

struct CommonOpts {
    std::string space_path;
    std::string out = "-";
    uint64_t seed = 0;
    double tol = 1e-8;
    int max_iter = 20000;
    int restarts = 8;
    int threads = 1;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_space = true) {
    if (with_space) cmd->add_option("--space", o.space_path, "space JSON file")->required();
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--seed", o.seed, "seed for stochastic strategies");
    cmd->add_option("--tol", o.tol, "solver tolerance");
    cmd->add_option("--max-iter", o.max_iter, "solver iteration cap");
    cmd->add_option("--restarts", o.restarts, "solver restarts");
    cmd->add_option("--threads", o.threads, "worker threads (PACKSPEC_THREADS fallback)");
    cmd->add_flag("--strict", o.strict, "exit 2 on solver non-convergence");
}

ordered_json echo_config(const CommonOpts& o, ordered_json extra) {
    ordered_json j;
    j["seed"] = o.seed;
    j["tol"] = o.tol;
    j["max_iter"] = o.max_iter;
    j["restarts"] = o.restarts;
    j["threads"] = o.threads;
    for (auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

int resolve_threads(int flag) {
    if (flag > 1) return flag;
    if (const char* env = std::getenv("PACKSPEC_THREADS")) return std::max(1, std::atoi(env));
    return flag > 0 ? flag : 1;
}

FakespecConfig make_cfg(const CommonOpts& o, double p) {
    FakespecConfig c;
    c.energy.p = p;
    c.energy.tol = o.tol;
    c.energy.max_iter = o.max_iter;
    c.energy.seed = o.seed;
    c.energy.threads = resolve_threads(o.threads);
    c.final_restarts = o.restarts;
    c.seed = o.seed;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"packspec: packing radii, p-Laplacian Dirichlet eigenvalues and "
                 "min-max spectra on finite metric measure spaces"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a space file");
    std::string gen_kind;
    double gen_L = 2 * std::acos(-1.0), gen_L2 = 1.0, gen_h = 0.1, gen_radius = 0.35;
    int gen_n = 64, gen_n2 = 8;
    uint64_t gen_seed = 0;
    std::string gen_out = "-";
    gen->add_option("kind", gen_kind, "circle|interval|torus|theta|random-geometric")
        ->required();
    gen->add_option("--L", gen_L, "length (circle/interval) or L1 (torus)");
    gen->add_option("--L2", gen_L2, "torus L2");
    gen->add_option("--n", gen_n, "vertex count (or n1 for torus)");
    gen->add_option("--n2", gen_n2, "torus n2");
    gen->add_option("--step", gen_h, "theta mesh step");
    gen->add_option("--radius", gen_radius, "random-geometric connect radius");
    gen->add_option("--seed", gen_seed, "random-geometric seed");
    gen->add_option("--out", gen_out, "output path");

    // ---- pack ----
    auto* packc = app.add_subcommand("pack", "packing radius");
    CommonOpts pack_o;
    int pack_k = 1, pack_kmax = 0, pack_dim = 1;
    std::string pack_mode = "auto";
    bool pack_sweep = false;
    add_common(packc, pack_o);
    packc->add_option("--k", pack_k, "k (uses k+1 centers)");
    packc->add_option("--mode", pack_mode, "exact|greedy|auto");
    packc->add_flag("--sweep-k", pack_sweep, "emit CSV rows (k, pack_k, k*pack_k^n)");
    packc->add_option("--kmax", pack_kmax, "sweep upper k");
    packc->add_option("--dim", pack_dim, "dimension n for the packing law column");

    // ---- eig ----
    auto* eig = app.add_subcommand("eig", "first Dirichlet eigenvalue on a support");
    CommonOpts eig_o;
    std::string eig_support;
    double eig_p = 2.0;
    bool eig_minimizer = false;
    add_common(eig, eig_o);
    eig->add_option("--support", eig_support, "comma list / ranges, e.g. 1,2,5-9")->required();
    eig->add_option("--p", eig_p, "exponent p in (1, 256]");
    eig->add_flag("--emit-minimizer", eig_minimizer, "include the minimizing function");

    // ---- fakespec ----
    auto* fs = app.add_subcommand("fakespec", "min-max fake spectrum values");
    CommonOpts fs_o;
    int fs_k = 1;
    double fs_p = 2.0;
    std::string fs_strategy = "local", fs_omega;
    int fs_exh_max = 14;
    add_common(fs, fs_o);
    fs->add_option("--k", fs_k, "k")->required();
    fs->add_option("--p", fs_p, "exponent p");
    fs->add_option("--strategy", fs_strategy, "exhaustive|local|anneal");
    fs->add_option("--omega", fs_omega, "ambient subset: Dirichlet variant");
    fs->add_option("--exhaustive-max-n", fs_exh_max, "size guard for exhaustive strategy");

    // ---- sweep ----
    auto* sw = app.add_subcommand("sweep", "p-sweep toward the packing target");
    CommonOpts sw_o;
    int sw_k = 1;
    std::string sw_p = "8,16,32,64", sw_strategy = "local", sw_omega, sw_format = "json";
    add_common(sw, sw_o);
    sw->add_option("--k", sw_k, "k")->required();
    sw->add_option("--p", sw_p, "comma list of increasing p values");
    sw->add_option("--strategy", sw_strategy, "exhaustive|local|anneal");
    sw->add_option("--omega", sw_omega, "ambient subset: Dirichlet sweep");
    sw->add_option("--format", sw_format, "json|csv");

    // ---- audit ----
    auto* au = app.add_subcommand("audit", "run the invariant audit");
    CommonOpts au_o;
    int au_kmax = 2;
    std::string au_p = "2,3,4,6", au_strategy = "exhaustive", au_format = "json";
    add_common(au, au_o);
    au->add_option("--kmax", au_kmax, "largest k audited");
    au->add_option("--p", au_p, "p grid");
    au->add_option("--strategy", au_strategy, "exhaustive|local|anneal");
    au->add_option("--format", au_format, "json|csv");

    // ---- refine ----
    auto* rf = app.add_subcommand("refine", "refinement study across mesh sizes");
    CommonOpts rf_o;
    std::string rf_gen = "interval", rf_quantity = "dirichlet_lambda", rf_nlist = "26,51,101,201";
    int rf_k = 1;
    double rf_p = 2.0;
    add_common(rf, rf_o, false);
    rf->add_option("--generator", rf_gen, "interval|circle|theta");
    rf->add_option("--quantity", rf_quantity, "dirichlet_lambda|pack|diameter|lambda_bar");
    rf->add_option("--n-list", rf_nlist, "mesh sizes");
    rf->add_option("--k", rf_k, "k where applicable");
    rf->add_option("--p", rf_p, "p where applicable");

    // ---- morrey ----
    auto* mo = app.add_subcommand("morrey", "explicit Morrey constants");
    double mo_cd = 4.0, mo_cp = 1.0, mo_sigma = 2.0, mo_p = 8.0, mo_diam = 1.0;
    std::string mo_out = "-";
    mo->add_option("--cd", mo_cd, "doubling constant C_D");
    mo->add_option("--cp", mo_cp, "Poincare constant C_P");
    mo->add_option("--sigma", mo_sigma, "Poincare enlargement sigma");
    mo->add_option("--p", mo_p, "exponent p > log2(C_D)");
    mo->add_option("--diam", mo_diam, "diameter entering C(p)");
    mo->add_option("--out", mo_out, "output path");

    auto* moc = mo->add_subcommand("check", "Holder estimate check for a function");
    CommonOpts moc_o;
    std::string moc_f = "dist:0";
    double moc_p = 8.0, moc_sigma = 2.0, moc_p0 = 1.0, moc_safety = 2.0;
    add_common(moc, moc_o);
    moc->add_option("--f", moc_f, "dist:<v> | cone:<v>:<r> | file:<path>");
    moc->add_option("--p", moc_p, "exponent p");
    moc->add_option("--p0", moc_p0, "Poincare exponent p0");
    moc->add_option("--sigma", moc_sigma, "Poincare sigma");
    moc->add_option("--safety", moc_safety, "inflation of the estimated C_P");

    auto* mop = mo->add_subcommand("poincare", "Poincare constant lower-bound estimate");
    CommonOpts mop_o;
    double mop_p0 = 1.0, mop_sigma = 2.0;
    add_common(mop, mop_o);
    mop->add_option("--p0", mop_p0, "exponent p0");
    mop->add_option("--sigma", mop_sigma, "enlargement sigma");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*gen) {
            MetricMeasureSpace sp = [&] {
                if (gen_kind == "circle") return MetricMeasureSpace::circle(gen_L, gen_n);
                if (gen_kind == "interval") return MetricMeasureSpace::interval(gen_L, gen_n);
                if (gen_kind == "torus")
                    return MetricMeasureSpace::torus_grid(gen_L, gen_L2, gen_n, gen_n2);
                if (gen_kind == "theta") return MetricMeasureSpace::theta_space(gen_h);
                if (gen_kind == "random-geometric")
                    return MetricMeasureSpace::random_geometric(gen_n, gen_radius, gen_seed);
                throw std::invalid_argument("unknown generator: " + gen_kind);
            }();
            write_atomic(gen_out, sp.to_json().dump(2) + "\n");
            return 0;
        }

        if (*packc) {
            auto sp = MetricMeasureSpace::load(pack_o.space_path);
            if (pack_sweep) {
                int kmax = pack_kmax > 0 ? pack_kmax : std::min(sp.size(), 16);
                std::ostringstream csv;
                csv << "# schema_version=1\n# command=pack --sweep-k\n";
                csv << "# space=" << pack_o.space_path << " dim=" << pack_dim
                    << " mode=" << pack_mode << "\n";
                csv << "k,pack_k,k_pack_k_pow_n\n";
                for (int K = 2; K <= kmax; ++K) {
                    PackMode m = pack_mode == "exact"  ? PackMode::exact
                                 : pack_mode == "greedy" ? PackMode::greedy
                                                         : PackMode::auto_mode;
                    double pk = pack_radius(sp, K, m).radius;
                    csv << K << "," << std::setprecision(17) << pk << ","
                        << K * std::pow(pk, pack_dim) << "\n";
                }
                write_atomic(pack_o.out, csv.str());
                return 0;
            }
            PackMode m = pack_mode == "exact"  ? PackMode::exact
                         : pack_mode == "greedy" ? PackMode::greedy
                                                 : PackMode::auto_mode;
            PackingResult r = pack_radius(sp, pack_k + 1, m);
            ordered_json j;
            j["schema_version"] = 1;
            j["command"] = "pack";
            j["config"] = echo_config(pack_o, {{"k", pack_k}, {"mode", pack_mode}});
            j["generated_at"] = iso_now();
            j["k_plus_1"] = r.k_plus_1;
            j["radius"] = r.radius;
            j["centers"] = r.centers;
            j["certificate"] =
                r.exact ? ordered_json{{"type", "exact"}}
                        : ordered_json{{"type", "heuristic"},
                                       {"lower_bound", r.lower_bound},
                                       {"upper_bound", r.upper_bound}};
            write_atomic(pack_o.out, j.dump(2) + "\n");
            return 0;
        }

        if (*eig) {
            auto sp = MetricMeasureSpace::load(eig_o.space_path);
            EnergyConfig e;
            e.p = eig_p;
            e.tol = eig_o.tol;
            e.max_iter = eig_o.max_iter;
            e.restarts = eig_o.restarts;
            e.seed = eig_o.seed;
            e.threads = resolve_threads(eig_o.threads);
            EigenResult r = dirichlet_eig1(sp, parse_indices(eig_support), e);
            ordered_json j;
            j["schema_version"] = 1;
            j["command"] = "eig";
            j["config"] = echo_config(eig_o, {{"p", eig_p}, {"support", eig_support}});
            j["generated_at"] = iso_now();
            j["lambda"] = r.lambda;
            j["lambda_root"] = r.lambda_root;
            if (e.use_log_domain()) j["log_lambda"] = r.log_lambda;
            j["status"] = to_string(r.status);
            j["iterations"] = r.iterations;
            j["restart_spread"] = r.restart_spread;
            if (eig_minimizer) j["minimizer"] = r.minimizer;
            write_atomic(eig_o.out, j.dump(2) + "\n");
            return (eig_o.strict && r.status != SolveStatus::converged) ? 2 : 0;
        }

        if (*fs) {
            auto sp = MetricMeasureSpace::load(fs_o.space_path);
            FakespecConfig c = make_cfg(fs_o, fs_p);
            c.exhaustive_max_n = fs_exh_max;
            Strategy st = strategy_from_string(fs_strategy);
            FakeSpecResult rb, ru;
            if (fs_omega.empty()) {
                rb = lambda_bar(sp, fs_k, fs_p, st, c);
                ru = lambda_under(sp, fs_k, fs_p, st, c);
            } else {
                auto om = parse_indices(fs_omega);
                rb = lambda_bar_dirichlet(sp, om, fs_k, fs_p, st, c);
                ru = lambda_under_dirichlet(sp, om, fs_k, fs_p, st, c);
            }
            ordered_json j;
            j["schema_version"] = 1;
            j["command"] = "fakespec";
            j["config"] = echo_config(
                fs_o, {{"k", fs_k}, {"p", fs_p}, {"strategy", fs_strategy},
                       {"omega", fs_omega}});
            j["generated_at"] = iso_now();
            j["lambda_bar"] = rb.lambda_bar;
            j["lambda_bar_root"] = rb.lambda_bar_root;
            j["lambda_under"] = ru.lambda_under;
            j["lambda_under_root"] = ru.lambda_under_root;
            j["family"] = family_json(rb.family);
            j["family_under"] = family_json(ru.family);
            j["per_set_lambda"] = rb.per_set_lambda;
            j["certificate"] = rb.certificate == Certificate::exact ? "exact" : "upper_bound";
            j["packing_bound"] = rb.packing_bound;
            j["packing_bound_root"] = rb.packing_bound_root;
            write_atomic(fs_o.out, j.dump(2) + "\n");
            return 0;
        }

        if (*sw) {
            auto sp = MetricMeasureSpace::load(sw_o.space_path);
            FakespecConfig c = make_cfg(sw_o, 2.0);
            Strategy st = strategy_from_string(sw_strategy);
            auto plist = parse_doubles(sw_p);
            SweepReport rep;
            if (sw_omega.empty())
                rep = p_sweep(sp, sw_k, plist, st, c);
            else
                rep = dirichlet_sweep(sp, parse_indices(sw_omega), sw_k, plist, st, c);
            if (sw_format == "csv") {
                std::ostringstream csv;
                csv << "# schema_version=1\n";
                csv << "# space=" << sw_o.space_path << " k=" << sw_k << " strategy="
                    << sw_strategy << " seed=" << sw_o.seed << " target="
                    << std::setprecision(17) << rep.target << " extrapolated="
                    << rep.extrapolated_limit << "\n";
                csv << "p,lambda_bar_root,lambda_under_root,p_times_root,bound_root,target,"
                       "rel_err\n";
                for (auto& r : rep.rows)
                    csv << r.p << "," << std::setprecision(17) << r.lambda_bar_root << ","
                        << r.lambda_under_root << "," << r.p_times_root << "," << r.bound_root
                        << "," << rep.target << ","
                        << std::abs(r.lambda_bar_root - rep.target) / rep.target << "\n";
                write_atomic(sw_o.out, csv.str());
            } else {
                ordered_json j;
                j["schema_version"] = 1;
                j["command"] = "sweep";
                j["config"] = echo_config(sw_o, {{"k", sw_k},
                                                 {"p", sw_p},
                                                 {"strategy", sw_strategy},
                                                 {"omega", sw_omega}});
                j["generated_at"] = iso_now();
                j["space_id"] = rep.space_id;
                j["dirichlet"] = rep.dirichlet;
                j["target"] = rep.target;
                auto rows = ordered_json::array();
                for (auto& r : rep.rows)
                    rows.push_back({{"p", r.p},
                                    {"lambda_bar_root", r.lambda_bar_root},
                                    {"lambda_under_root", r.lambda_under_root},
                                    {"p_times_root", r.p_times_root},
                                    {"bound_root", r.bound_root},
                                    {"status", r.status}});
                j["rows"] = std::move(rows);
                j["extrapolated_limit"] = rep.extrapolated_limit;
                j["extrapolation_residual"] = rep.extrapolation_residual;
                j["extrapolation_refused"] = rep.extrapolation_refused;
                j["rel_err_at_pmax"] = rep.rel_err_at_pmax;
                j["rel_err_extrapolated"] = rep.rel_err_extrapolated;
                write_atomic(sw_o.out, j.dump(2) + "\n");
            }
            bool failed_rows = false;
            for (auto& r : rep.rows) failed_rows |= r.status != "ok";
            return (sw_o.strict && failed_rows) ? 2 : 0;
        }

        if (*au) {
            auto sp = MetricMeasureSpace::load(au_o.space_path);
            FakespecConfig c = make_cfg(au_o, 2.0);
            auto rows = audit(sp, au_kmax, parse_doubles(au_p),
                              strategy_from_string(au_strategy), c, au_o.seed);
            long violations = 0;
            for (auto& r : rows) violations += r.pass ? 0 : 1;
            if (au_format == "csv") {
                std::ostringstream csv;
                csv << "# schema_version=1\n";
                csv << "law,instance,lhs,rhs,tol,pass\n";
                for (auto& r : rows)
                    csv << r.law << "," << r.instance << "," << std::setprecision(17) << r.lhs
                        << "," << r.rhs << "," << r.tol << "," << (r.pass ? 1 : 0) << "\n";
                write_atomic(au_o.out, csv.str());
            } else {
                ordered_json j;
                j["schema_version"] = 1;
                j["command"] = "audit";
                j["config"] = echo_config(au_o, {{"kmax", au_kmax},
                                                 {"p", au_p},
                                                 {"strategy", au_strategy}});
                j["generated_at"] = iso_now();
                j["violations"] = violations;
                auto arr = ordered_json::array();
                for (auto& r : rows)
                    arr.push_back({{"law", r.law},
                                   {"instance", r.instance},
                                   {"lhs", r.lhs},
                                   {"rhs", r.rhs},
                                   {"tol", r.tol},
                                   {"pass", r.pass}});
                j["rows"] = std::move(arr);
                write_atomic(au_o.out, j.dump(2) + "\n");
            }
            return (au_o.strict && violations > 0) ? 2 : 0;
        }

        if (*rf) {
            FakespecConfig c = make_cfg(rf_o, rf_p);
            std::vector<int> ns;
            for (double v : parse_doubles(rf_nlist)) ns.push_back(static_cast<int>(v));
            RefinementStudy st = refinement_study(rf_gen, rf_quantity, ns, rf_k, rf_p, c);
            ordered_json j;
            j["schema_version"] = 1;
            j["command"] = "refine";
            j["config"] = echo_config(rf_o, {{"generator", rf_gen},
                                             {"quantity", rf_quantity},
                                             {"n_list", rf_nlist},
                                             {"k", rf_k},
                                             {"p", rf_p}});
            j["generated_at"] = iso_now();
            auto arr = ordered_json::array();
            for (auto& r : st.rows)
                arr.push_back({{"n", r.n},
                               {"value", r.value},
                               {"reference", r.reference},
                               {"error", r.error}});
            j["rows"] = std::move(arr);
            j["empirical_order"] = st.empirical_order;
            write_atomic(rf_o.out, j.dump(2) + "\n");
            return 0;
        }

        if (*mo) {
            if (*moc) {
                auto sp = MetricMeasureSpace::load(moc_o.space_path);
                FunctionOnSpace f;
                if (moc_f.rfind("dist:", 0) == 0) {
                    int v = std::stoi(moc_f.substr(5));
                    f.resize(sp.size());
                    for (int y = 0; y < sp.size(); ++y) f[y] = sp.dist(v, y);
                } else if (moc_f.rfind("cone:", 0) == 0) {
                    auto rest = moc_f.substr(5);
                    auto c1 = rest.find(':');
                    f = cone_function(sp, std::stoi(rest.substr(0, c1)),
                                      std::stod(rest.substr(c1 + 1)));
                } else if (moc_f.rfind("file:", 0) == 0) {
                    std::ifstream in(moc_f.substr(5));
                    ordered_json jf;
                    in >> jf;
                    f = jf.get<FunctionOnSpace>();
                } else {
                    throw std::invalid_argument("morrey check: bad --f spec");
                }
                PoincareData pe = poincare_estimate(sp, moc_p0, moc_sigma, {}, moc_o.seed);
                MorreyConstants mc = morrey_constants(sp.doubling_constant(), pe.C_P,
                                                      moc_sigma, moc_p, sp.diameter());
                HolderReport hr = holder_check(sp, f, moc_p, mc, moc_safety);
                ordered_json j;
                j["schema_version"] = 1;
                j["command"] = "morrey check";
                j["config"] = echo_config(moc_o, {{"f", moc_f},
                                                  {"p", moc_p},
                                                  {"p0", moc_p0},
                                                  {"sigma", moc_sigma},
                                                  {"safety", moc_safety}});
                j["generated_at"] = iso_now();
                j["C_P_estimate"] = pe.C_P;
                j["C_P_method"] = pe.method;
                j["C_of_p"] = hr.c_of_p;
                j["max_ratio"] = hr.max_ratio;
                j["bound"] = hr.bound;
                j["pass"] = hr.pass;
                write_atomic(moc_o.out, j.dump(2) + "\n");
                return 0;
            }
            if (*mop) {
                auto sp = MetricMeasureSpace::load(mop_o.space_path);
                PoincareData pe = poincare_estimate(sp, mop_p0, mop_sigma, {}, mop_o.seed);
                ordered_json j;
                j["schema_version"] = 1;
                j["command"] = "morrey poincare";
                j["config"] = echo_config(mop_o, {{"p0", mop_p0}, {"sigma", mop_sigma}});
                j["generated_at"] = iso_now();
                j["C_P"] = pe.C_P;
                j["p_0"] = pe.p_0;
                j["sigma"] = pe.sigma;
                j["method"] = pe.method;
                write_atomic(mop_o.out, j.dump(2) + "\n");
                return 0;
            }
            MorreyConstants mc = morrey_constants(mo_cd, mo_cp, mo_sigma, mo_p, mo_diam);
            ordered_json j;
            j["schema_version"] = 1;
            j["command"] = "morrey";
            j["config"] = {{"cd", mo_cd},
                           {"cp", mo_cp},
                           {"sigma", mo_sigma},
                           {"p", mo_p},
                           {"diam", mo_diam}};
            j["generated_at"] = iso_now();
            j["s"] = mc.s;
            j["C"] = mc.C;
            j["C_prime"] = mc.C_prime;
            j["C_dprime_stated"] = mc.C_dprime_stated;
            j["C_dprime_product"] = mc.C_dprime_product;
            j["C_of_p"] = mc.C_of_p;
            j["note"] = mc.note;
            write_atomic(mo_out, j.dump(2) + "\n");
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
