// ecstat: exact elliptic-curve statistics over small prime fields.
//
// Subcommands expose the library modules; exact rationals print as
// "num/den"; JSON-lines go to stdout, diagnostics to stderr.
// Exit codes: 0 success, 1 budget/domain error, 2 usage error.

#include <cstdio>
#include <functional>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ecstat/census.hpp"
#include "ecstat/constants.hpp"
#include "ecstat/density.hpp"
#include "ecstat/experiments.hpp"
#include "ecstat/io.hpp"
#include "ecstat/matcount.hpp"
#include "ecstat/polyprobe.hpp"
#include "ecstat/quadform.hpp"

using namespace ecstat;

namespace {

struct CliConfig {
    i64 z = 10000;
    std::string format = "text";
    unsigned workers = 0;  // 0 = available parallelism
    u64 seed = 0;
    u64 budget = u64(1) << 24;
};

void emit(const CliConfig& cfg, const json& j, const std::string& text,
          const std::string& csv = "") {
    if (cfg.format == "json") std::cout << j.dump() << "\n";
    else if (cfg.format == "csv" && !csv.empty()) std::cout << csv;
    else std::cout << text << "\n";
}

GroupShape parse_shape(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("shape must be 'm,k'");
    return GroupShape{std::stoll(s.substr(0, comma)), std::stoll(s.substr(comma + 1))};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact elliptic-curve statistics over F_p"};
    app.require_subcommand(1);
    CliConfig cfg;
    app.add_option("--z", cfg.z, "prime cutoff for truncated Euler products")
        ->envname("ECSTAT_Z");
    app.add_option("--format", cfg.format, "output format: text|json|csv")
        ->envname("ECSTAT_FORMAT")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--workers", cfg.workers, "worker threads (0 = hardware)")
        ->envname("ECSTAT_WORKERS");
    app.add_option("--seed", cfg.seed, "seed for quasi-random integration and corpora")
        ->envname("ECSTAT_SEED");
    app.add_option("--budget", cfg.budget, "enumeration budget cap")->envname("ECSTAT_BUDGET");

    // ------------------------------------------------------------------ classno
    auto* classno = app.add_subcommand("classno", "Kronecker class numbers and form scans");
    i64 cn_D = 0;
    bool cn_forms = false;
    i64 cn_cnf_z = 0;
    classno->add_option("--D", cn_D, "negative discriminant")->required();
    classno->add_flag("--forms", cn_forms, "list reduced primitive forms");
    classno->add_option("--cnf-z", cn_cnf_z, "also evaluate the truncated Euler product");

    // ------------------------------------------------------------------ density
    auto* density = app.add_subcommand("density", "local and global density values");
    i64 de_t = 0, de_u = 0, de_n = 1, de_ell = 0, de_p = 0;
    std::string de_shape;
    std::string de_kind = "local";
    density->add_option("--kind", de_kind,
                        "local|star|group|arch|deuring|torsion|schoof (default local)");
    density->add_option("--t", de_t, "trace");
    density->add_option("--u", de_u, "determinant");
    density->add_option("--n", de_n, "torsion level n");
    density->add_option("--ell", de_ell, "prime ell");
    density->add_option("--p", de_p, "prime p");
    density->add_option("--shape", de_shape, "group shape m,k");

    // ------------------------------------------------------------------ matcount
    auto* matcount = app.add_subcommand("matcount", "matrix counts over Z/ell^r");
    i64 mc_t = 0, mc_u = 0, mc_n = 1, mc_ell = 2;
    int mc_r = 1;
    std::string mc_mode = "closed";
    bool mc_gl2 = false;
    matcount->add_option("--t", mc_t, "trace residue");
    matcount->add_option("--u", mc_u, "determinant residue");
    matcount->add_option("--n", mc_n, "congruence level n (sigma = I mod ell^v(n))");
    matcount->add_option("--ell", mc_ell, "prime ell")->required();
    matcount->add_option("--r", mc_r, "exponent r");
    matcount->add_option("--mode", mc_mode, "closed|brute")
        ->check(CLI::IsMember({"closed", "brute"}));
    matcount->add_flag("--gl2-order", mc_gl2, "print |GL_2(Z/ell^r)| instead");

    // ------------------------------------------------------------------ constants
    auto* constants = app.add_subcommand("constants", "singular series constants");
    constants->require_subcommand(1);
    auto* c_lt = constants->add_subcommand("lt", "Lang-Trotter C_LT(t)");
    i64 ck_t = 0;
    c_lt->add_option("--t", ck_t, "trace")->required();
    auto* c_twin = constants->add_subcommand("twin", "average Koblitz C_twin");
    auto* c_gm = constants->add_subcommand("gm", "Galbraith-McKee C_GM(p)");
    i64 ck_p = 0;
    c_gm->add_option("--p", ck_p, "prime p")->required();
    auto* c_men = constants->add_subcommand("men", "fixed point count C(N)");
    i64 ck_N = 0;
    c_men->add_option("--N", ck_N, "point count N")->required();
    auto* c_meg = constants->add_subcommand("meg", "fixed group C(G)");
    std::string ck_shape;
    c_meg->add_option("--shape", ck_shape, "group shape m,k")->required();
    auto* c_cyc = constants->add_subcommand("cyclic", "cyclicity constant C_cyclic(p)");
    i64 ck_cp = 0;
    c_cyc->add_option("--p", ck_cp, "prime p")->required();
    auto* c_ali = constants->add_subcommand("aliquot", "aliquot constant C_aliquot^(d)");
    int ck_d = 2;
    i64 ck_seq_ell = 0;
    int ck_rmax = -1;
    c_ali->add_option("--d", ck_d, "cycle length d >= 2");
    c_ali->add_option("--seq-ell", ck_seq_ell, "print the T_r sequence at this prime instead");
    c_ali->add_option("--rmax", ck_rmax, "levels for --seq-ell (default: budget-limited)");
    auto* c_simplex = constants->add_subcommand("simplex", "archimedean simplex integral I_{d,m}");
    int sx_d = 2, sx_m = 0;
    c_simplex->add_option("--d", sx_d, "dimension")->required();
    c_simplex->add_option("--m", sx_m, "number of semicircle weights")->required();

    // ------------------------------------------------------------------ census
    auto* census = app.add_subcommand("census", "exhaustive curve census over F_p");
    i64 ce_p = 0, ce_modN = 1, ce_modt = 0;
    std::string ce_stat = "trace";
    bool ce_dump = false;
    census->add_option("--p", ce_p, "prime p >= 5")->required();
    census->add_option("--stat", ce_stat, "trace|group|cyclic|prime_order|trace_mod")
        ->check(CLI::IsMember({"trace", "group", "cyclic", "prime_order", "trace_mod"}));
    census->add_option("--mod-N", ce_modN, "modulus for trace_mod");
    census->add_option("--mod-t", ce_modt, "residue for trace_mod");
    census->add_flag("--dump", ce_dump, "stream CurveRecords as JSON lines");

    // ------------------------------------------------------------------ experiment
    auto* experiment = app.add_subcommand("experiment", "prediction vs observation runs");
    experiment->require_subcommand(1);
    auto* e_lt = experiment->add_subcommand("lt", "Lang-Trotter average");
    i64 ex_t = 0, ex_x = 1000;
    e_lt->add_option("--t", ex_t, "trace")->required();
    e_lt->add_option("--x", ex_x, "prime bound x");
    auto* e_st = experiment->add_subcommand("sato-tate", "vertical Sato-Tate");
    i64 ex_p = 0;
    int ex_bins = 10;
    double ex_alpha = -2, ex_beta = -2;
    e_st->add_option("--p", ex_p, "prime p")->required();
    e_st->add_option("--bins", ex_bins, "equal bins of t/(2 sqrt p)");
    e_st->add_option("--alpha", ex_alpha, "interval left end");
    e_st->add_option("--beta", ex_beta, "interval right end");
    auto* e_pp = experiment->add_subcommand("per-prime", "per-prime checks");
    std::string ex_kind = "deuring-full";
    i64 ex_pp_p = 0, ex_tm_t = 0, ex_tm_N = 1;
    e_pp->add_option("--p", ex_pp_p, "prime p")->required();
    e_pp->add_option("--kind", ex_kind, "koblitz|cyclicity|trace-mod|deuring-full")
        ->check(CLI::IsMember({"koblitz", "cyclicity", "trace-mod", "deuring-full"}));
    e_pp->add_option("--t", ex_tm_t, "trace residue (trace-mod)");
    e_pp->add_option("--N", ex_tm_N, "trace modulus (trace-mod)");
    auto* e_men = experiment->add_subcommand("men", "curves with N points, summed over p");
    i64 ex_menN = 0;
    e_men->add_option("--N", ex_menN, "point count N")->required();
    auto* e_meg = experiment->add_subcommand("meg", "curves with group G, summed over p");
    std::string ex_megshape;
    e_meg->add_option("--shape", ex_megshape, "group shape m,k")->required();
    auto* e_ali = experiment->add_subcommand("aliquot", "aliquot cycles");
    int ex_d = 2;
    i64 ex_ax = 200;
    bool ex_cumulative = false;
    e_ali->add_option("--d", ex_d, "cycle length (2 or 3)");
    e_ali->add_option("--x", ex_ax, "window start (windowed) or bound (cumulative)");
    e_ali->add_flag("--cumulative", ex_cumulative, "use P_d(x) instead of the dyadic window");

    // ------------------------------------------------------------------ polyprobe
    auto* polyprobe = app.add_subcommand("polyprobe", "root counts / character sums / squares");
    std::string pp_poly, pp_file, pp_op = "roots";
    i64 pp_ell = 3;
    int pp_r = 1;
    polyprobe->add_option("--poly", pp_poly, "polynomial, e.g. 'd=2; 3*x1^2*x2 - 4*x2 + 1'");
    polyprobe->add_option("--file", pp_file, "corpus file, one polynomial per line");
    polyprobe->add_option("--op", pp_op, "roots|charsum|square")
        ->check(CLI::IsMember({"roots", "charsum", "square"}));
    polyprobe->add_option("--ell", pp_ell, "prime ell")->required();
    polyprobe->add_option("--r", pp_r, "level r (roots)");

    // allow global flags (--format, --z, ...) after subcommand names
    std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
        a->fallthrough();
        for (auto* sub : a->get_subcommands({})) enable_fallthrough(sub);
    };
    for (auto* sub : app.get_subcommands({})) enable_fallthrough(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    }

    matcount_budget().brute_ops = cfg.budget;
    CensusOptions copt;
    copt.workers = cfg.workers;

    try {
        if (*classno) {
            Discriminant D(cn_D);
            Rat H = kronecker_class_number(D);
            json j{{"D", cn_D}, {"H", rat_to_string(H)}};
            std::string text = rat_to_string(H);
            if (cn_forms) {
                auto cn = class_number(D);
                json forms = json::array();
                std::string ft;
                for (auto& f : cn.forms) {
                    forms.push_back(json::array({f.a, f.b, f.c}));
                    ft += "\n(" + std::to_string(f.a) + "," + std::to_string(f.b) + "," +
                          std::to_string(f.c) + ")";
                }
                j["h"] = cn.h;
                j["w"] = cn.w;
                j["forms"] = forms;
                text += ft;
            }
            if (cn_cnf_z >= 2) {
                double v = cnf_partial_product(D, cn_cnf_z);
                j["cnf_partial_product"] = v;
                j["cnf_z"] = cn_cnf_z;
                text += "\ncnf(" + std::to_string(cn_cnf_z) + ") = " + std::to_string(v);
            }
            emit(cfg, j, text);
        } else if (*density) {
            if (de_kind == "local") {
                auto f = local_density(de_t, de_u, de_n, de_ell);
                emit(cfg,
                     json{{"value", rat_to_string(f.value)},
                          {"stabilized_at", f.stabilized_at},
                          {"delta", rat_to_string(f.delta)}},
                     rat_to_string(f.value));
            } else if (de_kind == "star") {
                auto f = local_density_star(de_t, de_u, de_ell);
                emit(cfg, json{{"value", rat_to_string(f.value)}}, rat_to_string(f.value));
            } else if (de_kind == "group") {
                auto f = group_local_density(parse_shape(de_shape), de_p, de_ell);
                emit(cfg, json{{"value", rat_to_string(f.value)}}, rat_to_string(f.value));
            } else if (de_kind == "arch") {
                double v = archimedean_density(de_t, de_p);
                emit(cfg, json{{"value", v}}, std::to_string(v));
            } else if (de_kind == "deuring") {
                Rat v = deuring_mass(de_t, de_p);
                emit(cfg, json{{"value", rat_to_string(v)}}, rat_to_string(v));
            } else if (de_kind == "torsion") {
                Rat v = full_torsion_mass(de_t, de_n, de_p);
                emit(cfg, json{{"value", rat_to_string(v)}}, rat_to_string(v));
            } else if (de_kind == "schoof") {
                Rat v = schoof_group_mass(parse_shape(de_shape), de_p);
                emit(cfg, json{{"value", rat_to_string(v)}}, rat_to_string(v));
            } else {
                std::cerr << "unknown density kind: " << de_kind << "\n";
                return 2;
            }
        } else if (*matcount) {
            if (mc_gl2) {
                Int g = gl2_order(mc_ell, mc_r);
                emit(cfg, json{{"value", g.str()}}, g.str());
            } else {
                auto res = count_fixed_trace_det(mc_t, mc_u, mc_n, PrimePower(mc_ell, mc_r),
                                                 mc_mode == "brute" ? CountMethod::bruteforce
                                                                    : CountMethod::closed_formula);
                emit(cfg,
                     json{{"count", res.count.str()},
                          {"method", mc_mode},
                          {"stabilized_level", res.stabilized_level}},
                     res.count.str());
            }
        } else if (*constants) {
            if (*c_simplex) {
                auto I = simplex_integral(sx_d, sx_m, cfg.seed);
                emit(cfg,
                     json{{"d", sx_d}, {"m", sx_m}, {"value", I.value},
                          {"std_error", I.std_error}},
                     std::to_string(I.value));
                return 0;
            }
            ConstantKind kind = twin_kind();
            if (*c_lt) kind = lt_kind(ck_t);
            else if (*c_twin) kind = twin_kind();
            else if (*c_gm) kind = gm_kind(ck_p);
            else if (*c_men) kind = men_kind(ck_N);
            else if (*c_meg) {
                auto s = parse_shape(ck_shape);
                kind = meg_kind(s.m, s.k);
            } else if (*c_cyc) kind = cyclic_kind(ck_cp);
            else if (*c_ali) kind = aliquot_kind(ck_d);
            if (*c_ali && ck_seq_ell > 0) {
                int rmax = ck_rmax >= 0 ? ck_rmax : aliquot_max_level(ck_seq_ell, ck_d);
                auto seq = aliquot_local_sequence(ck_seq_ell, ck_d, rmax);
                std::string text;
                for (size_t i = 0; i < seq.levels.size(); ++i)
                    text += "T_" + std::to_string(i + 1) + " = " +
                            rat_to_string(seq.levels[i]) + "\n";
                text += "limit = " + std::to_string(seq.limit) +
                        " (error proxy " + std::to_string(seq.error_proxy) + ")";
                emit(cfg, to_json(seq), text);
            } else {
                auto tp = constant(kind, cfg.z, cfg.seed);
                emit(cfg, to_json(tp),
                     kind.label() + " ~ " + std::to_string(tp.value) + "  (z=" +
                         std::to_string(tp.z) + ", tail<=" + std::to_string(tp.tail_estimate) +
                         ")");
            }
        } else if (*census) {
            if (ce_dump) {
                enumerate_curves(ce_p, true, [&](const CurveRecord& r) {
                    std::cout << to_json(r).dump() << "\n";
                });
            } else {
                Statistic stat = Statistic::trace;
                if (ce_stat == "group") stat = Statistic::group;
                else if (ce_stat == "cyclic") stat = Statistic::cyclic;
                else if (ce_stat == "prime_order") stat = Statistic::prime_order;
                else if (ce_stat == "trace_mod") stat = Statistic::trace_mod;
                auto d = empirical_distribution(ce_p, stat, ce_modN, ce_modt, copt);
                std::string text;
                for (auto& [k, v] : d.masses) text += k + " -> " + rat_to_string(v) + "\n";
                if (!text.empty()) text.pop_back();
                json masses = json::object();
                for (auto& [k, v] : d.masses) masses[k] = rat_to_string(v);
                emit(cfg, masses, text, distribution_csv(d));
            }
        } else if (*experiment) {
            ComparisonRecord rec;
            if (*e_lt) {
                rec = run_lt_average(ex_t, ex_x, cfg.z);
            } else if (*e_st) {
                if (ex_alpha >= -1.0 && ex_beta >= -1.0) {
                    rec = run_sato_tate_interval(ex_p, ex_alpha, ex_beta, copt);
                } else {
                    auto [hist, r] = run_sato_tate(ex_p, ex_bins, copt);
                    rec = r;
                    if (cfg.format == "csv") {
                        std::cout << histogram_csv(hist);
                        return 0;
                    }
                    if (cfg.format == "json") std::cout << to_json(hist).dump() << "\n";
                }
            } else if (*e_pp) {
                PerPrimeKind kind = PerPrimeKind::deuring_full;
                if (ex_kind == "koblitz") kind = PerPrimeKind::koblitz;
                else if (ex_kind == "cyclicity") kind = PerPrimeKind::cyclicity;
                else if (ex_kind == "trace-mod") kind = PerPrimeKind::trace_mod;
                rec = run_per_prime(ex_pp_p, kind, ex_tm_t, ex_tm_N, cfg.z, copt);
            } else if (*e_men) {
                rec = run_men(ex_menN, cfg.z);
            } else if (*e_meg) {
                auto s = parse_shape(ex_megshape);
                rec = run_meg(s.m, s.k, cfg.z);
            } else if (*e_ali) {
                rec = run_aliquot(ex_d, ex_ax, !ex_cumulative, std::min<i64>(cfg.z, 2048));
            }
            if (cfg.format == "csv")
                std::cout << comparison_csv_header() << "\n" << to_csv(rec) << "\n";
            else if (cfg.format == "json")
                std::cout << to_json(rec).dump() << "\n";
            else
                std::cout << rec.label << ": predicted="
                          << (rec.predicted.is_exact ? rat_to_string(rec.predicted.exact)
                                                     : std::to_string(rec.predicted.real))
                          << " observed="
                          << (rec.observed.is_exact ? rat_to_string(rec.observed.exact)
                                                    : std::to_string(rec.observed.real))
                          << " rel_err=" << rec.rel_err
                          << (rec.both_exact ? (rec.exact_equal ? " [exact match]" : " [exact mismatch]")
                                             : "")
                          << "\n";
        } else if (*polyprobe) {
            std::vector<IntPolynomial> polys;
            if (!pp_poly.empty()) polys.push_back(parse_polynomial(pp_poly));
            if (!pp_file.empty()) {
                std::ifstream in(pp_file);
                if (!in) throw domain_error("polyprobe: cannot open " + pp_file);
                std::string line;
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    polys.push_back(parse_polynomial(line));
                }
            }
            if (polys.empty()) {
                std::cerr << "polyprobe: need --poly or --file\n" << app.help();
                return 2;
            }
            for (const auto& f : polys) {
                if (pp_op == "roots") {
                    i64 rho = root_count(f, pp_ell, pp_r, cfg.budget);
                    emit(cfg, json{{"poly", polynomial_to_string(f)}, {"rho", rho}},
                         std::to_string(rho));
                } else if (pp_op == "charsum") {
                    i64 S = character_sum(f, pp_ell, cfg.budget);
                    double ratio = (double)std::abs((double)S) /
                                   std::pow((double)pp_ell, f.d - 0.5);
                    emit(cfg,
                         json{{"poly", polynomial_to_string(f)},
                              {"sum", S},
                              {"normalized", ratio}},
                         std::to_string(S));
                } else {
                    auto w = square_form_test(f, pp_ell);
                    if (w)
                        emit(cfg,
                             json{{"poly", polynomial_to_string(f)},
                                  {"square_form", true},
                                  {"c", w->c},
                                  {"g", polynomial_to_string(w->g)}},
                             "c=" + std::to_string(w->c) + " g=" + polynomial_to_string(w->g));
                    else
                        emit(cfg, json{{"poly", polynomial_to_string(f)}, {"square_form", false}},
                             "not a square form");
                }
            }
        }
    } catch (const budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 1;
    } catch (const unstabilized_error& e) {
        std::cerr << "unstabilized: " << e.what() << "\n";
        return 1;
    } catch (const domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
