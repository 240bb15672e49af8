// multlab: exact workbench for vanishing-order estimates of power-series
// points, Mahler/differential system expansion, stable-ideal checks, and the
// degree/height bookkeeping around them.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "multlab/json_io.hpp"

using namespace multlab;
using multlab::json;

namespace {

unsigned effective_threads(unsigned requested) {
    unsigned cap = 0;
    if (const char* env = std::getenv("MULTLAB_THREADS")) {
        try {
            cap = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw ConfigError("MULTLAB_THREADS must be a nonnegative integer");
        }
    }
    unsigned eff = requested ? requested : (cap ? cap : 1);
    if (cap) eff = std::min(eff, cap);
    return std::max(eff, 1u);
}

void emit(const json& j, const std::string& out_path) {
    std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write '" + out_path + "'");
    out << text;
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write '" + out_path + "'");
    out << text;
}

BigRational req_rational(const json& params, const std::string& key) {
    if (!params.contains(key)) throw MissingParam("threshold parameter '" + key + "'");
    return io::rational_from_json(params.at(key), key);
}

long req_long(const json& params, const std::string& key) {
    if (!params.contains(key)) throw MissingParam("threshold parameter '" + key + "'");
    return params.at(key).get<long>();
}

struct Options {
    std::string config, map_file, ideal_file, cycle_file, target_file;
    std::string poly, params, out, csv_path, json_path;
    std::string shape = "abp1", mode = "minpair", kind;
    std::size_t N = 32;
    int a = 1, b = 1, amax = 2, bmax = 2, cap = 6;
    unsigned n = 1, samples = 100, maxN = 4, threads = 0;
    std::uint64_t seed = 1, oracle_p = 0;
    int t = -1;
    bool bihom = false;
    std::string mu = "1", nu0 = "1", cprime = "1", c = "1";
    std::string deg1p = "1", deg0p = "1", bz_a = "1", bz_b = "1";
    unsigned bz_r = 1, bz_rp = 1;
};

int run(const Options& o, const std::string& cmd) {
    if (cmd == "series") {
        auto cfg = io::system_from_json(io::load_json_file(o.config));
        FunctionalPoint F = io::solve_system(cfg, o.N);
        json j = io::point_to_json(F);
        json residuals = json::array();
        for (const auto& r : io::verify_system(cfg, F, o.N)) residuals.push_back(io::ord_to_json(r));
        j["residual_ord"] = residuals;
        emit(j, o.out);
        return 0;
    }

    if (cmd == "ord") {
        auto cfg = io::system_from_json(io::load_json_file(o.config));
        FunctionalPoint F = io::solve_system(cfg, o.N);
        TruncatedSeries val = o.bihom
                                  ? evaluate(parse_bipoly(o.poly, cfg.n(), cfg.field()), F)
                                  : evaluate(parse_affine(o.poly, cfg.n(), cfg.field()), F);
        emit(json{{"poly", o.poly}, {"ord", io::ord_to_json(ord_series(val))}}, o.out);
        return 0;
    }

    if (cmd == "auxpoly") {
        auto cfg = io::system_from_json(io::load_json_file(o.config));
        FunctionalPoint F = io::solve_system(cfg, o.N);
        auto r = aux_poly(F, o.a, o.b);
        emit(json{{"a", o.a},
                  {"b", o.b},
                  {"u", r.u},
                  {"kernel_dim", r.kernel_dim},
                  {"poly", r.poly.to_string()},
                  {"affine", dehomogenize(r.poly).to_string()},
                  {"ord", io::ord_to_json(r.achieved)}},
             o.out);
        return 0;
    }

    if (cmd == "scan") {
        if (o.N < 8) throw ConfigError("precision must be >= 8");
        auto cfg = io::system_from_json(io::load_json_file(o.config));
        FunctionalPoint F = io::solve_system(cfg, o.N);
        BoundShape shape = o.shape == "ap1" ? BoundShape::AP1_BP1T : BoundShape::ABP1_BP1T;
        std::optional<unsigned> t;
        if (o.t >= 0) t = static_cast<unsigned>(o.t);
        OracleMode oracle = o.oracle_p ? OracleMode::FiniteField : OracleMode::Off;
        auto scan = multiplicity_scan(F, o.amax, o.bmax, o.N, shape, t, oracle,
                                      o.oracle_p ? o.oracle_p : 2, effective_threads(o.threads));
        write_text(scan_to_csv(scan), o.csv_path);
        if (!o.json_path.empty()) emit(io::scan_to_json(scan), o.json_path);
        return 0;
    }

    if (cmd == "stability") {
        auto I = io::ideal_from_json(io::load_json_file(o.ideal_file));
        auto phi = io::mapspec_from_json(io::load_json_file(o.map_file));
        emit(io::stability_to_json(is_phi_stable(I, phi)), o.out);
        return 0;
    }

    if (cmd == "growth") {
        auto phi = io::mapspec_from_json(io::load_json_file(o.map_file));
        auto cfg = io::system_from_json(io::load_json_file(o.config));
        FunctionalPoint F = io::solve_system(cfg, o.N);
        emit(io::growth_to_json(growth_report(phi, F, o.samples, o.maxN, o.seed)), o.out);
        return 0;
    }

    if (cmd == "distance") {
        auto cfg = io::system_from_json(io::load_json_file(o.config));
        FunctionalPoint F = io::solve_system(cfg, o.N);
        if (!o.poly.empty()) {
            auto h = parse_bipoly(o.poly, cfg.n(), cfg.field());
            emit(json{{"target", "hypersurface"}, {"ord", io::ord_to_json(ord_distance(F, h))}},
                 o.out);
            return 0;
        }
        auto cyc = io::cycle_from_json(io::load_json_file(o.target_file));
        DistanceMode mode = o.mode == "sum"   ? DistanceMode::Sum
                            : o.mode == "max" ? DistanceMode::Max
                                              : DistanceMode::MinPair;
        OrdValue d = (mode == DistanceMode::MinPair && cyc.points().size() == 1)
                         ? ord_distance(F, cyc.points()[0])
                         : ord_distance(F, cyc, mode);
        emit(json{{"target", "cycle"}, {"mode", o.mode}, {"ord", io::ord_to_json(d)}}, o.out);
        return 0;
    }

    if (cmd == "liouville") {
        auto cyc = io::cycle_from_json(io::load_json_file(o.cycle_file));
        auto q = parse_affine(o.poly, o.n, cyc.points().front().field());
        auto r = liouville_check(q, cyc);
        json ords = json::array();
        for (long v : r.point_ords) ords.push_back(v);
        emit(json{{"holds", r.holds},
                  {"lhs", r.lhs},
                  {"rhs", r.rhs},
                  {"slack", r.slack},
                  {"point_ords", ords}},
             o.out);
        return 0;
    }

    if (cmd == "bezout") {
        auto r = bezout_bounds(BigInt(o.deg1p), BigInt(o.deg0p), o.bz_r, o.bz_rp, BigInt(o.bz_a),
                               BigInt(o.bz_b));
        emit(json{{"deg_1_bound", r.first.str()}, {"deg_0_bound", r.second.str()}}, o.out);
        return 0;
    }

    if (cmd == "delta") {
        auto cfg = io::system_from_json(io::load_json_file(o.config));
        FunctionalPoint F = io::solve_system(cfg, o.N);
        auto cyc = io::cycle_from_json(io::load_json_file(o.cycle_file));
        auto d = delta_pair(cyc, F, BigRational(o.cprime), BigRational(o.c), o.cap);
        emit(io::delta_to_json(d), o.out);
        return 0;
    }

    if (cmd == "constants") {
        std::optional<FunctionalPoint> F;
        if (!o.config.empty())
            F = io::solve_system(io::system_from_json(io::load_json_file(o.config)), o.N);
        auto pc = explicit_constants(o.n, BigRational(o.mu), BigRational(o.nu0), F);
        json rho = json::array();
        for (const auto& r : pc.rho) rho.push_back(io::bigorlog_to_json(r));
        json j{{"n", o.n},
               {"c_n", json{{"exact", pc.c_n.str()}}},
               {"rho", rho},
               {"C_m", io::bigorlog_to_json(pc.c_m)}};
        if (pc.c_iso) {
            j["C_iso"] = json{{"exact", pc.c_iso->str()}};
            j["ord_wedge_f_f0"] = *pc.ord_wedge_f0;
        }
        emit(j, o.out);
        return 0;
    }

    if (cmd == "threshold") {
        json params = o.params.empty() ? json::object() : json::parse(o.params);
        json j;
        if (o.kind == "transference") {
            TransferenceParams p;
            p.C = req_rational(params, "C");
            p.t = static_cast<unsigned>(req_long(params, "t"));
            p.mu = req_rational(params, "mu");
            p.nu0 = req_rational(params, "nu0");
            p.nu1 = req_rational(params, "nu1");
            p.h_p = req_rational(params, "hP");
            p.deg_p = req_rational(params, "degP");
            if (params.contains("n")) p.n = params.at("n").get<unsigned>();
            if (params.contains("Cf")) p.c_f = io::rational_from_json(params.at("Cf"), "Cf");
            if (params.contains("hpf")) p.h_pf = io::rational_from_json(params.at("hpf"), "hpf");
            if (params.contains("degpf"))
                p.deg_pf = io::rational_from_json(params.at("degpf"), "degpf");
            auto r = transference_threshold(p);
            j["rhs"] = r.rhs.str();
            if (r.c_large_1) j["C_large_1"] = *r.c_large_1;
            if (r.c_large_2) j["C_large_2"] = *r.c_large_2;
        } else if (o.kind == "lmgp_rhs") {
            j["rhs"] = lmgp_rhs(req_rational(params, "K"), req_rational(params, "mu"),
                                req_rational(params, "nu0"), req_rational(params, "nu1"),
                                static_cast<unsigned>(req_long(params, "n")),
                                static_cast<unsigned>(req_long(params, "t")),
                                req_long(params, "degXp"), req_long(params, "degX"))
                           .str();
        } else if (o.kind == "stability_rhs") {
            j["rhs"] = stability_rhs(req_rational(params, "K0"), req_rational(params, "deg0"),
                                     req_rational(params, "deg1"))
                           .str();
        } else if (o.kind == "estimationP") {
            j["rhs"] = estimation_p(static_cast<unsigned>(req_long(params, "n")),
                                    static_cast<unsigned>(req_long(params, "t")),
                                    req_rational(params, "mu"), req_rational(params, "nu0"),
                                    req_rational(params, "nu1"), req_rational(params, "lambda"),
                                    req_long(params, "degXp"), req_long(params, "degX"),
                                    params.contains("ordf") ? req_long(params, "ordf") : 0)
                           .str();
        } else {
            throw ConfigError("unknown threshold kind '" + o.kind + "'");
        }
        emit(j, o.out);
        return 0;
    }

    throw ConfigError("unknown command");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact power-series multiplicity workbench"};
    app.require_subcommand(1);
    Options o;

    auto add_config = [&](CLI::App* sub, bool required = true) {
        auto* opt = sub->add_option("--config", o.config, "functional system JSON descriptor");
        if (required) opt->required();
    };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "output file (default stdout)"); };

    auto* series = app.add_subcommand(
        "series", "expand the solution of a Mahler or differential system and verify residuals");
    add_config(series);
    series->add_option("--N", o.N, "series precision")->required();
    add_out(series);

    auto* ord = app.add_subcommand("ord", "order of vanishing of a polynomial at the solved point");
    add_config(ord);
    ord->add_option("--N", o.N, "series precision")->required();
    ord->add_option("--poly", o.poly, "polynomial (affine grammar)")->required();
    ord->add_flag("--bihom", o.bihom, "parse the polynomial as bi-homogeneous");
    add_out(ord);

    auto* aux = app.add_subcommand(
        "auxpoly", "construct a bidegree-(a,b) polynomial killing the first u-1 Taylor coefficients");
    add_config(aux);
    aux->add_option("--N", o.N, "series precision")->required();
    aux->add_option("--a", o.a, "X' degree")->required();
    aux->add_option("--b", o.b, "X degree")->required();
    add_out(aux);

    auto* scan = app.add_subcommand(
        "scan", "grid of maximal finite vanishing orders with bound-shape ratios (CSV + JSON)");
    add_config(scan);
    scan->add_option("--precision", o.N, "series precision (>= 8)")->required();
    scan->add_option("--amax", o.amax, "X' degree bound")->check(CLI::NonNegativeNumber);
    scan->add_option("--bmax", o.bmax, "X degree bound")->check(CLI::NonNegativeNumber);
    scan->add_option("--shape", o.shape, "bound shape: ap1 = (a+1)(b+1)^t, abp1 = (a+b+1)(b+1)^t");
    scan->add_option("--t", o.t, "transcendence degree (default: declared by the system)");
    scan->add_option("--oracle", o.oracle_p, "cross-check cells by enumeration over F_p (pass p)");
    scan->add_option("--threads", o.threads, "worker threads (capped by MULTLAB_THREADS)");
    scan->add_option("--csv", o.csv_path, "CSV output file (default stdout)");
    scan->add_option("--json", o.json_path, "JSON mirror with diagnostics");

    auto* stab = app.add_subcommand("stability",
                                    "check phi(I) <= I on generators, with a violating witness");
    stab->add_option("--ideal", o.ideal_file, "ideal JSON {generators, n}")->required();
    stab->add_option("--map", o.map_file, "map JSON (derivation or Mahler pullback)")->required();
    add_out(stab);

    auto* growth = app.add_subcommand(
        "growth", "degree-growth and ord-growth laws of a map, empirically on random samples");
    growth->add_option("--map", o.map_file, "map JSON")->required();
    add_config(growth);
    growth->add_option("--N", o.N, "series precision for the sample point");
    growth->add_option("--samples", o.samples, "number of random samples");
    growth->add_option("--maxN", o.maxN, "max iteration count for the degree law");
    growth->add_option("--seed", o.seed, "sampler seed");
    add_out(growth);

    auto* dist = app.add_subcommand("distance",
                                    "valuation distance from the solved point to a target");
    add_config(dist);
    dist->add_option("--N", o.N, "series precision");
    dist->add_option("--target", o.target_file, "cycle/point JSON file");
    dist->add_option("--hypersurface", o.poly, "bi-homogeneous polynomial target");
    dist->add_option("--mode", o.mode, "minpair | sum | max");
    add_out(dist);

    auto* liou = app.add_subcommand("liouville",
                                    "degree-height inequality for a polynomial against a 0-cycle");
    liou->add_option("--poly", o.poly, "polynomial (affine grammar)")->required();
    liou->add_option("--n", o.n, "variable count of the polynomial")->required();
    liou->add_option("--cycle", o.cycle_file, "cycle JSON")->required();
    add_out(liou);

    auto* bez = app.add_subcommand("bezout", "degree/height caps for generated bi-homogeneous ideals");
    bez->add_option("--deg1p", o.deg1p, "deg_(1,.) of the contained ideal")->required();
    bez->add_option("--deg0p", o.deg0p, "deg_(0,.) of the contained ideal")->required();
    bez->add_option("--r", o.bz_r, "rank of the generated ideal")->required();
    bez->add_option("--rp", o.bz_rp, "rank of the contained ideal")->required();
    bez->add_option("--a", o.bz_a, "X' degree cap of the generators")->required();
    bez->add_option("--b", o.bz_b, "X degree cap of the generators")->required();
    add_out(bez);

    auto* delta = app.add_subcommand(
        "delta", "smallest weighted bidegree vanishing on a cycle but not at the point");
    delta->add_option("--cycle", o.cycle_file, "cycle JSON")->required();
    add_config(delta);
    delta->add_option("--N", o.N, "series precision");
    delta->add_option("--cprime", o.cprime, "weight of the X' degree");
    delta->add_option("--c", o.c, "weight of the X degree");
    delta->add_option("--cap", o.cap, "search cap per degree");
    add_out(delta);

    auto* consts = app.add_subcommand("constants",
                                      "explicit constants c_n, rho ladder, C_m, and C_iso");
    consts->add_option("--n", o.n, "number of coordinate functions")->required();
    consts->add_option("--mu", o.mu, "degree growth constant mu");
    consts->add_option("--nu0", o.nu0, "degree growth constant nu0");
    add_config(consts, false);
    consts->add_option("--N", o.N, "series precision when a system is supplied");
    add_out(consts);

    auto* thresh = app.add_subcommand(
        "threshold",
        "evaluate a threshold right-hand side: transference | lmgp_rhs | stability_rhs | estimationP");
    thresh->add_option("--kind", o.kind, "formula to evaluate")->required();
    thresh->add_option("--params", o.params, "JSON object with the formula's symbols")->required();
    add_out(thresh);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run(o, app.get_subcommands().front()->get_name());
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
