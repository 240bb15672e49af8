#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "multlab/bounds.hpp"
#include "multlab/dynamics.hpp"
#include "multlab/estimates.hpp"
#include "multlab/funceq.hpp"
#include "multlab/geometry.hpp"
#include "multlab/ideals.hpp"

namespace multlab {

using nlohmann::json;

namespace io {

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("JSON parse error in '" + path + "': " + e.what());
    }
    return j;
}

inline Field field_from_json(const json& j) {
    std::uint64_t ch = j.value("char", 0);
    return ch == 0 ? Field::rationals() : Field::prime(ch);
}

inline BigRational rational_from_json(const json& j, const std::string& what) {
    try {
        if (j.is_number_integer()) return BigRational(j.get<long long>());
        if (j.is_string()) return BigRational(j.get<std::string>());
    } catch (const std::exception&) {
    }
    throw ConfigError("expected an integer or a rational string for " + what);
}

inline std::string require_string(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw ConfigError("missing string field '" + key + "'");
    return j.at(key).get<std::string>();
}

// --- functional systems -----------------------------------------------------

struct SystemConfig {
    std::variant<MahlerSystem, DifferentialSystem> system;
    std::optional<unsigned> tf;

    int n() const {
        return std::holds_alternative<MahlerSystem>(system)
                   ? std::get<MahlerSystem>(system).n()
                   : std::get<DifferentialSystem>(system).n();
    }
    const Field& field() const {
        return std::holds_alternative<MahlerSystem>(system)
                   ? std::get<MahlerSystem>(system).field()
                   : std::get<DifferentialSystem>(system).field();
    }
    bool is_mahler() const { return std::holds_alternative<MahlerSystem>(system); }
};

// {"kind":"mahler"|"differential","n":...,"p":"z^2","A":["..."],
//  "seed":["0"],"char":0|p,"tf":t?}
inline SystemConfig system_from_json(const json& j) {
    std::string kind = require_string(j, "kind");
    if (!j.contains("n")) throw ConfigError("missing field 'n'");
    int n = j.at("n").get<int>();
    Field field = field_from_json(j);

    if (!j.contains("A") || !j.at("A").is_array() ||
        static_cast<int>(j.at("A").size()) != n + 1)
        throw ConfigError("'A' must list the n+1 polynomials A0..An");
    std::vector<AffinePolynomial> a;
    for (const auto& s : j.at("A")) a.push_back(parse_affine(s.get<std::string>(), n, field));

    const char* seed_key = j.contains("seed") ? "seed" : "init";
    if (!j.contains(seed_key) || static_cast<int>(j.at(seed_key).size()) != n)
        throw ConfigError("need n seed/init values");
    std::vector<FieldScalar> seed;
    for (const auto& s : j.at(seed_key)) {
        if (s.is_string())
            seed.push_back(parse_scalar(field, s.get<std::string>()));
        else
            seed.push_back(FieldScalar::from_rational_mod(field, BigRational(s.get<long long>())));
    }

    std::optional<unsigned> tf;
    if (j.contains("tf")) tf = j.at("tf").get<unsigned>();

    if (kind == "mahler") {
        auto [num, den] = parse_rational_function(require_string(j, "p"), field);
        return SystemConfig{MahlerSystem(n, num, den, std::move(a), std::move(seed)), tf};
    }
    if (kind == "differential")
        return SystemConfig{DifferentialSystem(n, std::move(a), std::move(seed)), tf};
    throw ConfigError("unknown system kind '" + kind + "'");
}

inline FunctionalPoint solve_system(const SystemConfig& cfg, std::size_t N) {
    FunctionalPoint F = cfg.is_mahler() ? solve_mahler(std::get<MahlerSystem>(cfg.system), N)
                                        : solve_differential(std::get<DifferentialSystem>(cfg.system), N);
    if (!cfg.tf) return F;
    return FunctionalPoint(F.series(), cfg.tf);
}

inline std::vector<OrdValue> verify_system(const SystemConfig& cfg, const FunctionalPoint& F,
                                           std::size_t N) {
    return cfg.is_mahler() ? verify_residual(std::get<MahlerSystem>(cfg.system), F, N)
                           : verify_residual(std::get<DifferentialSystem>(cfg.system), F, N);
}

// --- maps ---------------------------------------------------------------------

inline std::optional<GrowthConstants> growth_from_json(const json& j) {
    if (!j.contains("growth")) return std::nullopt;
    const json& g = j.at("growth");
    GrowthConstants out;
    if (g.contains("mu")) out.mu = rational_from_json(g.at("mu"), "mu");
    if (g.contains("nu0")) out.nu0 = rational_from_json(g.at("nu0"), "nu0");
    if (g.contains("nu1")) out.nu1 = rational_from_json(g.at("nu1"), "nu1");
    if (g.contains("lambda")) out.lambda = rational_from_json(g.at("lambda"), "lambda");
    if (g.contains("Klambda")) out.k_lambda = g.at("Klambda").get<unsigned>();
    return out;
}

// {"kind":"derivation","n":...,"A":[affine strings]} or
// {"kind":"mahler","Aprime":[2 strings],"A":[bi-homogeneous strings]} or
// {"kind":"mahler","system":{...}}; optional "growth" block overrides the
// structural constants.
inline MapSpec mapspec_from_json(const json& j) {
    std::string kind = require_string(j, "kind");
    Field field = field_from_json(j);
    auto declared = growth_from_json(j);

    if (kind == "derivation") {
        if (!j.contains("n")) throw ConfigError("derivation map needs 'n'");
        int n = j.at("n").get<int>();
        std::vector<AffinePolynomial> a;
        for (const auto& s : j.at("A")) a.push_back(parse_affine(s.get<std::string>(), n, field));
        return MapSpec::derivation_from_affine(n, a, field, declared);
    }
    if (kind == "mahler") {
        if (j.contains("system")) {
            SystemConfig cfg = system_from_json(j.at("system"));
            if (!cfg.is_mahler()) throw ConfigError("'system' must be a Mahler system");
            return MapSpec::pullback_from_system(std::get<MahlerSystem>(cfg.system), declared);
        }
        if (!j.contains("n")) throw ConfigError("mahler map needs 'n'");
        int n = j.at("n").get<int>();
        std::vector<BiPolynomial> aprime, a;
        for (const auto& s : j.at("Aprime")) aprime.push_back(parse_bipoly(s.get<std::string>(), n, field));
        for (const auto& s : j.at("A")) a.push_back(parse_bipoly(s.get<std::string>(), n, field));
        return MapSpec::mahler_pullback(std::move(aprime), std::move(a), declared);
    }
    throw ConfigError("unknown map kind '" + kind + "'");
}

// --- ideals and cycles ---------------------------------------------------------

// {"generators":["..."],"n":...,"char":...}
inline GeneratedIdeal ideal_from_json(const json& j) {
    if (!j.contains("n")) throw ConfigError("ideal needs 'n'");
    int n = j.at("n").get<int>();
    Field field = field_from_json(j);
    std::vector<BiPolynomial> gens;
    for (const auto& s : j.at("generators")) gens.push_back(parse_bipoly(s.get<std::string>(), n, field));
    return GeneratedIdeal(std::move(gens));
}

// {"points":[["1","z^2+1"], {"prime":["1","z"],"coords":["1","z"]}, ...],
//  "mult":[1,...],"char":...}
inline SplitCycle cycle_from_json(const json& j) {
    Field field = field_from_json(j);
    std::vector<RationalPoint> pts;
    for (const auto& pj : j.at("points")) {
        if (pj.is_array()) {
            std::vector<UPoly> coords;
            for (const auto& s : pj) coords.push_back(parse_upoly(s.get<std::string>(), field));
            pts.emplace_back(std::move(coords));
        } else {
            std::vector<UPoly> coords;
            for (const auto& s : pj.at("coords")) coords.push_back(parse_upoly(s.get<std::string>(), field));
            if (pj.contains("prime")) {
                if (pj.at("prime").size() != 2) throw ConfigError("'prime' needs two coordinates");
                std::array<UPoly, 2> prime{parse_upoly(pj.at("prime")[0].get<std::string>(), field),
                                           parse_upoly(pj.at("prime")[1].get<std::string>(), field)};
                pts.emplace_back(std::move(coords), std::move(prime));
            } else {
                pts.emplace_back(std::move(coords));
            }
        }
    }
    std::vector<long> mult(pts.size(), 1);
    if (j.contains("mult")) {
        mult.clear();
        for (const auto& m : j.at("mult")) mult.push_back(m.get<long>());
    }
    return SplitCycle(std::move(pts), std::move(mult));
}

// --- output rendering -----------------------------------------------------------

inline json field_to_json(const Field& f) {
    return json{{"char", f.characteristic()}};
}

inline json series_to_json(const TruncatedSeries& s) {
    json coeffs = json::array();
    for (const auto& c : s.coeffs()) coeffs.push_back(c.to_string());
    return json{{"precision", s.precision()}, {"field", field_to_json(s.field())}, {"coeffs", coeffs}};
}

inline json ord_to_json(const OrdValue& o) {
    return json{{"kind", o.is_finite() ? "Finite" : "AtLeast"}, {"value", o.value()}};
}

inline json point_to_json(const FunctionalPoint& F) {
    json series = json::array();
    for (const auto& s : F.series()) series.push_back(series_to_json(s));
    json out{{"n", F.n()}, {"precision", F.precision()}, {"series", series}};
    if (F.declared_tf()) out["tf"] = *F.declared_tf();
    return out;
}

inline json bigorlog_to_json(const BigOrLog& v) {
    if (v.is_exact()) return json{{"exact", v.exact_value().str()}};
    auto [lg, err] = v.log2_value();
    return json{{"log2", lg.str()}, {"log2_abs_error", err.str()}};
}

inline json scan_to_json(const OrdScanResult& scan) {
    json cells = json::array();
    for (const auto& c : scan.cells) {
        json cj{{"a", c.a}, {"b", c.b}, {"status", c.status}, {"u", c.u},
                {"lower_bound_u_minus_1", c.lower_bound_u_minus_1}};
        if (c.status == "ok") {
            cj["lambda"] = ord_to_json(c.lambda);
            cj["kernel_dim_final"] = c.kernel_dim_final;
            cj["stabilized"] = c.stabilized;
            cj["ratio_ap1_bp1t"] = c.ratio_ap1.str();
            cj["ratio_abp1_bp1t"] = c.ratio_abp1.str();
            cj["oracle_ran"] = c.oracle_ran;
        } else {
            cj["detail"] = c.detail;
        }
        cj["aux_status"] = c.aux_status;
        if (c.aux_ord) cj["aux_ord"] = ord_to_json(*c.aux_ord);
        cells.push_back(std::move(cj));
    }
    json out{{"amax", scan.amax},
             {"bmax", scan.bmax},
             {"N", scan.N},
             {"t", scan.t},
             {"shape", scan.shape == BoundShape::AP1_BP1T ? "(a+1)(b+1)^t" : "(a+b+1)(b+1)^t"},
             {"all_finite", scan.all_finite},
             {"monotone", scan.monotone},
             {"lower_bounds_hold", scan.lower_bounds_hold},
             {"cells", cells}};
    if (scan.empirical_k) out["empirical_K"] = scan.empirical_k->str();
    return out;
}

inline json stability_to_json(const StabilityReport& rep) {
    json out{{"stable", rep.stable}, {"soundness_note", rep.soundness_note}};
    if (!rep.stable) {
        out["violating_generator"] = *rep.violating_generator;
        out["violating_image"] = rep.violating_image->to_string();
    }
    return out;
}

inline json growth_to_json(const GrowthReport& rep) {
    json out{{"structural",
              {{"mu", rep.structural.mu.str()},
               {"nu0", rep.structural.nu0.str()},
               {"nu1", rep.structural.nu1.str()}}},
             {"multiplicative_needs_degx_ge1", rep.needs_degx_ge1},
             {"additive_shift", {rep.additive_shift.first, rep.additive_shift.second}},
             {"degree_samples", rep.degree_samples},
             {"degree_violations", rep.degree_violations},
             {"lambda",
              {{"declared", rep.declared.lambda.str()},
               {"k_lambda", rep.declared.k_lambda},
               {"certified", rep.lambda_certified},
               {"excluded_atleast", rep.lambda_excluded_atleast},
               {"below_threshold", rep.lambda_below_threshold},
               {"bound_certified", rep.lambda_bound_certified},
               {"flagged", rep.lambda_flagged}}}};
    if (rep.empirical_lambda) out["lambda"]["empirical_min"] = rep.empirical_lambda->str();
    return out;
}

inline json delta_to_json(const DeltaPair& d) {
    return json{{"delta0", d.delta0},
                {"delta1", d.delta1},
                {"witness", d.witness.to_string()},
                {"witness_ord", ord_to_json(d.witness_ord)},
                {"slice_stabilized", d.slice_stabilized}};
}

}  // namespace io
}  // namespace multlab
