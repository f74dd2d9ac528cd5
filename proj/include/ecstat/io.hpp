#pragma once

// JSON / CSV serialization of the record types (rationals always as
// "num/den" strings, never floats).

#include <string>

#include "json.hpp"

#include "ecstat/census.hpp"
#include "ecstat/constants.hpp"
#include "ecstat/experiments.hpp"

namespace ecstat {

using nlohmann::json;

inline json to_json(const ExactOrReal& v) {
    if (v.is_exact) return json{{"type", "rational"}, {"value", rat_to_string(v.exact)}};
    return json{{"type", "real"}, {"value", v.real}};
}

inline ExactOrReal exact_or_real_from_json(const json& j) {
    if (j.at("type") == "rational")
        return ExactOrReal::from_rat(rat_from_string(j.at("value").get<std::string>()));
    return ExactOrReal::from_real(j.at("value").get<double>());
}

inline json to_json(const ComparisonRecord& rec) {
    json meta = json::object();
    for (auto& [k, v] : rec.metadata) meta[k] = v;
    return json{{"label", rec.label},
                {"predicted", to_json(rec.predicted)},
                {"observed", to_json(rec.observed)},
                {"abs_err", rec.abs_err},
                {"rel_err", rec.rel_err},
                {"both_exact", rec.both_exact},
                {"exact_equal", rec.exact_equal},
                {"metadata", meta}};
}

inline ComparisonRecord comparison_from_json(const json& j) {
    ComparisonRecord rec;
    rec.label = j.at("label").get<std::string>();
    rec.predicted = exact_or_real_from_json(j.at("predicted"));
    rec.observed = exact_or_real_from_json(j.at("observed"));
    rec.abs_err = j.at("abs_err").get<double>();
    rec.rel_err = j.at("rel_err").get<double>();
    rec.both_exact = j.at("both_exact").get<bool>();
    rec.exact_equal = j.at("exact_equal").get<bool>();
    for (auto& [k, v] : j.at("metadata").items()) rec.metadata[k] = v.get<std::string>();
    return rec;
}

inline std::string comparison_csv_header() {
    return "label,predicted,observed,abs_err,rel_err,exact_equal";
}

inline std::string to_csv(const ComparisonRecord& rec) {
    auto val = [](const ExactOrReal& v) {
        return v.is_exact ? rat_to_string(v.exact) : std::to_string(v.real);
    };
    return rec.label + "," + val(rec.predicted) + "," + val(rec.observed) + "," +
           std::to_string(rec.abs_err) + "," + std::to_string(rec.rel_err) + "," +
           (rec.both_exact ? (rec.exact_equal ? "true" : "false") : "");
}

inline json to_json(const HistogramRecord& h) {
    json bins = json::array();
    for (size_t i = 0; i < h.empirical_masses.size(); ++i) {
        bins.push_back(json{{"lo", h.edges[i]},
                            {"hi", h.edges[i + 1]},
                            {"numerator", numerator(h.empirical_masses[i]).str()},
                            {"denominator", denominator(h.empirical_masses[i]).str()},
                            {"semicircle", h.semicircle_masses[i]}});
    }
    return json{{"p", h.p}, {"bins", bins}, {"sup_deviation", h.sup_deviation}};
}

inline std::string histogram_csv(const HistogramRecord& h) {
    std::string out = "bin,numerator,denominator,semicircle\n";
    for (size_t i = 0; i < h.empirical_masses.size(); ++i)
        out += std::to_string(i) + "," + numerator(h.empirical_masses[i]).str() + "," +
               denominator(h.empirical_masses[i]).str() + "," +
               std::to_string(h.semicircle_masses[i]) + "\n";
    return out;
}

inline json to_json(const EmpiricalDistribution& d) {
    json masses = json::object();
    for (auto& [k, v] : d.masses) masses[k] = rat_to_string(v);
    const char* names[] = {"trace", "group", "cyclic", "prime_order", "trace_mod"};
    return json{{"p", d.p},
                {"statistic", names[(int)d.statistic]},
                {"masses", masses},
                {"support_size", d.support_size}};
}

inline std::string distribution_csv(const EmpiricalDistribution& d) {
    std::string out = "key,numerator,denominator\n";
    for (auto& [k, v] : d.masses) {
        std::string key = k.find(',') == std::string::npos ? k : "\"" + k + "\"";
        out += key + "," + numerator(v).str() + "," + denominator(v).str() + "\n";
    }
    return out;
}

inline json to_json(const TruncatedProduct& tp) {
    json partials = json::array();
    for (auto& [zz, v] : tp.partials) partials.push_back(json::array({zz, v}));
    return json{{"kind", tp.kind.label()},
                {"z", tp.z},
                {"value", tp.value},
                {"exact_prefix", rat_to_string(tp.exact_prefix)},
                {"partials", partials},
                {"tail_estimate", tp.tail_estimate}};
}

inline json to_json(const CurveRecord& r) {
    return json{{"p", r.p}, {"a", r.a},         {"b", r.b},        {"N", r.N},
                {"t", r.t}, {"m", r.shape.m}, {"k", r.shape.k}};
}

inline json to_json(const AliquotSequence& s) {
    json levels = json::array();
    for (auto& v : s.levels) levels.push_back(rat_to_string(v));
    return json{{"ell", s.ell},
                {"d", s.d},
                {"levels", levels},
                {"limit", s.limit},
                {"error_proxy", s.error_proxy}};
}

}  // namespace ecstat
