#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "error.hpp"
#include "functionals.hpp"
#include "grid_field.hpp"

namespace nlslab {

/// %.17g, with "nan"/"inf"/"-inf" for non-finite values.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void dump17(const nlohmann::json& j, std::string& out, int indent, int depth) {
    const auto pad = [&](int d) {
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
        const double x = j.get<double>();
        out += std::isfinite(x) ? format_double(x) : "null";
        return;
    }
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            pad(depth + 1);
            out += nlohmann::json(it.key()).dump();
            out += ": ";
            dump17(it.value(), out, indent, depth + 1);
        }
        pad(depth);
        out += '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += ',';
            first = false;
            pad(depth + 1);
            dump17(v, out, indent, depth + 1);
        }
        pad(depth);
        out += ']';
        return;
    }
    default: out += j.dump();
    }
}

} // namespace detail

/// Pretty JSON with every floating-point number at 17 significant digits;
/// object keys come out sorted, non-finite numbers become null.
inline std::string dump_json(const nlohmann::json& j, int indent = 2) {
    std::string out;
    detail::dump17(j, out, indent, 0);
    out += '\n';
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path);
    os << text;
    if (!os) throw Error("write failed: " + path);
}

inline nlohmann::json to_json(const InvariantReport& r) {
    nlohmann::json j = nlohmann::json::object();
    for (auto key : InvariantReport::keys) {
        if (const auto v = r.get(key)) j[std::string(key)] = *v;
    }
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j;
}

/// Report keys populated in every sample, in canonical order, without "t".
inline std::vector<std::string> series_keys(const TrajectoryDiagnostics& traj) {
    std::vector<std::string> keys;
    for (auto key : InvariantReport::keys) {
        if (key == "t") continue;
        bool all = !traj.reports.empty();
        for (const auto& r : traj.reports) all = all && r.get(key).has_value();
        if (all) keys.emplace_back(key);
    }
    return keys;
}

/// t,<invariant keys>,virial
inline std::string series_csv(const TrajectoryDiagnostics& traj) {
    const auto keys = series_keys(traj);
    std::string out = "t";
    for (const auto& k : keys) out += "," + k;
    out += ",virial\n";
    for (std::size_t i = 0; i < traj.reports.size(); ++i) {
        out += format_double(traj.times[i]);
        for (const auto& k : keys) out += "," + format_double(*traj.reports[i].get(k));
        out += "," + format_double(i < traj.virial.size() ? traj.virial[i] : std::nan(""));
        out += '\n';
    }
    return out;
}

/// x,re,im
inline std::string profile_csv(const Field1D& f) {
    std::string out = "x,re,im\n";
    for (int j = 0; j < f.grid().points(); ++j) {
        out += format_double(f.grid().x(j)) + "," + format_double(f[j].real()) + "," + format_double(f[j].imag());
        out += '\n';
    }
    return out;
}

} // namespace nlslab
