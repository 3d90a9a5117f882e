#include "entropic/report.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace entropic {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::string s(buf);
    // ensure the token parses back as a floating-point number
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

void dump_rec(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.cbegin(); it != j.cend(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_rec(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_rec(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        default:
            out += j.dump();
            break;
    }
}

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (auto it = j.cbegin(); it != j.cend(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "/" + it.key(), out);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "/" + std::to_string(i), out);
    } else {
        out << prefix << ',';
        if (j.is_number_float())
            out << format_double(j.get<double>());
        else if (j.is_string())
            out << j.get<std::string>();
        else
            out << j.dump();
        out << '\n';
    }
}

} // namespace

std::string dump_stable(const json& j) {
    std::string out;
    dump_rec(j, out);
    return out;
}

std::string digest64(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

std::string to_csv(const json& report) {
    std::ostringstream out;
    const std::string command = report.value("command", "");
    if (command == "basisrisk" && report.contains("result") &&
        report.at("result").contains("profile")) {
        out << "gamma,f\n";
        for (const auto& row : report.at("result").at("profile"))
            out << format_double(row.at("gamma").get<double>()) << ','
                << format_double(row.at("f").get<double>()) << '\n';
        return out.str();
    }
    if (command == "expand" && report.contains("result") &&
        report.at("result").contains("eps_table")) {
        out << "eps,exact,approx,error\n";
        for (const auto& row : report.at("result").at("eps_table"))
            out << format_double(row.at("eps").get<double>()) << ','
                << format_double(row.at("exact").get<double>()) << ','
                << format_double(row.at("approx").get<double>()) << ','
                << format_double(row.at("error").get<double>()) << '\n';
        return out.str();
    }
    out << "key,value\n";
    flatten(report, "", out);
    return out.str();
}

} // namespace entropic
