#include "json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace kdvlab::cli {

namespace {

double number(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw InputError(fmt::format("potential: \"{}\" must be a number", key));
    return v.get<double>();
}

void write_value(std::ostream& os, const Json& j, int indent, int depth) {
    const auto pad = [&](int d) {
        if (indent >= 0) os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) os << ',';
                first = false;
                pad(depth + 1);
                os << Json(k).dump() << (indent >= 0 ? ": " : ":");
                write_value(os, v, indent, depth + 1);
            }
            pad(depth);
            os << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // arrays of scalars stay on one line
            bool flat = true;
            for (const auto& v : j) flat = flat && !v.is_structured();
            os << '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << (flat && indent >= 0 ? ", " : ",");
                first = false;
                if (!flat) pad(depth + 1);
                write_value(os, v, indent, depth + 1);
            }
            if (!flat) pad(depth);
            os << ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v))
                os << fmt::format("{:.17g}", v);
            else
                os << "null";
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace

Potential potential_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("potential: expected a JSON object");
    for (const auto& [k, v] : j.items())
        if (k != "mean" && k != "modes") throw InputError(fmt::format("potential: unknown key \"{}\"", k));
    const double mean = number(j, "mean", 0.0);
    std::vector<std::pair<int, cplx>> pairs;
    if (j.contains("modes")) {
        const auto& modes = j.at("modes");
        if (!modes.is_array()) throw InputError("potential: \"modes\" must be an array");
        for (const auto& m : modes) {
            if (!m.is_object() || !m.contains("n") || !m.at("n").is_number_integer())
                throw InputError("potential: each mode needs an integer \"n\"");
            for (const auto& [k, v] : m.items())
                if (k != "n" && k != "re" && k != "im")
                    throw InputError(fmt::format("potential: unknown mode key \"{}\"", k));
            const auto n = m.at("n").get<long long>();
            if (n == 0 || std::llabs(n) > 1'000'000) throw InputError("potential: mode index out of range");
            pairs.emplace_back(static_cast<int>(n), cplx(number(m, "re", 0.0), number(m, "im", 0.0)));
        }
    }
    try {
        return Potential::make(pairs, mean);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

Json potential_to_json(const Potential& q) {
    Json j;
    j["mean"] = q.mean();
    j["modes"] = Json::array();
    for (const auto& [n, u] : q.positive()) j["modes"].push_back(Json{{"n", n}, {"re", u.real()}, {"im", u.imag()}});
    return j;
}

Potential load_potential(const std::string& source) {
    Json j;
    try {
        if (!source.empty() && source.front() == '{') {
            j = Json::parse(source);
        } else {
            std::ifstream in(source);
            if (!in) throw InputError(fmt::format("cannot open potential file '{}'", source));
            j = Json::parse(in);
        }
    } catch (const Json::parse_error& e) {
        throw InputError(fmt::format("potential: malformed JSON ({})", e.what()));
    }
    return potential_from_json(j);
}

void write_json(std::ostream& os, const Json& j, int indent) {
    write_value(os, j, indent, 0);
    os << '\n';
}

std::string dump_json(const Json& j, int indent) {
    std::ostringstream os;
    write_json(os, j, indent);
    return os.str();
}

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

Json json_array(const std::vector<double>& v, std::size_t first) {
    Json a = Json::array();
    for (std::size_t i = first; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

std::vector<int> parse_index_list(const std::string& s) {
    std::vector<int> out;
    auto to_int = [&](const std::string& t) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(t, &pos);
        } catch (const std::exception&) {
            throw InputError(fmt::format("bad index list '{}'", s));
        }
        if (pos != t.size() || v < 1) throw InputError(fmt::format("bad index list '{}'", s));
        return v;
    };
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const int a = to_int(s.substr(0, dots)), b = to_int(s.substr(dots + 2));
        if (b < a) throw InputError(fmt::format("bad index range '{}'", s));
        for (int i = a; i <= b; ++i) out.push_back(i);
        return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_int(tok));
    if (out.empty()) throw InputError("empty index list");
    return out;
}

}  // namespace kdvlab::cli
