#include "cbctl/problem_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cbctl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& field, const std::string& msg) {
    throw ParseError(source + ": " + field + ": " + msg, field);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& source,
                    const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            fail(source, where.empty() ? key : where + "." + key, "unknown key");
        }
    }
}

const json& require(const json& obj, const std::string& key, const std::string& source, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        fail(source, where + "." + key, "missing");
    }
    return *it;
}

double number(const json& j, const std::string& source, const std::string& field) {
    if (!j.is_number()) {
        fail(source, field, "expected a number, got " + std::string(j.type_name()));
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        fail(source, field, "non-finite value");
    }
    return v;
}

Vector vector_field(const json& j, const std::string& source, const std::string& field) {
    if (!j.is_array() || j.empty()) {
        fail(source, field, "expected a non-empty array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = number(j[i], source, field + "[" + std::to_string(i) + "]");
    }
    return v;
}

Matrix matrix_field(const json& j, const std::string& source, const std::string& field) {
    if (!j.is_array() || j.empty()) {
        fail(source, field, "expected a non-empty list of rows");
    }
    std::size_t cols = 0;
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].empty()) {
            fail(source, field + "[" + std::to_string(r) + "]", "expected a non-empty row");
        }
        if (r == 0) {
            cols = j[r].size();
        } else if (j[r].size() != cols) {
            fail(source, field + "[" + std::to_string(r) + "]",
                 "row has " + std::to_string(j[r].size()) + " entries, expected " + std::to_string(cols));
        }
    }
    Matrix M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                number(j[r][c], source, field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    return M;
}

int integer(const json& j, const std::string& source, const std::string& field) {
    if (!j.is_number_integer()) {
        fail(source, field, "expected an integer");
    }
    return j.get<int>();
}

int line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

Regime parse_regime(const std::string& s) {
    if (s == "repetitive" || s == "rep") return Regime::repetitive;
    if (s == "non-repetitive" || s == "nonrep") return Regime::non_repetitive;
    throw ParseError("unknown regime '" + s + "' (expected repetitive or non-repetitive)", "regime");
}

ProblemFile parse_problem(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const int line = line_of(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(source + ":" + std::to_string(line) + ": " + e.what(), "", line);
    }
    if (!doc.is_object()) {
        fail(source, "<root>", "expected an object");
    }
    reject_unknown(doc, {"system", "task", "tolerances", "description"}, source, "");

    ProblemFile p;
    const json& sys = require(doc, "system", source, "<root>");
    reject_unknown(sys, {"A", "B"}, source, "system");
    p.A = matrix_field(require(sys, "A", source, "system"), source, "system.A");
    p.B = matrix_field(require(sys, "B", source, "system"), source, "system.B");
    if (p.A.rows() != p.A.cols()) {
        fail(source, "system.A", "must be square, got " + std::to_string(p.A.rows()) + "x" +
                                     std::to_string(p.A.cols()));
    }
    if (p.B.rows() != p.A.rows()) {
        fail(source, "system.B", "has " + std::to_string(p.B.rows()) + " rows, A has " + std::to_string(p.A.rows()));
    }

    const json& task = require(doc, "task", source, "<root>");
    reject_unknown(task, {"x0", "xf", "b", "h", "regime"}, source, "task");
    p.x0 = vector_field(require(task, "x0", source, "task"), source, "task.x0");
    p.xf = vector_field(require(task, "xf", source, "task"), source, "task.xf");
    if (p.x0.size() != p.A.rows()) {
        fail(source, "task.x0", "has length " + std::to_string(p.x0.size()) + ", expected " +
                                    std::to_string(p.A.rows()));
    }
    if (p.xf.size() != p.A.rows()) {
        fail(source, "task.xf", "has length " + std::to_string(p.xf.size()) + ", expected " +
                                    std::to_string(p.A.rows()));
    }
    p.b = integer(require(task, "b", source, "task"), source, "task.b");
    if (p.b < 1) {
        fail(source, "task.b", "must be at least 1");
    }
    if (const auto it = task.find("h"); it != task.end()) {
        if (it->is_string()) {
            if (it->get<std::string>() != "auto") {
                fail(source, "task.h", "expected an integer >= 2 or \"auto\"");
            }
        } else {
            p.h = integer(*it, source, "task.h");
            if (*p.h < 2) {
                fail(source, "task.h", "must be at least 2");
            }
        }
    }
    if (const auto it = task.find("regime"); it != task.end()) {
        if (!it->is_string()) {
            fail(source, "task.regime", "expected a string");
        }
        try {
            p.regime = parse_regime(it->get<std::string>());
        } catch (const ParseError& e) {
            fail(source, "task.regime", e.what());
        }
    }

    if (const auto it = doc.find("tolerances"); it != doc.end()) {
        const json& t = *it;
        if (!t.is_object()) {
            fail(source, "tolerances", "expected an object");
        }
        reject_unknown(t, {"charge_balance", "terminal", "reach", "rank_slack", "max_order"}, source, "tolerances");
        auto positive = [&](const char* key, double& dst) {
            if (const auto f = t.find(key); f != t.end()) {
                dst = number(*f, source, std::string("tolerances.") + key);
                if (dst <= 0.0) {
                    fail(source, std::string("tolerances.") + key, "must be positive");
                }
            }
        };
        positive("charge_balance", p.tol.charge_balance);
        positive("terminal", p.tol.terminal);
        positive("reach", p.tol.reach);
        positive("rank_slack", p.tol.rank_slack);
        if (const auto f = t.find("max_order"); f != t.end()) {
            p.tol.max_order = integer(*f, source, "tolerances.max_order");
            if (p.tol.max_order < 1) {
                fail(source, "tolerances.max_order", "must be at least 1");
            }
        }
    }
    return p;
}

ProblemFile load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open problem file " + path.string(), "");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), path.string());
}

}  // namespace cbctl
