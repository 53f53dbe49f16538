#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "cbctl/analysis.hpp"
#include "cbctl/core_model.hpp"
#include "cbctl/tolerances.hpp"

namespace cbctl {

/// Problem description read from a JSON document:
///
///     {
///       "system": { "A": [[...], ...], "B": [[...], ...] },
///       "task": { "x0": [...], "xf": [...], "b": 5, "h": 4 | "auto",
///                 "regime": "non-repetitive" | "repetitive" },
///       "tolerances": { "charge_balance": 1e-9, "terminal": 1e-6, "reach": 1e-8,
///                       "rank_slack": 100, "max_order": 64 }
///     }
///
/// "tolerances" and "task.h" are optional (h defaults to "auto"); unknown keys
/// are rejected.
struct ProblemFile {
    Matrix A;
    Matrix B;
    Vector x0;
    Vector xf;
    int b = 1;
    std::optional<int> h;  //!< nullopt means "auto"
    Regime regime = Regime::non_repetitive;
    Tolerances tol;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::string field, int line = 0)
        : std::runtime_error(what), field_(std::move(field)), line_(line) {}
    [[nodiscard]] const std::string& field() const { return field_; }
    [[nodiscard]] int line() const { return line_; }

  private:
    std::string field_;
    int line_;
};

ProblemFile parse_problem(const std::string& text, const std::string& source = "<input>");
ProblemFile load_problem(const std::filesystem::path& path);

/// Accepts "repetitive"/"rep" and "non-repetitive"/"nonrep".
Regime parse_regime(const std::string& s);

}  // namespace cbctl
