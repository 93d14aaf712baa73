#pragma once

#include <span>
#include <string>

#include "cachelb/table.hpp"

namespace cachelb {

// x transform applied before the least-squares line fit.
//   Ln:         y ~ a ln x + b
//   LnLn:       y ~ a ln ln x + b
//   SqrtRatio:  y ~ a sqrt(x) + b    (x is typically a ratio such as K/M)
//   LogLog:     ln y ~ a ln x + b    (power-law exponent)
enum class FitTransform { Ln, LnLn, SqrtRatio, LogLog };

FitTransform parse_fit_transform(const std::string& s);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Throws std::invalid_argument for fewer than 3 points, values outside the
// transform's domain, or a degenerate (constant) transformed x.
FitResult fit_loglog(std::span<const double> x, std::span<const double> y, FitTransform transform);
FitResult fit_loglog(const Table& table, const std::string& x_col, const std::string& y_col,
                     FitTransform transform);

}  // namespace cachelb
