#include "cachelb/fit.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cachelb {

FitTransform parse_fit_transform(const std::string& s) {
    if (s == "ln") return FitTransform::Ln;
    if (s == "lnln") return FitTransform::LnLn;
    if (s == "sqrt_ratio") return FitTransform::SqrtRatio;
    if (s == "loglog") return FitTransform::LogLog;
    throw std::invalid_argument("unknown fit transform '" + s + "' (expected ln|lnln|sqrt_ratio|loglog)");
}

FitResult fit_loglog(std::span<const double> x, std::span<const double> y, FitTransform transform) {
    if (x.size() != y.size()) throw std::invalid_argument("fit: x and y differ in length");
    if (x.size() < 3) throw std::invalid_argument("fit: need at least 3 points");

    std::vector<double> tx(x.size()), ty(y.begin(), y.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        switch (transform) {
            case FitTransform::Ln:
            case FitTransform::LogLog:
                if (!(x[i] > 0)) throw std::invalid_argument("fit: ln needs x > 0");
                tx[i] = std::log(x[i]);
                break;
            case FitTransform::LnLn:
                if (!(x[i] > 1)) throw std::invalid_argument("fit: ln ln needs x > 1");
                tx[i] = std::log(std::log(x[i]));
                break;
            case FitTransform::SqrtRatio:
                if (!(x[i] >= 0)) throw std::invalid_argument("fit: sqrt needs x >= 0");
                tx[i] = std::sqrt(x[i]);
                break;
        }
        if (transform == FitTransform::LogLog) {
            if (!(y[i] > 0)) throw std::invalid_argument("fit: log-log needs y > 0");
            ty[i] = std::log(y[i]);
        }
    }

    const double k = static_cast<double>(tx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        mx += tx[i];
        my += ty[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        sxx += (tx[i] - mx) * (tx[i] - mx);
        sxy += (tx[i] - mx) * (ty[i] - my);
        syy += (ty[i] - my) * (ty[i] - my);
    }
    if (sxx <= 1e-300) throw std::invalid_argument("fit: transformed x is constant");

    FitResult r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        const double e = ty[i] - (r.slope * tx[i] + r.intercept);
        ss_res += e * e;
    }
    r.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return r;
}

FitResult fit_loglog(const Table& table, const std::string& x_col, const std::string& y_col,
                     FitTransform transform) {
    const auto x = table.numeric(x_col);
    const auto y = table.numeric(y_col);
    return fit_loglog(x, y, transform);
}

}  // namespace cachelb
