#include "wealthpde/postprocess.hpp"

#include <algorithm>
#include <stdexcept>

namespace wealthpde {

void PostprocessSettings::validate() const {
    if (smoothing_passes < 0)
        throw std::invalid_argument("smoothing_passes: must be >= 0");
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("window: must be odd and >= 3");
    if (!(slope_lo <= slope_hi))
        throw std::invalid_argument("slope_lo: must be <= slope_hi");
}

GridFunction smooth(const GridFunction& c, int passes, int window) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("window: must be odd and >= 3");
    if (passes < 0)
        throw std::invalid_argument("passes: must be >= 0");

    const int n = static_cast<int>(c.size());
    const int half = window / 2;
    GridFunction cur = c;
    GridFunction next(c.size());
    for (int pass = 0; pass < passes; ++pass) {
        for (int i = 0; i < n; ++i) {
            const int lo = std::max(0, i - half);
            const int hi = std::min(n - 1, i + half);
            double sum = 0.0;
            for (int j = lo; j <= hi; ++j) sum += cur[j];
            next[i] = sum / static_cast<double>(hi - lo + 1);
        }
        cur.swap(next);
    }
    return cur;
}

GridFunction project_slope_band(const GridFunction& c, const Grid& grid,
                                double slope_lo, double slope_hi) {
    if (!(slope_lo <= slope_hi))
        throw std::invalid_argument("slope_lo: must be <= slope_hi");
    if (static_cast<int>(c.size()) != grid.n_a)
        throw std::invalid_argument("c: length must equal grid n_a");

    const int n = grid.n_a;
    const double da = grid.da;
    GridFunction out = c;
    for (int i = 1; i < n; ++i)
        out[i] = std::clamp(out[i], out[i - 1] + slope_lo * da,
                            out[i - 1] + slope_hi * da);
    for (int i = n - 2; i >= 0; --i)
        out[i] = std::clamp(out[i], out[i + 1] - slope_hi * da,
                            out[i + 1] - slope_lo * da);
    return out;
}

GridFunction postprocess(const GridFunction& c, const Grid& grid,
                         const PostprocessSettings& s) {
    if (!s.enabled) return c;
    s.validate();
    GridFunction out = smooth(c, s.smoothing_passes, s.window);
    out = project_slope_band(out, grid, s.slope_lo, s.slope_hi);
    for (double& v : out) v = std::max(v, kConsumptionFloor);
    return out;
}

} // namespace wealthpde
