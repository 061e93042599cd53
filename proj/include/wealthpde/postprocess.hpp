#pragma once

#include "wealthpde/model.hpp"

namespace wealthpde {

/// Consumption-policy regularization applied after every improvement step.
struct PostprocessSettings {
    bool enabled = true;
    int smoothing_passes = 2;   // >= 0
    int window = 3;             // odd, >= 3
    double slope_lo = 0.0375;   // admissible dc/da band, slope_lo <= slope_hi
    double slope_hi = 0.28;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;

    bool operator==(const PostprocessSettings&) const = default;
};

/// Repeated centered moving average. Windows shrink near the boundaries to
/// the nodes that exist; output length equals input length.
GridFunction smooth(const GridFunction& c, int passes, int window);

/// Two-pass projection of discrete slopes (c[i+1]-c[i])/da into
/// [slope_lo, slope_hi]: forward sweep clamps each node against its left
/// neighbor, backward sweep against its right neighbor. c[0] anchors the
/// forward sweep.
GridFunction project_slope_band(const GridFunction& c, const Grid& grid,
                                double slope_lo, double slope_hi);

/// smooth, then project, then re-apply the consumption floor.
/// Disabled settings return the input unchanged.
GridFunction postprocess(const GridFunction& c, const Grid& grid,
                         const PostprocessSettings& s);

} // namespace wealthpde
