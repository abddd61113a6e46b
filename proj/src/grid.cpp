#include "vortex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vortex/kernels.hpp"

namespace vortex {

std::string Grading::to_string() const {
    if (kind == Kind::uniform) return "uniform";
    std::ostringstream os;
    os.precision(17);
    os << "graded(" << strength << ")";
    return os.str();
}

Grading Grading::parse(const std::string& text) {
    if (text == "uniform") return uniform();
    const std::string prefix = "graded(";
    if (text.rfind(prefix, 0) == 0 && text.back() == ')') {
        const std::string inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
        std::size_t used = 0;
        const double s = std::stod(inner, &used);
        if (used != inner.size() || !(s >= 0.0)) throw std::invalid_argument("bad grading strength: " + text);
        return graded(s);
    }
    throw std::invalid_argument("unknown grading: " + text);
}

RadialGrid RadialGrid::from_nodes(std::vector<double> r, Grading grading) {
    if (r.size() < 16) throw std::invalid_argument("radial grid needs at least 16 nodes");
    if (r.front() != 0.0) throw std::invalid_argument("radial grid must start at r = 0");
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (!(r[i] > r[i - 1])) throw std::invalid_argument("radial grid nodes must be strictly increasing");
    }
    RadialGrid g;
    g.r_ = std::move(r);
    g.grading_ = grading;
    g.finalize();
    return g;
}

void RadialGrid::finalize() {
    const std::size_t n = r_.size();
    h_.resize(n - 1);
    mid_.resize(n - 1);
    stiff_.resize(n - 1);
    stiff_inv_r_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h_[i] = r_[i + 1] - r_[i];
        mid_[i] = 0.5 * (r_[i] + r_[i + 1]);
        stiff_[i] = mid_[i] / h_[i];
        stiff_inv_r_[i] = 1.0 / (h_[i] * mid_[i]);
    }
    w_.resize(n);
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double outer = (i + 1 < n) ? mid_[i] : r_.back();
        w_[i] = 0.5 * (outer - inner) * (outer + inner);
        inner = outer;
    }
    inv_r2_.resize(n);
    inv_r2_[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) inv_r2_[i] = 1.0 / (r_[i] * r_[i]);
}

double RadialGrid::min_width() const { return *std::min_element(h_.begin(), h_.end()); }

GridPtr build_grid(std::size_t n, double r_max, Grading grading) {
    if (n < 16) throw std::invalid_argument("build_grid: n must be at least 16");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw std::invalid_argument("build_grid: r_max must be positive");
    std::vector<double> r(n);
    const double s = grading.kind == Grading::Kind::graded ? grading.strength : 0.0;
    if (!(s >= 0.0)) throw std::invalid_argument("build_grid: grading strength must be non-negative");
    const double last = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / last;
        r[i] = (s < 1e-8) ? r_max * x : r_max * std::sinh(s * x) / std::sinh(s);
    }
    r.front() = 0.0;
    r.back() = r_max;
    return std::make_shared<const RadialGrid>(RadialGrid::from_nodes(std::move(r), grading));
}

double core_grading_strength(double kappa) {
    if (!(kappa > 1.0)) return 0.0;
    // solve s / sinh(s) = 1 / kappa; the left side decreases monotonically
    const double target = 1.0 / kappa;
    double lo = 0.0, hi = 1.0;
    while (hi / std::sinh(hi) > target) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = mid < 1e-12 ? 1.0 : mid / std::sinh(mid);
        (v > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double integrate(const RadialGrid& grid, std::span<const double> samples) {
    if (samples.size() != grid.size()) throw std::invalid_argument("integrate: sample count does not match grid");
    return kernels::active().weighted_sum(grid.weights(), samples);
}

std::vector<double> apply_radial_laplacian(const RadialGrid& grid, std::span<const double> samples,
                                           OriginBC origin_bc) {
    const std::size_t n = grid.size();
    if (samples.size() != n) throw std::invalid_argument("apply_radial_laplacian: sample count does not match grid");
    std::vector<double> out(n, 0.0);
    kernels::active().stiffness_accumulate(grid.stiffness(), samples, out);
    const auto w = grid.weights();
    for (std::size_t i = 0; i + 1 < n; ++i) out[i] /= w[i];
    if (origin_bc == OriginBC::dirichlet0) out[0] = 0.0;
    out[n - 1] = 0.0;
    return out;
}

}  // namespace vortex
