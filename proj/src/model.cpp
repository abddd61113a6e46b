#include "vortex/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vortex/kernels.hpp"

namespace vortex {

Kappa Kappa::finite(double value) {
    if (!std::isfinite(value) || !(value > 0.0)) throw std::invalid_argument("kappa must be positive (or inf)");
    return Kappa(false, value);
}

Kappa Kappa::parse(const std::string& text) {
    std::string low;
    for (char ch : text) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (low == "inf" || low == "infinity") return infinite();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse kappa: " + text);
    }
    if (used != text.size()) throw std::invalid_argument("cannot parse kappa: " + text);
    return finite(v);
}

double Kappa::value() const { return infinite_ ? INFINITY : value_; }

std::string Kappa::to_string() const {
    if (infinite_) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << value_;
    return os.str();
}

void ModelParams::validate() const {
    if (d == 0) throw std::invalid_argument("degree d must be non-zero");
    if (!std::isfinite(g) || !(g > 0.0)) throw std::invalid_argument("g must be finite and positive");
}

Profile Profile::zeros(GridPtr grid) {
    Profile p;
    const std::size_t n = grid->size();
    p.grid = std::move(grid);
    p.f.assign(n, 0.0);
    p.S.assign(n, 0.0);
    p.m.assign(n, 0.0);
    return p;
}

TangentDirection TangentDirection::zeros(std::size_t n) {
    return TangentDirection{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

namespace {

void check_profile(const Profile& p) {
    if (!p.grid) throw std::invalid_argument("profile has no grid");
    const std::size_t n = p.grid->size();
    if (p.f.size() != n || p.S.size() != n || p.m.size() != n)
        throw std::invalid_argument("profile field length does not match grid");
}

struct Layout {
    std::size_t nf;
    bool has_S;
    std::size_t f(std::size_t i) const { return i * nf; }
    std::size_t S(std::size_t i) const { return i * nf + 1; }
    std::size_t m(std::size_t i) const { return i * nf + nf - 1; }
};

Layout layout_of(const ModelParams& params) { return Layout{params.field_count(), params.has_magnetic_field()}; }

}  // namespace

EnergyBreakdown energy(const ModelParams& params, const Profile& p, std::span<const double> normal_core_f) {
    check_profile(p);
    const auto& K = kernels::active();
    const RadialGrid& grid = *p.grid;
    const std::size_t n = grid.size();
    const auto w = grid.weights();
    const auto ir2 = grid.inv_r2();
    const double k2 = params.kappa.potential_scale();
    const double d = params.d;

    EnergyBreakdown e;
    e.grad_f = 0.5 * K.cell_energy(grid.stiffness(), p.f);
    e.grad_m = 0.5 * K.cell_energy(grid.stiffness(), p.m);
    e.mass_m = 0.5 * k2 * params.g * K.weighted_dot(w, p.m, p.m);
    e.potential = 0.25 * k2 * K.potential_energy(w, p.f, p.m);

    double wind = 0.0;
    if (params.has_magnetic_field()) {
        e.magnetic = 0.5 * K.cell_energy(grid.stiffness_inv_r(), p.S);
        for (std::size_t i = 1; i < n; ++i) {
            const double a = (d - p.S[i]) * p.f[i];
            wind += w[i] * ir2[i] * a * a;
        }
    } else {
        if (!normal_core_f.empty() && normal_core_f.size() != n)
            throw std::invalid_argument("normal-core reference does not match profile grid");
        for (std::size_t i = 1; i < n; ++i) {
            double a = p.f[i] * p.f[i];
            if (!normal_core_f.empty()) a -= normal_core_f[i] * normal_core_f[i];
            wind += w[i] * ir2[i] * d * d * a;
        }
    }
    e.winding = 0.5 * wind;
    e.total = e.grad_f + e.magnetic + e.grad_m + e.mass_m + e.winding + e.potential;
    return e;
}

namespace {

struct FieldGradients {
    std::vector<double> f, S, m;
};

FieldGradients field_gradients(const ModelParams& params, const Profile& p) {
    check_profile(p);
    const auto& K = kernels::active();
    const RadialGrid& grid = *p.grid;
    const std::size_t n = grid.size();
    const auto w = grid.weights();
    const auto ir2 = grid.inv_r2();
    const double k2 = params.kappa.potential_scale();
    const double d = params.d;

    FieldGradients G{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    K.stiffness_accumulate(grid.stiffness(), p.f, G.f);
    K.stiffness_accumulate(grid.stiffness(), p.m, G.m);
    K.potential_gradient(w, p.f, p.m, k2, G.f, G.m);
    for (std::size_t i = 0; i < n; ++i) G.m[i] += k2 * params.g * w[i] * p.m[i];
    if (params.has_magnetic_field()) {
        K.stiffness_accumulate(grid.stiffness_inv_r(), p.S, G.S);
        for (std::size_t i = 1; i < n; ++i) {
            const double a = d - p.S[i];
            G.f[i] += w[i] * ir2[i] * a * a * p.f[i];
            G.S[i] -= w[i] * ir2[i] * a * p.f[i] * p.f[i];
        }
    } else {
        for (std::size_t i = 1; i < n; ++i) G.f[i] += w[i] * ir2[i] * d * d * p.f[i];
    }
    return G;
}

}  // namespace

std::vector<double> energy_gradient(const ModelParams& params, const Profile& p) {
    const auto G = field_gradients(params, p);
    const Layout L = layout_of(params);
    const std::size_t n = p.size();
    std::vector<double> out(n * L.nf);
    for (std::size_t i = 0; i < n; ++i) {
        out[L.f(i)] = G.f[i];
        if (L.has_S) out[L.S(i)] = G.S[i];
        out[L.m(i)] = G.m[i];
    }
    return out;
}

TangentDirection residual(const ModelParams& params, const Profile& p) {
    const auto G = field_gradients(params, p);
    const RadialGrid& grid = *p.grid;
    const std::size_t n = grid.size();
    const auto w = grid.weights();
    const auto r = grid.r();
    TangentDirection R = TangentDirection::zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        R.u[i] = G.f[i] / w[i];
        R.w[i] = G.m[i] / w[i];
        if (params.has_magnetic_field()) R.v[i] = r[i] * G.S[i] / w[i];
    }
    R.u[0] = p.f[0];
    R.u[n - 1] = p.f[n - 1] - 1.0;
    R.w[n - 1] = p.m[n - 1];
    if (params.has_magnetic_field()) {
        R.v[0] = p.S[0];
        R.v[n - 1] = p.S[n - 1] - params.d;
    }
    return R;
}

double sup_norm(const TangentDirection& r) {
    double s = 0.0;
    for (double x : r.u) s = std::max(s, std::abs(x));
    for (double x : r.v) s = std::max(s, std::abs(x));
    for (double x : r.w) s = std::max(s, std::abs(x));
    return s;
}

SymBandMatrix energy_hessian(const ModelParams& params, const Profile& p) {
    check_profile(p);
    const RadialGrid& grid = *p.grid;
    const std::size_t n = grid.size();
    const Layout L = layout_of(params);
    const auto w = grid.weights();
    const auto ir2 = grid.inv_r2();
    const auto stiff = grid.stiffness();
    const auto stiff_ir = grid.stiffness_inv_r();
    const double k2 = params.kappa.potential_scale();
    const double d = params.d, g = params.g;

    SymBandMatrix H(n * L.nf, L.nf);
    for (std::size_t c = 0; c + 1 < n; ++c) {
        const double a = stiff[c];
        H.add(L.f(c), L.f(c), a);
        H.add(L.f(c + 1), L.f(c + 1), a);
        H.add(L.f(c), L.f(c + 1), -a);
        H.add(L.m(c), L.m(c), a);
        H.add(L.m(c + 1), L.m(c + 1), a);
        H.add(L.m(c), L.m(c + 1), -a);
        if (L.has_S) {
            const double b = stiff_ir[c];
            H.add(L.S(c), L.S(c), b);
            H.add(L.S(c + 1), L.S(c + 1), b);
            H.add(L.S(c), L.S(c + 1), -b);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double f = p.f[i], m = p.m[i];
        const double a = L.has_S ? d - p.S[i] : d;
        H.add(L.f(i), L.f(i), w[i] * (a * a * ir2[i] - k2 * (1.0 - 3.0 * f * f - m * m)));
        H.add(L.f(i), L.m(i), w[i] * 2.0 * k2 * f * m);
        H.add(L.m(i), L.m(i), w[i] * (k2 * g - k2 * (1.0 - f * f - 3.0 * m * m)));
        if (L.has_S) {
            H.add(L.f(i), L.S(i), -2.0 * w[i] * a * f * ir2[i]);
            H.add(L.S(i), L.S(i), w[i] * f * f * ir2[i]);
        }
    }
    return H;
}

std::vector<std::size_t> clamped_dofs(const ModelParams& params, std::size_t n) {
    const Layout L = layout_of(params);
    std::vector<std::size_t> c{L.f(0), L.f(n - 1), L.m(n - 1)};
    if (L.has_S) {
        c.push_back(L.S(0));
        c.push_back(L.S(n - 1));
    }
    std::sort(c.begin(), c.end());
    return c;
}

std::vector<double> pack(const ModelParams& params, const Profile& p) {
    const Layout L = layout_of(params);
    const std::size_t n = p.size();
    std::vector<double> x(n * L.nf);
    for (std::size_t i = 0; i < n; ++i) {
        x[L.f(i)] = p.f[i];
        if (L.has_S) x[L.S(i)] = p.S[i];
        x[L.m(i)] = p.m[i];
    }
    return x;
}

void unpack(const ModelParams& params, std::span<const double> x, Profile& p) {
    const Layout L = layout_of(params);
    const std::size_t n = p.size();
    if (x.size() != n * L.nf) throw std::invalid_argument("unpack: vector length does not match profile");
    for (std::size_t i = 0; i < n; ++i) {
        p.f[i] = x[L.f(i)];
        p.S[i] = L.has_S ? x[L.S(i)] : 0.0;
        p.m[i] = x[L.m(i)];
    }
}

HessianOperator::HessianOperator(const ModelParams& params, const Profile& p)
    : params_(params), grid_(p.grid), band_(energy_hessian(params, p)), clamped_(clamped_dofs(params, p.size())) {}

std::vector<double> HessianOperator::to_values(const TangentDirection& dir) const {
    const std::size_t n = grid_->size();
    if (dir.u.size() != n || dir.v.size() != n || dir.w.size() != n)
        throw std::invalid_argument("direction length does not match grid");
    const Layout L = layout_of(params_);
    const auto r = grid_->r();
    std::vector<double> x(n * L.nf);
    for (std::size_t i = 0; i < n; ++i) {
        x[L.f(i)] = dir.u[i];
        if (L.has_S) x[L.S(i)] = r[i] * dir.v[i];
        x[L.m(i)] = dir.w[i];
    }
    for (std::size_t k : clamped_) x[k] = 0.0;
    return x;
}

TangentDirection HessianOperator::apply(const TangentDirection& dir) const {
    const auto x = to_values(dir);
    std::vector<double> y(x.size());
    band_.multiply(x, y);
    for (std::size_t k : clamped_) y[k] = 0.0;
    const Layout L = layout_of(params_);
    const std::size_t n = grid_->size();
    const auto w = grid_->weights();
    const auto r = grid_->r();
    TangentDirection out = TangentDirection::zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.u[i] = y[L.f(i)] / w[i];
        if (L.has_S) out.v[i] = r[i] * y[L.S(i)] / w[i];
        out.w[i] = y[L.m(i)] / w[i];
    }
    return out;
}

double HessianOperator::form(const TangentDirection& a, const TangentDirection& b) const {
    const auto xa = to_values(a);
    const auto xb = to_values(b);
    std::vector<double> y(xb.size());
    band_.multiply(xb, y);
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) s += xa[k] * y[k];
    return s;
}

namespace {

// sum_c coef_c a_i a_{i+1} (u_{i+1}/a_{i+1} - u_i/a_i)^2, expanded; a node with
// a_i == 0 must carry u_i == 0 and its 1/a_i terms drop out.
double picone_sum(std::span<const double> coef, std::span<const double> a, std::span<const double> u) {
    double s = 0.0;
    for (std::size_t c = 0; c < coef.size(); ++c) {
        const double a0 = a[c], a1 = a[c + 1], u0 = u[c], u1 = u[c + 1];
        double t = -2.0 * u0 * u1;
        if (a1 != 0.0) t += (a0 / a1) * u1 * u1;
        if (a0 != 0.0) t += (a1 / a0) * u0 * u0;
        s += coef[c] * t;
    }
    return s;
}

}  // namespace

QuotientParts quotient_parts(const ModelParams& params, const Profile& p, const TangentDirection& dir) {
    check_profile(p);
    if (params.has_magnetic_field()) throw std::invalid_argument("quotient_form applies to the limit system only");
    const std::size_t n = p.size();
    if (dir.u.size() != n || dir.w.size() != n) throw std::invalid_argument("direction length does not match grid");
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(p.f[i] > 0.0) || !(p.m[i] > 0.0))
            throw std::invalid_argument("quotient_form needs f > 0 and m > 0 at interior nodes");
    }
    if (!(p.m[0] > 0.0)) throw std::invalid_argument("quotient_form needs m(0) > 0");

    // clamped components are not part of the tangent space
    std::vector<double> u = dir.u, w = dir.w;
    u[0] = 0.0;
    u[n - 1] = 0.0;
    w[n - 1] = 0.0;
    std::vector<double> f = p.f, m = p.m;
    f[0] = 0.0;
    m[n - 1] = 0.0;

    const RadialGrid& grid = *p.grid;
    QuotientParts q;
    q.gradient_part = picone_sum(grid.stiffness(), f, u) + picone_sum(grid.stiffness(), m, w);
    const auto wt = grid.weights();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = p.f[i] * u[i] + p.m[i] * w[i];
        q.coupling += wt[i] * s * s;
    }
    return q;
}

double quotient_form(const ModelParams& params, const Profile& p, const TangentDirection& dir, double c) {
    const auto q = quotient_parts(params, p, dir);
    return q.gradient_part + c * q.coupling;
}

double magnetic_integral(const RadialGrid& grid, std::span<const double> S) {
    if (S.size() != grid.size()) throw std::invalid_argument("magnetic_integral: length mismatch");
    return kernels::active().cell_energy(grid.stiffness_inv_r(), S);
}

PohozaevResult pohozaev_residual(const ModelParams& params, const Profile& p) {
    check_profile(p);
    const auto& K = kernels::active();
    const RadialGrid& grid = *p.grid;
    const auto w = grid.weights();
    const double k2 = params.kappa.potential_scale();
    PohozaevResult res;
    res.lhs = params.g * k2 * K.weighted_dot(w, p.m, p.m) + 0.5 * k2 * K.potential_energy(w, p.f, p.m);
    res.rhs = params.has_magnetic_field() ? magnetic_integral(grid, p.S) : 0.5 * params.d * params.d;
    res.rel_err = std::abs(res.lhs - res.rhs) / std::max(res.rhs, 1e-30);
    return res;
}

std::pair<ModelParams, Profile> reflect(const ModelParams& params, const Profile& p) {
    ModelParams q = params;
    q.d = -params.d;
    Profile out = p;
    for (double& s : out.S) s = -s;
    return {q, out};
}

}  // namespace vortex
