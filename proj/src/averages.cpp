#include "nilring/averages.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nilring/bump.hpp"
#include "nilring/kahan.hpp"

namespace nilring {

namespace {

std::int64_t ipow_ll(std::int64_t b, int e) {
    std::int64_t out = 1;
    for (int i = 0; i < e; ++i) out *= b;
    return out;
}

FlatKey make_key(std::span<const std::int64_t> coords) {
    FlatKey k;
    k.len = static_cast<std::uint8_t>(coords.size());
    std::copy(coords.begin(), coords.end(), k.c.begin());
    return k;
}

}  // namespace

BoxFunction::BoxFunction(int d, long scale) : d_(d) {
    const IndexSet& ix = IndexSet::get(d);
    radii_.resize(ix.size());
    for (std::size_t i = 0; i < ix.size(); ++i) radii_[i] = ipow_ll(scale, ix.weight(i));
}

BoxFunction::BoxFunction(int d, std::vector<std::int64_t> radii) : d_(d), radii_(std::move(radii)) {
    if (radii_.size() != IndexSet::get(d).size())
        throw std::invalid_argument("radius count does not match degree");
}

bool BoxFunction::inside(std::span<const std::int64_t> coords) const {
    for (std::size_t i = 0; i < radii_.size(); ++i)
        if (std::llabs(coords[i]) > radii_[i]) return false;
    return true;
}

void BoxFunction::set(std::span<const std::int64_t> coords, std::complex<double> v) {
    if (!inside(coords)) throw std::invalid_argument("point outside the declared box");
    if (v == std::complex<double>(0.0, 0.0)) {
        values_.erase(make_key(coords));
        return;
    }
    values_[make_key(coords)] = v;
}

void BoxFunction::add(std::span<const std::int64_t> coords, std::complex<double> v) {
    if (!inside(coords)) throw std::invalid_argument("point outside the declared box");
    values_[make_key(coords)] += v;
}

std::complex<double> BoxFunction::at(std::span<const std::int64_t> coords) const {
    auto it = values_.find(make_key(coords));
    return it == values_.end() ? std::complex<double>(0.0, 0.0) : it->second;
}

double BoxFunction::l1_norm() const {
    KahanSum s;
    for (const auto& [k, v] : values_) s.add(std::abs(v));
    return s.value();
}

double BoxFunction::l2_norm() const {
    KahanSum s;
    for (const auto& [k, v] : values_) s.add(std::norm(v));
    return std::sqrt(s.value());
}

BoxFunction BoxFunction::delta(int d, long scale) {
    BoxFunction f(d, scale);
    std::vector<std::int64_t> zero(IndexSet::get(d).size(), 0);
    f.set(zero, 1.0);
    return f;
}

BoxFunction convolve(const BoxFunction& f, const BoxFunction& kernel, const WorkBudget& budget) {
    if (f.d() != kernel.d()) throw std::invalid_argument("degree mismatch");
    const IndexSet& ix = IndexSet::get(f.d());
    const std::size_t D = ix.size();
    budget.check(static_cast<double>(f.support_size()) * kernel.support_size() * D, "convolve");

    // Output box: |(y.z)_i| bounds from the two supports.
    std::vector<std::int64_t> radii(D);
    const int d = f.d();
    for (int i = 0; i < d; ++i) radii[i] = f.radii()[i] + kernel.radii()[i];
    for (std::size_t i = d; i < D; ++i) {
        auto [l1, l2] = ix.index(i);
        radii[i] = f.radii()[i] + kernel.radii()[i] +
                   kernel.radii()[l1 - 1] * f.radii()[l2 - 1];
    }
    BoxFunction out(f.d(), std::move(radii));

    std::int64_t point[kMaxFlatCoords];
    for (const auto& [yk, yv] : kernel.values()) {
        for (const auto& [zk, zv] : f.values()) {
            fast_multiply(ix, yk.c.data(), zk.c.data(), point);
            out.add(std::span<const std::int64_t>(point, D), yv * zv);
        }
    }
    return out;
}

BoxFunction smoothing_kernel(int d, long N) {
    if (N < 1) throw std::invalid_argument("scale must be >= 1");
    const IndexSet& ix = IndexSet::get(d);
    std::vector<std::int64_t> radii(ix.size(), 0);
    for (int l1 = 1; l1 <= d; ++l1) radii[l1 - 1] = ipow_ll(2 * N, l1);
    BoxFunction kernel(d, std::move(radii));

    std::vector<std::int64_t> coords(ix.size(), 0);
    for (long n = -2 * N; n <= 2 * N; ++n) {
        double w = central_bump(static_cast<double>(n) / static_cast<double>(N)) /
                   static_cast<double>(N);
        if (w == 0.0) continue;
        std::int64_t p = 1;
        for (int l1 = 1; l1 <= d; ++l1) {
            p *= n;
            coords[l1 - 1] = p;
        }
        kernel.add(coords, w);
    }
    return kernel;
}

BoxFunction smoothed_average(const BoxFunction& f, long N, const WorkBudget& budget) {
    return convolve(f, smoothing_kernel(f.d(), N), budget);
}

MaximalResult maximal_function(const BoxFunction& f, std::span<const int> scales,
                               const WorkBudget& budget) {
    if (scales.empty()) throw std::invalid_argument("need at least one scale");
    const std::size_t D = IndexSet::get(f.d()).size();

    // Union box over the per-scale outputs.
    std::vector<BoxFunction> levels;
    levels.reserve(scales.size());
    for (int k : scales) {
        if (k < 0 || k > 40) throw std::invalid_argument("scale exponent out of range");
        levels.push_back(smoothed_average(f, 1L << k, budget));
    }
    std::vector<std::int64_t> radii(D, 0);
    for (const auto& lvl : levels)
        for (std::size_t i = 0; i < D; ++i) radii[i] = std::max(radii[i], lvl.radii()[i]);

    MaximalResult res{BoxFunction(f.d(), std::move(radii)), 0.0, 0.0, 0.0};
    for (const auto& lvl : levels) {
        for (const auto& [k, v] : lvl.values()) {
            std::span<const std::int64_t> coords(k.c.data(), D);
            double mag = std::abs(v);
            if (mag > res.sup.at(coords).real()) res.sup.set(coords, mag);
        }
    }
    res.input_l2 = f.l2_norm();
    res.sup_l2 = res.sup.l2_norm();
    res.ratio = res.input_l2 > 0.0 ? res.sup_l2 / res.input_l2 : 0.0;
    return res;
}

double variation_seminorm(std::span<const std::complex<double>> a, double rho) {
    if (rho < 1.0) throw std::invalid_argument("rho must be >= 1");
    const std::size_t n = a.size();
    if (n < 2) return 0.0;
    // best[j]: largest sum of |increment|^rho over subsequences ending at j.
    std::vector<double> best(n, 0.0);
    double top = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        double b = 0.0;
        for (std::size_t i = 0; i < j; ++i) {
            double cand = best[i] + std::pow(std::abs(a[j] - a[i]), rho);
            if (cand > b) b = cand;
        }
        best[j] = b;
        if (b > top) top = b;
    }
    return std::pow(top, 1.0 / rho);
}

RademacherMenshovResult rademacher_menshov_check(std::span<const std::complex<double>> a, long j0,
                                                 int m, double rho) {
    if (rho < 2.0) throw std::invalid_argument("rho must be >= 2");
    const long top = 1L << m;
    if (j0 < 0 || j0 >= top) throw std::invalid_argument("need 0 <= j0 < 2^m");
    if (a.size() < static_cast<std::size_t>(top) + 1)
        throw std::invalid_argument("sequence too short for 2^m");

    RademacherMenshovResult out;
    out.lhs = variation_seminorm(a.subspan(static_cast<std::size_t>(j0),
                                           static_cast<std::size_t>(top - j0) + 1),
                                 rho);
    KahanSum rhs;
    for (int i = 0; i <= m; ++i) {
        const long stride = 1L << i;
        long jlo = (j0 + stride - 1) / stride;  // ceil(j0 / 2^i)
        long jhi = (top >> i) - 1;
        KahanSum sq;
        for (long j = jlo; j <= jhi; ++j) {
            std::complex<double> diff = a[static_cast<std::size_t>((j + 1) * stride)] -
                                        a[static_cast<std::size_t>(j * stride)];
            sq.add(std::norm(diff));
        }
        rhs.add(std::sqrt(std::max(sq.value(), 0.0)));
    }
    out.rhs = std::sqrt(2.0) * rhs.value();
    out.holds = out.lhs <= out.rhs + 1e-9 * std::max(1.0, out.rhs);
    return out;
}

void check_calderon_zygmund(const std::function<double(double)>& kernel, long R) {
    const double tol = 1e-6;
    const int per_unit = 64;
    const long n = 2 * R * per_unit;
    const double h = static_cast<double>(2 * R) / n;

    double worst_size = 0.0, worst_deriv = 0.0;
    for (long i = 0; i <= n; ++i) {
        double t = -static_cast<double>(R) + i * h;
        double k = kernel(t);
        worst_size = std::max(worst_size, (1.0 + std::abs(t)) * std::abs(k));
        double dh = 1e-5;
        double kd = (kernel(t + dh) - kernel(t - dh)) / (2.0 * dh);
        worst_deriv = std::max(worst_deriv, (1.0 + std::abs(t)) * (1.0 + std::abs(t)) * std::abs(kd));
    }
    if (worst_size > 1.0 + tol)
        throw NumericPreconditionError("kernel size bound (1+|t|)|K| exceeds 1");
    if (worst_deriv > 1.0 + tol)
        throw NumericPreconditionError("kernel derivative bound (1+|t|)^2|K'| exceeds 1");

    // Cancellation: running integral from -T to T for T up to R (trapezoid).
    double worst_int = 0.0;
    for (long T = 1; T <= R; ++T) {
        KahanSum s;
        const long steps = 2 * T * per_unit;
        const double ht = static_cast<double>(2 * T) / steps;
        for (long i = 0; i <= steps; ++i) {
            double t = -static_cast<double>(T) + i * ht;
            double w = (i == 0 || i == steps) ? 0.5 : 1.0;
            s.add(w * kernel(t));
        }
        worst_int = std::max(worst_int, std::abs(s.value() * ht));
    }
    if (worst_int > 1.0 + tol)
        throw NumericPreconditionError("kernel truncated integrals exceed 1");
}

SingularResult singular_operator(const BoxFunction& f, const std::function<double(double)>& kernel,
                                 long R, const WorkBudget& budget) {
    if (R < 1) throw std::invalid_argument("truncation must be >= 1");
    check_calderon_zygmund(kernel, R);

    const int d = f.d();
    const IndexSet& ix = IndexSet::get(d);
    std::vector<std::int64_t> radii(ix.size(), 0);
    for (int l1 = 1; l1 <= d; ++l1) radii[l1 - 1] = ipow_ll(R, l1);
    BoxFunction kfn(d, std::move(radii));
    std::vector<std::int64_t> coords(ix.size(), 0);
    for (long n = -R; n <= R; ++n) {
        double w = kernel(static_cast<double>(n));
        if (w == 0.0) continue;
        std::int64_t p = 1;
        for (int l1 = 1; l1 <= d; ++l1) {
            p *= n;
            coords[l1 - 1] = p;
        }
        kfn.add(coords, w);
    }

    SingularResult res{convolve(f, kfn, budget), 0.0, 0.0, 0.0};
    res.input_l2 = f.l2_norm();
    res.output_l2 = res.out.l2_norm();
    res.ratio = res.input_l2 > 0.0 ? res.output_l2 / res.input_l2 : 0.0;
    return res;
}

}  // namespace nilring
