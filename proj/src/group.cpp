#include "nilring/group.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nilring {

namespace {

void require_same_degree(const GroupElement& g, const GroupElement& h) {
    if (g.d() != h.d()) throw std::invalid_argument("group elements have different degrees");
}

mpz_class pow_int(const mpz_class& base, unsigned long e) {
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

}  // namespace

GroupElement::GroupElement(int d, std::vector<mpz_class> coords) : d_(d), coords_(std::move(coords)) {
    if (coords_.size() != IndexSet::get(d).size())
        throw std::invalid_argument("coordinate count does not match degree");
}

bool GroupElement::is_identity() const {
    for (const auto& c : coords_)
        if (c != 0) return false;
    return true;
}

RealGroupElement::RealGroupElement(int d, std::vector<double> coords)
    : d_(d), coords_(std::move(coords)) {
    if (coords_.size() != IndexSet::get(d).size())
        throw std::invalid_argument("coordinate count does not match degree");
}

GroupElement multiply(const GroupElement& g, const GroupElement& h) {
    require_same_degree(g, h);
    const IndexSet& ix = g.index_set();
    const int d = g.d();
    GroupElement out(d);
    for (int i = 0; i < d; ++i) out[i] = g[i] + h[i];
    for (std::size_t i = d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        // [g.h]_{l1 l2} = g_{l1 l2} + h_{l1 l2} + g_{l1 0} h_{l2 0}
        out[i] = g[i] + h[i] + g[l1 - 1] * h[l2 - 1];
    }
    return out;
}

GroupElement inverse(const GroupElement& g) {
    const IndexSet& ix = g.index_set();
    const int d = g.d();
    GroupElement out(d);
    for (int i = 0; i < d; ++i) out[i] = -g[i];
    for (std::size_t i = d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        out[i] = -g[i] + g[l1 - 1] * g[l2 - 1];
    }
    return out;
}

GroupElement dilate(const mpz_class& lambda, const GroupElement& g) {
    if (lambda <= 0) throw std::invalid_argument("dilation factor must be positive");
    const IndexSet& ix = g.index_set();
    GroupElement out(g.d());
    for (std::size_t i = 0; i < ix.size(); ++i)
        out[i] = g[i] * pow_int(lambda, static_cast<unsigned long>(ix.weight(i)));
    return out;
}

RealGroupElement dilate(double lambda, const RealGroupElement& g) {
    if (!(lambda > 0.0)) throw std::invalid_argument("dilation factor must be positive");
    const IndexSet& ix = g.index_set();
    RealGroupElement out(g.d());
    for (std::size_t i = 0; i < ix.size(); ++i) out[i] = g[i] * std::pow(lambda, ix.weight(i));
    return out;
}

RealGroupElement to_real(const GroupElement& g) {
    RealGroupElement out(g.d());
    static const mpz_class kMantissaBound = mpz_class(1) << 53;
    for (std::size_t i = 0; i < g.size(); ++i) {
        mpz_class mag = abs(g[i]);
        if (mag > kMantissaBound)
            throw std::invalid_argument("coordinate exceeds exact floating range");
        out[i] = g[i].get_d();
    }
    return out;
}

GroupElement moment_curve(const mpz_class& n, int d) {
    GroupElement out(d);
    for (int l1 = 1; l1 <= d; ++l1) out[l1 - 1] = pow_int(n, static_cast<unsigned long>(l1));
    return out;
}

GroupElement iterated_product(std::span<const mpz_class> n, std::span<const mpz_class> m, int d,
                              Variant variant) {
    if (n.size() != m.size()) throw std::invalid_argument("tuple lengths differ");
    GroupElement acc = GroupElement::identity(d);
    for (std::size_t j = 0; j < n.size(); ++j) {
        GroupElement an = moment_curve(n[j], d);
        GroupElement am = moment_curve(m[j], d);
        if (variant == Variant::D) {
            acc = multiply(acc, inverse(an));
            acc = multiply(acc, am);
        } else {
            acc = multiply(acc, an);
            acc = multiply(acc, inverse(am));
        }
    }
    return acc;
}

GroupElement closed_form_product(std::span<const mpz_class> n, std::span<const mpz_class> m, int d,
                                 Variant variant) {
    if (n.size() != m.size()) throw std::invalid_argument("tuple lengths differ");
    const std::size_t r = n.size();
    const bool tilde = variant == Variant::DTilde;
    const IndexSet& ix = IndexSet::get(d);
    GroupElement out(d);

    std::vector<std::vector<mpz_class>> xp(r), yp(r);  // xp[j][l] = n_j^l, l <= 2d
    for (std::size_t j = 0; j < r; ++j) {
        xp[j].resize(2 * d + 1);
        yp[j].resize(2 * d + 1);
        xp[j][0] = 1;
        yp[j][0] = 1;
        for (int l = 1; l <= 2 * d; ++l) {
            xp[j][l] = xp[j][l - 1] * n[j];
            yp[j][l] = yp[j][l - 1] * m[j];
        }
    }
    // delta_j^(l) = m_j^l - n_j^l, negated for the tilde variant.
    auto delta = [&](std::size_t j, int l) {
        return tilde ? mpz_class(xp[j][l] - yp[j][l]) : mpz_class(yp[j][l] - xp[j][l]);
    };

    for (int l1 = 1; l1 <= d; ++l1) {
        mpz_class s = 0;
        for (std::size_t j = 0; j < r; ++j) s += delta(j, l1);
        out[l1 - 1] = s;
    }
    for (std::size_t i = d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        mpz_class s = 0;
        // Cross terms over ordered pairs, first index carries l1.
        mpz_class prefix = 0;  // sum over j1 < j2 of delta^(l1)
        for (std::size_t j2 = 0; j2 < r; ++j2) {
            if (j2 > 0) prefix += delta(j2 - 1, l1);
            s += prefix * delta(j2, l2);
        }
        for (std::size_t j = 0; j < r; ++j) {
            if (tilde)
                s += yp[j][l1 + l2] - xp[j][l1] * yp[j][l2];
            else
                s += xp[j][l1 + l2] - xp[j][l1] * yp[j][l2];
        }
        out[i] = s;
    }
    return out;
}

void closed_form_product_real_into(std::span<const double> x, std::span<const double> y, int d,
                                   Variant variant, double* out) {
    if (x.size() != y.size()) throw std::invalid_argument("tuple lengths differ");
    if (x.size() > 32) throw std::invalid_argument("tuple too long for the stack evaluator");
    const bool tilde = variant == Variant::DTilde;
    const std::size_t r = x.size();
    const IndexSet& ix = IndexSet::get(d);

    double xp[32][9], yp[32][9];
    for (std::size_t j = 0; j < r; ++j) {
        xp[j][0] = 1.0;
        yp[j][0] = 1.0;
        for (int l = 1; l <= 2 * d; ++l) {
            xp[j][l] = xp[j][l - 1] * x[j];
            yp[j][l] = yp[j][l - 1] * y[j];
        }
    }
    auto delta = [&](std::size_t j, int l) {
        return tilde ? xp[j][l] - yp[j][l] : yp[j][l] - xp[j][l];
    };

    for (int l1 = 1; l1 <= d; ++l1) {
        double s = 0.0;
        for (std::size_t j = 0; j < r; ++j) s += delta(j, l1);
        out[l1 - 1] = s;
    }
    for (std::size_t i = d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        double s = 0.0;
        double prefix = 0.0;
        for (std::size_t j2 = 0; j2 < r; ++j2) {
            if (j2 > 0) prefix += delta(j2 - 1, l1);
            s += prefix * delta(j2, l2);
        }
        for (std::size_t j = 0; j < r; ++j) {
            s += (tilde ? yp[j][l1 + l2] : xp[j][l1 + l2]) - xp[j][l1] * yp[j][l2];
        }
        out[i] = s;
    }
}

std::vector<double> closed_form_product_real(std::span<const double> x, std::span<const double> y,
                                             int d, Variant variant) {
    std::vector<double> out(IndexSet::get(d).size(), 0.0);
    closed_form_product_real_into(x, y, d, variant, out.data());
    return out;
}

std::string to_canonical(const GroupElement& g) {
    std::ostringstream os;
    os << "d=" << g.d() << ";[";
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) os << ",";
        os << g[i].get_str();
    }
    os << "]";
    return os.str();
}

GroupElement parse_canonical(const std::string& text) {
    auto fail = [&]() -> GroupElement {
        throw std::invalid_argument("bad element text: " + text);
    };
    if (text.rfind("d=", 0) != 0) return fail();
    std::size_t semi = text.find(';');
    if (semi == std::string::npos) return fail();
    int d = 0;
    try {
        d = std::stoi(text.substr(2, semi - 2));
    } catch (const std::exception&) {
        return fail();
    }
    if (d < 1) return fail();
    std::size_t lb = text.find('[', semi);
    std::size_t rb = text.rfind(']');
    if (lb == std::string::npos || rb == std::string::npos || rb < lb) return fail();
    std::string body = text.substr(lb + 1, rb - lb - 1);
    std::vector<mpz_class> coords;
    std::istringstream is(body);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) return fail();
        coords.emplace_back(tok);
    }
    if (coords.size() != IndexSet::get(d).size()) return fail();
    return GroupElement(d, std::move(coords));
}

}  // namespace nilring
