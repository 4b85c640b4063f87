#include "mviopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mviopt {

namespace {

constexpr double kEntropyFloor = 1e-300;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

ProxSetup::ProxSetup(Kind kind) : kind_(kind), norm_(NormKind::euclidean) {}

ProxSetup ProxSetup::euclidean() {
    ProxSetup s(Kind::euclidean);
    s.norm_ = NormKind::euclidean;
    return s;
}

ProxSetup ProxSetup::entropy() {
    ProxSetup s(Kind::entropy);
    s.norm_ = NormKind::l1;
    return s;
}

ProxSetup ProxSetup::product(std::vector<ProxSetup> parts, std::vector<int> dims) {
    if (parts.size() != dims.size() || parts.empty())
        throw ConfigError("ProxSetup::product: parts/dims mismatch");
    ProxSetup s(Kind::product);
    // The product norm is the root of summed component norm squares; it has
    // no single NormKind tag, callers should use norm_sq().
    s.norm_ = parts.front().norm();
    s.parts_ = std::move(parts);
    s.part_dims_ = std::move(dims);
    return s;
}

double ProxSetup::d(const Vector& x) const {
    switch (kind_) {
        case Kind::euclidean:
            return x.norm2sq();
        case Kind::entropy: {
            double r = 0.0;
            for (int i = 0; i < x.dim(); ++i) r += xlogx(x[i]);
            return 2.0 * r;
        }
        case Kind::product: {
            double r = 0.0;
            int off = 0;
            for (std::size_t k = 0; k < parts_.size(); ++k) {
                r += parts_[k].d(x.segment(off, part_dims_[k]));
                off += part_dims_[k];
            }
            return r;
        }
    }
    throw ConfigError("ProxSetup::d: unknown kind");
}

Vector ProxSetup::grad_d(const Vector& x) const {
    switch (kind_) {
        case Kind::euclidean:
            return 2.0 * x;
        case Kind::entropy: {
            Vector g(x.dim());
            for (int i = 0; i < x.dim(); ++i) {
                if (x[i] <= 0.0)
                    throw DomainError("ProxSetup::grad_d: entropy gradient needs x > 0");
                g[i] = 2.0 * (std::log(x[i]) + 1.0);
            }
            return g;
        }
        case Kind::product: {
            Vector g(x.dim());
            int off = 0;
            for (std::size_t k = 0; k < parts_.size(); ++k) {
                g.set_segment(off, parts_[k].grad_d(x.segment(off, part_dims_[k])));
                off += part_dims_[k];
            }
            return g;
        }
    }
    throw ConfigError("ProxSetup::grad_d: unknown kind");
}

double ProxSetup::omega(const Vector& x, const Vector& y) const {
    if (x.dim() != y.dim()) throw DomainError("ProxSetup::omega: dimension mismatch");
    switch (kind_) {
        case Kind::euclidean: {
            Vector diff = x - y;
            return diff.norm2sq();
        }
        case Kind::entropy: {
            // 2 * sum x ln(x/y) - x + y; the generalized form stays valid off
            // the simplex and reduces to 2*KL on it.
            double r = 0.0;
            for (int i = 0; i < x.dim(); ++i) {
                if (y[i] <= 0.0)
                    throw DomainError("ProxSetup::omega: entropy anchor needs y > 0");
                if (x[i] < 0.0)
                    throw DomainError("ProxSetup::omega: entropy point needs x >= 0");
                r += (x[i] > 0.0 ? x[i] * std::log(x[i] / y[i]) : 0.0) - x[i] + y[i];
            }
            return std::max(0.0, 2.0 * r);
        }
        case Kind::product: {
            double r = 0.0;
            int off = 0;
            for (std::size_t k = 0; k < parts_.size(); ++k) {
                r += parts_[k].omega(x.segment(off, part_dims_[k]),
                                     y.segment(off, part_dims_[k]));
                off += part_dims_[k];
            }
            return r;
        }
    }
    throw ConfigError("ProxSetup::omega: unknown kind");
}

double ProxSetup::norm_sq(const Vector& x) const {
    switch (kind_) {
        case Kind::euclidean:
            return x.norm2sq();
        case Kind::entropy: {
            const double n1 = x.norm1();
            return n1 * n1;
        }
        case Kind::product: {
            double r = 0.0;
            int off = 0;
            for (std::size_t k = 0; k < parts_.size(); ++k) {
                r += parts_[k].norm_sq(x.segment(off, part_dims_[k]));
                off += part_dims_[k];
            }
            return r;
        }
    }
    throw ConfigError("ProxSetup::norm_sq: unknown kind");
}

FeasibleSet FeasibleSet::whole_space(int dim) {
    FeasibleSet s(Kind::whole_space);
    s.dim_ = dim;
    return s;
}

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
    if (radius <= 0.0) throw ConfigError("FeasibleSet::ball: radius must be > 0");
    FeasibleSet s(Kind::ball);
    s.dim_ = center.dim();
    s.ball_center_ = std::move(center);
    s.ball_radius_ = radius;
    return s;
}

FeasibleSet FeasibleSet::box(Vector lo, Vector hi) {
    if (lo.dim() != hi.dim()) throw ConfigError("FeasibleSet::box: lo/hi dimension mismatch");
    for (int i = 0; i < lo.dim(); ++i)
        if (lo[i] > hi[i]) throw ConfigError("FeasibleSet::box: lo > hi");
    FeasibleSet s(Kind::box);
    s.dim_ = lo.dim();
    s.box_lo_ = std::move(lo);
    s.box_hi_ = std::move(hi);
    return s;
}

FeasibleSet FeasibleSet::simplex(int dim) {
    if (dim < 1) throw ConfigError("FeasibleSet::simplex: dim must be >= 1");
    FeasibleSet s(Kind::simplex);
    s.dim_ = dim;
    return s;
}

FeasibleSet FeasibleSet::product(std::vector<FeasibleSet> parts) {
    if (parts.empty()) throw ConfigError("FeasibleSet::product: empty product");
    FeasibleSet s(Kind::product);
    s.dim_ = 0;
    for (const auto& p : parts) s.dim_ += p.dim();
    s.parts_ = std::move(parts);
    return s;
}

bool FeasibleSet::compact() const {
    switch (kind_) {
        case Kind::whole_space:
            return false;
        case Kind::ball:
        case Kind::box:
        case Kind::simplex:
            return true;
        case Kind::product:
            return std::all_of(parts_.begin(), parts_.end(),
                               [](const FeasibleSet& p) { return p.compact(); });
    }
    return false;
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
    if (x.dim() != dim_) return false;
    switch (kind_) {
        case Kind::whole_space:
            return true;
        case Kind::ball:
            return (x - ball_center_).norm2() <= ball_radius_ + tol;
        case Kind::box:
            for (int i = 0; i < dim_; ++i)
                if (x[i] < box_lo_[i] - tol || x[i] > box_hi_[i] + tol) return false;
            return true;
        case Kind::simplex: {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                if (x[i] < -tol) return false;
                s += x[i];
            }
            return std::fabs(s - 1.0) <= tol;
        }
        case Kind::product: {
            int off = 0;
            for (const auto& p : parts_) {
                if (!p.contains(x.segment(off, p.dim()), tol)) return false;
                off += p.dim();
            }
            return true;
        }
    }
    return false;
}

Vector FeasibleSet::center_point() const {
    switch (kind_) {
        case Kind::whole_space:
            return Vector::zeros(dim_);
        case Kind::ball:
            return ball_center_;
        case Kind::box: {
            Vector c(dim_);
            for (int i = 0; i < dim_; ++i) c[i] = 0.5 * (box_lo_[i] + box_hi_[i]);
            return c;
        }
        case Kind::simplex:
            return Vector::constant(dim_, 1.0 / dim_);
        case Kind::product: {
            Vector c(dim_);
            int off = 0;
            for (const auto& p : parts_) {
                c.set_segment(off, p.center_point());
                off += p.dim();
            }
            return c;
        }
    }
    throw ConfigError("FeasibleSet::center_point: unknown kind");
}

Vector FeasibleSet::sample(CounterRng& rng) const {
    switch (kind_) {
        case Kind::whole_space:
            throw UnboundedCertificateError("FeasibleSet::sample: whole space is not sampleable");
        case Kind::ball: {
            Vector dir(dim_);
            for (int i = 0; i < dim_; ++i) dir[i] = rng.normal();
            const double nd = dir.norm2();
            if (nd == 0.0) return ball_center_;
            const double r =
                ball_radius_ * std::pow(rng.next_double(), 1.0 / std::max(1, dim_));
            dir *= r / nd;
            return ball_center_ + dir;
        }
        case Kind::box: {
            Vector x(dim_);
            for (int i = 0; i < dim_; ++i) x[i] = rng.uniform(box_lo_[i], box_hi_[i]);
            return x;
        }
        case Kind::simplex: {
            // Dirichlet(1,...,1) via normalized exponentials.
            Vector x(dim_);
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double u = 1.0 - rng.next_double();
                x[i] = -std::log(u);
                s += x[i];
            }
            x *= 1.0 / s;
            return x;
        }
        case Kind::product: {
            Vector x(dim_);
            int off = 0;
            for (const auto& p : parts_) {
                x.set_segment(off, p.sample(rng));
                off += p.dim();
            }
            return x;
        }
    }
    throw ConfigError("FeasibleSet::sample: unknown kind");
}

double FeasibleSet::support_min(const Vector& field) const {
    if (field.dim() != dim_) throw DomainError("support_min: dimension mismatch");
    switch (kind_) {
        case Kind::whole_space:
            throw UnboundedCertificateError("support_min: whole space has no finite support");
        case Kind::ball:
            return field.dot(ball_center_) - ball_radius_ * field.norm2();
        case Kind::box: {
            double r = 0.0;
            for (int i = 0; i < dim_; ++i)
                r += field[i] >= 0.0 ? field[i] * box_lo_[i] : field[i] * box_hi_[i];
            return r;
        }
        case Kind::simplex: {
            double m = field[0];
            for (int i = 1; i < dim_; ++i) m = std::min(m, field[i]);
            return m;
        }
        case Kind::product: {
            double r = 0.0;
            int off = 0;
            for (const auto& p : parts_) {
                r += p.support_min(field.segment(off, p.dim()));
                off += p.dim();
            }
            return r;
        }
    }
    throw ConfigError("support_min: unknown kind");
}

namespace {

Vector entropy_simplex_step(const Vector& anchor, const Vector& linear, double alpha) {
    // Multiplicative-weights update: x_i proportional to a_i exp(-c_i/(2 alpha));
    // computed in log space and shifted for stability, floored before the logs.
    const int n = anchor.dim();
    Vector logits(n);
    double maxlogit = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double a = std::max(anchor[i], kEntropyFloor);
        logits[i] = std::log(a) - linear[i] / (2.0 * alpha);
        maxlogit = std::max(maxlogit, logits[i]);
    }
    Vector x(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        x[i] = std::exp(logits[i] - maxlogit);
        sum += x[i];
    }
    for (int i = 0; i < n; ++i) x[i] = std::max(x[i] / sum, kEntropyFloor);
    double renorm = 0.0;
    for (int i = 0; i < n; ++i) renorm += x[i];
    x *= 1.0 / renorm;
    return x;
}

}  // namespace

Vector mirror_step(const ProxSetup& setup, const FeasibleSet& set, const Vector& anchor,
                   const Vector& linear, double alpha) {
    if (alpha <= 0.0) throw DomainError("mirror_step: alpha must be > 0");
    if (!set.contains(anchor, 1e-9)) throw DomainError("mirror_step: anchor outside set");
    if (anchor.dim() != linear.dim() || anchor.dim() != set.dim())
        throw DomainError("mirror_step: dimension mismatch");

    switch (setup.kind()) {
        case ProxSetup::Kind::euclidean: {
            Vector target = anchor - (1.0 / (2.0 * alpha)) * linear;
            switch (set.kind()) {
                case FeasibleSet::Kind::whole_space:
                    return target;
                case FeasibleSet::Kind::ball: {
                    Vector d = target - set.ball_center();
                    const double nd = d.norm2();
                    if (nd <= set.ball_radius()) return target;
                    d *= set.ball_radius() / nd;
                    return set.ball_center() + d;
                }
                case FeasibleSet::Kind::box: {
                    Vector x(target.dim());
                    for (int i = 0; i < target.dim(); ++i)
                        x[i] = std::clamp(target[i], set.box_lo()[i], set.box_hi()[i]);
                    return x;
                }
                default:
                    throw ConfigError("mirror_step: euclidean setup needs whole-space, ball or box");
            }
        }
        case ProxSetup::Kind::entropy: {
            if (set.kind() != FeasibleSet::Kind::simplex)
                throw ConfigError("mirror_step: entropy setup requires a simplex set");
            return entropy_simplex_step(anchor, linear, alpha);
        }
        case ProxSetup::Kind::product: {
            if (set.kind() != FeasibleSet::Kind::product ||
                set.parts().size() != setup.parts().size())
                throw ConfigError("mirror_step: product setup requires a matching product set");
            Vector x(anchor.dim());
            int off = 0;
            for (std::size_t k = 0; k < setup.parts().size(); ++k) {
                const int d = setup.part_dims()[k];
                if (set.parts()[k].dim() != d)
                    throw ConfigError("mirror_step: product component dimension mismatch");
                x.set_segment(off, mirror_step(setup.parts()[k], set.parts()[k],
                                               anchor.segment(off, d), linear.segment(off, d),
                                               alpha));
                off += d;
            }
            return x;
        }
    }
    throw ConfigError("mirror_step: unknown setup kind");
}

double tseng_inequality_check(const ProxSetup& setup, const FeasibleSet& set,
                              const Vector& anchor, const Vector& linear,
                              const Vector& probe) {
    if (!set.contains(probe, 1e-9)) throw DomainError("tseng_inequality_check: probe outside set");
    const Vector xplus = mirror_step(setup, set, anchor, linear, 1.0);
    const double phi_probe = linear.dot(probe);
    const double phi_plus = linear.dot(xplus);
    return phi_probe + setup.omega(probe, anchor) - phi_plus - setup.omega(xplus, anchor) -
           setup.omega(probe, xplus);
}

double gap_certificate(const FeasibleSet& set, const Vector& at, const Vector& field) {
    if (!set.compact())
        throw UnboundedCertificateError("gap_certificate: set must be compact");
    if (!set.contains(at, 1e-9)) throw DomainError("gap_certificate: point outside set");
    return field.dot(at) - set.support_min(field);
}

double bregman_three_point_residual(const ProxSetup& setup, const Vector& x,
                                    const Vector& y, const Vector& z) {
    const Vector gdiff = setup.grad_d(y) - setup.grad_d(z);
    const double lhs = gdiff.dot(x - z);
    const double rhs = setup.omega(x, z) + setup.omega(z, y) - setup.omega(x, y);
    return std::fabs(lhs - rhs);
}

}  // namespace mviopt
