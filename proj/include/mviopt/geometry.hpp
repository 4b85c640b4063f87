#pragma once

#include <memory>
#include <vector>

#include "mviopt/linalg.hpp"
#include "mviopt/rng.hpp"

namespace mviopt {

/// Distance-generating function with its Bregman divergence.
///
/// Conventions (all solver constants depend on them):
///   euclidean: d(x) = ||x||_2^2, so omega(x, y) = ||x - y||_2^2
///   entropy:   d(x) = 2 * sum_i x_i ln x_i on the simplex, so
///              omega = 2 * KL >= ||x - y||_1^2 (Pinsker)
/// Both satisfy omega(x, y) >= ||x - y||^2 with modulus 1 in their norm.
/// Products stack components; the product norm squares add.
class ProxSetup {
public:
    enum class Kind { euclidean, entropy, product };

    static ProxSetup euclidean();
    static ProxSetup entropy();
    static ProxSetup product(std::vector<ProxSetup> parts, std::vector<int> dims);

    Kind kind() const { return kind_; }
    NormKind norm() const { return norm_; }

    double d(const Vector& x) const;
    Vector grad_d(const Vector& x) const;
    double omega(const Vector& x, const Vector& y) const;
    /// ||x||^2 in the setup's norm (product: sum of component norm squares).
    double norm_sq(const Vector& x) const;

    const std::vector<ProxSetup>& parts() const { return parts_; }
    const std::vector<int>& part_dims() const { return part_dims_; }

private:
    explicit ProxSetup(Kind kind);

    Kind kind_;
    NormKind norm_;
    std::vector<ProxSetup> parts_;
    std::vector<int> part_dims_;
};

/// Closed convex feasible sets with closed-form membership, support values
/// and prox/projection steps. Products compose componentwise.
class FeasibleSet {
public:
    enum class Kind { whole_space, ball, box, simplex, product };

    static FeasibleSet whole_space(int dim);
    static FeasibleSet ball(Vector center, double radius);
    static FeasibleSet box(Vector lo, Vector hi);
    static FeasibleSet simplex(int dim);
    static FeasibleSet product(std::vector<FeasibleSet> parts);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool compact() const;
    bool contains(const Vector& x, double tol = 1e-12) const;

    /// A canonical interior point (ball center, box midpoint, uniform simplex).
    Vector center_point() const;
    /// Uniform-ish sample from the set (ball: volume-uniform; simplex:
    /// Dirichlet(1); box: uniform). Whole space is rejected.
    Vector sample(CounterRng& rng) const;
    /// inf_{x in set} <field, x>; throws UnboundedCertificateError when the
    /// set is not compact.
    double support_min(const Vector& field) const;

    const Vector& ball_center() const { return ball_center_; }
    double ball_radius() const { return ball_radius_; }
    const Vector& box_lo() const { return box_lo_; }
    const Vector& box_hi() const { return box_hi_; }
    const std::vector<FeasibleSet>& parts() const { return parts_; }

private:
    explicit FeasibleSet(Kind kind) : kind_(kind) {}

    Kind kind_;
    int dim_ = 0;
    Vector ball_center_;
    double ball_radius_ = 0.0;
    Vector box_lo_, box_hi_;
    std::vector<FeasibleSet> parts_;
};

/// argmin_{x in set} <linear, x> + alpha * omega(x, anchor).
/// Closed forms per pairing: euclidean/whole-space, euclidean/ball,
/// euclidean/box, entropy/simplex, product/product. Other pairings are
/// configuration errors; an anchor outside the set is a domain error.
Vector mirror_step(const ProxSetup& setup, const FeasibleSet& set, const Vector& anchor,
                   const Vector& linear, double alpha);

/// Slack of the prox inequality for phi(x) = <linear, x>:
/// phi(probe) + omega(probe, anchor) - phi(x+) - omega(x+, anchor)
/// - omega(probe, x+), which is guaranteed nonnegative.
double tseng_inequality_check(const ProxSetup& setup, const FeasibleSet& set,
                              const Vector& anchor, const Vector& linear,
                              const Vector& probe);

/// <field, at> - inf_{x in set} <field, x>, via the set's support function.
double gap_certificate(const FeasibleSet& set, const Vector& at, const Vector& field);

/// |<grad d(y) - grad d(z), x - z> - omega(x,z) - omega(z,y) + omega(x,y)|.
double bregman_three_point_residual(const ProxSetup& setup, const Vector& x,
                                    const Vector& y, const Vector& z);

}  // namespace mviopt
