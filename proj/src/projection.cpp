#include "rpquant/projection.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rpquant/errors.hpp"
#include "rpquant/stats.hpp"

namespace rpquant {

namespace {

void fill_gaussian(Vector& v, double scale, SplitRng& rng) {
    for (Index i = 0; i < v.size(); ++i) v[i] = scale * rng.next_gaussian();
}

Vector gaussian_direction(Index dim, SplitRng& rng) {
    Vector v(dim);
    fill_gaussian(v, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
    return v;
}

double lower_median(Vector values) {
    const Index n = values.size();
    std::nth_element(values.data(), values.data() + (n - 1) / 2, values.data() + n);
    return values[(n - 1) / 2];
}

} // namespace

Direction sample_direction(Index dim, DirectionKind kind, SplitRng& rng) {
    if (dim < 1) throw InvalidParamError("sample_direction: dimension must be >= 1");
    Direction d;
    d.kind = kind;
    d.vector = gaussian_direction(dim, rng);
    if (kind == DirectionKind::UnitSphere) {
        double norm = d.vector.norm();
        while (norm == 0.0) { // astronomically unlikely; resample
            d.vector = gaussian_direction(dim, rng);
            norm = d.vector.norm();
        }
        d.vector /= norm;
    }
    return d;
}

ProjectedSet project(const Eigen::Ref<const PointSet>& points, const Direction& direction) {
    if (points.cols() != direction.vector.size())
        throw DimensionMismatchError("project: point dimension does not match direction");
    return {points * direction.vector, direction};
}

double binomial_stderr(double p_hat, long trials) {
    if (trials <= 0) return 0.0;
    return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(trials));
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw EmptySetError("quantile: no values");
    q = std::clamp(q, 0.0, 1.0);
    const auto n = static_cast<double>(values.size());
    auto idx = static_cast<std::size_t>(std::ceil(q * n));
    idx = idx == 0 ? 0 : idx - 1;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
    return values[idx];
}

LengthTails length_tail_probabilities(const Eigen::Ref<const Vector>& x, double alpha,
                                      double beta, long trials, SplitRng& rng) {
    const double norm = x.norm();
    if (norm == 0.0) throw ZeroVectorError("length_tail_probabilities: x must be nonzero");
    if (trials < 1) throw InvalidParamError("length_tail_probabilities: trials must be >= 1");

    const double sqrt_d = std::sqrt(static_cast<double>(x.size()));
    const double small_cut = alpha * norm / sqrt_d;
    const double large_cut = beta * norm / sqrt_d;

    long n_small = 0, n_large = 0;
    Vector u(x.size());
    for (long t = 0; t < trials; ++t) {
        fill_gaussian(u, 1.0 / sqrt_d, rng);
        const double v = std::abs(u.dot(x));
        if (v <= small_cut) ++n_small;
        if (v >= large_cut) ++n_large;
    }
    return {static_cast<double>(n_small) / static_cast<double>(trials),
            static_cast<double>(n_large) / static_cast<double>(trials), trials};
}

double central_interval_fraction(const Eigen::Ref<const PointSet>& points,
                                 const Eigen::Ref<const Vector>& x0, double delta, double eps,
                                 long trials, SplitRng& rng) {
    if (points.rows() == 0) throw EmptySetError("central_interval_fraction: empty point set");
    if (points.cols() != x0.size())
        throw DimensionMismatchError("central_interval_fraction: x0 dimension mismatch");
    if (delta * eps > 1.0 / (std::numbers::e * std::numbers::e))
        throw InvalidParamError("central_interval_fraction: requires delta*eps <= 1/e^2");

    const Index n = points.rows();
    const Index dim = points.cols();
    const PointSet centered = points.rowwise() - x0.transpose();
    const double radius = std::sqrt(centered.rowwise().squaredNorm().maxCoeff());
    const double width =
        std::sqrt(2.0 * std::log(1.0 / (delta * eps))) * radius / std::sqrt(static_cast<double>(dim));

    long failures = 0;
    Vector u(dim);
    for (long t = 0; t < trials; ++t) {
        fill_gaussian(u, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
        const Vector proj = centered * u;
        const Index outside = (proj.array().abs() > width).count();
        if (static_cast<double>(outside) > eps * static_cast<double>(n)) ++failures;
    }
    return static_cast<double>(failures) / static_cast<double>(trials);
}

double median_deviation_failure_rate(const Eigen::Ref<const PointSet>& points,
                                     const Eigen::Ref<const Vector>& x0, double delta,
                                     long trials, SplitRng& rng) {
    if (points.rows() == 0) throw EmptySetError("median_deviation_failure_rate: empty point set");
    if (!(delta > 0.0 && delta < 2.0 / (std::numbers::e * std::numbers::e)))
        throw InvalidParamError("median_deviation_failure_rate: requires 0 < delta < 2/e^2");

    const Index dim = points.cols();
    const PointSet centered = points.rowwise() - x0.transpose();
    const double radius = std::sqrt(centered.rowwise().squaredNorm().maxCoeff());
    const double bound =
        radius / std::sqrt(static_cast<double>(dim)) * std::sqrt(2.0 * std::log(2.0 / delta));

    long failures = 0;
    Vector u(dim);
    for (long t = 0; t < trials; ++t) {
        fill_gaussian(u, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
        if (std::abs(lower_median(centered * u)) > bound) ++failures;
    }
    return static_cast<double>(failures) / static_cast<double>(trials);
}

std::vector<double> subspace_max_shrinkage(const Eigen::Ref<const Matrix>& basis, long draws,
                                           long probes, SplitRng& rng) {
    const Index dim = basis.rows();
    const Index d = basis.cols();
    if (d < 1 || dim < d) throw InvalidParamError("subspace_max_shrinkage: bad basis shape");
    const Matrix gram = basis.transpose() * basis;
    if ((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
        throw NonOrthonormalBasisError("subspace_max_shrinkage: basis is not orthonormal");

    std::vector<double> suprema;
    suprema.reserve(static_cast<std::size_t>(draws));
    Vector u(dim), coeff(d);
    for (long t = 0; t < draws; ++t) {
        fill_gaussian(u, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
        // Closed form: the maximizer is the normalized projection of u onto
        // the subspace, giving ||basis^T u||^2.
        double sup = (basis.transpose() * u).squaredNorm();
        for (long p = 0; p < probes; ++p) {
            fill_gaussian(coeff, 1.0, rng);
            const double nrm = coeff.norm();
            if (nrm == 0.0) continue;
            const double val = std::pow((basis * (coeff / nrm)).dot(u), 2);
            sup = std::max(sup, val);
        }
        suprema.push_back(sup);
    }
    return suprema;
}

QuadraticFormTails quadratic_form_tails(const Eigen::Ref<const Matrix>& psd, double alpha,
                                        double beta, long trials, SplitRng& rng) {
    const Index n = psd.rows();
    if (n == 0 || psd.cols() != n) throw InvalidParamError("quadratic_form_tails: matrix must be square");
    if ((psd - psd.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, psd.cwiseAbs().maxCoeff()))
        throw NotPsdError("quadratic_form_tails: matrix is not symmetric");
    const double trace = psd.trace();
    {
        Eigen::SelfAdjointEigenSolver<Matrix> es(psd, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9 * std::max(trace, 0.0))
            throw NotPsdError("quadratic_form_tails: matrix has a negative eigenvalue");
    }
    if (trace <= 0.0) throw NotApplicableError("quadratic_form_tails: zero trace");

    QuadraticFormTails out;
    out.expected = trace / static_cast<double>(n);
    out.trials = trials;

    long n_low = 0, n_high = 0;
    double sum = 0.0, sum_sq = 0.0;
    Vector u(n);
    for (long t = 0; t < trials; ++t) {
        fill_gaussian(u, 1.0 / std::sqrt(static_cast<double>(n)), rng);
        const double q = u.dot(psd.selfadjointView<Eigen::Lower>() * u);
        if (q < alpha * out.expected) ++n_low;
        if (q > beta * out.expected) ++n_high;
        sum += q;
        sum_sq += q * q;
    }
    out.p_low = static_cast<double>(n_low) / static_cast<double>(trials);
    out.p_high = static_cast<double>(n_high) / static_cast<double>(trials);
    out.mean_form = sum / static_cast<double>(trials);
    const double var = std::max(sum_sq / static_cast<double>(trials) - out.mean_form * out.mean_form, 0.0);
    out.mean_form_stderr = std::sqrt(var / static_cast<double>(trials));
    return out;
}

ProjectedDiameterStats projected_avg_diameter_bound(const Eigen::Ref<const PointSet>& points,
                                                    long trials, SplitRng& rng) {
    const Index n = points.rows();
    if (n == 0) throw EmptySetError("projected_avg_diameter_bound: empty point set");
    const Index dim = points.cols();
    const double parent = avg_sq_diameter(points);
    const double threshold = parent / (4.0 * static_cast<double>(dim));
    const PointSet centered = points.rowwise() - points.colwise().mean();

    long successes = 0;
    double sum = 0.0, sum_sq = 0.0;
    Vector u(dim);
    for (long t = 0; t < trials; ++t) {
        fill_gaussian(u, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
        const Vector proj = centered * u;
        const double proj_mean = proj.mean();
        const double proj_ad = 2.0 * (proj.array() - proj_mean).square().sum() / static_cast<double>(n);
        if (proj_ad >= threshold) ++successes;
        if (parent > 0.0) {
            const double ratio = proj_ad * static_cast<double>(dim) / parent;
            sum += ratio;
            sum_sq += ratio * ratio;
        }
    }
    ProjectedDiameterStats out;
    out.trials = trials;
    out.success_rate = static_cast<double>(successes) / static_cast<double>(trials);
    if (parent > 0.0) {
        out.mean_ratio = sum / static_cast<double>(trials);
        const double var = std::max(sum_sq / static_cast<double>(trials) - out.mean_ratio * out.mean_ratio, 0.0);
        out.ratio_stderr = std::sqrt(var / static_cast<double>(trials));
    } else {
        out.mean_ratio = std::numeric_limits<double>::quiet_NaN();
        out.ratio_stderr = 0.0;
    }
    return out;
}

TailFractionProfile tail_fraction_profile(const Eigen::Ref<const PointSet>& points, double delta,
                                          int max_k, long trials, SplitRng& rng) {
    const Index n = points.rows();
    if (n == 0) throw EmptySetError("tail_fraction_profile: empty point set");
    if (!(delta > 0.0)) throw InvalidParamError("tail_fraction_profile: delta must be positive");

    const Index dim = points.cols();
    const PointSet centered = points.rowwise() - points.colwise().mean();
    const double radius = std::sqrt(centered.rowwise().squaredNorm().maxCoeff());
    const double unit = radius / std::sqrt(static_cast<double>(dim));

    TailFractionProfile out;
    out.trials = trials;
    out.bound.resize(static_cast<std::size_t>(max_k));
    for (int k = 1; k <= max_k; ++k)
        out.bound[static_cast<std::size_t>(k - 1)] =
            std::pow(2.0, k) / delta * std::exp(-0.5 * static_cast<double>(k) * static_cast<double>(k));

    std::vector<long> violations(static_cast<std::size_t>(max_k), 0);
    long any_violation = 0;
    Vector u(dim);
    for (long t = 0; t < trials; ++t) {
        fill_gaussian(u, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
        const Vector proj = (centered * u).cwiseAbs();
        bool any = false;
        for (int k = 1; k <= max_k; ++k) {
            const double frac =
                static_cast<double>((proj.array() > static_cast<double>(k) * unit).count()) /
                static_cast<double>(n);
            if (frac > out.bound[static_cast<std::size_t>(k - 1)]) {
                ++violations[static_cast<std::size_t>(k - 1)];
                any = true;
            }
        }
        if (any) ++any_violation;
    }
    out.exceedance.resize(static_cast<std::size_t>(max_k));
    for (int k = 0; k < max_k; ++k)
        out.exceedance[static_cast<std::size_t>(k)] =
            static_cast<double>(violations[static_cast<std::size_t>(k)]) / static_cast<double>(trials);
    out.any_k_exceedance = static_cast<double>(any_violation) / static_cast<double>(trials);
    return out;
}

} // namespace rpquant
