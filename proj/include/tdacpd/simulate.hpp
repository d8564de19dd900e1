#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "tdacpd/error.hpp"
#include "tdacpd/random.hpp"
#include "tdacpd/series.hpp"

namespace tdacpd {

/// How the second parameter of a normal segment is read: N(0,2) means
/// standard deviation 2 under `std_dev` and variance 2 under `variance`.
enum class ScaleNotation { std_dev, variance };

struct Normal {
    double mean = 0.0;
    double scale = 1.0;   // per ScenarioSpec::normal_notation; 0 gives a constant
};

struct MvNormal {
    std::vector<double> mean;
    std::vector<double> cov;   // row-major d x d
};

/// Pois(lambda) - lambda.
struct PoissonAdjusted {
    double lambda = 1.0;
};

struct StudentT {
    double dof = 4.0;
};

/// mean + Z / sqrt(W / dof), Z ~ N(0, cov), W ~ chi^2_dof.
struct MvStudentT {
    double dof = 2.0;
    std::vector<double> mean;
    std::vector<double> cov;
};

/// Density exp(-|x| / b) / (2b).
struct Laplace {
    double scale = 1.0;
};

using Distribution = std::variant<Normal, MvNormal, PoissonAdjusted, StudentT, MvStudentT, Laplace>;

/// x_t = ar * x_{t-1} + e_t + ma * e_{t-1}; segment distributions then
/// describe the innovations e_t.
struct ArmaSpec {
    double ar = 0.4;
    double ma = 0.5;
    std::size_t burn_in = 100;
};

inline std::size_t distribution_dim(const Distribution& d) {
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, MvNormal> || std::is_same_v<T, MvStudentT>) {
                return v.mean.size();
            } else {
                return 1;
            }
        },
        d);
}

/// A data generating process with known change points. Segment j follows
/// segments[j]; change points are 1-based first indices of each new segment.
struct ScenarioSpec {
    std::string name;
    std::size_t length = 200;
    std::vector<std::size_t> change_points;
    std::vector<Distribution> segments;
    ScaleNotation normal_notation = ScaleNotation::std_dev;
    std::optional<ArmaSpec> arma;

    std::size_t dim() const { return segments.empty() ? 0 : distribution_dim(segments.front()); }

    void validate() const;
};

namespace detail {

inline Eigen::MatrixXd cholesky_factor(const std::vector<double>& cov, std::size_t d) {
    if (d == 0 || cov.size() != d * d) {
        throw InvalidSpec("covariance must be a " + std::to_string(d) + "x" + std::to_string(d) +
                          " matrix");
    }
    Eigen::MatrixXd m(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov[i * d + j];
        }
    }
    if (!m.isApprox(m.transpose())) {
        throw InvalidSpec("covariance matrix is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw InvalidSpec("covariance matrix is not positive definite");
    }
    return llt.matrixL();
}

/// Draws one observation of a segment distribution into `out`.
class Sampler {
public:
    Sampler(const Distribution& dist, ScaleNotation notation) : dist_(dist), notation_(notation) {
        std::visit(
            [this](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, MvNormal> || std::is_same_v<T, MvStudentT>) {
                    chol_ = cholesky_factor(v.cov, v.mean.size());
                }
                if constexpr (std::is_same_v<T, MvStudentT>) {
                    if (!(v.dof > 0.0)) {
                        throw InvalidSpec("multivariate t needs positive degrees of freedom");
                    }
                }
                if constexpr (std::is_same_v<T, Normal>) {
                    if (!(v.scale >= 0.0)) {
                        throw InvalidSpec("normal scale must be nonnegative");
                    }
                }
                if constexpr (std::is_same_v<T, PoissonAdjusted>) {
                    if (!(v.lambda > 0.0)) {
                        throw InvalidSpec("Poisson rate must be positive");
                    }
                }
                if constexpr (std::is_same_v<T, StudentT>) {
                    if (!(v.dof > 0.0)) {
                        throw InvalidSpec("t distribution needs positive degrees of freedom");
                    }
                }
                if constexpr (std::is_same_v<T, Laplace>) {
                    if (!(v.scale > 0.0)) {
                        throw InvalidSpec("Laplace scale must be positive");
                    }
                }
            },
            dist_);
    }

    void draw(Rng& rng, std::span<double> out) {
        std::visit([&](const auto& v) { draw_one(v, rng, out); }, dist_);
    }

private:
    void draw_one(const Normal& v, Rng& rng, std::span<double> out) {
        const double sd = notation_ == ScaleNotation::variance ? std::sqrt(v.scale) : v.scale;
        out[0] = v.mean + sd * std_normal_(rng);
    }
    void draw_one(const MvNormal& v, Rng& rng, std::span<double> out) {
        correlated_normal(rng, out);
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] += v.mean[j];
        }
    }
    void draw_one(const PoissonAdjusted& v, Rng& rng, std::span<double> out) {
        std::poisson_distribution<long> pois(v.lambda);
        out[0] = static_cast<double>(pois(rng)) - v.lambda;
    }
    void draw_one(const StudentT& v, Rng& rng, std::span<double> out) {
        std::student_t_distribution<double> t(v.dof);
        out[0] = t(rng);
    }
    void draw_one(const MvStudentT& v, Rng& rng, std::span<double> out) {
        correlated_normal(rng, out);
        std::chi_squared_distribution<double> chi(v.dof);
        const double scale = 1.0 / std::sqrt(chi(rng) / v.dof);
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] = v.mean[j] + out[j] * scale;
        }
    }
    void draw_one(const Laplace& v, Rng& rng, std::span<double> out) {
        std::exponential_distribution<double> e(1.0 / v.scale);
        const double first = e(rng);
        out[0] = first - e(rng);
    }

    void correlated_normal(Rng& rng, std::span<double> out) {
        const auto d = chol_.rows();
        Eigen::VectorXd z(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            z(i) = std_normal_(rng);
        }
        const Eigen::VectorXd x = chol_ * z;
        for (Eigen::Index i = 0; i < d; ++i) {
            out[static_cast<std::size_t>(i)] = x(i);
        }
    }

    Distribution dist_;
    ScaleNotation notation_;
    Eigen::MatrixXd chol_;
    std::normal_distribution<double> std_normal_{0.0, 1.0};
};

} // namespace detail

inline void ScenarioSpec::validate() const {
    if (length < 2) {
        throw InvalidSpec("scenario length must be at least 2");
    }
    if (segments.size() != change_points.size() + 1) {
        throw InvalidSpec("scenario needs exactly one more segment than change points");
    }
    std::size_t prev = 1;
    for (std::size_t tau : change_points) {
        if (tau <= prev || tau > length) {
            throw InvalidSpec("change points must be strictly increasing within (1, length]");
        }
        prev = tau;
    }
    const std::size_t d = dim();
    for (const auto& s : segments) {
        if (distribution_dim(s) != d || d == 0) {
            throw InvalidSpec("all segments must share one positive dimension");
        }
        detail::Sampler check(s, normal_notation);
    }
    if (arma && d != 1) {
        throw InvalidSpec("ARMA scenarios must be univariate");
    }
}

/// Draws one series from the scenario; identical seeds give identical output.
inline TimeSeries generate(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    auto rng = make_rng(seed);
    const std::size_t d = spec.dim();
    std::vector<detail::Sampler> samplers;
    samplers.reserve(spec.segments.size());
    for (const auto& s : spec.segments) {
        samplers.emplace_back(s, spec.normal_notation);
    }
    std::vector<double> out(spec.length * d);
    std::size_t segment = 0;
    auto segment_of = [&](std::size_t t) {   // t is 0-based
        while (segment < spec.change_points.size() && t + 1 >= spec.change_points[segment]) {
            ++segment;
        }
        return segment;
    };

    if (!spec.arma) {
        for (std::size_t t = 0; t < spec.length; ++t) {
            samplers[segment_of(t)].draw(rng, std::span<double>(out).subspan(t * d, d));
        }
        return TimeSeries(std::move(out), d);
    }

    const ArmaSpec& arma = *spec.arma;
    double x_prev = 0.0, e_prev = 0.0, e = 0.0;
    for (std::size_t i = 0; i < arma.burn_in; ++i) {
        samplers.front().draw(rng, std::span<double>(&e, 1));
        x_prev = arma.ar * x_prev + e + arma.ma * e_prev;
        e_prev = e;
    }
    for (std::size_t t = 0; t < spec.length; ++t) {
        samplers[segment_of(t)].draw(rng, std::span<double>(&e, 1));
        out[t] = arma.ar * x_prev + e + arma.ma * e_prev;
        x_prev = out[t];
        e_prev = e;
    }
    return TimeSeries(std::move(out), 1);
}

/// The simulated designs used for the comparative benchmarks. All produce a
/// single change at `tau` in a series of length `length`.
namespace scenarios {

inline std::vector<double> identity3() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }
inline std::vector<double> equicorrelated3() { return {1, 0.9, 0.9, 0.9, 1, 0.9, 0.9, 0.9, 1}; }

inline ScenarioSpec normal_variance(std::size_t length, std::size_t tau, ScaleNotation notation) {
    return {"N(0,1) -> N(0,2)", length, {tau}, {Normal{0, 1}, Normal{0, 2}}, notation, std::nullopt};
}

inline ScenarioSpec mvnormal_covariance(std::size_t length, std::size_t tau) {
    return {"N(mu,Sigma1) -> N(mu,Sigma2)", length, {tau},
            {MvNormal{{0, 0, 0}, identity3()}, MvNormal{{0, 0, 0}, equicorrelated3()}},
            ScaleNotation::std_dev, std::nullopt};
}

inline ScenarioSpec poisson_variance(std::size_t length, std::size_t tau) {
    return {"Pois(1)-1 -> Pois(2)-2", length, {tau}, {PoissonAdjusted{1}, PoissonAdjusted{2}},
            ScaleNotation::std_dev, std::nullopt};
}

inline ScenarioSpec arma_error_variance(std::size_t length, std::size_t tau, ScaleNotation notation) {
    return {"ARMA(1,1) errors N(0,1) -> N(0,2)", length, {tau}, {Normal{0, 1}, Normal{0, 2}},
            notation, ArmaSpec{}};
}

inline ScenarioSpec normal_to_t(std::size_t length, std::size_t tau) {
    return {"N(0,1) -> t(4)", length, {tau}, {Normal{0, 1}, StudentT{4}}, ScaleNotation::std_dev,
            std::nullopt};
}

inline ScenarioSpec mvnormal_to_mvt(std::size_t length, std::size_t tau) {
    return {"N(mu,Sigma1) -> t2(mu,Sigma2)", length, {tau},
            {MvNormal{{0, 0, 0}, identity3()}, MvStudentT{2, {0, 0, 0}, equicorrelated3()}},
            ScaleNotation::std_dev, std::nullopt};
}

inline ScenarioSpec normal_to_laplace(std::size_t length, std::size_t tau) {
    return {"N(0,1) -> Laplace(sqrt(0.5))", length, {tau}, {Normal{0, 1}, Laplace{std::sqrt(0.5)}},
            ScaleNotation::std_dev, std::nullopt};
}

/// Noiseless mean step; useful as an exact-detection diagnostic.
inline ScenarioSpec step(std::size_t length, std::size_t tau, double low, double high) {
    return {"step", length, {tau}, {Normal{low, 0}, Normal{high, 0}}, ScaleNotation::std_dev,
            std::nullopt};
}

} // namespace scenarios

} // namespace tdacpd
