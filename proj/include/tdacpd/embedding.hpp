#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tdacpd/error.hpp"
#include "tdacpd/series.hpp"
#include "tdacpd/topology.hpp"

namespace tdacpd {

/// Covariance PCA fitted on the rows of a Betti matrix.
struct PcaModel {
    Eigen::VectorXd mean;           // n column means
    Eigen::MatrixXd components;     // n x m, orthonormal columns
    Eigen::VectorXd explained_variance;  // m, non-increasing
    std::size_t rank = 0;           // eigenvalues above the zero tolerance
    bool rank_deficient = false;    // m > rank; trailing components carry no variance

    std::size_t input_dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
    std::size_t output_dim() const noexcept { return static_cast<std::size_t>(components.cols()); }

    /// mean + components * score.
    Eigen::VectorXd reconstruct(const Eigen::VectorXd& score) const {
        return mean + components * score;
    }
};

/// The reduced topological signature series, one point per window.
struct DerivedSeries {
    TimeSeries values;
    std::size_t window = 0;
    std::vector<double> grid;
    std::size_t pca_m = 0;
};

inline Eigen::MatrixXd to_matrix(const BettiMatrix& betti) {
    Eigen::MatrixXd x(betti.rows(), betti.cols());
    for (std::size_t i = 0; i < betti.rows(); ++i) {
        for (std::size_t j = 0; j < betti.cols(); ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = betti(i, j);
        }
    }
    return x;
}

/// Eigenvalues below this fraction of the covariance trace count as zero.
inline constexpr double kPcaRankTolerance = 1e-12;

inline PcaModel pca_fit(const Eigen::MatrixXd& x, std::size_t m) {
    const auto rows = x.rows();
    const auto n = x.cols();
    if (rows == 0 || n == 0) {
        throw InvalidInput("PCA needs a nonempty matrix");
    }
    if (m == 0 || m > static_cast<std::size_t>(std::min(rows, n))) {
        throw InvalidInput("PCA dimension m=" + std::to_string(m) + " must lie in [1, " +
                           std::to_string(std::min(rows, n)) + "]");
    }
    PcaModel model;
    model.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
    const double denom = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw FitError("PCA eigendecomposition did not converge");
    }
    // Eigen sorts ascending; we want descending.
    const Eigen::VectorXd evals = solver.eigenvalues().reverse();
    const Eigen::MatrixXd evecs = solver.eigenvectors().rowwise().reverse();

    const double cutoff = kPcaRankTolerance * cov.trace();
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals(i) > cutoff && evals(i) > 0.0) {
            ++rank;
        }
    }
    model.rank = rank;
    model.rank_deficient = m > rank;

    const auto mm = static_cast<Eigen::Index>(m);
    model.components = evecs.leftCols(mm);
    model.explained_variance.resize(mm);
    for (Eigen::Index c = 0; c < mm; ++c) {
        model.explained_variance(c) = static_cast<std::size_t>(c) < rank ? evals(c) : 0.0;
        // Sign convention: largest-magnitude loading positive, first index wins ties.
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = std::abs(model.components(j, c));
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (model.components(arg, c) < 0.0) {
            model.components.col(c) *= -1.0;
        }
    }
    return model;
}

inline PcaModel pca_fit(const BettiMatrix& betti, std::size_t m) {
    return pca_fit(to_matrix(betti), m);
}

/// Row-wise scores components^T (row - mean).
inline Eigen::MatrixXd pca_scores(const PcaModel& model, const Eigen::MatrixXd& x) {
    if (static_cast<std::size_t>(x.cols()) != model.input_dim()) {
        throw InvalidInput("PCA input has " + std::to_string(x.cols()) +
                           " columns, model expects " + std::to_string(model.input_dim()));
    }
    return (x.rowwise() - model.mean.transpose()) * model.components;
}

inline DerivedSeries pca_transform(const PcaModel& model, const BettiMatrix& betti) {
    const Eigen::MatrixXd scores = pca_scores(model, to_matrix(betti));
    const auto m = static_cast<std::size_t>(scores.cols());
    std::vector<double> flat(static_cast<std::size_t>(scores.rows()) * m);
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        for (Eigen::Index j = 0; j < scores.cols(); ++j) {
            flat[static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)] = scores(i, j);
        }
    }
    return DerivedSeries{TimeSeries(std::move(flat), m), 0, {}, m};
}

/// Every intermediate of the topological transform, kept for reporting.
struct TdaArtifacts {
    TimeSeries normalized;
    BettiMatrix betti;
    PcaModel pca;
    DerivedSeries derived;
};

inline TdaArtifacts tda_transform_detailed(const TimeSeries& series, std::size_t window,
                                           const ScaleGrid& grid, std::size_t pca_m) {
    TimeSeries normalized = normalize(series);
    const auto clouds = sliding_windows(normalized, WindowConfig{window});
    BettiMatrix betti = betti_matrix(clouds, grid);
    PcaModel model = pca_fit(betti, pca_m);
    DerivedSeries derived = pca_transform(model, betti);
    derived.window = window;
    derived.grid.assign(grid.values().begin(), grid.values().end());
    return TdaArtifacts{std::move(normalized), std::move(betti), std::move(model),
                        std::move(derived)};
}

/// normalize -> sliding windows -> Betti-0 matrix -> PCA(m).
inline DerivedSeries tda_transform(const TimeSeries& series, std::size_t window,
                                   const ScaleGrid& grid, std::size_t pca_m) {
    return tda_transform_detailed(series, window, grid, pca_m).derived;
}

} // namespace tdacpd
