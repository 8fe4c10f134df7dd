#include "flowseq/eigenspace.hpp"

#include "flowseq/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace flowseq {

AppearanceVector vectorize(const FlowField& image) {
    AppearanceVector out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * image.size()))};
    for (std::size_t i = 0; i < image.size(); ++i) {
        if (!image.present(i)) continue;
        const auto j = static_cast<Eigen::Index>(2 * i);
        out.values[j] = image.at(i).x;
        out.values[j + 1] = image.at(i).y;
    }
    return out;
}

AppearanceVector vectorize(const PartialActionImage& img) { return vectorize(img.image); }

EigenspaceModel::EigenspaceModel(Eigen::VectorXd mean, Eigen::MatrixXd basis, Eigen::VectorXd eigenvalues)
    : mean_(std::move(mean)), basis_(std::move(basis)), eigenvalues_(std::move(eigenvalues)) {
    if (basis_.rows() != mean_.size()) {
        throw InvalidInput("EigenspaceModel: basis row count differs from mean length");
    }
    if (basis_.cols() < 1 || eigenvalues_.size() != basis_.cols()) {
        throw InvalidInput("EigenspaceModel: need k >= 1 eigenvalues matching the basis columns");
    }
    for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
        if (!(eigenvalues_[i] >= 0.0)) throw InvalidInput("EigenspaceModel: negative eigenvalue");
        if (i > 0 && eigenvalues_[i] > eigenvalues_[i - 1]) {
            throw InvalidInput("EigenspaceModel: eigenvalues not sorted descending");
        }
    }
    const Eigen::MatrixXd gram = basis_.transpose() * basis_;
    const double err = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (!(err <= 1e-8)) {
        throw InvalidInput("EigenspaceModel: basis is not orthonormal");
    }
}

FeatureVector EigenspaceModel::project(const AppearanceVector& v) const {
    if (v.size() != mean_.size()) {
        throw InvalidInput("project: appearance vector has length " + std::to_string(v.size()) +
                           ", model expects " + std::to_string(mean_.size()));
    }
    return basis_.transpose() * (v.values - mean_);
}

AppearanceVector EigenspaceModel::reconstruct(const FeatureVector& u) const {
    if (u.size() != basis_.cols()) {
        throw InvalidInput("reconstruct: feature length differs from k");
    }
    return AppearanceVector{mean_ + basis_ * u};
}

bool operator==(const EigenspaceModel& a, const EigenspaceModel& b) {
    return a.mean_.size() == b.mean_.size() && a.basis_.rows() == b.basis_.rows() &&
           a.basis_.cols() == b.basis_.cols() && a.eigenvalues_.size() == b.eigenvalues_.size() &&
           a.mean_ == b.mean_ && a.basis_ == b.basis_ && a.eigenvalues_ == b.eigenvalues_;
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& data) {
    const Eigen::VectorXd mean = data.rowwise().mean();
    const Eigen::MatrixXd centred = data.colwise() - mean;
    return centred * centred.transpose() / static_cast<double>(data.cols());
}

namespace {

void orient(Eigen::Ref<Eigen::VectorXd> e) {
    const double scale = e.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        if (std::abs(e[i]) > 1e-12 * scale) {
            if (e[i] < 0.0) e = -e;
            return;
        }
    }
}

} // namespace

EigenspaceModel fit_eigenspace(std::span<const AppearanceVector> vectors, int k) {
    const auto n = static_cast<Eigen::Index>(vectors.size());
    if (n < 2) {
        throw InvalidInput("fit_eigenspace: need at least 2 vectors, got " + std::to_string(n));
    }
    const Eigen::Index d = vectors.front().size();
    if (d < 1) throw InvalidInput("fit_eigenspace: empty appearance vectors");
    for (const auto& v : vectors) {
        if (v.size() != d) throw InvalidInput("fit_eigenspace: appearance vectors differ in length");
    }
    if (k < 1 || k > std::min(n - 1, d)) {
        throw InvalidInput("fit_eigenspace: k=" + std::to_string(k) + " outside [1, " +
                           std::to_string(std::min(n - 1, d)) + "]");
    }

    Eigen::MatrixXd data(d, n);
    for (Eigen::Index j = 0; j < n; ++j) data.col(j) = vectors[static_cast<std::size_t>(j)].values;
    const Eigen::VectorXd mean = data.rowwise().mean();
    const Eigen::MatrixXd centred = data.colwise() - mean;
    if (centred.cwiseAbs().maxCoeff() == 0.0) {
        throw DegenerateData("fit_eigenspace: all appearance vectors are identical");
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    Eigen::MatrixXd basis(d, k);
    Eigen::VectorXd values(k);

    // SelfAdjointEigenSolver returns ascending eigenvalues.
    if (d <= n) {
        const Eigen::MatrixXd cov = centred * centred.transpose() * inv_n;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        if (solver.info() != Eigen::Success) throw DegenerateData("fit_eigenspace: eigensolver failed");
        for (int i = 0; i < k; ++i) {
            values[i] = solver.eigenvalues()[d - 1 - i];
            basis.col(i) = solver.eigenvectors().col(d - 1 - i);
        }
    } else {
        const Eigen::MatrixXd gram = centred.transpose() * centred * inv_n;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success) throw DegenerateData("fit_eigenspace: eigensolver failed");
        for (int i = 0; i < k; ++i) {
            values[i] = solver.eigenvalues()[n - 1 - i];
            basis.col(i) = centred * solver.eigenvectors().col(n - 1 - i);
        }
    }

    const double top = values[0];
    if (!(top > 0.0)) throw DegenerateData("fit_eigenspace: zero covariance");
    for (int i = 0; i < k; ++i) {
        if (!(values[i] > 1e-10 * top)) {
            throw DegenerateData("fit_eigenspace: data spans only " + std::to_string(i) +
                                 " principal directions, k=" + std::to_string(k) + " requested");
        }
        basis.col(i).normalize();
        orient(basis.col(i));
    }
    return EigenspaceModel(mean, std::move(basis), std::move(values));
}

} // namespace flowseq
