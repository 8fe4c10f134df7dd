#pragma once

#include "flowseq/segmentation.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace flowseq {

/// Raster-ordered flow components of one partial action image:
/// [vx(0,0), vy(0,0), vx(1,0), vy(1,0), ...]. Absent cells contribute zeros.
struct AppearanceVector {
    Eigen::VectorXd values;

    Eigen::Index size() const { return values.size(); }
};

/// Projection of an appearance vector onto the eigenspace.
using FeatureVector = Eigen::VectorXd;

AppearanceVector vectorize(const PartialActionImage& img);
AppearanceVector vectorize(const FlowField& image);

/// Mean vector plus the top-k eigenpairs of the appearance covariance.
///
/// The covariance is normalised by 1/N. Each eigenvector is oriented so that
/// its first non-negligible component is positive; eigenvalues are sorted in
/// descending order.
class EigenspaceModel {
public:
    EigenspaceModel() = default;

    /// Builds a model from stored parts; throws InvalidInput if shapes disagree,
    /// eigenvalues are negative or unsorted, or the basis is not orthonormal.
    EigenspaceModel(Eigen::VectorXd mean, Eigen::MatrixXd basis, Eigen::VectorXd eigenvalues);

    int k() const { return static_cast<int>(basis_.cols()); }
    Eigen::Index dimension() const { return mean_.size(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& basis() const { return basis_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

    /// basis^T (v - mean)
    FeatureVector project(const AppearanceVector& v) const;
    /// mean + basis * u
    AppearanceVector reconstruct(const FeatureVector& u) const;

    friend bool operator==(const EigenspaceModel& a, const EigenspaceModel& b);

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd basis_;
    Eigen::VectorXd eigenvalues_;
};

/// Fits the eigenspace of N appearance vectors of length D.
///
/// Requires N >= 2 and 1 <= k <= min(N - 1, D); throws InvalidInput otherwise.
/// Throws DegenerateData when the vectors are all identical or when the data
/// has fewer than k non-negligible principal directions. When D > N the N x N
/// Gram matrix is decomposed instead of the D x D covariance.
EigenspaceModel fit_eigenspace(std::span<const AppearanceVector> vectors, int k);

/// 1/N covariance of the columns of `data` (one sample per column).
Eigen::MatrixXd covariance(const Eigen::MatrixXd& data);

} // namespace flowseq
