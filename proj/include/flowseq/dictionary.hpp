#pragma once

#include "flowseq/eigenspace.hpp"

#include <Eigen/Dense>

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace flowseq {

/// Gaussian model of one partial action in feature space.
class Cluster {
public:
    Cluster() = default;

    /// Throws InvalidInput on shape mismatch or asymmetric covariance and
    /// DegenerateData when the covariance is not positive definite.
    Cluster(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

    int dimension() const { return static_cast<int>(mean_.size()); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& covariance() const { return covariance_; }
    const Eigen::MatrixXd& precision() const { return precision_; }
    double log_det() const { return log_det_; }

    friend bool operator==(const Cluster& a, const Cluster& b) {
        return a.mean_.size() == b.mean_.size() && a.mean_ == b.mean_ && a.covariance_ == b.covariance_;
    }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd covariance_;
    Eigen::MatrixXd precision_;
    double log_det_ = 0.0;
};

/// Mean and 1/N covariance of at least two features, plus ridge * I.
/// Without an explicit ridge, 1e-6 * trace(covariance) / k is used.
Cluster fit_cluster(std::span<const FeatureVector> features, std::optional<double> ridge = std::nullopt);

/// Multivariate normal density of x under the cluster.
double density(const Cluster& c, const FeatureVector& x);
double log_density(const Cluster& c, const FeatureVector& x);

/// sqrt((u - mean)^T covariance^-1 (u - mean))
double mahalanobis(const Cluster& c, const FeatureVector& u);

struct GestureEntry {
    std::string name;
    std::vector<Cluster> clusters;
    /// 1-based positions of clusters flagged as important partial actions.
    std::set<int> important;

    friend bool operator==(const GestureEntry&, const GestureEntry&) = default;
};

struct GestureDictionary {
    EigenspaceModel eigenspace;
    std::vector<GestureEntry> entries;
    /// Mahalanobis distance at or below which a feature matches a cluster.
    double tau = 3.0;
    /// Segmentation settings used for the training sequences; queries should
    /// be segmented the same way.
    SegmentationParams segmentation;

    /// Throws CorruptData describing the first violated invariant.
    void validate() const;

    const GestureEntry* find(const std::string& name) const;

    friend bool operator==(const GestureDictionary& a, const GestureDictionary& b) {
        return a.eigenspace == b.eigenspace && a.entries == b.entries && a.tau == b.tau &&
               a.segmentation.angle_threshold == b.segmentation.angle_threshold &&
               a.segmentation.min_frames == b.segmentation.min_frames &&
               a.segmentation.superposition == b.segmentation.superposition;
    }
};

} // namespace flowseq
