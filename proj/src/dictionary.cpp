#include "flowseq/dictionary.hpp"

#include "flowseq/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <unordered_set>

namespace flowseq {

namespace {

// Smallest covariance eigenvalue allowed, relative to the largest.
constexpr double kEigenFloor = 1e-8;

} // namespace

Cluster::Cluster(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
    const auto k = mean_.size();
    if (k < 1) throw InvalidInput("Cluster: empty mean");
    if (covariance_.rows() != k || covariance_.cols() != k) {
        throw InvalidInput("Cluster: covariance must be k x k");
    }
    if (!mean_.allFinite() || !covariance_.allFinite()) {
        throw InvalidInput("Cluster: non-finite values");
    }
    const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
    if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidInput("Cluster: covariance is not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()[0];
    const double hi = eig.eigenvalues()[k - 1];
    if (!(hi > 0.0) || !(lo >= kEigenFloor * hi)) {
        throw DegenerateData("Cluster: covariance is singular or too ill-conditioned (eigenvalues " +
                             std::to_string(lo) + " .. " + std::to_string(hi) + ")");
    }

    Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
    if (llt.info() != Eigen::Success) {
        throw DegenerateData("Cluster: covariance is not positive definite");
    }
    precision_ = llt.solve(Eigen::MatrixXd::Identity(k, k));
    precision_ = 0.5 * (precision_ + precision_.transpose()).eval();
    log_det_ = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Cluster fit_cluster(std::span<const FeatureVector> features, std::optional<double> ridge) {
    if (features.size() < 2) {
        throw InvalidInput("fit_cluster: need at least 2 features, got " + std::to_string(features.size()));
    }
    const auto k = features.front().size();
    if (k < 1) throw InvalidInput("fit_cluster: empty feature vectors");
    for (const auto& f : features) {
        if (f.size() != k) throw InvalidInput("fit_cluster: features differ in dimension");
    }
    if (ridge && !(*ridge >= 0.0)) throw InvalidInput("fit_cluster: ridge must be >= 0");

    Eigen::MatrixXd data(k, static_cast<Eigen::Index>(features.size()));
    for (std::size_t j = 0; j < features.size(); ++j) data.col(static_cast<Eigen::Index>(j)) = features[j];
    Eigen::VectorXd mean = data.rowwise().mean();
    Eigen::MatrixXd cov = covariance(data);
    const double r = ridge ? *ridge : 1e-6 * cov.trace() / static_cast<double>(k);
    cov.diagonal().array() += r;
    return Cluster(std::move(mean), std::move(cov));
}

namespace {

double squared_distance(const Cluster& c, const FeatureVector& x) {
    if (x.size() != c.mean().size()) {
        throw InvalidInput("cluster has dimension " + std::to_string(c.dimension()) + ", feature has " +
                           std::to_string(x.size()));
    }
    const Eigen::VectorXd diff = x - c.mean();
    return std::max(0.0, diff.dot(c.precision() * diff));
}

} // namespace

double log_density(const Cluster& c, const FeatureVector& x) {
    const double d2 = squared_distance(c, x);
    return -0.5 * (c.dimension() * std::log(2.0 * std::numbers::pi) + c.log_det() + d2);
}

double density(const Cluster& c, const FeatureVector& x) { return std::exp(log_density(c, x)); }

double mahalanobis(const Cluster& c, const FeatureVector& u) { return std::sqrt(squared_distance(c, u)); }

void GestureDictionary::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw CorruptData("dictionary: tau must be positive");
    try {
        segmentation.validate();
    } catch (const InvalidInput& e) {
        throw CorruptData(std::string("dictionary: ") + e.what());
    }
    const int k = eigenspace.k();
    if (k < 1) throw CorruptData("dictionary: missing eigenspace");
    std::unordered_set<std::string> names;
    for (const auto& e : entries) {
        if (!names.insert(e.name).second) throw CorruptData("dictionary: duplicate entry name '" + e.name + "'");
        if (e.clusters.empty()) throw CorruptData("dictionary: entry '" + e.name + "' has no clusters");
        for (const auto& c : e.clusters) {
            if (c.dimension() != k) {
                throw CorruptData("dictionary: entry '" + e.name + "' has a cluster of dimension " +
                                  std::to_string(c.dimension()) + " but k=" + std::to_string(k));
            }
        }
        for (int i : e.important) {
            if (i < 1 || i > static_cast<int>(e.clusters.size())) {
                throw CorruptData("dictionary: entry '" + e.name + "' flags important index " + std::to_string(i) +
                                  " outside [1, " + std::to_string(e.clusters.size()) + "]");
            }
        }
    }
}

const GestureEntry* GestureDictionary::find(const std::string& name) const {
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

} // namespace flowseq
