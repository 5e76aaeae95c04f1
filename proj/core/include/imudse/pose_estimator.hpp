#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "imudse/body_model.hpp"
#include "imudse/imu_synthesis.hpp"

namespace imudse {

enum class EstimatorKind { nearest_neighbor, ridge };

const char* to_string(EstimatorKind kind) noexcept;
/// Throws ValidationError listing the valid names.
EstimatorKind parse_estimator_kind(const std::string& name);

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::nearest_neighbor;
    int window = 5; ///< frames, centered
    double ridge_alpha = 1.0;
    int finetune_weight = 2;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Row t concatenates, for each sensor and each frame in [t - w/2, t + w/2],
/// the 9 row-major orientation entries and 3 acceleration values. Rows cover
/// frames [w/2, T - w/2). Throws when the sequence is shorter than the window.
Eigen::MatrixXd build_features(const VirtualIMUSequence& features, int window);

/// Flattens each pose's local rotations into a row (joints * 3 values).
Eigen::MatrixXd pose_targets(std::span<const Pose> poses);

/// Inverse of pose_targets: zero root translation, axis-angle used as-is.
std::vector<Pose> targets_to_poses(const Eigen::MatrixXd& targets);

/// Paired feature and target rows.
struct TrainingSet {
    Eigen::MatrixXd features;
    Eigen::MatrixXd targets;

    /// Appends rows; both sides must agree with existing column counts.
    void append(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);
    [[nodiscard]] Eigen::Index rows() const noexcept { return features.rows(); }
};

/// Fitted estimator. Immutable once returned by fit(); predict is const and
/// safe to call concurrently.
class TrainedEstimator {
public:
    [[nodiscard]] EstimatorKind kind() const noexcept { return kind_; }
    [[nodiscard]] Eigen::Index feature_dim() const noexcept { return feature_dim_; }
    [[nodiscard]] Eigen::Index target_dim() const noexcept { return target_dim_; }
    /// Ridge weights (feature_dim x target_dim); empty for nearest neighbor.
    [[nodiscard]] const Eigen::MatrixXd& weights() const noexcept { return weights_; }

    /// One target row per feature row. Throws ValidationError on a
    /// dimensionality mismatch.
    [[nodiscard]] Eigen::MatrixXd predict_targets(const Eigen::MatrixXd& features) const;
    [[nodiscard]] std::vector<Pose> predict(const Eigen::MatrixXd& features) const;

private:
    friend TrainedEstimator fit(const EstimatorSpec&, const TrainingSet&, const TrainingSet&);

    EstimatorKind kind_ = EstimatorKind::nearest_neighbor;
    Eigen::Index feature_dim_ = 0;
    Eigen::Index target_dim_ = 0;
    Eigen::MatrixXd weights_;
    Eigen::MatrixXd stored_features_;
    Eigen::MatrixXd stored_targets_;
};

/// Two-stage fit: train rows plus finetune rows repeated finetune_weight
/// times. Ridge solves (X^T X + alpha I) W = X^T Y; alpha = 0 requires a
/// full-rank normal matrix. Throws ValidationError on empty train data or
/// mismatched dimensions, RuntimeFailure on a singular system.
TrainedEstimator fit(const EstimatorSpec& spec, const TrainingSet& train, const TrainingSet& finetune);

} // namespace imudse
