#include "imudse/pose_estimator.hpp"

#include <limits>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "imudse/error.hpp"

namespace imudse {

const char* to_string(EstimatorKind kind) noexcept
{
    switch (kind) {
    case EstimatorKind::nearest_neighbor:
        return "nearest_neighbor";
    case EstimatorKind::ridge:
        return "ridge";
    }
    return "unknown";
}

EstimatorKind parse_estimator_kind(const std::string& name)
{
    if (name == "nearest_neighbor")
        return EstimatorKind::nearest_neighbor;
    if (name == "ridge")
        return EstimatorKind::ridge;
    throw ValidationError(fmt::format("unknown estimator kind '{}' (valid: nearest_neighbor, ridge)", name));
}

void EstimatorSpec::validate() const
{
    if (window < 1 || window % 2 == 0)
        throw ValidationError(fmt::format("estimator.window: must be odd and >= 1, got {}", window));
    if (!(ridge_alpha >= 0.0))
        throw ValidationError("estimator.ridge_alpha: must be >= 0");
    if (finetune_weight < 1)
        throw ValidationError("estimator.finetune_weight: must be >= 1");
}

Eigen::MatrixXd build_features(const VirtualIMUSequence& features, int window)
{
    if (window < 1 || window % 2 == 0)
        throw ValidationError(fmt::format("feature window must be odd and >= 1, got {}", window));
    const auto frames = static_cast<Eigen::Index>(features.frame_count());
    const auto sensors = static_cast<Eigen::Index>(features.sensor_count());
    if (frames < window)
        throw ValidationError(fmt::format("sequence of {} frames is shorter than the window of {}", frames, window));

    const Eigen::Index half = window / 2;
    const Eigen::Index rows = frames - 2 * half;
    Eigen::MatrixXd x(rows, window * sensors * 12);
    for (Eigen::Index r = 0; r < rows; ++r) {
        Eigen::Index col = 0;
        for (Eigen::Index s = 0; s < sensors; ++s) {
            for (Eigen::Index k = 0; k < window; ++k) {
                const auto t = static_cast<std::size_t>(r + k);
                const Mat3& ori = features.orientations[t][static_cast<std::size_t>(s)];
                const Vec3& acc = features.accelerations[t][static_cast<std::size_t>(s)];
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        x(r, col++) = ori(i, j);
                for (int i = 0; i < 3; ++i)
                    x(r, col++) = acc[i];
            }
        }
    }
    return x;
}

Eigen::MatrixXd pose_targets(std::span<const Pose> poses)
{
    if (poses.empty())
        return {};
    const auto joints = static_cast<Eigen::Index>(poses.front().local_rotations.size());
    Eigen::MatrixXd y(static_cast<Eigen::Index>(poses.size()), 3 * joints);
    for (std::size_t t = 0; t < poses.size(); ++t) {
        if (static_cast<Eigen::Index>(poses[t].local_rotations.size()) != joints)
            throw ValidationError(fmt::format("pose {} has a different joint count", t));
        for (Eigen::Index j = 0; j < joints; ++j)
            y.block<1, 3>(static_cast<Eigen::Index>(t), 3 * j) = poses[t].local_rotations[static_cast<std::size_t>(j)].transpose();
    }
    return y;
}

std::vector<Pose> targets_to_poses(const Eigen::MatrixXd& targets)
{
    if (targets.cols() % 3 != 0)
        throw ValidationError("target rows must hold axis-angle triples");
    const Eigen::Index joints = targets.cols() / 3;
    std::vector<Pose> out(static_cast<std::size_t>(targets.rows()));
    for (Eigen::Index t = 0; t < targets.rows(); ++t) {
        auto& pose = out[static_cast<std::size_t>(t)];
        pose.local_rotations.resize(static_cast<std::size_t>(joints));
        for (Eigen::Index j = 0; j < joints; ++j)
            pose.local_rotations[static_cast<std::size_t>(j)] = targets.block<1, 3>(t, 3 * j).transpose();
    }
    return out;
}

void TrainingSet::append(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y)
{
    if (x.rows() != y.rows())
        throw ValidationError(fmt::format("training rows disagree: {} feature rows, {} target rows", x.rows(), y.rows()));
    if (x.rows() == 0)
        return;
    if (features.size() == 0 && targets.size() == 0) {
        features = x;
        targets = y;
        return;
    }
    if (x.cols() != features.cols() || y.cols() != targets.cols())
        throw ValidationError(fmt::format("training dimensions disagree: got {}x{}, expected {}x{}", x.cols(), y.cols(),
                                          features.cols(), targets.cols()));
    const Eigen::Index old = features.rows();
    features.conservativeResize(old + x.rows(), Eigen::NoChange);
    targets.conservativeResize(old + y.rows(), Eigen::NoChange);
    features.bottomRows(x.rows()) = x;
    targets.bottomRows(y.rows()) = y;
}

TrainedEstimator fit(const EstimatorSpec& spec, const TrainingSet& train, const TrainingSet& finetune)
{
    spec.validate();
    if (train.rows() == 0)
        throw ValidationError("fit: empty training data");
    if (train.features.rows() != train.targets.rows() || finetune.features.rows() != finetune.targets.rows())
        throw ValidationError("fit: feature and target row counts disagree");
    if (finetune.rows() > 0 &&
        (finetune.features.cols() != train.features.cols() || finetune.targets.cols() != train.targets.cols()))
        throw ValidationError(fmt::format("fit: finetune dimensions {}x{} do not match train {}x{}",
                                          finetune.features.cols(), finetune.targets.cols(), train.features.cols(),
                                          train.targets.cols()));

    TrainedEstimator est;
    est.kind_ = spec.kind;
    est.feature_dim_ = train.features.cols();
    est.target_dim_ = train.targets.cols();
    const auto weight = static_cast<double>(spec.finetune_weight);

    if (spec.kind == EstimatorKind::ridge) {
        const Eigen::Index d = est.feature_dim_;
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(train.features.transpose());
        Eigen::MatrixXd rhs = train.features.transpose() * train.targets;
        if (finetune.rows() > 0) {
            gram.selfadjointView<Eigen::Lower>().rankUpdate(finetune.features.transpose(), weight);
            rhs.noalias() += weight * (finetune.features.transpose() * finetune.targets);
        }
        gram = gram.selfadjointView<Eigen::Lower>();
        gram.diagonal().array() += spec.ridge_alpha;

        if (spec.ridge_alpha > 0.0) {
            Eigen::LLT<Eigen::MatrixXd> llt(gram);
            if (llt.info() != Eigen::Success)
                throw RuntimeFailure("ridge fit: normal matrix is not positive definite");
            est.weights_ = llt.solve(rhs);
        } else {
            Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
            const auto diag = ldlt.vectorD().cwiseAbs();
            const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(d) * diag.maxCoeff();
            if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || diag.minCoeff() <= tol)
                throw RuntimeFailure("ridge fit: alpha = 0 requires a full-rank normal matrix");
            est.weights_ = ldlt.solve(rhs);
        }
    } else {
        // Columns are samples so each distance evaluation is a contiguous scan.
        const Eigen::Index rows = train.rows() + spec.finetune_weight * finetune.rows();
        est.stored_features_.resize(est.feature_dim_, rows);
        est.stored_targets_.resize(est.target_dim_, rows);
        est.stored_features_.leftCols(train.rows()) = train.features.transpose();
        est.stored_targets_.leftCols(train.rows()) = train.targets.transpose();
        Eigen::Index at = train.rows();
        for (int k = 0; k < spec.finetune_weight && finetune.rows() > 0; ++k) {
            est.stored_features_.middleCols(at, finetune.rows()) = finetune.features.transpose();
            est.stored_targets_.middleCols(at, finetune.rows()) = finetune.targets.transpose();
            at += finetune.rows();
        }
    }
    return est;
}

Eigen::MatrixXd TrainedEstimator::predict_targets(const Eigen::MatrixXd& features) const
{
    if (features.cols() != feature_dim_)
        throw ValidationError(fmt::format("predict: feature dimension {} does not match the estimator's {}",
                                          features.cols(), feature_dim_));
    if (kind_ == EstimatorKind::ridge)
        return features * weights_;

    Eigen::MatrixXd out(features.rows(), target_dim_);
    const Eigen::Index n = stored_features_.cols();
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        const Eigen::VectorXd q = features.row(r).transpose();
        Eigen::Index best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (stored_features_.col(i) - q).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        out.row(r) = stored_targets_.col(best).transpose();
    }
    return out;
}

std::vector<Pose> TrainedEstimator::predict(const Eigen::MatrixXd& features) const
{
    return targets_to_poses(predict_targets(features));
}

} // namespace imudse
