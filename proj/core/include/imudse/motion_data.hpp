#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "imudse/body_model.hpp"

namespace imudse {

struct MotionSequence {
    double fps = 60.0;
    std::vector<Pose> frames;
    std::string subject;
    std::string name;

    [[nodiscard]] std::size_t joint_count() const noexcept
    {
        return frames.empty() ? 0 : frames.front().local_rotations.size();
    }

    /// fps > 0, at least one frame, identical joint counts.
    void validate() const;
};

MotionSequence load_motion(const std::filesystem::path& path);
void save_motion(const MotionSequence& sequence, const std::filesystem::path& path);

/// Loads every `*.json` motion file in a directory, ordered by file name.
std::vector<MotionSequence> load_motion_directory(const std::filesystem::path& dir);

/// One joint driven by axis * amplitude * sin(2 pi f t + phase).
struct JointSinusoid {
    int joint = 0;
    Vec3 axis = Vec3::UnitX();
    double amplitude = 0.0; ///< radians
    double frequency = 0.0; ///< Hz
    double phase = 0.0;     ///< radians
};

struct SinusoidMotionSpec {
    std::size_t joint_count = kSmplJointCount;
    std::vector<JointSinusoid> joints;
    Vec3 root_translation = Vec3::Zero();
    double duration = 1.0; ///< seconds
    double fps = 60.0;
    std::uint64_t seed = 0;
    /// Replace every phase by a uniform draw from [0, 2 pi) seeded by `seed`.
    bool randomize_phases = false;
    std::string subject;
    std::string name;
};

/// Frame count is round(duration * fps). Throws ValidationError on
/// non-positive duration or fps, or a joint index out of range.
MotionSequence generate_synthetic_motion(const SinusoidMotionSpec& spec);

/// A corpus of sinusoid sequences with per-sequence phase and amplitude
/// variation; the input to `motions gen`.
struct CorpusSpec {
    SinusoidMotionSpec base;
    int subjects = 10;
    int sequences_per_subject = 2;
    /// Each sequence scales all amplitudes by a uniform factor in [1 - j, 1 + j].
    double amplitude_jitter = 0.0;
    /// Each sequence scales all frequencies by a uniform factor in [1 - j, 1 + j].
    double frequency_jitter = 0.0;
    std::uint64_t seed = 0;
};

CorpusSpec load_corpus_spec(const std::filesystem::path& path);
std::vector<MotionSequence> generate_corpus(const CorpusSpec& spec);

/// Subject ids are formatted as s01, s02, ...
std::string subject_label(int index);

enum class Split { train, finetune, validation, test };

const char* to_string(Split split) noexcept;

struct Dataset {
    std::vector<MotionSequence> sequences;
    std::vector<Split> labels;

    [[nodiscard]] std::vector<const MotionSequence*> select(Split split) const;
    [[nodiscard]] std::size_t count(Split split) const;
};

/// Subjects listed in `test_subjects` go to test and `finetune_subjects` to
/// finetune; everything else is train (or, if `train_subjects` is given,
/// only those, and unlisted subjects are an error). `holdout_count`
/// sequences of the finetune pool become validation, picked by a seeded
/// shuffle.
struct SplitRule {
    std::vector<std::string> test_subjects;
    std::vector<std::string> finetune_subjects;
    std::optional<std::vector<std::string>> train_subjects;
    std::size_t holdout_count = 0;
    std::uint64_t seed = 0;
};

/// Throws ValidationError when the holdout exceeds the finetune pool or
/// the test split comes out empty.
Dataset split_dataset(std::vector<MotionSequence> sequences, const SplitRule& rule);

} // namespace imudse
