#include "imudse/motion_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "imudse/error.hpp"
#include "imudse/seeding.hpp"
#include "json_util.hpp"

namespace imudse {

using detail::get_as;
using detail::json;

void MotionSequence::validate() const
{
    if (!(fps > 0.0) || !std::isfinite(fps))
        throw ValidationError(fmt::format("motion '{}': fps must be > 0", name));
    if (frames.empty())
        throw ValidationError(fmt::format("motion '{}': empty sequence", name));
    const std::size_t joints = frames.front().local_rotations.size();
    for (std::size_t t = 0; t < frames.size(); ++t) {
        if (frames[t].local_rotations.size() != joints)
            throw ValidationError(fmt::format("motion '{}': frame {} has {} joints, expected {}", name, t,
                                              frames[t].local_rotations.size(), joints));
    }
}

MotionSequence load_motion(const std::filesystem::path& path)
{
    const auto doc = detail::read_json_file(path);
    const std::string where = path.string();

    MotionSequence seq;
    seq.fps = get_as<double>(detail::require(doc, "fps", where), where + ".fps");
    const auto joint_count = get_as<int>(detail::require(doc, "joint_count", where), where + ".joint_count");
    seq.subject = get_as<std::string>(detail::require(doc, "subject", where), where + ".subject");
    seq.name = get_as<std::string>(detail::require(doc, "name", where), where + ".name");
    if (joint_count < 1)
        throw ValidationError(fmt::format("{}.joint_count: must be >= 1", where));

    const auto& frames = detail::require(doc, "frames", where);
    if (!frames.is_array())
        throw ValidationError(fmt::format("{}.frames: expected an array", where));
    if (frames.empty())
        throw ValidationError(fmt::format("{}: empty sequence", where));

    seq.frames.reserve(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const std::string at = fmt::format("{}: frame {}", where, t);
        const auto& f = frames[t];
        Pose pose;
        pose.root_translation = detail::to_vec3(detail::require(f, "root_translation", at), at + " root_translation");
        const auto& rot = detail::require(f, "rotations", at);
        if (!rot.is_array() || static_cast<int>(rot.size()) != joint_count)
            throw ValidationError(fmt::format("{} has {} joints, expected {}", at, rot.is_array() ? rot.size() : 0, joint_count));
        pose.local_rotations.reserve(rot.size());
        for (std::size_t j = 0; j < rot.size(); ++j)
            pose.local_rotations.push_back(detail::to_vec3(rot[j], fmt::format("{} joint {}", at, j)));
        seq.frames.push_back(std::move(pose));
    }
    seq.validate();
    return seq;
}

void save_motion(const MotionSequence& sequence, const std::filesystem::path& path)
{
    sequence.validate();
    json doc;
    doc["fps"] = sequence.fps;
    doc["joint_count"] = sequence.joint_count();
    doc["subject"] = sequence.subject;
    doc["name"] = sequence.name;
    json frames = json::array();
    for (const auto& pose : sequence.frames) {
        json rot = json::array();
        for (const auto& r : pose.local_rotations)
            rot.push_back(detail::from_vec3(r));
        frames.push_back({{"root_translation", detail::from_vec3(pose.root_translation)}, {"rotations", std::move(rot)}});
    }
    doc["frames"] = std::move(frames);
    detail::write_json_file(doc, path);
}

std::vector<MotionSequence> load_motion_directory(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir))
        throw ValidationError(fmt::format("motion directory '{}' does not exist", dir.string()));
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<MotionSequence> out;
    out.reserve(files.size());
    for (const auto& f : files)
        out.push_back(load_motion(f));
    return out;
}

MotionSequence generate_synthetic_motion(const SinusoidMotionSpec& spec)
{
    if (!(spec.duration > 0.0))
        throw ValidationError("synthetic motion: duration must be > 0");
    if (!(spec.fps > 0.0))
        throw ValidationError("synthetic motion: fps must be > 0");
    if (spec.joint_count < 1)
        throw ValidationError("synthetic motion: joint_count must be >= 1");

    std::vector<JointSinusoid> joints = spec.joints;
    Rng rng(spec.seed);
    for (auto& j : joints) {
        if (j.joint < 0 || static_cast<std::size_t>(j.joint) >= spec.joint_count)
            throw ValidationError(fmt::format("synthetic motion: joint {} out of range", j.joint));
        const double n = j.axis.norm();
        if (n > 0.0)
            j.axis /= n;
        if (spec.randomize_phases)
            j.phase = 2.0 * std::numbers::pi * rng.uniform();
    }

    const auto frame_count = static_cast<std::size_t>(std::llround(spec.duration * spec.fps));
    if (frame_count == 0)
        throw ValidationError("synthetic motion: duration * fps rounds to zero frames");

    MotionSequence seq;
    seq.fps = spec.fps;
    seq.subject = spec.subject;
    seq.name = spec.name;
    seq.frames.reserve(frame_count);
    for (std::size_t t = 0; t < frame_count; ++t) {
        Pose pose = Pose::rest(spec.joint_count);
        pose.root_translation = spec.root_translation;
        for (const auto& j : joints) {
            const double arg = 2.0 * std::numbers::pi * j.frequency * static_cast<double>(t) / spec.fps + j.phase;
            pose.local_rotations[static_cast<std::size_t>(j.joint)] += j.axis * (j.amplitude * std::sin(arg));
        }
        seq.frames.push_back(std::move(pose));
    }
    return seq;
}

std::string subject_label(int index)
{
    return fmt::format("s{:02d}", index);
}

CorpusSpec load_corpus_spec(const std::filesystem::path& path)
{
    const auto doc = detail::read_json_file(path);
    const std::string where = path.string();
    auto field = [&](std::string_view key) { return detail::join_path(where, key); };

    CorpusSpec spec;
    auto opt_double = [&](std::string_view key, double fallback) {
        auto it = doc.find(key);
        return it == doc.end() ? fallback : get_as<double>(*it, field(key));
    };
    auto opt_int = [&](std::string_view key, long long fallback) {
        auto it = doc.find(key);
        return it == doc.end() ? fallback : get_as<long long>(*it, field(key));
    };

    spec.subjects = static_cast<int>(opt_int("subjects", spec.subjects));
    spec.sequences_per_subject = static_cast<int>(opt_int("sequences_per_subject", spec.sequences_per_subject));
    spec.amplitude_jitter = opt_double("amplitude_jitter", 0.0);
    spec.frequency_jitter = opt_double("frequency_jitter", 0.0);
    spec.seed = static_cast<std::uint64_t>(opt_int("seed", 0));
    spec.base.duration = opt_double("duration", spec.base.duration);
    spec.base.fps = opt_double("fps", spec.base.fps);
    spec.base.joint_count = static_cast<std::size_t>(opt_int("joint_count", kSmplJointCount));
    if (auto it = doc.find("randomize_phases"); it != doc.end())
        spec.base.randomize_phases = get_as<bool>(*it, field("randomize_phases"));
    if (auto it = doc.find("root_translation"); it != doc.end())
        spec.base.root_translation = detail::to_vec3(*it, field("root_translation"));

    const auto& joints = detail::require(doc, "joints", where);
    if (!joints.is_array())
        throw ValidationError(fmt::format("{}: expected an array", field("joints")));
    for (std::size_t i = 0; i < joints.size(); ++i) {
        const std::string at = fmt::format("{}[{}]", field("joints"), i);
        const auto& j = joints[i];
        JointSinusoid s;
        s.joint = get_as<int>(detail::require(j, "joint", at), at + ".joint");
        s.axis = detail::to_vec3(detail::require(j, "axis", at), at + ".axis");
        s.amplitude = get_as<double>(detail::require(j, "amplitude", at), at + ".amplitude");
        s.frequency = get_as<double>(detail::require(j, "frequency", at), at + ".frequency");
        if (auto it = j.find("phase"); it != j.end())
            s.phase = get_as<double>(*it, at + ".phase");
        spec.base.joints.push_back(s);
    }

    if (spec.subjects < 1)
        throw ValidationError(fmt::format("{}: must be >= 1", field("subjects")));
    if (spec.sequences_per_subject < 1)
        throw ValidationError(fmt::format("{}: must be >= 1", field("sequences_per_subject")));
    if (spec.amplitude_jitter < 0.0 || spec.frequency_jitter < 0.0)
        throw ValidationError(fmt::format("{}: jitter factors must be >= 0", where));
    return spec;
}

std::vector<MotionSequence> generate_corpus(const CorpusSpec& spec)
{
    std::vector<MotionSequence> out;
    for (int s = 1; s <= spec.subjects; ++s) {
        for (int k = 0; k < spec.sequences_per_subject; ++k) {
            SinusoidMotionSpec seq = spec.base;
            seq.subject = subject_label(s);
            seq.name = fmt::format("{}_seq{:02d}", seq.subject, k);
            seq.seed = hash_combine(spec.seed, seq.name);
            Rng rng(hash_combine(seq.seed, std::uint64_t{1}));
            const double amp = 1.0 + spec.amplitude_jitter * (2.0 * rng.uniform() - 1.0);
            const double freq = 1.0 + spec.frequency_jitter * (2.0 * rng.uniform() - 1.0);
            for (auto& j : seq.joints) {
                j.amplitude *= amp;
                j.frequency *= freq;
            }
            out.push_back(generate_synthetic_motion(seq));
        }
    }
    return out;
}

const char* to_string(Split split) noexcept
{
    switch (split) {
    case Split::train:
        return "train";
    case Split::finetune:
        return "finetune";
    case Split::validation:
        return "validation";
    case Split::test:
        return "test";
    }
    return "unknown";
}

std::vector<const MotionSequence*> Dataset::select(Split split) const
{
    std::vector<const MotionSequence*> out;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        if (labels[i] == split)
            out.push_back(&sequences[i]);
    }
    return out;
}

std::size_t Dataset::count(Split split) const
{
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), split));
}

Dataset split_dataset(std::vector<MotionSequence> sequences, const SplitRule& rule)
{
    const std::set<std::string> test(rule.test_subjects.begin(), rule.test_subjects.end());
    const std::set<std::string> finetune(rule.finetune_subjects.begin(), rule.finetune_subjects.end());
    for (const auto& s : test) {
        if (finetune.contains(s))
            throw ValidationError(fmt::format("split rule: subject '{}' is both test and finetune", s));
    }
    std::set<std::string> train;
    if (rule.train_subjects)
        train.insert(rule.train_subjects->begin(), rule.train_subjects->end());

    Dataset ds;
    ds.labels.reserve(sequences.size());
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        const auto& subject = sequences[i].subject;
        if (test.contains(subject)) {
            ds.labels.push_back(Split::test);
        } else if (finetune.contains(subject)) {
            ds.labels.push_back(Split::finetune);
            pool.push_back(i);
        } else if (!rule.train_subjects || train.contains(subject)) {
            ds.labels.push_back(Split::train);
        } else {
            throw ValidationError(fmt::format("split rule: subject '{}' of sequence '{}' is not assigned to any split",
                                              subject, sequences[i].name));
        }
    }

    if (rule.holdout_count > pool.size())
        throw ValidationError(fmt::format("split rule: holdout of {} exceeds the finetune pool of {} sequences",
                                          rule.holdout_count, pool.size()));
    Rng rng(rule.seed);
    for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[rng.bounded(i)]);
    for (std::size_t k = 0; k < rule.holdout_count; ++k)
        ds.labels[pool[k]] = Split::validation;

    ds.sequences = std::move(sequences);
    if (ds.count(Split::test) == 0)
        throw ValidationError("split rule: the test split is empty");
    return ds;
}

} // namespace imudse
