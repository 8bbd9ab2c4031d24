#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmpe/sample_set.hpp"

namespace kmpe {

/// Points with aligned binary labels (true = positive).
struct LabeledDataset {
    SampleSet points;
    std::vector<bool> labels;

    std::size_t positives() const;
    std::size_t negatives() const { return labels.size() - positives(); }
};

/// Mixture sample (from F), component sample (from H) and, when known, the true
/// proportion of H inside F.
struct MpeInstance {
    SampleSet mixture;
    SampleSet component;
    std::optional<double> kappa_true;
    std::uint64_t seed = 0;
    std::optional<double> kappa_realized;  // fraction of drawn mixture points that came from H
};

// CSV: one sample per line, comma-separated numeric fields. Blank lines are
// skipped, CRLF accepted. Labeled files carry the label in the last column,
// {0,1} or {-1,+1}; 1/+1 is positive. Errors name the 1-based line.
SampleSet parse_samples_csv(std::string_view text);
LabeledDataset parse_labeled_csv(std::string_view text);
SampleSet load_samples_csv(const std::filesystem::path& path);
LabeledDataset load_labeled_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal per value, '\n' line endings.
std::string format_samples_csv(const SampleSet& samples);
void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

struct InstanceSpec {
    double positive_fraction = 0.5;  // share of positives moved into the component pool
    bool flip = false;               // swap label classes first
    std::size_t total_samples = 400;
    std::uint64_t seed = 0;
};

/// Mixture/component pair from a labeled dataset.
///
/// A `positive_fraction` share of the positives (rounded) forms the component
/// pool; the rest of the positives plus every negative form the mixture pool.
/// `total_samples` is split between the pools in proportion to pool size (rounded,
/// at least one each) and drawn without replacement. kappa_true is the share of
/// positives in the mixture pool.
MpeInstance construct_instance(const LabeledDataset& data, const InstanceSpec& spec);

struct SynthSpec {
    double kappa = 0.3;
    std::size_t dim = 1;
    double separation = 6.0;
    std::size_t n = 100;  // mixture size
    std::size_t m = 100;  // component size
    std::uint64_t seed = 0;
};

/// H = N(0, I); G = N(separation * e_1, I); each mixture point comes from H with
/// probability kappa, else from G. Mixture points are drawn before component points.
MpeInstance synth_gaussian_pair(const SynthSpec& spec);

}  // namespace kmpe
