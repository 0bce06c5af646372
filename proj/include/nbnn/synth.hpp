#pragma once

#include <cstdint>

#include "nbnn/episodes.hpp"

namespace nbnn {

// Clutter-model generator. Each class gets a unit prototype direction
// (classes, distractors and clutter prototypes are orthonormalized in that
// order while the dimension allows). An image of a class consists of
// ceil(signal_fraction * descriptors_per_image) noisy copies of the class
// prototype plus clutter descriptors drawn near a small set of clutter
// prototypes shared across all classes, so accumulated clutter votes are
// class-ambiguous. Components are rounded to binary32 so in-memory datasets
// match their on-disk encoding bit for bit.
struct SynthSpec {
    int n_classes = 20;
    int images_per_class = 20;
    int descriptors_per_image = 64;
    int dim = 32;
    double signal_fraction = 0.2;   // in (0, 1]
    double clutter_noise = 0.35;    // expected clutter offset magnitude
    double signal_noise = 0.9;      // expected signal offset magnitude
    int distractor_classes = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Number of shared clutter prototypes.
inline constexpr int kClutterPrototypes = 8;

LabeledDataset synth_generate(const SynthSpec& spec);

}  // namespace nbnn
