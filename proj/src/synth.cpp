#include "nbnn/synth.hpp"

#include <cmath>

#include "nbnn/rng.hpp"
#include "nbnn/similarity.hpp"

namespace nbnn {

void SynthSpec::validate() const {
    if (n_classes < 1 || images_per_class < 1 || descriptors_per_image < 1 || dim < 1) {
        throw InvalidSpec("synth_generate: counts must be positive");
    }
    if (!(signal_fraction > 0.0) || signal_fraction > 1.0) {
        throw InvalidSpec("synth_generate: signal_fraction must be in (0, 1]");
    }
    if (clutter_noise < 0.0 || signal_noise < 0.0) {
        throw InvalidSpec("synth_generate: noise levels must be non-negative");
    }
    if (distractor_classes < 0) {
        throw InvalidSpec("synth_generate: distractor_classes must be non-negative");
    }
}

namespace {

std::string zero_pad(int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) {
        s.insert(s.begin(), '0');
    }
    return s;
}

// Random unit prototypes; the first `dim` of them Gram-Schmidt
// orthonormalized so class directions are exactly mutually orthogonal
// whenever the dimension allows.
std::vector<std::vector<double>> make_prototypes(std::size_t count, std::size_t dim, Rng& rng) {
    std::vector<std::vector<double>> protos;
    protos.reserve(count);
    while (protos.size() < count) {
        std::vector<double> v(dim);
        for (double& x : v) {
            x = rng.normal();
        }
        if (protos.size() < dim) {
            for (const auto& p : protos) {
                const double proj = dot(v, p);
                for (std::size_t i = 0; i < dim; ++i) {
                    v[i] -= proj * p[i];
                }
            }
        }
        const double n = norm(v);
        if (n < 1e-8) {
            continue;  // dependent draw, retry
        }
        for (double& x : v) {
            x /= n;
        }
        protos.push_back(std::move(v));
    }
    return protos;
}

double round_f32(double v) {
    return static_cast<double>(static_cast<float>(v));
}

Descriptor noisy_copy(const std::vector<double>& proto, double noise, std::size_t dim, Rng& rng) {
    // Noise components scale with 1/sqrt(dim) so `noise` is the expected
    // offset magnitude relative to the unit prototype.
    const double scale = noise / std::sqrt(static_cast<double>(dim));
    while (true) {
        Descriptor d(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            d[i] = round_f32(proto[i] + scale * rng.normal());
        }
        if (norm(d) > kZeroNormThreshold) {
            return d;
        }
    }
}

}  // namespace

LabeledDataset synth_generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(derive_stream_seed(spec.seed, 0));

    const auto dim = static_cast<std::size_t>(spec.dim);
    const std::size_t total_classes =
        static_cast<std::size_t>(spec.n_classes) + static_cast<std::size_t>(spec.distractor_classes);
    const auto protos = make_prototypes(total_classes + kClutterPrototypes, dim, rng);
    const auto* clutter_protos = protos.data() + total_classes;

    const auto m = static_cast<std::size_t>(spec.descriptors_per_image);
    auto n_signal = static_cast<std::size_t>(
        std::ceil(spec.signal_fraction * static_cast<double>(m)));
    n_signal = std::min(n_signal, m);

    std::vector<DatasetItem> items;
    std::vector<std::string> distractor_ids;
    for (std::size_t c = 0; c < total_classes; ++c) {
        const bool distractor = c >= static_cast<std::size_t>(spec.n_classes);
        const std::string class_id =
            distractor ? "distractor_" + zero_pad(static_cast<int>(c - spec.n_classes), 3)
                       : "class_" + zero_pad(static_cast<int>(c), 3);
        if (distractor) {
            distractor_ids.push_back(class_id);
        }
        for (int img = 0; img < spec.images_per_class; ++img) {
            std::vector<Descriptor> rows;
            rows.reserve(m);
            for (std::size_t d = 0; d < n_signal; ++d) {
                rows.push_back(noisy_copy(protos[c], spec.signal_noise, dim, rng));
            }
            for (std::size_t d = n_signal; d < m; ++d) {
                const auto& proto = clutter_protos[rng.uniform_index(kClutterPrototypes)];
                rows.push_back(noisy_copy(proto, spec.clutter_noise, dim, rng));
            }
            items.push_back({class_id + "/img_" + zero_pad(img, 4), class_id,
                             DescriptorSet::from_rows(rows)});
        }
    }
    return LabeledDataset(std::move(items), {}, std::move(distractor_ids));
}

}  // namespace nbnn
