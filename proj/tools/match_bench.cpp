// Development benchmark for the episode pipeline: per-method mean episode
// time at the Conv-4 geometry (361 descriptors, dim 64).

#include <chrono>
#include <cstdio>
#include <string>

#include "nbnn/episodes.hpp"
#include "nbnn/synth.hpp"

using namespace nbnn;

int main(int argc, char** argv) {
    int episodes = argc > 1 ? std::stoi(argv[1]) : 100;
    SynthSpec spec;
    spec.n_classes = 20;
    spec.images_per_class = 16;
    spec.descriptors_per_image = 361;
    spec.dim = 64;
    spec.signal_fraction = 0.2;
    spec.signal_noise = 0.9;
    spec.clutter_noise = 0.35;
    spec.seed = 7;
    std::printf("generating dataset...\n");
    const auto t0 = std::chrono::steady_clock::now();
    const LabeledDataset ds = synth_generate(spec);
    const auto t1 = std::chrono::steady_clock::now();
    std::printf("generated in %.1f s\n", std::chrono::duration<double>(t1 - t0).count());

    for (Method m : {Method::DN4, Method::MN4, Method::DMN4}) {
        ProtocolConfig cfg;
        cfg.method = m;
        cfg.n_ways = 5;
        cfg.k_shots = 1;
        cfg.queries_per_class = 15;
        cfg.episode_count = episodes;
        cfg.master_seed = 42;
        const EvalReport r = evaluate(ds, cfg, 1);
        std::printf("%-5s acc %.4f  ci %.4f  mean episode %.2f ms\n", to_string(m),
                    r.mean_accuracy, r.ci95_half_width, r.mean_episode_seconds * 1e3);
    }
    return 0;
}
