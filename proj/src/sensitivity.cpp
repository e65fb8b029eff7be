#include "gvfseg/sensitivity.hpp"

#include <stdexcept>

#include "gvfseg/metrics.hpp"

namespace gvfseg {

std::vector<SensitivityRow> run_sensitivity(const SensitivityConfig& config) {
    if (config.num_seeds < 1)
        throw std::invalid_argument("run_sensitivity: num_seeds must be >= 1");
    if (config.sigmas.empty())
        throw std::invalid_argument("run_sensitivity: no perturbation levels");

    std::vector<SensitivityRow> rows;
    rows.reserve(config.sigmas.size());
    for (double sigma : config.sigmas) {
        SensitivityRow row;
        row.sigma_ptb = sigma;
        for (int s = 0; s < config.num_seeds; ++s) {
            const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(s);
            Phantom ph = make_phantom(config.phantom, seed);
            LabelVolume gt = foreground_mask(ph.ground_truth);

            // Standing pre-segmentation: ground truth under the base deformation.
            PerturbParams base{config.ctrl_grid, config.base_sigma, seed * 2654435761ull + 1};
            LabelVolume preseg = perturb_labels(gt, base);

            PerturbParams extra{config.ctrl_grid, sigma, seed * 2654435761ull + 2};
            LabelVolume perturbed = perturb_labels(preseg, extra);
            if (perturbed.count(config.object_label) == 0)
                throw std::runtime_error(
                    "run_sensitivity: perturbation emptied the pre-segmentation");

            SegmentResult res = segment(ph.observation, &ph.prob, perturbed,
                                        config.object_label, config.segment);

            row.preseg_dsc += dsc(perturbed, gt, config.object_label);
            row.final_dsc += dsc(res.labels, gt, config.object_label);
            row.preseg_assd += assd(perturbed, gt, config.object_label);
            row.final_assd += assd(res.labels, gt, config.object_label);
        }
        row.preseg_dsc /= config.num_seeds;
        row.final_dsc /= config.num_seeds;
        row.preseg_assd /= config.num_seeds;
        row.final_assd /= config.num_seeds;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gvfseg
