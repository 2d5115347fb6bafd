// Minimal library walkthrough: generate a scene, push it through one
// round-trip cell and print the scores.

#include <cstdio>

#include "omniproj/omniproj.hpp"

int main() {
    using namespace omniproj;

    const ProjectionGrid hr_grid = erp_grid(120);
    const PlanarImage hr = gen_pattern(PatternKind::checker_sphere, hr_grid, 1);

    PipelineConfig cfg;
    cfg.format = ProjectionFormat::eac;
    cfg.scale = 2;

    const RoundtripResult r = run_roundtrip(hr, cfg);
    std::printf("eac x2 on a %dx%d checker: ws-psnr %.3f dB, psnr %.3f dB, ssim %.4f\n",
                hr.width, hr.height, r.ws_psnr, r.psnr, r.ssim);

    const DistortionStats s = distortion_stats(default_grid(ProjectionFormat::eac, 24576));
    std::printf("eac uniformity ratio at 24576 px: %.3f\n", s.ratio);
    return 0;
}
