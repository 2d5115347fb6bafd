#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omniproj/detail/parallel.hpp"
#include "omniproj/image.hpp"
#include "omniproj/io.hpp"
#include "omniproj/metrics.hpp"
#include "omniproj/projection.hpp"
#include "omniproj/resample.hpp"
#include "omniproj/scaler.hpp"

// The round-trip evaluation chain: make an LR input, convert it into the
// format under test, upscale, convert back to ERP at the original size and
// score against the HR original (WS-PSNR / PSNR / SSIM on Y). Every stage
// output is snapped to the 8-bit grid, so dumped intermediates reproduce
// downstream results bit for bit.

namespace omniproj {

enum class LrOrder { downscale_then_project, project_then_downscale };

inline std::string to_string(LrOrder o) {
    return o == LrOrder::downscale_then_project ? "downscale-then-project"
                                                : "project-then-downscale";
}

inline LrOrder parse_lr_order(const std::string& s) {
    if (s == "downscale-then-project") return LrOrder::downscale_then_project;
    if (s == "project-then-downscale") return LrOrder::project_then_downscale;
    throw std::invalid_argument("unknown lr order: " + s);
}

struct PipelineConfig {
    ProjectionFormat format = ProjectionFormat::eac;
    int scale = 2;
    InterpKernel kernel = InterpKernel::bicubic;
    Upscaler upscaler{};
    LrOrder lr_order = LrOrder::downscale_then_project;
    int jobs = 0;
    std::string dump_dir;     // empty: no intermediate dumps
    std::string dump_prefix;  // prepended to stage file names
};

/// Grids used by one round-trip run. The intermediate budget is the HR ERP
/// pixel count divided by scale^2, matched per format; the SR grid is the
/// LR grid scaled back up, so raster layouts nest exactly.
struct StagePlan {
    ProjectionGrid erp_hr, erp_lr, fmt_lr, fmt_hr;
};

inline StagePlan make_plan(int hr_width, int hr_height, const PipelineConfig& cfg) {
    validate_scale(cfg.scale);
    StagePlan p;
    p.erp_hr = grid_from_dims(ProjectionFormat::erp, hr_width, hr_height);
    if (hr_width % cfg.scale || hr_height % cfg.scale)
        throw std::invalid_argument("pipeline: HR dims must be divisible by the scale");
    p.erp_lr = erp_grid(hr_height / cfg.scale);
    p.fmt_lr = cfg.format == ProjectionFormat::erp
                   ? p.erp_lr
                   : default_grid(cfg.format,
                                  static_cast<long>(p.erp_lr.width) * p.erp_lr.height);
    p.fmt_hr = scale_grid(p.fmt_lr, cfg.scale);
    return p;
}

struct RoundtripResult {
    PlanarImage sr_erp;
    double ws_psnr = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
};

namespace detail {

inline void dump_stage(const PipelineConfig& cfg, const std::string& stage,
                       const PlanarImage& img) {
    if (cfg.dump_dir.empty()) return;
    std::filesystem::create_directories(cfg.dump_dir);
    const std::string path =
        (std::filesystem::path(cfg.dump_dir) / (cfg.dump_prefix + stage + ".png")).string();
    write_image(img, path);
}

}  // namespace detail

// Individual stages; each returns an 8-bit-snapped image so a run can be
// resumed from any dumped artifact.

inline PlanarImage stage_lr_erp(const PlanarImage& hr, const PipelineConfig& cfg) {
    return snap8(downscale(hr, cfg.scale, cfg.kernel));
}

inline PlanarImage stage_lr_format(const PlanarImage& hr, const PlanarImage& lr_erp,
                                   const StagePlan& plan, const PipelineConfig& cfg) {
    if (cfg.lr_order == LrOrder::downscale_then_project)
        return snap8(convert(lr_erp, plan.erp_lr, plan.fmt_lr, cfg.kernel, cfg.jobs));
    PlanarImage hr_fmt = snap8(convert(hr, plan.erp_hr, plan.fmt_hr, cfg.kernel, cfg.jobs));
    PlanarImage lr_fmt = downscale(hr_fmt, cfg.scale, cfg.kernel);
    lr_fmt.mask = active_mask(plan.fmt_lr);
    return snap8(lr_fmt);
}

inline PlanarImage stage_sr_format(const PlanarImage& lr_fmt, const StagePlan& plan,
                                   const PipelineConfig& cfg, std::string* log = nullptr) {
    PlanarImage sr = upscale(lr_fmt, cfg.scale, cfg.upscaler, log);
    sr.mask = active_mask(plan.fmt_hr);
    return snap8(sr);
}

inline PlanarImage stage_sr_erp(const PlanarImage& sr_fmt, const StagePlan& plan,
                                const PipelineConfig& cfg) {
    return snap8(convert(sr_fmt, plan.fmt_hr, plan.erp_hr, cfg.kernel, cfg.jobs));
}

/// Full round-trip for one HR ERP frame.
inline RoundtripResult run_roundtrip(const PlanarImage& hr_erp, const PipelineConfig& cfg,
                                     std::string* log = nullptr) {
    const StagePlan plan = make_plan(hr_erp.width, hr_erp.height, cfg);
    const PlanarImage hr = snap8(hr_erp);

    PlanarImage lr_erp;
    if (cfg.lr_order == LrOrder::downscale_then_project) {
        lr_erp = stage_lr_erp(hr, cfg);
        detail::dump_stage(cfg, "lr_erp", lr_erp);
    }
    const PlanarImage lr_fmt = stage_lr_format(hr, lr_erp, plan, cfg);
    detail::dump_stage(cfg, "lr_fmt", lr_fmt);
    const PlanarImage sr_fmt = stage_sr_format(lr_fmt, plan, cfg, log);
    detail::dump_stage(cfg, "sr_fmt", sr_fmt);
    PlanarImage sr_erp = stage_sr_erp(sr_fmt, plan, cfg);
    detail::dump_stage(cfg, "sr_erp", sr_erp);

    const PlanarImage ya = y_channel(hr);
    const PlanarImage yb = y_channel(sr_erp);
    const WeightMap wm = erp_weights(plan.erp_hr);
    RoundtripResult r;
    r.ws_psnr = ws_psnr(yb, ya, wm).value;
    r.psnr = psnr(yb, ya).value;
    r.ssim = ssim(yb, ya).value;
    r.sr_erp = std::move(sr_erp);
    return r;
}

// --- matrix runner -----------------------------------------------------

struct PipelineCell {
    ProjectionFormat format = ProjectionFormat::erp;
    int scale = 2;
    double ws_psnr = 0.0, psnr = 0.0, ssim = 0.0;
    bool ok = false;
    std::string error;
    std::string log;
};

struct PipelineReport {
    std::vector<PipelineCell> rows;
    std::vector<std::pair<std::string, std::string>> metadata;  // rendered in order
};

struct MatrixRequest {
    std::vector<PlanarImage> images;  // HR ERP frames
    std::vector<std::string> names;   // optional, used for dump prefixes
    std::vector<ProjectionFormat> formats;
    std::vector<int> scales;
    PipelineConfig defaults;
    // Per-cell overrides keyed "<format> x<scale>", e.g. "eac x2".
    std::map<std::string, PipelineConfig> overrides;
};

inline std::string cell_key(ProjectionFormat f, int scale) {
    return to_string(f) + " x" + std::to_string(scale);
}

/// Runs the (format x scale) matrix, averaging dB values arithmetically
/// across input frames. Cells run concurrently; a failing cell is recorded
/// and does not disturb the others.
inline PipelineReport run_matrix(const MatrixRequest& req) {
    if (req.images.empty()) throw std::invalid_argument("run_matrix: no input images");
    PipelineReport rep;
    std::vector<PipelineConfig> cfgs;
    for (ProjectionFormat f : req.formats)
        for (int s : req.scales) {
            PipelineConfig cfg = req.defaults;
            const auto it = req.overrides.find(cell_key(f, s));
            if (it != req.overrides.end()) cfg = it->second;
            cfg.format = f;
            cfg.scale = s;
            cfg.jobs = 1;  // cells are the unit of parallelism
            PipelineCell cell;
            cell.format = f;
            cell.scale = s;
            rep.rows.push_back(cell);
            cfgs.push_back(cfg);
        }

    detail::parallel_for(static_cast<long>(rep.rows.size()), req.defaults.jobs, [&](long i) {
        PipelineCell& cell = rep.rows[i];
        PipelineConfig cfg = cfgs[i];
        if (!cfg.dump_dir.empty())
            cfg.dump_dir = (std::filesystem::path(cfg.dump_dir) /
                            (to_string(cell.format) + "_x" + std::to_string(cell.scale)))
                               .string();
        try {
            double ws = 0.0, ps = 0.0, ss = 0.0;
            for (size_t k = 0; k < req.images.size(); ++k) {
                cfg.dump_prefix =
                    (k < req.names.size() ? req.names[k] : "img" + std::to_string(k)) + "_";
                const RoundtripResult r = run_roundtrip(req.images[k], cfg, &cell.log);
                ws += r.ws_psnr;
                ps += r.psnr;
                ss += r.ssim;
            }
            const double n = static_cast<double>(req.images.size());
            cell.ws_psnr = ws / n;
            cell.psnr = ps / n;
            cell.ssim = ss / n;
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
            cell.ws_psnr = cell.psnr = cell.ssim = std::nan("");
        }
    });

    rep.metadata.emplace_back("tool", "omniproj 0.1.0");
    rep.metadata.emplace_back("kernel", to_string(req.defaults.kernel));
    rep.metadata.emplace_back("upscaler", to_string(req.defaults.upscaler));
    rep.metadata.emplace_back("lr_order", to_string(req.defaults.lr_order));
    rep.metadata.emplace_back("images", std::to_string(req.images.size()));
    rep.metadata.emplace_back("metric_channel", "y");
    rep.metadata.emplace_back("averaging", "arithmetic mean of per-frame dB values");
    return rep;
}

namespace detail {

inline std::string fmt_value(double v) {
    if (std::isinf(v)) return "inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace detail

/// Deterministic serialization; columns format, scale, ws_psnr, psnr, ssim
/// with three decimals and the literal "inf" for the infinity sentinel.
inline std::string render_report(const PipelineReport& rep, const std::string& style = "csv") {
    std::string out;
    if (style == "csv") {
        for (const auto& [k, v] : rep.metadata) out += "# " + k + "=" + v + "\n";
        for (const PipelineCell& c : rep.rows)
            if (!c.ok)
                out += "# failed " + cell_key(c.format, c.scale) + ": " + c.error + "\n";
        out += "format,scale,ws_psnr,psnr,ssim\n";
        for (const PipelineCell& c : rep.rows)
            out += to_string(c.format) + "," + std::to_string(c.scale) + "," +
                   detail::fmt_value(c.ws_psnr) + "," + detail::fmt_value(c.psnr) + "," +
                   detail::fmt_value(c.ssim) + "\n";
        return out;
    }
    if (style == "markdown") {
        for (const auto& [k, v] : rep.metadata) out += "- " + k + ": " + v + "\n";
        for (const PipelineCell& c : rep.rows)
            if (!c.ok) out += "- failed " + cell_key(c.format, c.scale) + ": " + c.error + "\n";
        out += "\n| format | scale | ws_psnr | psnr | ssim |\n|---|---|---|---|---|\n";
        for (const PipelineCell& c : rep.rows)
            out += "| " + to_string(c.format) + " | " + std::to_string(c.scale) + " | " +
                   detail::fmt_value(c.ws_psnr) + " | " + detail::fmt_value(c.psnr) + " | " +
                   detail::fmt_value(c.ssim) + " |\n";
        return out;
    }
    throw std::invalid_argument("render_report: style must be csv or markdown");
}

}  // namespace omniproj
