// omniproj command line tool: projection conversion, quality metrics, the
// round-trip evaluation matrix, distortion analysis and fixture generation.
//
// Exit codes: 0 success, 1 usage error, 2 I/O error, 3 computation error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omniproj/omniproj.hpp"

namespace op = omniproj;

namespace {

constexpr const char* kFormatList = "erp, cmp, eac, isp, ohp, tsp, ssp";
constexpr const char* kScaleList = "2, 3, 4 (1 = identity test mode)";

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw op::IoError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

op::ProjectionGrid input_grid(op::ProjectionFormat f, const op::PlanarImage& img,
                              double tsp_ratio) {
    op::ProjectionGrid g = op::grid_from_dims(f, img.width, img.height);
    g.tsp_back_ratio = tsp_ratio;
    op::validate_grid(g);
    return g;
}

void print_metric(const op::MetricResult& r) {
    if (op::is_inf(r.value))
        std::printf("%s %s inf\n", r.metric.c_str(), r.channel.c_str());
    else
        std::printf("%s %s %.4f\n", r.metric.c_str(), r.channel.c_str(), r.value);
}

int run_convert(const std::string& in_path, const std::string& out_path,
                const std::string& from, const std::string& to, long budget,
                const std::string& kernel, double tsp_ratio, int jobs) {
    const auto [img, spec] = op::read_image(in_path);
    const op::ProjectionFormat src_fmt = op::parse_format(from);
    const op::ProjectionFormat dst_fmt = op::parse_format(to);
    op::ProjectionGrid src_grid = input_grid(src_fmt, img, tsp_ratio);
    op::PlanarImage src = img;
    src.mask = op::active_mask(src_grid);
    if (budget == 0) budget = src.active_count();
    op::ProjectionGrid dst_grid = op::default_grid(dst_fmt, budget);
    dst_grid.tsp_back_ratio = tsp_ratio;
    const op::PlanarImage out =
        op::convert(src, src_grid, dst_grid, op::parse_kernel(kernel), jobs);
    op::write_image(out, out_path);
    std::printf("%s %dx%d -> %s %dx%d (%ld active px)\n", from.c_str(), src.width, src.height,
                to.c_str(), out.width, out.height, out.active_count());
    return 0;
}

int run_metric(const std::string& a_path, const std::string& b_path, const std::string& metric,
               const std::string& format, const std::string& channel) {
    const op::PlanarImage a = op::read_image(a_path).first;
    const op::PlanarImage b = op::read_image(b_path).first;
    if (a.width != b.width || a.height != b.height || a.channels != b.channels)
        throw std::invalid_argument("metric: images differ in shape");

    std::vector<std::pair<std::string, op::PlanarImage>> planes;
    if (channel == "y") {
        planes.emplace_back("y", op::y_channel(a));
        planes.emplace_back("y", op::y_channel(b));
    } else {
        static const char* rgb_names[3] = {"r", "g", "b"};
        static const char* yuv_names[3] = {"y", "u", "v"};
        for (int c = 0; c < a.channels; ++c) {
            const char* name = a.channels == 1 ? "y"
                               : a.color == op::ColorModel::yuv ? yuv_names[c]
                                                                : rgb_names[c];
            planes.emplace_back(name, a.plane(c));
            planes.emplace_back(name, b.plane(c));
        }
    }

    op::WeightMap wm;
    if (metric == "ws-psnr") {
        const op::ProjectionFormat f = op::parse_format(format);
        const op::ProjectionGrid grid = op::grid_from_dims(f, a.width, a.height);
        wm = f == op::ProjectionFormat::erp ? op::erp_weights(grid)
                                            : op::solid_angle_weights(grid);
    }
    for (size_t i = 0; i + 1 < planes.size(); i += 2) {
        op::MetricResult r;
        if (metric == "psnr")
            r = op::psnr(planes[i].second, planes[i + 1].second);
        else if (metric == "ws-psnr")
            r = op::ws_psnr(planes[i].second, planes[i + 1].second, wm);
        else if (metric == "ssim")
            r = op::ssim(planes[i].second, planes[i + 1].second);
        else
            throw CLI::ValidationError("--metric must be psnr, ws-psnr or ssim");
        r.channel = planes[i].first;
        print_metric(r);
    }
    return 0;
}

op::PipelineConfig config_from_kv(const std::map<std::string, std::string>& kv,
                                  op::PipelineConfig base) {
    for (const auto& [key, value] : kv) {
        if (key == "kernel") base.kernel = op::parse_kernel(value);
        else if (key == "upscaler") base.upscaler = op::parse_upscaler(value);
        else if (key == "lr_order") base.lr_order = op::parse_lr_order(value);
        else if (key == "wire") base.upscaler.wire = op::parse_wire(value);
        else if (key == "timeout") base.upscaler.timeout_sec = std::stod(value);
        else if (key == "jobs") base.jobs = std::stoi(value);
        else if (key == "dump_dir") base.dump_dir = value;
        else if (key == "formats" || key == "scales" || key == "input" || key == "report" ||
                 key == "style") {
            // handled by the caller
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    return base;
}

int run_pipeline(const std::string& config_path, std::vector<std::string> inputs,
                 std::string formats_csv, std::string scales_csv, const std::string& kernel,
                 const std::string& upscaler, const std::string& lr_order,
                 const std::string& wire, double timeout, int jobs,
                 const std::string& dump_dir, std::string report_path, std::string style) {
    op::MatrixRequest req;
    req.defaults.kernel = op::parse_kernel(kernel);
    req.defaults.upscaler = op::parse_upscaler(upscaler);
    req.defaults.upscaler.wire = op::parse_wire(wire);
    req.defaults.upscaler.timeout_sec = timeout;
    req.defaults.lr_order = op::parse_lr_order(lr_order);
    req.defaults.jobs = jobs;
    req.defaults.dump_dir = dump_dir;

    if (!config_path.empty()) {
        const op::ConfigFile cfg = op::parse_config(read_text_file(config_path));
        req.defaults = config_from_kv(cfg.globals, req.defaults);
        if (cfg.has("formats")) formats_csv = cfg.get("formats");
        if (cfg.has("scales")) scales_csv = cfg.get("scales");
        if (cfg.has("input"))
            for (const std::string& p : op::split_list(cfg.get("input"))) inputs.push_back(p);
        if (cfg.has("report")) report_path = cfg.get("report");
        if (cfg.has("style")) style = cfg.get("style");
        for (const auto& [name, kv] : cfg.sections)
            req.overrides[name] = config_from_kv(kv, req.defaults);
    }
    if (inputs.empty())
        throw CLI::ValidationError("pipeline needs at least one input (flag or config)");

    for (const std::string& p : inputs) {
        req.images.push_back(op::read_image(p).first);
        req.names.push_back(std::filesystem::path(p).stem().string());
    }
    for (const std::string& f : op::split_list(formats_csv))
        req.formats.push_back(op::parse_format(f));
    for (const std::string& s : op::split_list(scales_csv))
        req.scales.push_back(op::validate_scale(std::stoi(s)));

    const op::PipelineReport rep = op::run_matrix(req);
    const std::string text = op::render_report(rep, style);
    if (report_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream out(report_path);
        if (!out) throw op::IoError("cannot write " + report_path);
        out << text;
        std::printf("report written to %s\n", report_path.c_str());
    }
    int failures = 0;
    for (const op::PipelineCell& c : rep.rows) {
        if (!c.ok) {
            ++failures;
            std::fprintf(stderr, "cell %s failed: %s\n",
                         op::cell_key(c.format, c.scale).c_str(), c.error.c_str());
        }
        if (!c.log.empty()) std::fprintf(stderr, "%s", c.log.c_str());
    }
    return failures == static_cast<int>(rep.rows.size()) && failures > 0 ? 3 : 0;
}

int run_analyze(const std::string& format, long budget, const std::string& heatmap_path,
                const std::string& stats_path, const std::string& style, int jobs) {
    const op::ProjectionGrid grid = op::default_grid(op::parse_format(format), budget);
    const op::WeightMap wm = op::density_map(grid, jobs);
    const op::ActiveMask mask = op::active_mask(grid);
    const op::DistortionStats stats = op::distortion_stats_of(wm, mask);
    const std::string text = op::render_stats(grid, stats, style);
    if (!heatmap_path.empty()) {
        op::write_image(op::heatmap_image(wm, mask), heatmap_path);
        std::printf("heatmap written to %s\n", heatmap_path.c_str());
    }
    if (!stats_path.empty()) {
        std::ofstream out(stats_path);
        if (!out) throw op::IoError("cannot write " + stats_path);
        out << text;
        std::printf("stats written to %s\n", stats_path.c_str());
    }
    std::fputs(text.c_str(), stdout);
    return 0;
}

int run_gen(const std::string& kind, const std::string& format, long budget, unsigned seed,
            int channels, const std::string& out_path) {
    const op::ProjectionGrid grid = op::default_grid(op::parse_format(format), budget);
    const op::PlanarImage img =
        op::gen_pattern(op::parse_pattern(kind), grid, seed, channels);
    op::write_image(img, out_path);
    std::printf("%s %s %dx%d written to %s\n", kind.c_str(), format.c_str(), img.width,
                img.height, out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"omniproj: 360-degree projection toolkit and SR evaluation harness"};
    app.require_subcommand(1);

    // convert
    auto* convert = app.add_subcommand("convert", "Convert an image between projections");
    std::string in_path, out_path, from = "erp", to = "eac", kernel = "bicubic";
    long budget = 0;
    double tsp_ratio = 1.0 / 3.0;
    int jobs = 0;
    convert->add_option("input", in_path, "input image (png/y4m/yuv)")->required();
    convert->add_option("output", out_path, "output image")->required();
    convert->add_option("--from", from, std::string("source format: ") + kFormatList)
        ->required();
    convert->add_option("--to", to, std::string("target format: ") + kFormatList)->required();
    convert->add_option("--budget", budget,
                        "active pixel budget of the output (default: match input)");
    convert->add_option("--kernel", kernel, "nearest|bilinear|bicubic|lanczos3");
    convert->add_option("--tsp-ratio", tsp_ratio, "TSP back-face ratio (default 1/3)");
    convert->add_option("--jobs", jobs, "worker threads (default: hardware)");

    // metric
    auto* metric = app.add_subcommand("metric", "Quality metrics between two images");
    std::string a_path, b_path, metric_name = "psnr", metric_fmt = "erp", channel = "y";
    metric->add_option("a", a_path, "reference image")->required();
    metric->add_option("b", b_path, "distorted image")->required();
    metric->add_option("--metric", metric_name, "psnr|ws-psnr|ssim");
    metric->add_option("--format", metric_fmt,
                       std::string("grid format for ws-psnr weights: ") + kFormatList);
    metric->add_option("--channel", channel, "y|all");

    // pipeline
    auto* pipeline = app.add_subcommand(
        "pipeline", "Round-trip SR evaluation matrix (project, upscale, back-project, score)");
    std::string config_path, formats_csv = "erp,cmp,eac,isp,ohp,tsp,ssp", scales_csv = "2,3,4";
    std::string upscaler = "builtin:bicubic", lr_order = "downscale-then-project";
    std::string wire = "png", dump_dir, report_path, style = "csv", pipe_kernel = "bicubic";
    double timeout = 300.0;
    int pipe_jobs = 0;
    std::vector<std::string> inputs;
    pipeline->add_option("--config", config_path, "run configuration file");
    pipeline->add_option("--input", inputs, "HR ERP input image(s)");
    pipeline->add_option("--formats", formats_csv, std::string("formats: ") + kFormatList);
    pipeline->add_option("--scales", scales_csv, std::string("scales: ") + kScaleList);
    pipeline->add_option("--kernel", pipe_kernel, "conversion kernel (default bicubic)");
    pipeline->add_option("--upscaler", upscaler,
                         "builtin:<kernel> or external:<cmd with {in} {out} {scale}>");
    pipeline->add_option("--lr-order", lr_order,
                         "downscale-then-project|project-then-downscale");
    pipeline->add_option("--wire", wire, "external handoff format: png|y4m");
    pipeline->add_option("--timeout", timeout, "external upscaler timeout seconds");
    pipeline->add_option("--jobs", pipe_jobs, "concurrent matrix cells");
    pipeline->add_option("--dump-dir", dump_dir, "dump per-stage intermediates here");
    pipeline->add_option("--out", report_path, "report file (default: stdout)");
    pipeline->add_option("--style", style, "csv|markdown");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Sampling-density map and uniformity stats");
    std::string an_format = "erp", heatmap_path, stats_path, an_style = "csv";
    long an_budget = 131072;
    int an_jobs = 0;
    analyze->add_option("--format", an_format, std::string("format: ") + kFormatList)
        ->required();
    analyze->add_option("--budget", an_budget, "active pixel budget (default 131072)");
    analyze->add_option("--out-heatmap", heatmap_path, "write density heatmap png");
    analyze->add_option("--out-stats", stats_path, "write stats block");
    analyze->add_option("--style", an_style, "csv|markdown");
    analyze->add_option("--jobs", an_jobs, "worker threads");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic sphere-pattern fixture");
    std::string gen_kind = "smooth-harmonic", gen_format = "erp", gen_out;
    long gen_budget = 131072;
    unsigned gen_seed = 1;
    int gen_channels = 1;
    gen->add_option("--kind", gen_kind, "latlon-grid|smooth-harmonic|checker-sphere");
    gen->add_option("--format", gen_format, std::string("format: ") + kFormatList);
    gen->add_option("--budget", gen_budget, "active pixel budget");
    gen->add_option("--seed", gen_seed, "pattern seed (smooth-harmonic seed 0 = constant)");
    gen->add_option("--channels", gen_channels, "1 or 3");
    gen->add_option("--out", gen_out, "output image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*convert)
            return run_convert(in_path, out_path, from, to, budget, kernel, tsp_ratio, jobs);
        if (*metric) return run_metric(a_path, b_path, metric_name, metric_fmt, channel);
        if (*pipeline)
            return run_pipeline(config_path, inputs, formats_csv, scales_csv, pipe_kernel,
                                upscaler, lr_order, wire, timeout, pipe_jobs, dump_dir,
                                report_path, style);
        if (*analyze)
            return run_analyze(an_format, an_budget, heatmap_path, stats_path, an_style,
                               an_jobs);
        if (*gen) return run_gen(gen_kind, gen_format, gen_budget, gen_seed, gen_channels,
                                 gen_out);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const omniproj::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 1;
}
