// sid: stochastic signal denoising and noisy inpainting by posterior sampling,
// plus residual validation and an exact-posterior comparison harness.
//
// Exit codes: 0 success, 1 verdict failure, 2 usage or validation error,
// 3 numerical divergence.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sid/metrics.hpp"
#include "sid/oracle.hpp"
#include "sid/pnm.hpp"
#include "sid/residual.hpp"
#include "sid/sampler.hpp"
#include "sid/serialize.hpp"

namespace fs = std::filesystem;
using sid::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

// Seed layout of one run: chains use seed + 0 .. seed + chains - 1; the
// synthetic-input and injected-noise streams sit far above any chain index.
constexpr std::uint64_t kSynthSeedOffset = 1000003;
constexpr std::uint64_t kNoiseSeedOffset = 2000003;

constexpr const char* kManifestSchema = "run-manifest-v1";
constexpr const char* kCsvSchema = "residual-report-v1";

// Everything needed to reproduce a denoise/inpaint run bit for bit.
struct JobConfig {
    std::string command;  // "denoise" | "inpaint"
    std::string input;    // PNM path or "synth:HxW[xC]"
    std::string mask_path;
    bool add_noise = false;
    int maxval = 255;
    sid::Thresholds thresholds;
    sid::RunConfig run;
};

void to_json(json& j, const JobConfig& c) {
    j = json{{"command", c.command}, {"input", c.input},   {"add_noise", c.add_noise},
             {"maxval", c.maxval},   {"thresholds", c.thresholds}, {"run", c.run}};
    if (!c.mask_path.empty()) j["mask_path"] = c.mask_path;
}

void from_json(const json& j, JobConfig& c) {
    c.command = j.at("command").get<std::string>();
    c.input = j.at("input").get<std::string>();
    c.mask_path = j.value("mask_path", std::string{});
    c.add_noise = j.at("add_noise").get<bool>();
    c.maxval = j.at("maxval").get<int>();
    c.thresholds = j.at("thresholds").get<sid::Thresholds>();
    c.run = j.at("run").get<sid::RunConfig>();
}

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    json j;
    in >> j;
    return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
}

bool parse_synth_spec(const std::string& input, sid::Shape& shape) {
    if (!input.starts_with("synth:")) return false;
    const std::string dims = input.substr(6);
    int h = 0, w = 0, c = 1;
    char x1 = 0, x2 = 0;
    std::istringstream ss(dims);
    if (!(ss >> h >> x1 >> w) || x1 != 'x') {
        throw std::invalid_argument("bad synthetic input spec \"" + input +
                                    "\", expected synth:HxW or synth:HxWxC");
    }
    if (ss >> x2 >> c) {
        if (x2 != 'x') {
            throw std::invalid_argument("bad synthetic input spec \"" + input + "\"");
        }
    }
    if (!ss.eof() || h <= 0 || w <= 0 || (c != 1 && c != 3)) {
        throw std::invalid_argument("bad synthetic input spec \"" + input + "\"");
    }
    shape = sid::Shape{h, w, c};
    return true;
}

// Synthetic inputs are one draw from the run's prior.
sid::Signal synth_input(const sid::Shape& shape, const sid::DenoiserSpec& spec,
                        std::uint64_t base_seed) {
    const sid::GaussianMixture prior = sid::GaussianMixture::from_spec(spec, shape.size());
    sid::RandomStream stream(base_seed + kSynthSeedOffset);
    std::vector<sid::Signal> draw = sid::direct_posterior_sample(prior, stream, 1);
    return sid::make_signal(std::move(draw[0].values), shape);
}

sid::Mask mask_from_pnm(const sid::Signal& mask_image, const sid::Shape& signal_shape) {
    if (mask_image.shape.height != signal_shape.height ||
        mask_image.shape.width != signal_shape.width) {
        throw std::invalid_argument("mask dimensions " + mask_image.shape.str() +
                                    " do not match input " + signal_shape.str());
    }
    if (mask_image.shape.channels != 1 &&
        mask_image.shape.channels != signal_shape.channels) {
        throw std::invalid_argument("mask must be single-channel or match the input");
    }
    std::vector<std::size_t> observed;
    for (int y = 0; y < signal_shape.height; ++y) {
        for (int x = 0; x < signal_shape.width; ++x) {
            for (int c = 0; c < signal_shape.channels; ++c) {
                const int mc = mask_image.shape.channels == 1 ? 0 : c;
                const std::size_t midx =
                    (static_cast<std::size_t>(y) * signal_shape.width + x) *
                        mask_image.shape.channels +
                    mc;
                if (mask_image[midx] > 0.0) {
                    observed.push_back(
                        (static_cast<std::size_t>(y) * signal_shape.width + x) *
                            signal_shape.channels +
                        c);
                }
            }
        }
    }
    return sid::make_mask(std::move(observed), signal_shape.size());
}

struct SamplingJob {
    JobConfig config;
    fs::path out_dir;
    int jobs = 0;
};

// Shared execution path for denoise, inpaint and replay. Writes one PNM per
// chain, reports.csv and manifest.json into out_dir.
int run_sampling_job(const SamplingJob& job) {
    const JobConfig& cfg = job.config;
    const bool inpainting = cfg.command == "inpaint";

    sid::Shape synth_shape;
    sid::Signal input = parse_synth_spec(cfg.input, synth_shape)
                            ? synth_input(synth_shape, cfg.run.denoiser, cfg.run.seed)
                            : sid::read_pnm_file(cfg.input);

    std::optional<sid::Signal> clean;
    sid::Signal y = input;
    if (cfg.add_noise) {
        clean = input;
        sid::RandomStream noise(cfg.run.seed + kNoiseSeedOffset);
        for (std::size_t j = 0; j < y.size(); ++j) {
            y[j] += cfg.run.sigma0 * noise.normal();
        }
    }

    sid::RunConfig run = cfg.run;
    if (inpainting && !run.mask.has_value()) {
        // Replays carry the mask inside the run config; fresh runs read it here.
        run.mask = mask_from_pnm(sid::read_pnm_file(cfg.mask_path), y.shape);
    }

    fs::create_directories(job.out_dir);
    std::vector<fs::path> written;
    try {
        const std::vector<sid::ChainTrace> traces = sid::run_chains(y, run, job.jobs);
        const sid::NoiseSchedule schedule = run.build_schedule();
        const sid::Mask* report_mask =
            inpainting && run.mask.has_value() ? &*run.mask : nullptr;

        json manifest;
        manifest["tool"] = "sid";
        manifest["schema"] = kManifestSchema;
        manifest["command"] = cfg.command;
        manifest["config"] = cfg;
        manifest["config"]["run"] = run;  // embed the resolved mask for replays
        manifest["schedule"] = schedule;
        manifest["csv"] = "reports.csv";
        manifest["csv_schema"] = kCsvSchema;

        std::vector<std::string> flags;
        if (inpainting && traces.front().mask_empty) flags.push_back("no-observations");
        if (inpainting && traces.front().mask_full) flags.push_back("all-observed");
        manifest["flags"] = flags;

        std::string csv = "chain,seed,output," + sid::report_csv_header() + ",psnr\n";
        json chain_records = json::array();
        const char* ext = y.shape.channels == 3 ? ".ppm" : ".pgm";

        for (std::size_t c = 0; c < traces.size(); ++c) {
            char name[32];
            std::snprintf(name, sizeof(name), "chain_%03zu%s", c, ext);
            const fs::path out_path = job.out_dir / name;
            sid::write_pnm_file(out_path, traces[c].final, /*binary=*/true, cfg.maxval);
            written.push_back(out_path);

            sid::ResidualReport report = sid::validate_residual(
                y, traces[c].final, cfg.run.sigma0, cfg.thresholds, report_mask);
            const double psnr_db =
                clean.has_value() ? sid::psnr(*clean, traces[c].final) : 0.0;

            json rec;
            rec["index"] = c;
            rec["seed"] = cfg.run.seed + c;
            rec["output"] = name;
            rec["residual"] = report;
            if (clean.has_value()) rec["psnr"] = psnr_db;
            chain_records.push_back(rec);

            char psnr_text[32] = "";
            if (clean.has_value()) {
                std::snprintf(psnr_text, sizeof(psnr_text), "%.17g", psnr_db);
            }
            csv += std::to_string(c) + "," + std::to_string(cfg.run.seed + c) + "," +
                   name + "," + sid::report_csv_row(report) + "," + psnr_text + "\n";
        }
        manifest["chains"] = chain_records;

        write_text_file(job.out_dir / "reports.csv", csv);
        write_text_file(job.out_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (...) {
        for (const fs::path& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        throw;
    }
    return kExitOk;
}

int cmd_validate(const fs::path& noisy_path, const fs::path& restored_path, double sigma0,
                 const sid::Thresholds& thresholds, const std::string& mask_path) {
    const sid::Signal noisy = sid::read_pnm_file(noisy_path);
    const sid::Signal restored = sid::read_pnm_file(restored_path);
    std::optional<sid::Mask> mask;
    if (!mask_path.empty()) {
        mask = mask_from_pnm(sid::read_pnm_file(mask_path), noisy.shape);
    }
    const sid::ResidualReport report = sid::validate_residual(
        noisy, restored, sigma0, thresholds, mask.has_value() ? &*mask : nullptr);
    std::cout << json(report).dump(2) << "\n";
    return report.pass() ? kExitOk : kExitVerdict;
}

struct OracleCompareOpts {
    sid::RunConfig run;
    std::vector<double> y_values;
    double mean_se = 3.0;
    double var_tol = 0.07;
    bool check_balance = false;
    double balance_lo = 0.35;
    double balance_hi = 0.65;
    int jobs = 0;
};

int cmd_oracle_compare(const OracleCompareOpts& opts) {
    const std::size_t d = opts.y_values.size();
    const sid::Signal y =
        sid::make_signal(opts.y_values, sid::Shape{1, static_cast<int>(d), 1});

    const std::vector<sid::ChainTrace> traces = sid::run_chains(y, opts.run, opts.jobs);
    const double n = static_cast<double>(traces.size());

    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (const auto& t : traces) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += t.final[j];
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= n;
    for (const auto& t : traces) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = t.final[j] - mean[j];
            var[j] += dev * dev;
        }
    }
    for (std::size_t j = 0; j < d; ++j) var[j] /= (n - 1.0);

    const sid::GaussianMixture prior =
        sid::GaussianMixture::from_spec(opts.run.denoiser, d);
    const sid::GaussianMixture post = sid::exact_posterior(prior, y, opts.run.sigma0);
    const sid::Moments oracle = sid::posterior_moments(post);

    bool pass = true;
    std::vector<double> mean_diff_se(d), var_rel(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double se = std::sqrt(var[j] / n);
        mean_diff_se[j] = std::abs(mean[j] - oracle.mean[j]) / se;
        var_rel[j] = std::abs(var[j] - oracle.variance[j]) / oracle.variance[j];
        if (mean_diff_se[j] > opts.mean_se || var_rel[j] > opts.var_tol) pass = false;
    }

    // Fraction of chains landing nearest each posterior component mean.
    std::vector<double> fractions(post.components(), 0.0);
    if (post.components() >= 2) {
        for (const auto& t : traces) {
            std::size_t best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < post.components(); ++c) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = t.final[j] - post.means[c][j];
                    d2 += diff * diff;
                }
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = c;
                }
            }
            fractions[best] += 1.0 / n;
        }
        if (opts.check_balance &&
            (fractions[0] < opts.balance_lo || fractions[0] > opts.balance_hi)) {
            pass = false;
        }
    }

    json out;
    out["chains"] = traces.size();
    out["langevin"] = {{"mean", mean}, {"variance", var}};
    out["oracle"] = {{"mean", oracle.mean}, {"variance", oracle.variance}};
    out["standardized_mean_diff"] = mean_diff_se;
    out["variance_rel_diff"] = var_rel;
    out["mode_fractions"] = fractions;
    out["pass"] = pass;
    std::cout << out.dump(2) << "\n";
    return pass ? kExitOk : kExitVerdict;
}

void add_schedule_options(CLI::App* cmd, sid::RunConfig& run) {
    cmd->add_option("--ratio", run.ratio, "Geometric level ratio in (0,1)")
        ->capture_default_str();
    cmd->add_option("--sigma-last", run.sigma_last, "Smallest noise level")
        ->capture_default_str();
    cmd->add_option("--epsilon", run.epsilon, "Step-size scale")->capture_default_str();
    cmd->add_option("--steps", run.steps_per_level, "Inner steps per level")
        ->capture_default_str();
}

void add_threshold_options(CLI::App* cmd, sid::Thresholds& t) {
    cmd->add_option("--rho-max", t.rho_max, "Whiteness verdict bound on |rho|")
        ->capture_default_str();
    cmd->add_option("--p-min", t.p_min, "Normality verdict bound on the p-value")
        ->capture_default_str();
    cmd->add_option("--std-tol", t.std_rel_tol, "Relative tolerance on residual std")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic denoising and noisy inpainting by posterior sampling"};
    app.require_subcommand(1);

    // ---- denoise ----
    JobConfig dn;
    dn.command = "denoise";
    std::string dn_denoiser, dn_out_dir;
    int dn_jobs = 0;
    auto* denoise = app.add_subcommand("denoise", "Sample posterior reconstructions");
    denoise->add_option("--input", dn.input, "Input PNM path or synth:HxW[xC]")
        ->required();
    denoise->add_option("--sigma0", dn.run.sigma0, "Observation noise std")->required();
    denoise->add_option("--denoiser", dn_denoiser, "Prior spec JSON path")->required();
    denoise->add_option("--out-dir", dn_out_dir, "Output directory")->required();
    denoise->add_option("--seed", dn.run.seed, "Base seed")->capture_default_str();
    denoise->add_option("--chains", dn.run.chains, "Chain count")->capture_default_str();
    denoise->add_option("--trace-stride", dn.run.trace_stride, "Snapshot stride")
        ->capture_default_str();
    denoise->add_flag("--add-noise", dn.add_noise,
                      "Corrupt a clean input with N(0, sigma0^2) first");
    denoise->add_option("--maxval", dn.maxval, "PNM maxval for outputs")
        ->capture_default_str();
    denoise->add_option("--jobs", dn_jobs, "Worker threads (0 = hardware)")
        ->capture_default_str();
    add_schedule_options(denoise, dn.run);
    add_threshold_options(denoise, dn.thresholds);

    // ---- inpaint ----
    JobConfig ip;
    ip.command = "inpaint";
    std::string ip_denoiser, ip_out_dir;
    int ip_jobs = 0;
    auto* inpaint =
        app.add_subcommand("inpaint", "Recover missing pixels from noisy partial data");
    inpaint->add_option("--input", ip.input, "Input PNM path or synth:HxW[xC]")
        ->required();
    inpaint->add_option("--mask", ip.mask_path, "Mask PNM path (nonzero = observed)")
        ->required();
    inpaint->add_option("--sigma0", ip.run.sigma0, "Observation noise std")->required();
    inpaint
        ->add_option("--sigma-minus-k", ip.run.sigma_minus_k,
                     "Top noise level of the extended schedule")
        ->required();
    inpaint->add_option("--denoiser", ip_denoiser, "Prior spec JSON path")->required();
    inpaint->add_option("--out-dir", ip_out_dir, "Output directory")->required();
    inpaint->add_option("--seed", ip.run.seed, "Base seed")->capture_default_str();
    inpaint->add_option("--chains", ip.run.chains, "Chain count")->capture_default_str();
    inpaint->add_option("--trace-stride", ip.run.trace_stride, "Snapshot stride")
        ->capture_default_str();
    inpaint->add_flag("--add-noise", ip.add_noise,
                      "Corrupt a clean input with N(0, sigma0^2) first");
    inpaint->add_option("--maxval", ip.maxval, "PNM maxval for outputs")
        ->capture_default_str();
    inpaint->add_option("--jobs", ip_jobs, "Worker threads (0 = hardware)")
        ->capture_default_str();
    add_schedule_options(inpaint, ip.run);
    add_threshold_options(inpaint, ip.thresholds);

    // ---- validate ----
    std::string v_noisy, v_restored, v_mask;
    double v_sigma0 = 0.0;
    sid::Thresholds v_thresholds;
    auto* validate =
        app.add_subcommand("validate", "Residual whiteness/normality/energy tests");
    validate->add_option("--noisy", v_noisy, "Noisy PNM path")->required();
    validate->add_option("--restored", v_restored, "Restored PNM path")->required();
    validate->add_option("--sigma0", v_sigma0, "Observation noise std")->required();
    validate->add_option("--mask", v_mask, "Optional mask PNM (nonzero = observed)");
    add_threshold_options(validate, v_thresholds);

    // ---- oracle-compare ----
    OracleCompareOpts oc;
    std::string oc_denoiser, oc_y;
    auto* oracle_compare = app.add_subcommand(
        "oracle-compare", "Chain moments against the exact posterior");
    oracle_compare->add_option("--denoiser", oc_denoiser, "Prior spec JSON path")
        ->required();
    oracle_compare->add_option("--y", oc_y, "Observation values, comma separated")
        ->required();
    oracle_compare->add_option("--sigma0", oc.run.sigma0, "Observation noise std")
        ->required();
    oracle_compare->add_option("--chains", oc.run.chains, "Chain count")
        ->capture_default_str();
    oracle_compare->add_option("--seed", oc.run.seed, "Base seed")->capture_default_str();
    oracle_compare->add_option("--jobs", oc.jobs, "Worker threads (0 = hardware)")
        ->capture_default_str();
    oracle_compare
        ->add_option("--mean-se", oc.mean_se, "Allowed standardized mean difference")
        ->capture_default_str();
    oracle_compare
        ->add_option("--var-tol", oc.var_tol, "Allowed relative variance difference")
        ->capture_default_str();
    oracle_compare->add_flag("--check-balance", oc.check_balance,
                             "Require the first mode fraction inside the balance band");
    oracle_compare->add_option("--balance-lo", oc.balance_lo, "Balance band lower edge")
        ->capture_default_str();
    oracle_compare->add_option("--balance-hi", oc.balance_hi, "Balance band upper edge")
        ->capture_default_str();
    add_schedule_options(oracle_compare, oc.run);

    // ---- replay ----
    std::string rp_manifest, rp_out_dir;
    int rp_jobs = 0;
    auto* replay = app.add_subcommand("replay", "Re-run a manifest bit-exactly");
    replay->add_option("--manifest", rp_manifest, "manifest.json path")->required();
    replay->add_option("--out-dir", rp_out_dir, "Output directory")->required();
    replay->add_option("--jobs", rp_jobs, "Worker threads (0 = hardware)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (denoise->parsed()) {
            if (!(dn.run.sigma0 > 0.0)) {
                throw std::invalid_argument("--sigma0 must be positive");
            }
            dn.run.mode = sid::RunMode::denoise;
            dn.run.denoiser = load_json_file(dn_denoiser).get<sid::DenoiserSpec>();
            return run_sampling_job({dn, fs::path(dn_out_dir), dn_jobs});
        }
        if (inpaint->parsed()) {
            if (!(ip.run.sigma0 > 0.0)) {
                throw std::invalid_argument("--sigma0 must be positive");
            }
            ip.run.mode = sid::RunMode::inpaint;
            ip.run.denoiser = load_json_file(ip_denoiser).get<sid::DenoiserSpec>();
            return run_sampling_job({ip, fs::path(ip_out_dir), ip_jobs});
        }
        if (validate->parsed()) {
            if (!(v_sigma0 > 0.0)) {
                throw std::invalid_argument("--sigma0 must be positive");
            }
            return cmd_validate(v_noisy, v_restored, v_sigma0, v_thresholds, v_mask);
        }
        if (oracle_compare->parsed()) {
            if (!(oc.run.sigma0 > 0.0)) {
                throw std::invalid_argument("--sigma0 must be positive");
            }
            oc.run.mode = sid::RunMode::denoise;
            oc.run.denoiser = load_json_file(oc_denoiser).get<sid::DenoiserSpec>();
            std::istringstream ss(oc_y);
            std::string token;
            while (std::getline(ss, token, ',')) {
                oc.y_values.push_back(std::stod(token));
            }
            if (oc.y_values.empty()) {
                throw std::invalid_argument("--y must list at least one value");
            }
            return cmd_oracle_compare(oc);
        }
        if (replay->parsed()) {
            const json manifest = load_json_file(rp_manifest);
            if (manifest.value("schema", std::string{}) != kManifestSchema) {
                throw std::invalid_argument("unsupported manifest schema");
            }
            const JobConfig cfg = manifest.at("config").get<JobConfig>();
            return run_sampling_job({cfg, fs::path(rp_out_dir), rp_jobs});
        }
    } catch (const sid::DivergenceError& e) {
        std::cerr << "sid: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "sid: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
