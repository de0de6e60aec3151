#include "sid/serialize.hpp"

#include <cinttypes>
#include <cstdio>

namespace sid {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::vector<double>> parse_means(const json& j) {
    std::vector<std::vector<double>> means;
    for (const auto& entry : j) {
        if (entry.is_number()) {
            means.push_back({entry.get<double>()});
        } else {
            means.push_back(entry.get<std::vector<double>>());
        }
    }
    return means;
}

}  // namespace

void to_json(json& j, const NoiseSchedule& s) {
    j = json{{"sigmas", s.sigmas},
             {"sigma0_index", s.sigma0_index},
             {"epsilon", s.epsilon},
             {"steps_per_level", s.steps_per_level}};
}

void from_json(const json& j, NoiseSchedule& s) {
    s.sigmas = j.at("sigmas").get<std::vector<double>>();
    s.sigma0_index = j.at("sigma0_index").get<int>();
    s.epsilon = j.at("epsilon").get<double>();
    s.steps_per_level = j.at("steps_per_level").get<int>();
    s.validate();
}

void to_json(json& j, const DenoiserSpec& spec) {
    if (spec.kind == PriorKind::gaussian) {
        j = json{{"kind", "gaussian_prior"},
                 {"mean", spec.means[0]},
                 {"variance", spec.variances[0]}};
    } else {
        j = json{{"kind", "gmm_prior"},
                 {"weights", spec.weights},
                 {"means", spec.means},
                 {"variances", spec.variances}};
    }
}

void from_json(const json& j, DenoiserSpec& spec) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian_prior") {
        std::vector<double> mean;
        const auto& m = j.at("mean");
        if (m.is_number()) {
            mean = {m.get<double>()};
        } else {
            mean = m.get<std::vector<double>>();
        }
        spec = DenoiserSpec::gaussian_prior(std::move(mean), j.at("variance").get<double>());
    } else if (kind == "gmm_prior") {
        spec = DenoiserSpec::gmm_prior(j.at("weights").get<std::vector<double>>(),
                                       parse_means(j.at("means")),
                                       j.at("variances").get<std::vector<double>>());
    } else {
        throw std::invalid_argument("DenoiserSpec: unknown kind \"" + kind + "\"");
    }
}

void to_json(json& j, const Mask& m) {
    j = json{{"observed", m.observed}, {"total_len", m.total_len}};
}

void from_json(const json& j, Mask& m) {
    m = make_mask(j.at("observed").get<std::vector<std::size_t>>(),
                  j.at("total_len").get<std::size_t>());
}

void to_json(json& j, const Thresholds& t) {
    j = json{{"rho_max", t.rho_max}, {"p_min", t.p_min}, {"std_rel_tol", t.std_rel_tol}};
}

void from_json(const json& j, Thresholds& t) {
    t.rho_max = j.value("rho_max", 0.05);
    t.p_min = j.value("p_min", 0.05);
    t.std_rel_tol = j.value("std_rel_tol", 0.05);
}

void to_json(json& j, const ResidualReport& r) {
    j = json{{"max_abs_rho", r.max_abs_rho},
             {"rho_direction", {r.rho_direction.dy, r.rho_direction.dx}},
             {"normality_p", r.normality_p},
             {"empirical_std", r.empirical_std},
             {"sigma0", r.sigma0},
             {"white", r.white},
             {"gaussian", r.gaussian},
             {"energy_ok", r.energy_ok},
             {"degenerate", r.degenerate},
             {"pass", r.pass()}};
}

void from_json(const json& j, ResidualReport& r) {
    r.max_abs_rho = j.at("max_abs_rho").get<double>();
    const auto dir = j.at("rho_direction").get<std::vector<int>>();
    r.rho_direction = Offset{dir.at(0), dir.at(1)};
    r.normality_p = j.at("normality_p").get<double>();
    r.empirical_std = j.at("empirical_std").get<double>();
    r.sigma0 = j.at("sigma0").get<double>();
    r.white = j.at("white").get<bool>();
    r.gaussian = j.at("gaussian").get<bool>();
    r.energy_ok = j.at("energy_ok").get<bool>();
    r.degenerate = j.at("degenerate").get<bool>();
}

void to_json(json& j, const RunConfig& c) {
    j = json{{"mode", c.mode == RunMode::denoise ? "denoise" : "inpaint"},
             {"sigma0", c.sigma0},
             {"sigma_last", c.sigma_last},
             {"ratio", c.ratio},
             {"epsilon", c.epsilon},
             {"steps_per_level", c.steps_per_level},
             {"sigma_minus_k", c.sigma_minus_k},
             {"denoiser", c.denoiser},
             {"seed", c.seed},
             {"chains", c.chains},
             {"trace_stride", c.trace_stride}};
    if (c.mask.has_value()) {
        j["mask"] = *c.mask;
    }
}

void from_json(const json& j, RunConfig& c) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "denoise") {
        c.mode = RunMode::denoise;
    } else if (mode == "inpaint") {
        c.mode = RunMode::inpaint;
    } else {
        throw std::invalid_argument("RunConfig: unknown mode \"" + mode + "\"");
    }
    c.sigma0 = j.at("sigma0").get<double>();
    c.sigma_last = j.value("sigma_last", 0.01);
    c.ratio = j.value("ratio", 0.982);
    c.epsilon = j.value("epsilon", 3.3e-6);
    c.steps_per_level = j.value("steps_per_level", 5);
    c.sigma_minus_k = j.value("sigma_minus_k", 0.0);
    c.denoiser = j.at("denoiser").get<DenoiserSpec>();
    c.seed = j.value("seed", std::uint64_t{0});
    c.chains = j.value("chains", 1);
    c.trace_stride = j.value("trace_stride", 0);
    if (j.contains("mask")) {
        c.mask = j.at("mask").get<Mask>();
    } else {
        c.mask.reset();
    }
}

std::string report_csv_header() {
    return "max_abs_rho,rho_dy,rho_dx,normality_p,empirical_std,sigma0,white,gaussian,"
           "energy_ok,degenerate,pass";
}

std::string report_csv_row(const ResidualReport& r) {
    std::string row;
    row += fmt_double(r.max_abs_rho);
    row += "," + std::to_string(r.rho_direction.dy);
    row += "," + std::to_string(r.rho_direction.dx);
    row += "," + fmt_double(r.normality_p);
    row += "," + fmt_double(r.empirical_std);
    row += "," + fmt_double(r.sigma0);
    row += std::string(",") + (r.white ? "1" : "0");
    row += std::string(",") + (r.gaussian ? "1" : "0");
    row += std::string(",") + (r.energy_ok ? "1" : "0");
    row += std::string(",") + (r.degenerate ? "1" : "0");
    row += std::string(",") + (r.pass() ? "1" : "0");
    return row;
}

}  // namespace sid
