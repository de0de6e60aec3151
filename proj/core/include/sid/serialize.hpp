#pragma once

#include <string>

#include "json.hpp"
#include "sid/denoiser.hpp"
#include "sid/residual.hpp"
#include "sid/sampler.hpp"
#include "sid/schedule.hpp"
#include "sid/signal.hpp"

namespace sid {

using json = nlohmann::json;

// Schedules: {"sigmas": [...], "sigma0_index": i, "epsilon": e,
//             "steps_per_level": T}
void to_json(json& j, const NoiseSchedule& s);
void from_json(const json& j, NoiseSchedule& s);

// Denoiser specs:
//   {"kind": "gaussian_prior", "mean": x or [...], "variance": v}
//   {"kind": "gmm_prior", "weights": [...], "means": [[...], ...],
//    "variances": [...]}
// Scalar entries in "means" are accepted and treated as broadcast means.
void to_json(json& j, const DenoiserSpec& spec);
void from_json(const json& j, DenoiserSpec& spec);

// Masks: {"observed": [...], "total_len": n}
void to_json(json& j, const Mask& m);
void from_json(const json& j, Mask& m);

void to_json(json& j, const Thresholds& t);
void from_json(const json& j, Thresholds& t);

void to_json(json& j, const ResidualReport& r);
void from_json(const json& j, ResidualReport& r);

// Run configurations: {"mode": "denoise"|"inpaint", "sigma0": ...,
//  "sigma_last": ..., "ratio": ..., "epsilon": ..., "steps_per_level": ...,
//  "sigma_minus_k": ..., "denoiser": {...}, "seed": ..., "chains": ...,
//  "trace_stride": ..., "mask": {...}?}
void to_json(json& j, const RunConfig& c);
void from_json(const json& j, RunConfig& c);

// One-line CSV form of a ResidualReport (schema residual-report-v1).
std::string report_csv_header();
std::string report_csv_row(const ResidualReport& r);

}  // namespace sid
