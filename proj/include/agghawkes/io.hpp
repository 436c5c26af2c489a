#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "agghawkes/aggregate.hpp"
#include "agghawkes/diagnostics.hpp"
#include "agghawkes/mcmc.hpp"
#include "agghawkes/process.hpp"

namespace hawkes::io {

// Jitter applied at ingestion to exactly tied times/locations, U(0, width).
struct JitterConfig {
    bool enabled = true;
    double time_width = 1.0 / 120.0;
    double space_width = 5e-6;
    uint64_t seed = 0;
};

struct IngestReport {
    int64_t jittered_times = 0;
    int64_t jittered_locations = 0;
    std::vector<std::string> warnings;
};

// Event CSV: header `process,t,x,y`; x,y empty for temporal data; process ids
// are 1-based; UTF-8, LF endings.
void write_events_csv(const std::filesystem::path& path, const EventPattern& pattern);
EventPattern read_events_csv(const std::filesystem::path& path, double horizon,
                             std::optional<Window> window, const JitterConfig& jitter,
                             IngestReport* report = nullptr);

// Branching CSV: `child_process,child_index,parent_process,parent_index` with
// -1,-1 for immigrants; indices are 0-based positions within each process's
// time-ordered events.
void write_branching_csv(const std::filesystem::path& path, const EventPattern& pattern,
                         const BranchingStructure& branching);

// Counts CSV `process,bin_t,bin_x,bin_y,count` (zero rows omitted) plus a
// sidecar BinSpec JSON that makes the file self-describing.
void write_counts_csv(const std::filesystem::path& path, const AggregatedCounts& counts);
void write_binspec_json(const std::filesystem::path& path, const BinSpec& spec);
BinSpec read_binspec_json(const std::filesystem::path& path);
AggregatedCounts read_counts_csv(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& binspec_path);

// Posterior CSV in long format: `chain,iteration,param,value`.
void write_posterior_csv(const std::filesystem::path& path,
                         const mcmc::PosteriorSamples& samples);
mcmc::PosteriorSamples read_posterior_csv(const std::filesystem::path& path);

void write_summary_json(const std::filesystem::path& path,
                        const std::map<std::string, ParamSummary>& summary,
                        const mcmc::PosteriorSamples& samples, const mcmc::SamplerConfig& config);

// Latent snapshots for forecasting: parameter draws and event coordinates per
// stored snapshot, plus a meta JSON describing the model surface.
void write_snapshots(const std::filesystem::path& dir, const mcmc::PosteriorSamples& samples,
                     TemporalFamily family, double horizon, const std::optional<Window>& window);
std::vector<std::vector<mcmc::LatentSnapshot>> read_snapshots(const std::filesystem::path& dir);

struct FitConfig {
    int schema_version = 1;
    TemporalFamily kernel_family = TemporalFamily::Exponential;
    mcmc::Priors priors;
    mcmc::SamplerConfig sampler;
};

// Strict parse: unknown keys are errors.
FitConfig read_fit_config(const std::filesystem::path& path);
FitConfig parse_fit_config_json(const std::string& text, const std::string& where);
void write_fit_config(const std::filesystem::path& path, const FitConfig& config);

// Rebuild ModelParams from named posterior values (inverse of param_values).
ModelParams params_from_values(int L, TemporalFamily family, bool spatial,
                               const std::map<std::string, double>& values);

}  // namespace hawkes::io
