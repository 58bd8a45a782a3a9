#pragma once

#include <string>
#include <vector>

#include "cmm/pipeline.hpp"
#include "cmm/series.hpp"

namespace cmm {

enum class Direction { Up, Down, Flat };

struct Movement {
    Direction direction = Direction::Flat;
    double pct_change = 0.0;  // percent from point i to i+1
};

struct SFDConfig {
    double flat_threshold = 1.0;      // percent band treated as no movement
    double pct_diff_threshold = 5.0;  // percentage points
    double similarity_ratio = 0.3;    // max normalized SFD within a group
    std::string representative;       // series id whose sets are transferred
};

void validate(const SFDConfig& config);

/// Reads the "sfd" object of a config JSON (defaults when absent).
SFDConfig sfd_config_from_json(const std::string& text);

/// Step-wise movements: pct = 100*(v[i+1]-v[i])/v[i], FLAT when |pct| is
/// inside the flat band.
std::vector<Movement> movements(std::span<const double> series, const SFDConfig& config);

/// Sales Frequency Difference over the common prefix of P and Q: +1 per step
/// whose directions disagree, +1 per same-direction step whose percentage
/// changes differ by more than the threshold.
int sfd(std::span<const double> p, std::span<const double> q, const SFDConfig& config);

/// SFD scaled to [0,1] by the number of compared steps.
double normalized_sfd(std::span<const double> p, std::span<const double> q,
                      const SFDConfig& config);

struct SeriesGroup {
    std::vector<std::size_t> members;  // indices into the input list, input order
    std::string representative;       // series id
};

struct GroupingResult {
    std::vector<std::vector<double>> matrix;  // normalized SFD, symmetric
    std::vector<SeriesGroup> groups;
};

/// Single-linkage grouping: series join a group when some member is within
/// the similarity ratio. The representative is the config-named member when
/// present, otherwise the group's first member.
GroupingResult group_series(const std::vector<TimeSeries>& list, const SFDConfig& config,
                            int threads = 1);

std::string sfd_matrix_to_csv(const std::vector<TimeSeries>& list,
                              const std::vector<std::vector<double>>& matrix);

/// Evaluates `target` with the source's consistent sets; no mining runs on
/// the target, atomic models are refit on its components.
ForecastReport transfer(const ConsistentSets& source_good, const ConsistentSets& source_bad,
                        const std::string& source_id, const TimeSeries& target,
                        const PipelineConfig& config);

}  // namespace cmm
