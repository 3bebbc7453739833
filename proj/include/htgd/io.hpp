#pragma once

// File formats. Signals: CSV `j,channel,re,im`, 1-based j and channel.
// Masks: JSON array of 1-based sample indices. Models: JSON object with
// `freqs`, `amps` (K x L), `phases` (K x L), `is_ca`.
// All readers throw IoError naming the file and, where known, the line.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "htgd/descent.hpp"
#include "htgd/experiments.hpp"
#include "htgd/retrieval.hpp"
#include "htgd/signal_model.hpp"

namespace htgd::io {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);

/// Writes every entry, or only the rows listed in `rows` (0-based) if given.
std::string signal_csv(const Eigen::MatrixXcd& x, const std::vector<Index>* rows = nullptr);
/// Missing (j, channel) entries read as zero. With `rows` >= 0 the matrix has
/// exactly that many rows and larger j is an error.
Eigen::MatrixXcd parse_signal_csv(std::string_view text, Index rows = -1, std::string_view source = "<csv>");
Eigen::MatrixXcd read_signal_csv(const fs::path& path, Index rows = -1);

std::string mask_json(const SamplingMask& mask);
/// Returns 0-based indices; validation against N is left to make_mask.
std::vector<Index> parse_mask_json(std::string_view text, std::string_view source = "<mask>");
std::vector<Index> read_mask_json(const fs::path& path);

std::string model_json(const SpectralModel& model);
SpectralModel parse_model_json(std::string_view text, std::string_view source = "<model>");
SpectralModel read_model_json(const fs::path& path);

std::string report_json(const SolverReport& rep, const ProblemDims& dims, Method method, const SolverConfig& cfg);
std::string frequencies_json(const FrequencyEstimate& est);

/// Experiment spec files. Unknown keys and malformed JSON are rejected; the
/// message carries "line:column" for syntax errors.
PhaseGridSpec parse_phase_grid_spec(std::string_view text, std::string_view source = "<spec>");
TimingSpec parse_timing_spec(std::string_view text, std::string_view source = "<spec>");

}  // namespace htgd::io
