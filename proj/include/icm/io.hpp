#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "icm/core.hpp"
#include "icm/evaluation.hpp"
#include "icm/metrics.hpp"
#include "icm/predictor.hpp"
#include "icm/simulator.hpp"

namespace icm {

/// Decimal text with 17 significant digits; round-trips every finite double.
std::string format_double(double x);

std::string events_csv(const std::vector<SubjectRecord>& records);
std::string longitudinal_csv(const std::vector<SubjectRecord>& records);
std::string truth_csv(const std::vector<SubjectRecord>& records, const std::vector<TrueOutcome>& truth);

/// Parses the events CSV and joins the longitudinal rows by subject id. Every
/// record is validated.
std::vector<SubjectRecord> parse_dataset(const std::string& events, const std::string& longitudinal);

/// Truth rows aligned with `records` by subject id.
std::vector<TrueOutcome> parse_truth(const std::string& text, const std::vector<SubjectRecord>& records);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

struct ReplicateFiles {
  std::string events;
  std::string longitudinal;
  std::string truth;
};

ReplicateFiles replicate_file_names(std::size_t replicate);

/// Writes the events, longitudinal and truth CSVs of one replicate.
void write_replicate(const std::filesystem::path& dir, std::size_t replicate,
                     const std::vector<SimulatedSubject>& subjects);

struct Manifest {
  SimulationConfig config;
  std::vector<ReplicateFiles> files;
  // random effects per replicate, aligned with the events rows
  std::vector<std::vector<std::array<double, 4>>> random_effects;
};

std::string manifest_json(const Manifest& m);
Manifest parse_manifest(const std::string& text);

/// Profiles for `records`: age and density from the records, random effects
/// from the manifest when given, otherwise zero.
std::vector<SubjectProfile> profiles_for(const std::vector<SubjectRecord>& records, const Manifest* manifest,
                                         std::size_t replicate);

std::string reports_json(const std::vector<MetricsReport>& reports);
std::string roc_csv(const RocCurve& curve);
std::string comparison_json(const ComparisonSummary& summary);
std::string comparison_csv(const ComparisonSummary& summary);

}  // namespace icm
