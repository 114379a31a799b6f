#include "icm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "icm/error.hpp"

namespace icm {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& header,
                                                const char* what) {
  std::stringstream ss(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool seen_header = false;
  std::size_t lineno = 0;
  const std::size_t columns = split(header).size();
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) throw Error(ErrorKind::Parse, std::string(what) + ": expected header '" + header + "'");
      seen_header = true;
      continue;
    }
    auto cells = split(line);
    if (cells.size() != columns) {
      throw Error(ErrorKind::Parse, std::string(what) + " line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(columns) + " fields");
    }
    rows.push_back(std::move(cells));
  }
  if (!seen_header) throw Error(ErrorKind::Parse, std::string(what) + ": missing header");
  return rows;
}

double parse_number(const std::string& s, const char* field) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorKind::Parse, std::string("invalid number '") + s + "' for " + field);
  }
  return v;
}

std::optional<double> parse_optional(const std::string& s, const char* field) {
  if (s.empty()) return std::nullopt;
  return parse_number(s, field);
}

constexpr const char* kEventsHeader = "subject_id,t_last_neg,t_pos,t_trt,t_cen,delta,age,density";
constexpr const char* kLongitudinalHeader = "subject_id,time,psa_log2";
constexpr const char* kTruthHeader = "subject_id,t_prg_star,t_trt_star";

}  // namespace

std::string events_csv(const std::vector<SubjectRecord>& records) {
  std::string out = std::string(kEventsHeader) + "\n";
  for (const auto& r : records) {
    out += r.id + "," + format_double(r.t_last_neg) + "," + opt(r.t_pos) + "," + opt(r.t_trt) + "," + opt(r.t_cen) +
           "," + std::to_string(static_cast<int>(r.delta)) + "," + format_double(r.age) + "," +
           format_double(r.density) + "\n";
  }
  return out;
}

std::string longitudinal_csv(const std::vector<SubjectRecord>& records) {
  std::string out = std::string(kLongitudinalHeader) + "\n";
  for (const auto& r : records) {
    for (const auto& o : r.psa) out += r.id + "," + format_double(o.time) + "," + format_double(o.value) + "\n";
  }
  return out;
}

std::string truth_csv(const std::vector<SubjectRecord>& records, const std::vector<TrueOutcome>& truth) {
  if (records.size() != truth.size()) throw Error(ErrorKind::InvalidArgument, "records/truth length mismatch");
  std::string out = std::string(kTruthHeader) + "\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out += records[i].id + "," + format_double(truth[i].t_prg_star) + "," + format_double(truth[i].t_trt_star) + "\n";
  }
  return out;
}

std::vector<SubjectRecord> parse_dataset(const std::string& events, const std::string& longitudinal) {
  std::vector<SubjectRecord> records;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& c : parse_csv(events, kEventsHeader, "events CSV")) {
    SubjectRecord r;
    r.id = c[0];
    if (r.id.empty()) throw Error(ErrorKind::Parse, "events CSV: empty subject_id");
    r.t_last_neg = parse_number(c[1], "t_last_neg");
    r.t_pos = parse_optional(c[2], "t_pos");
    r.t_trt = parse_optional(c[3], "t_trt");
    r.t_cen = parse_optional(c[4], "t_cen");
    if (c[5] == "0") r.delta = EventKind::Censored;
    else if (c[5] == "1") r.delta = EventKind::Progression;
    else if (c[5] == "2") r.delta = EventKind::Treatment;
    else throw Error(ErrorKind::Parse, "events CSV: delta must be 0, 1 or 2 (got '" + c[5] + "')");
    r.age = parse_number(c[6], "age");
    r.density = parse_number(c[7], "density");
    if (!index.emplace(r.id, records.size()).second) {
      throw Error(ErrorKind::Parse, "events CSV: duplicate subject_id " + r.id);
    }
    records.push_back(std::move(r));
  }
  for (const auto& c : parse_csv(longitudinal, kLongitudinalHeader, "longitudinal CSV")) {
    auto it = index.find(c[0]);
    if (it == index.end()) throw Error(ErrorKind::Parse, "longitudinal CSV: unknown subject_id " + c[0]);
    records[it->second].psa.push_back({parse_number(c[1], "time"), parse_number(c[2], "psa_log2")});
  }
  for (const auto& r : records) validate_record(r);
  return records;
}

std::vector<TrueOutcome> parse_truth(const std::string& text, const std::vector<SubjectRecord>& records) {
  std::unordered_map<std::string, TrueOutcome> by_id;
  for (const auto& c : parse_csv(text, kTruthHeader, "truth CSV")) {
    by_id[c[0]] = {parse_number(c[1], "t_prg_star"), parse_number(c[2], "t_trt_star")};
  }
  std::vector<TrueOutcome> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    auto it = by_id.find(r.id);
    if (it == by_id.end()) throw Error(ErrorKind::MissingTruth, "truth CSV has no row for " + r.id);
    out.push_back(it->second);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

ReplicateFiles replicate_file_names(std::size_t replicate) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", replicate);
  const std::string tag(buf);
  return {"events_" + tag + ".csv", "longitudinal_" + tag + ".csv", "truth_" + tag + ".csv"};
}

void write_replicate(const std::filesystem::path& dir, std::size_t replicate,
                     const std::vector<SimulatedSubject>& subjects) {
  std::vector<SubjectRecord> records;
  std::vector<TrueOutcome> truth;
  records.reserve(subjects.size());
  truth.reserve(subjects.size());
  for (const auto& s : subjects) {
    records.push_back(s.record);
    truth.push_back(s.truth);
  }
  const auto names = replicate_file_names(replicate);
  write_file(dir / names.events, events_csv(records));
  write_file(dir / names.longitudinal, longitudinal_csv(records));
  write_file(dir / names.truth, truth_csv(records, truth));
}

std::string manifest_json(const Manifest& m) {
  json j;
  const auto& c = m.config;
  j["seed"] = c.seed;
  j["schedule"] = c.schedule.name();
  j["n_subjects"] = c.n_subjects;
  j["n_replicates"] = c.n_replicates;
  j["censoring_rate"] = c.censoring_rate;
  j["admin_horizon"] = c.admin_horizon;
  j["psa_interval"] = c.psa_interval;
  j["params_hash"] = parameters_hash(c.params);
  j["params"] = json::parse(to_json(c.params));
  json reps = json::array();
  for (std::size_t i = 0; i < m.files.size(); ++i) {
    json r;
    r["index"] = i;
    r["events"] = m.files[i].events;
    r["longitudinal"] = m.files[i].longitudinal;
    r["truth"] = m.files[i].truth;
    json u = json::array();
    if (i < m.random_effects.size()) {
      for (const auto& v : m.random_effects[i]) u.push_back(v);
    }
    r["random_effects"] = std::move(u);
    reps.push_back(std::move(r));
  }
  j["replicates"] = std::move(reps);
  return j.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  try {
    const auto j = json::parse(text);
    auto& c = m.config;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.schedule = BiopsySchedule::parse(j.at("schedule").get<std::string>());
    c.n_subjects = j.at("n_subjects").get<std::size_t>();
    c.n_replicates = j.at("n_replicates").get<std::size_t>();
    c.censoring_rate = j.at("censoring_rate").get<double>();
    c.admin_horizon = j.at("admin_horizon").get<double>();
    c.psa_interval = j.at("psa_interval").get<double>();
    c.params = parameters_from_json(j.at("params").dump());
    for (const auto& r : j.at("replicates")) {
      m.files.push_back({r.at("events").get<std::string>(), r.at("longitudinal").get<std::string>(),
                         r.at("truth").get<std::string>()});
      m.random_effects.push_back(r.at("random_effects").get<std::vector<std::array<double, 4>>>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("manifest: ") + e.what());
  }
  return m;
}

std::vector<SubjectProfile> profiles_for(const std::vector<SubjectRecord>& records, const Manifest* manifest,
                                         std::size_t replicate) {
  const std::vector<std::array<double, 4>>* u = nullptr;
  if (manifest != nullptr) {
    if (replicate >= manifest->random_effects.size()) {
      throw Error(ErrorKind::InvalidArgument, "manifest has no replicate " + std::to_string(replicate));
    }
    u = &manifest->random_effects[replicate];
    if (u->size() != records.size()) {
      throw Error(ErrorKind::Parse, "manifest random effects do not match the events rows");
    }
  }
  std::vector<SubjectProfile> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out[i].age = records[i].age;
    out[i].density = records[i].density;
    if (u != nullptr) out[i].u = (*u)[i];
  }
  return out;
}

namespace {

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json report_to_json(const MetricsReport& r) {
  json j;
  j["approach"] = std::string(to_string(r.approach));
  j["t"] = r.window.t;
  j["dt"] = r.window.dt;
  j["auc"] = nullable(r.auc);
  j["brier"] = nullable(r.brier);
  j["epce"] = nullable(r.epce);
  j["n_t"] = r.n_t;
  j["case_mass"] = r.case_mass;
  j["control_mass"] = r.control_mass;
  json d;
  d["dropped_subjects"] = r.diagnostics.dropped_subjects;
  d["degenerate_denominators"] = r.diagnostics.degenerate_denominators;
  d["epce_excluded"] = r.diagnostics.epce_excluded;
  d["epce_contributing"] = r.diagnostics.epce_contributing;
  d["notes"] = r.diagnostics.notes;
  j["diagnostics"] = std::move(d);
  return j;
}

}  // namespace

std::string reports_json(const std::vector<MetricsReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr.dump(2) + "\n";
}

std::string roc_csv(const RocCurve& curve) {
  std::string out = "one_minus_spec,sens\n";
  for (std::size_t i = 0; i < curve.sens.size(); ++i) {
    out += format_double(curve.one_minus_spec[i]) + "," + format_double(curve.sens[i]) + "\n";
  }
  return out;
}

std::string comparison_json(const ComparisonSummary& s) {
  json j;
  json table = json::array();
  for (const auto& a : s.approaches) {
    json row;
    row["approach"] = std::string(to_string(a.approach));
    row["n_auc"] = a.n_auc;
    row["mean_auc"] = a.mean_auc;
    row["sd_auc"] = a.sd_auc;
    row["rmse_auc"] = a.rmse_auc;
    row["n_brier"] = a.n_brier;
    row["mean_brier"] = a.mean_brier;
    row["sd_brier"] = a.sd_brier;
    row["rmse_brier"] = a.rmse_brier;
    table.push_back(std::move(row));
  }
  j["summary"] = std::move(table);
  if (s.epce) {
    j["epce"] = {{"n", s.epce->n},
                 {"mean_model", s.epce->mean_model},
                 {"sd_model", s.epce->sd_model},
                 {"mean_reference", s.epce->mean_reference},
                 {"sd_reference", s.epce->sd_reference},
                 {"rmse", s.epce->rmse}};
  }
  json reps = json::array();
  for (const auto& r : s.replicates) {
    json arr = json::array();
    for (const auto& m : r) arr.push_back(report_to_json(m));
    reps.push_back(std::move(arr));
  }
  j["replicates"] = std::move(reps);
  return j.dump(2) + "\n";
}

std::string comparison_csv(const ComparisonSummary& s) {
  std::string out = "approach,n,mean_auc,sd_auc,rmse_auc,mean_brier,sd_brier,rmse_brier\n";
  for (const auto& a : s.approaches) {
    out += std::string(to_string(a.approach)) + "," + std::to_string(a.n_auc) + "," + format_double(a.mean_auc) +
           "," + format_double(a.sd_auc) + "," + format_double(a.rmse_auc) + "," + format_double(a.mean_brier) +
           "," + format_double(a.sd_brier) + "," + format_double(a.rmse_brier) + "\n";
  }
  return out;
}

}  // namespace icm
