#include "taxaug/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "taxaug/error.hpp"
#include "taxaug/rng.hpp"

namespace taxaug {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::original: return "original";
    case Provenance::rotated: return "rotated";
    case Provenance::gan_ingested: return "gan";
    case Provenance::smote_synthetic: return "smote";
  }
  return "?";
}

DatasetManifest DatasetManifest::from_records(std::vector<SampleRecord> records) {
  DatasetManifest m;
  std::map<std::string, int> ids;
  for (auto& r : records) {
    if (r.sample_id.empty()) throw Error(ErrorCode::parse, "empty sample_id");
    if (r.label.species_name.empty())
      throw Error(ErrorCode::parse, "empty species_name for sample '" + r.sample_id + "'");
    auto [it, fresh] = ids.try_emplace(r.label.species_name, static_cast<int>(ids.size()));
    if (fresh) m.species_names_.push_back(r.label.species_name);
    r.label.species_id = it->second;
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!m.index_.emplace(records[i].sample_id, i).second)
      throw Error(ErrorCode::duplicate, "duplicate sample_id '" + records[i].sample_id + "'");
  }
  m.class_counts_.assign(m.species_names_.size(), 0);
  std::vector<std::size_t> originals(m.species_names_.size(), 0);
  for (const auto& r : records) {
    ++m.class_counts_[r.label.species_id];
    if (r.provenance == Provenance::original) ++originals[r.label.species_id];
    if (r.provenance == Provenance::rotated) {
      auto p = m.index_.find(r.parent_id);
      if (p == m.index_.end())
        throw Error(ErrorCode::parse, "rotated record '" + r.sample_id + "' has unknown parent '" +
                                          r.parent_id + "'");
      const auto& parent = records[p->second];
      if (parent.provenance != Provenance::original)
        throw Error(ErrorCode::parse, "rotated record '" + r.sample_id + "' must have an original parent");
      if (parent.label.species_id != r.label.species_id)
        throw Error(ErrorCode::parse, "rotated record '" + r.sample_id + "' changes species");
    }
  }
  for (std::size_t s = 0; s < originals.size(); ++s) {
    if (originals[s] == 0)
      throw Error(ErrorCode::unusable_dataset,
                  "species '" + m.species_names_[s] + "' has no original samples");
  }
  m.records_ = std::move(records);
  return m;
}

std::vector<std::size_t> DatasetManifest::original_counts() const {
  std::vector<std::size_t> out(species_names_.size(), 0);
  for (const auto& r : records_)
    if (r.provenance == Provenance::original) ++out[r.label.species_id];
  return out;
}

std::size_t DatasetManifest::count(Provenance p) const {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [p](const auto& r) { return r.provenance == p; }));
}

std::optional<std::size_t> DatasetManifest::index_of(const std::string& sample_id) const {
  auto it = index_.find(sample_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double parse_angle(const std::string& s, std::size_t line_no) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": bad angle_deg '" + s + "'");
  return v;
}

constexpr const char* kHeader = "sample_id,species_name,kind,path,parent_id,angle_deg";

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open manifest '" + path.string() + "'");
  const auto base = path.parent_path();

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<SampleRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    if (!have_header) {
      if (line != kHeader)
        throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected header '" +
                                          kHeader + "'");
      have_header = true;
      continue;
    }
    auto f = split_csv_line(line, line_no);
    if (f.size() != 6)
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected 6 fields, got " +
                                        std::to_string(f.size()));
    SampleRecord r;
    r.sample_id = f[0];
    r.label.species_name = f[1];
    if (r.sample_id.empty() || r.label.species_name.empty())
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": empty sample_id or species_name");
    const std::string& kind = f[2];
    if (kind == "original") {
      r.provenance = Provenance::original;
    } else if (kind == "rotated") {
      r.provenance = Provenance::rotated;
      r.parent_id = f[4];
      if (r.parent_id.empty())
        throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": rotated row needs parent_id");
      r.angle_deg = parse_angle(f[5], line_no);
    } else if (kind == "gan") {
      r.provenance = Provenance::gan_ingested;
    } else {
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
    }
    std::filesystem::path payload = f[3];
    if (payload.empty())
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": empty path");
    if (payload.is_relative()) payload = base / payload;
    r.payload = payload.lexically_normal().string();
    records.push_back(std::move(r));
  }
  if (!have_header) throw Error(ErrorCode::parse, "line 1: empty manifest");
  if (records.empty()) throw Error(ErrorCode::parse, "manifest has a header but no rows");
  return DatasetManifest::from_records(std::move(records));
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write manifest '" + path.string() + "'");
  out << kHeader << '\n';
  for (const auto& r : m.records()) {
    out << csv_field(r.sample_id) << ',' << csv_field(r.label.species_name) << ','
        << to_string(r.provenance) << ',' << csv_field(r.payload) << ',';
    if (r.provenance == Provenance::rotated) {
      std::ostringstream angle;
      angle << r.angle_deg;
      out << csv_field(r.parent_id) << ',' << angle.str();
    } else {
      out << ',';
    }
    out << '\n';
  }
}

DatasetManifest filter_min_count(const DatasetManifest& m, std::size_t min_per_class) {
  if (min_per_class < 1) throw Error(ErrorCode::range, "min_per_class must be >= 1");
  const auto originals = m.original_counts();
  std::vector<SampleRecord> kept;
  std::set<int> species;
  for (const auto& r : m.records()) {
    if (originals[r.label.species_id] >= min_per_class) {
      kept.push_back(r);
      species.insert(r.label.species_id);
    }
  }
  if (species.size() < 2)
    throw Error(ErrorCode::unusable_dataset,
                "fewer than 2 species keep >= " + std::to_string(min_per_class) + " original samples");
  return DatasetManifest::from_records(std::move(kept));
}

DatasetManifest select(const DatasetManifest& m, bool keep_rotated, bool keep_gan) {
  std::vector<SampleRecord> kept;
  for (const auto& r : m.records()) {
    if (r.provenance == Provenance::rotated && !keep_rotated) continue;
    if (r.provenance == Provenance::gan_ingested && !keep_gan) continue;
    kept.push_back(r);
  }
  return DatasetManifest::from_records(std::move(kept));
}

FoldPlan plan_folds(const DatasetManifest& m, int repeats, int k, std::uint64_t seed,
                    bool gan_in_folds) {
  if (repeats < 1) throw Error(ErrorCode::range, "repeats must be >= 1");
  if (k < 2) throw Error(ErrorCode::range, "k must be >= 2");

  const std::size_t S = m.species_count();
  std::vector<std::vector<std::size_t>> eligible(S);
  std::vector<std::size_t> originals(S, 0);
  for (std::size_t i = 0; i < m.records().size(); ++i) {
    const auto& r = m.records()[i];
    if (r.provenance == Provenance::original) ++originals[r.label.species_id];
    if (r.provenance == Provenance::original ||
        (gan_in_folds && r.provenance == Provenance::gan_ingested))
      eligible[r.label.species_id].push_back(i);
  }
  for (std::size_t s = 0; s < S; ++s) {
    if (originals[s] < static_cast<std::size_t>(k))
      throw Error(ErrorCode::stratification,
                  "species '" + m.species_names()[s] + "' has " + std::to_string(originals[s]) +
                      " original samples, fewer than k=" + std::to_string(k));
  }

  FoldPlan plan;
  plan.repeats = repeats;
  plan.k = k;
  plan.seed = seed;
  plan.gan_in_folds = gan_in_folds;
  plan.assignments.assign(repeats, std::vector<int>(m.records().size(), -1));
  for (int rep = 0; rep < repeats; ++rep) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(rep)}));
    std::size_t offset = 0;
    for (std::size_t s = 0; s < S; ++s) {
      auto members = eligible[s];
      rng.shuffle(members);
      for (std::size_t j = 0; j < members.size(); ++j)
        plan.assignments[rep][members[j]] = static_cast<int>((offset + j) % k);
      offset = (offset + members.size()) % k;
    }
  }
  return plan;
}

Split make_split(const DatasetManifest& m, const FoldPlan& plan, int repeat, int fold) {
  if (repeat < 0 || repeat >= plan.repeats || fold < 0 || fold >= plan.k)
    throw Error(ErrorCode::range, "split index out of range");
  const auto& assign = plan.assignments.at(repeat);
  if (assign.size() != m.records().size())
    throw Error(ErrorCode::shape, "fold plan does not match manifest");
  Split split;
  split.repeat = repeat;
  split.fold = fold;
  for (std::size_t i = 0; i < m.records().size(); ++i) {
    const auto& r = m.records()[i];
    int f = assign[i];
    if (r.provenance == Provenance::rotated) f = assign[*m.index_of(r.parent_id)];
    if (f == fold) {
      if (r.provenance == Provenance::original) split.test.push_back(i);
      // GAN rows in the test fold are held out but never predicted.
    } else {
      split.train.push_back(i);
    }
  }
  return split;
}

}  // namespace taxaug
