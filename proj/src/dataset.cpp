#include "cubecolor/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cubecolor/errors.hpp"
#include "cubecolor/image_io.hpp"
#include "cubecolor/random.hpp"

namespace cubecolor {

namespace {

constexpr int kManifestFields = 23;
constexpr int kCsvColumns = 25;

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string source_text(const CubeStateRecord& r) {
  return r.source == RecordSource::Real ? "real" : "synthetic:" + std::to_string(r.seed);
}

std::string csv_header() {
  std::string out = "state_id,source,face,position,circumstance,label,h,s,v";
  for (int i = 0; i < 16; ++i) out += ",c" + std::to_string(i);
  return out;
}

double wrap_hue(double h) {
  h = std::fmod(h, 360.0);
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h = 0.0;
  return h;
}

}  // namespace

bool is_circumstance(char tag) { return tag >= 'A' && tag <= 'E'; }

std::vector<AnnotationRecord> load_manifest(const std::string& path, bool check_images) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  const auto base = std::filesystem::path(path).parent_path();

  std::vector<AnnotationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split_ws(line);
    if (fields.empty() || fields[0].starts_with('#')) continue;
    if (fields.size() != kManifestFields) {
      throw ParseError(path, lineno, "record",
                       "expected " + std::to_string(kManifestFields) + " fields, got " +
                           std::to_string(fields.size()));
    }
    AnnotationRecord rec;
    rec.line = lineno;
    const std::filesystem::path image(fields[0]);
    rec.image_path = (image.is_absolute() ? image : base / image).string();
    rec.group_id = fields[1];
    if (rec.group_id.find(',') != std::string::npos) {
      throw ParseError(path, lineno, "group", "group id must not contain ','");
    }
    if (fields[2].size() != 1 || !is_circumstance(fields[2][0])) {
      throw InvalidTag(path, lineno, "tag", "circumstance must be one of A-E, got '" + fields[2] + "'");
    }
    rec.circumstance = fields[2][0];

    for (int q = 0; q < 2; ++q) {
      for (int c = 0; c < 4; ++c) {
        const auto xi = static_cast<std::size_t>(3 + 8 * q + 2 * c);
        auto& pt = rec.quads[static_cast<std::size_t>(q)][static_cast<std::size_t>(c)];
        if (!parse_number(fields[xi], pt.x) || !parse_number(fields[xi + 1], pt.y)) {
          throw ParseError(path, lineno, "quad" + std::to_string(q + 1),
                           "corner " + std::to_string(c + 1) + " is not a number");
        }
      }
      try {
        FaceQuad check(rec.quads[static_cast<std::size_t>(q)]);
      } catch (const DegenerateQuad& e) {
        throw ParseError(path, lineno, "quad" + std::to_string(q + 1), e.what());
      }
    }
    for (int q = 0; q < 2; ++q) {
      const auto face = parse_face(fields[static_cast<std::size_t>(19 + q)]);
      if (!face) {
        throw ParseError(path, lineno, "face" + std::to_string(q + 1),
                         "expected one of U R F D L B");
      }
      rec.faces[static_cast<std::size_t>(q)] = *face;
      const auto& labels = fields[static_cast<std::size_t>(21 + q)];
      if (labels.size() != kStickersPerFace) {
        throw ParseError(path, lineno, "labels" + std::to_string(q + 1),
                         "expected 9 color letters");
      }
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto color = parse_color(std::string_view(&labels[i], 1));
        if (!color) {
          throw ParseError(path, lineno, "labels" + std::to_string(q + 1),
                           std::string("unknown color letter '") + labels[i] + "'");
        }
        rec.labels[static_cast<std::size_t>(q)][i] = *color;
      }
    }
    if (rec.faces[0] == rec.faces[1]) {
      throw ParseError(path, lineno, "face2", "both quads name the same face");
    }
    if (check_images) {
      if (!std::filesystem::exists(rec.image_path)) {
        throw MissingImage(path + ":" + std::to_string(lineno) + ": image not found: " +
                           rec.image_path);
      }
      read_image(rec.image_path);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::vector<AnnotationRecord>> group_annotations(
    const std::vector<AnnotationRecord>& records) {
  std::vector<std::vector<AnnotationRecord>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    auto [it, inserted] = index.emplace(r.group_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(r);
  }
  return groups;
}

CenterColors CubeStateRecord::centers() const {
  std::array<CubeColor, kFaces> c;
  for (int f = 0; f < kFaces; ++f) {
    c[static_cast<std::size_t>(f)] = colors[static_cast<std::size_t>(center_index(f))];
  }
  return CenterColors(c);
}

void validate_record(const CubeStateRecord& record) {
  std::array<int, kFaces> count{};
  for (auto c : record.colors) {
    const int i = color_index(c);
    if (i < 0 || i >= kFaces) throw InvalidRecord(record.state_id + ": invalid color");
    ++count[static_cast<std::size_t>(i)];
  }
  for (auto c : kAllColors) {
    if (count[static_cast<std::size_t>(color_index(c))] != kStickersPerFace) {
      throw InvalidRecord(record.state_id + ": color " + std::string(color_name(c)) + " appears " +
                          std::to_string(count[static_cast<std::size_t>(color_index(c))]) +
                          " times, expected 9");
    }
  }
  try {
    (void)record.centers();
  } catch (const DimensionError&) {
    throw InvalidRecord(record.state_id + ": center stickers must have six distinct colors");
  }
  if (!is_circumstance(record.circumstance)) {
    throw InvalidRecord(record.state_id + ": circumstance must be one of A-E");
  }
}

CubeStateRecord extract_record(const std::vector<AnnotationRecord>& group,
                               const FeatureConfig& config) {
  const std::string id = group.empty() ? std::string("<empty>") : group.front().group_id;
  if (group.size() != 3) {
    throw IncompleteGroup("group " + id + " has " + std::to_string(group.size()) +
                          " images, expected 3");
  }
  std::array<bool, kFaces> seen{};
  for (const auto& rec : group) {
    for (int f : rec.faces) {
      if (seen[static_cast<std::size_t>(f)]) {
        throw DuplicateFace("group " + id + " shows face " + kFaceNames[static_cast<std::size_t>(f)] +
                            " more than once");
      }
      seen[static_cast<std::size_t>(f)] = true;
    }
    if (rec.circumstance != group.front().circumstance) {
      throw InvalidRecord("group " + id + " mixes circumstance tags");
    }
  }

  CubeStateRecord out;
  out.state_id = id;
  out.circumstance = group.front().circumstance;
  out.source = RecordSource::Real;
  for (const auto& rec : group) {
    const RgbImage image = read_image(rec.image_path);
    for (std::size_t q = 0; q < 2; ++q) {
      const RectifiedFace face = rectify_face(image, FaceQuad(rec.quads[q]), config.rectify_size);
      const auto blocks = split_blocks(face, config.margin);
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto at = static_cast<std::size_t>(rec.faces[q] * kStickersPerFace) + b;
        out.features3[at] = feature_3dhsv(blocks[b], config.bins);
        out.features16[at] = feature_16dhsv(blocks[b], config.partition);
        out.colors[at] = rec.labels[q][b];
      }
    }
  }
  validate_record(out);
  return out;
}

void DriftConfig::validate() const {
  auto bad_range = [](const Interval& iv) { return !(iv.lo <= iv.hi); };
  if (bad_range(hue_shift) || bad_range(saturation_scale) || bad_range(value_scale)) {
    throw DimensionError("drift ranges must satisfy lo <= hi");
  }
  if (!(saturation_scale.lo > 0.0 && value_scale.lo > 0.0)) {
    throw DimensionError("drift scales must be positive");
  }
  if (!(noise_sigma.h >= 0.0 && noise_sigma.s >= 0.0 && noise_sigma.v >= 0.0)) {
    throw DimensionError("noise sigma must be non-negative");
  }
  for (const auto& b : base_colors) {
    if (!(b.h >= 0.0 && b.h < 360.0 && b.s >= 0.0 && b.s <= 1.0 && b.v >= 0.0 && b.v <= 1.0)) {
      throw DimensionError("base colors must lie within HSV ranges");
    }
  }
  if (!is_circumstance(circumstance)) throw DimensionError("circumstance must be one of A-E");
  if (id_prefix.find(',') != std::string::npos) {
    throw DimensionError("state id prefix must not contain ','");
  }
}

DriftConfig undrifted_config() {
  DriftConfig c;
  c.hue_shift = {0.0, 0.0};
  c.saturation_scale = {1.0, 1.0};
  c.value_scale = {1.0, 1.0};
  return c;
}

CubeStateRecord generate_synthetic_state(const DriftConfig& config, int index,
                                         const UnevenPartition& partition) {
  config.validate();
  if (index < 0) throw DimensionError("state index must be non-negative");
  const std::uint64_t seed = mix_seed(config.seed, static_cast<std::uint64_t>(index));
  Rng rng(seed);

  CubeStateRecord out;
  char id[32];
  std::snprintf(id, sizeof id, "%04d", index);
  out.state_id = config.id_prefix + id;
  out.circumstance = config.circumstance;
  out.source = RecordSource::Synthetic;
  out.seed = seed;

  const CenterColors centers;
  std::vector<CubeColor> pool;
  for (auto c : kAllColors) pool.insert(pool.end(), kStickersPerFace - 1, c);
  for (std::size_t i = pool.size() - 1; i > 0; --i) {
    std::swap(pool[i], pool[static_cast<std::size_t>(rng.below(i + 1))]);
  }
  std::size_t next = 0;
  for (int i = 0; i < kStickers; ++i) {
    out.colors[static_cast<std::size_t>(i)] =
        i % kStickersPerFace == 4 ? centers[i / kStickersPerFace] : pool[next++];
  }

  const double shift = rng.uniform(config.hue_shift.lo, config.hue_shift.hi);
  const double s_scale = rng.uniform(config.saturation_scale.lo, config.saturation_scale.hi);
  const double v_scale = rng.uniform(config.value_scale.lo, config.value_scale.hi);
  for (std::size_t i = 0; i < out.colors.size(); ++i) {
    const HsvPixel& base = config.base_colors[static_cast<std::size_t>(color_index(out.colors[i]))];
    const HsvPixel drifted{
        wrap_hue(base.h + shift + rng.normal(0.0, config.noise_sigma.h)),
        std::clamp(base.s * s_scale + rng.normal(0.0, config.noise_sigma.s), 0.0, 1.0),
        std::clamp(base.v * v_scale + rng.normal(0.0, config.noise_sigma.v), 0.0, 1.0)};
    out.features3[i] = {drifted.h, drifted.s, drifted.v};
    // The histogram cell follows the sticker's drifted color; the noise term
    // only perturbs the mode estimate.
    const HsvPixel color{wrap_hue(base.h + shift), std::clamp(base.s * s_scale, 0.0, 1.0),
                         std::clamp(base.v * v_scale, 0.0, 1.0)};
    out.features16[i].fill(0.0);
    out.features16[i][partition.cell_of(color)] = 1.0;
  }
  return out;
}

std::vector<CubeStateRecord> generate_synthetic(const DriftConfig& config, int n_states,
                                                const UnevenPartition& partition) {
  config.validate();
  if (n_states < 0) throw DimensionError("state count must be non-negative");
  std::vector<CubeStateRecord> out;
  out.reserve(static_cast<std::size_t>(n_states));
  for (int i = 0; i < n_states; ++i) out.push_back(generate_synthetic_state(config, i, partition));
  return out;
}

std::string features_to_csv(const std::vector<CubeStateRecord>& records) {
  std::string out = csv_header() + "\n";
  for (const auto& r : records) {
    const std::string prefix = r.state_id + "," + source_text(r) + ",";
    for (int i = 0; i < kStickers; ++i) {
      const auto k = static_cast<std::size_t>(i);
      out += prefix;
      out += kFaceNames[static_cast<std::size_t>(i / kStickersPerFace)];
      out += "," + std::to_string(i % kStickersPerFace) + ",";
      out += r.circumstance;
      out += ",";
      out += color_name(r.colors[k]);
      out += "," + format_real(r.features3[k].h) + "," + format_real(r.features3[k].s) + "," +
             format_real(r.features3[k].v);
      for (double c : r.features16[k]) out += "," + format_real(c);
      out += '\n';
    }
  }
  return out;
}

void export_features(const std::vector<CubeStateRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write feature file " + path);
  out << features_to_csv(records);
  if (!out) throw IoError("failed writing feature file " + path);
}

std::vector<CubeStateRecord> features_from_csv(const std::string& text,
                                               const std::string& source_name) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(source_name, 1, "header", "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) {
    throw ParseError(source_name, 1, "header", "unexpected column names");
  }

  std::vector<CubeStateRecord> out;
  std::vector<std::array<bool, kStickers>> filled;
  std::map<std::string, std::size_t> index;
  static const std::array<std::string, kCsvColumns> names = [] {
    std::array<std::string, kCsvColumns> n{"state_id", "source", "face", "position",
                                           "circumstance", "label", "h", "s", "v"};
    for (int i = 0; i < 16; ++i) n[static_cast<std::size_t>(9 + i)] = "c" + std::to_string(i);
    return n;
  }();

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != kCsvColumns) {
      throw ParseError(source_name, lineno, "row",
                       "expected " + std::to_string(kCsvColumns) + " columns, got " +
                           std::to_string(f.size()));
    }
    auto fail = [&](std::size_t col, const std::string& why) {
      throw ParseError(source_name, lineno, names[col], why);
    };

    auto [it, inserted] = index.emplace(f[0], out.size());
    if (inserted) {
      CubeStateRecord r;
      r.state_id = f[0];
      if (f[1] == "real") {
        r.source = RecordSource::Real;
      } else if (f[1].starts_with("synthetic:") && parse_number(f[1].substr(10), r.seed)) {
        r.source = RecordSource::Synthetic;
      } else {
        fail(1, "expected 'real' or 'synthetic:<seed>'");
      }
      if (f[4].size() != 1 || !is_circumstance(f[4][0])) fail(4, "circumstance must be one of A-E");
      r.circumstance = f[4][0];
      out.push_back(std::move(r));
      filled.emplace_back();
    }
    auto& rec = out[it->second];
    if (source_text(rec) != f[1]) fail(1, "differs from earlier rows of the same state");
    if (f[4].size() != 1 || f[4][0] != rec.circumstance) {
      fail(4, "differs from earlier rows of the same state");
    }

    const auto face = parse_face(f[2]);
    if (!face) fail(2, "expected one of U R F D L B");
    int position = 0;
    if (!parse_number(f[3], position) || position < 0 || position >= kStickersPerFace) {
      fail(3, "expected an integer in 0..8");
    }
    const auto color = parse_color(f[5]);
    if (!color || f[5].size() == 1) fail(5, "expected a color name");
    const auto k = static_cast<std::size_t>(*face * kStickersPerFace + position);
    if (filled[it->second][k]) fail(3, "sticker listed twice for state " + rec.state_id);
    filled[it->second][k] = true;
    rec.colors[k] = *color;

    std::array<double, 19> v{};
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (!parse_number(f[6 + c], v[c]) || !std::isfinite(v[c])) fail(6 + c, "not a finite number");
    }
    rec.features3[k] = {v[0], v[1], v[2]};
    for (std::size_t c = 0; c < 16; ++c) rec.features16[k][c] = v[3 + c];
  }

  for (std::size_t i = 0; i < out.size(); ++i) {
    for (bool b : filled[i]) {
      if (!b) throw InvalidRecord(source_name + ": state " + out[i].state_id + " has fewer than 54 stickers");
    }
    validate_record(out[i]);
  }
  return out;
}

std::vector<CubeStateRecord> import_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return features_from_csv(ss.str(), path);
}

}  // namespace cubecolor
