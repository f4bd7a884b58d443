#include "skinrig/sim/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "skinrig/checksum.hpp"
#include "skinrig/errors.hpp"
#include "skinrig/format.hpp"

namespace skinrig::sim {

namespace {

constexpr std::string_view kTrailer = "#crc32 ";

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw DatasetFormatError("line " + std::to_string(line) + ": bad number '" +
                             std::string(field) + "'");
  }
  return v;
}

}  // namespace

void CalibrationDataset::append(double time, const std::vector<double>& cells, double f,
                                const Vec3& p) {
  if (static_cast<int>(cells.size()) != cell_count) {
    throw DatasetFormatError("frame has " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(cell_count));
  }
  if (!t.empty() && !(time > t.back())) throw DatasetFormatError("timestamps must increase");
  t.push_back(time);
  readings.insert(readings.end(), cells.begin(), cells.end());
  force.push_back(f);
  position.push_back(p);
}

bool operator==(const CalibrationDataset& a, const CalibrationDataset& b) {
  return a.skin_id == b.skin_id && a.frame_rate == b.frame_rate &&
         a.cell_count == b.cell_count && a.seed == b.seed && a.plan_hash == b.plan_hash &&
         a.t == b.t && a.readings == b.readings && a.force == b.force && a.position == b.position;
}

std::string serialize_dataset(const CalibrationDataset& ds) {
  nlohmann::json header{{"format", kDatasetFormat},
                        {"version", std::to_string(kDatasetMajor) + "." + std::to_string(kDatasetMinor)},
                        {"skin_id", ds.skin_id},
                        {"frame_rate", ds.frame_rate},
                        {"cell_count", ds.cell_count},
                        {"seed", ds.seed},
                        {"plan_hash", ds.plan_hash}};
  std::string out = header.dump();
  out += "\nt";
  for (int c = 0; c < ds.cell_count; ++c) out += ",C_" + std::to_string(c);
  out += ",F,Px,Py,Pz\n";
  out.reserve(out.size() + ds.frames() * (static_cast<std::size_t>(ds.cell_count) * 2 + 64));
  for (std::size_t k = 0; k < ds.frames(); ++k) {
    out += fmt_double(ds.t[k]);
    const double* r = ds.row(k);
    for (int c = 0; c < ds.cell_count; ++c) {
      out += ',';
      out += fmt_double(r[c]);
    }
    out += ',';
    out += fmt_double(ds.force[k]);
    for (int i = 0; i < 3; ++i) {
      out += ',';
      out += fmt_double(ds.position[k][i]);
    }
    out += '\n';
  }
  const std::string crc = hex32(crc32_of(out));
  out += kTrailer;
  out += crc;
  out += '\n';
  return out;
}

CalibrationDataset parse_dataset(const std::string& text) {
  // trailer first: a truncated file must fail here, before any parsing
  const auto trailer = text.rfind(kTrailer);
  if (trailer == std::string::npos || (trailer > 0 && text[trailer - 1] != '\n')) {
    throw ChecksumError("dataset has no checksum trailer (truncated?)");
  }
  std::string stored = text.substr(trailer + kTrailer.size());
  while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.pop_back();
  const std::string actual = hex32(crc32_of(std::string_view(text).substr(0, trailer)));
  if (stored != actual) {
    throw ChecksumError("dataset checksum mismatch: stored " + stored + ", computed " + actual);
  }

  std::string_view body(text.data(), trailer);
  auto next_line = [&body](std::string_view& line) {
    if (body.empty()) return false;
    const auto nl = body.find('\n');
    line = body.substr(0, nl);
    body = nl == std::string_view::npos ? std::string_view() : body.substr(nl + 1);
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw DatasetFormatError("empty dataset");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetFormatError(std::string("bad header: ") + e.what());
  }
  if (header.value("format", std::string()) != kDatasetFormat) {
    throw DatasetFormatError("not a skinrig dataset");
  }
  const std::string version = header.value("version", std::string());
  int major = -1;
  std::from_chars(version.data(), version.data() + version.size(), major);
  if (major != kDatasetMajor) {
    throw FormatVersionError("dataset version " + version + " is not supported (need " +
                             std::to_string(kDatasetMajor) + ".x)");
  }

  CalibrationDataset ds;
  try {
    ds.skin_id = header.at("skin_id").get<std::string>();
    ds.frame_rate = header.at("frame_rate").get<double>();
    ds.cell_count = header.at("cell_count").get<int>();
    ds.seed = header.at("seed").get<std::uint64_t>();
    ds.plan_hash = header.value("plan_hash", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw DatasetFormatError(std::string("bad header: ") + e.what());
  }
  if (!(ds.frame_rate > 0.0) || ds.cell_count < 0) throw DatasetFormatError("bad header values");

  if (!next_line(line)) throw DatasetFormatError("missing column line");
  const std::size_t expected = static_cast<std::size_t>(ds.cell_count) + 5;
  {
    std::size_t cols = 1;
    for (char ch : line) cols += ch == ',';
    if (cols != expected) throw DatasetFormatError("column line does not match cell_count");
  }

  std::vector<double> cells(static_cast<std::size_t>(ds.cell_count));
  std::size_t line_no = 2;
  while (next_line(line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t field = 0;
    double t = 0.0, f = 0.0;
    Vec3 p;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto token = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
      if (field >= expected) throw DatasetFormatError("line " + std::to_string(line_no) + ": too many fields");
      const double v = parse_number(token, line_no);
      if (field == 0) {
        t = v;
      } else if (field <= static_cast<std::size_t>(ds.cell_count)) {
        cells[field - 1] = v;
      } else if (field == expected - 4) {
        f = v;
      } else {
        p[static_cast<int>(field - (expected - 3))] = v;
      }
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != expected) throw DatasetFormatError("line " + std::to_string(line_no) + ": too few fields");
    ds.append(t, cells, f, p);
  }
  return ds;
}

std::string dataset_hash(const CalibrationDataset& ds) {
  std::string bytes = ds.skin_id + '\n' + fmt_double(ds.frame_rate) + '\n' +
                      std::to_string(ds.cell_count) + '\n' + std::to_string(ds.seed) + '\n' +
                      ds.plan_hash + '\n';
  auto add = [&bytes](const void* p, std::size_t n) {
    bytes.append(static_cast<const char*>(p), n);
  };
  add(ds.t.data(), ds.t.size() * sizeof(double));
  add(ds.readings.data(), ds.readings.size() * sizeof(double));
  add(ds.force.data(), ds.force.size() * sizeof(double));
  for (const auto& p : ds.position) add(p.data(), 3 * sizeof(double));
  return hex32(crc32_of(bytes));
}

void save_dataset(const CalibrationDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetFormatError("cannot write " + path.string());
  out << serialize_dataset(ds);
}

CalibrationDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetFormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str());
}

}  // namespace skinrig::sim
