#include "headmotion/trajectory_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "headmotion/error.hpp"

namespace hm {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw DataError("cannot format number");
  return std::string(buf, end);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, const std::string& where) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw DataError(where + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  bool with_mask = false;
  if (line == "t,rx,ry,rz") {
    with_mask = false;
  } else if (line == "t,rx,ry,rz,speaking") {
    with_mask = true;
  } else {
    throw DataError(source + ": expected header 't,rx,ry,rz[,speaking]', got '" + line + "'");
  }

  std::vector<double> times;
  std::vector<Frame> frames;
  std::vector<bool> mask;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(row);
    const auto fields = split_fields(line);
    const std::size_t expected = with_mask ? 5 : 4;
    if (fields.size() != expected) {
      throw DataError(where + ": expected " + std::to_string(expected) + " columns, got " +
                      std::to_string(fields.size()));
    }
    times.push_back(parse_number(fields[0], where));
    frames.push_back(Frame{parse_number(fields[1], where), parse_number(fields[2], where),
                           parse_number(fields[3], where)});
    if (with_mask) {
      if (fields[4] == "1") {
        mask.push_back(true);
      } else if (fields[4] == "0") {
        mask.push_back(false);
      } else {
        throw DataError(where + ": speaking must be 0 or 1");
      }
    }
  }
  if (frames.empty()) throw DataError(source + ": no samples");

  double rate = kDefaultSampleRate;
  if (times.size() >= 2) {
    const double span = times.back() - times.front();
    if (!(span > 0.0)) throw DataError(source + ": time column must increase");
    rate = std::round(static_cast<double>(times.size() - 1) / span * 1e6) / 1e6;
    const double dt = 1.0 / rate;
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double step = times[i] - times[i - 1];
      if (!(step > 0.0) || std::abs(step - dt) > 0.01 * dt) {
        throw DataError(source + ": irregular time step at row " + std::to_string(i + 2));
      }
    }
  }
  std::optional<std::vector<bool>> speaking;
  if (with_mask) speaking = std::move(mask);
  return Trajectory(std::move(frames), rate, std::move(speaking));
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_trajectory_csv(in, path.string());
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << (traj.has_mask() ? "t,rx,ry,rz,speaking\n" : "t,rx,ry,rz\n");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = static_cast<double>(i) / traj.sample_rate();
    out << format_double(t);
    for (int c = 0; c < kChannels; ++c) out << ',' << format_double(traj[i][c]);
    if (traj.has_mask()) out << ',' << ((*traj.speaking())[i] ? '1' : '0');
    out << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_trajectory_csv(out, traj);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace hm
